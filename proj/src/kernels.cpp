#include "steam/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include <omp.h>

namespace steam {

CoalitionTable::CoalitionTable(const TeamTraitMatrix &traits)
    : robots_(traits.robots()), traits_(traits.traits()) {
  if (robots_ > 30) throw std::length_error("coalition table limited to 30 robots");
  low_bits_ = robots_ / 2;
  low_mask_ = (std::uint64_t{1} << low_bits_) - 1;
  const int high_bits = robots_ - low_bits_;

  auto fill = [&](std::vector<double> &table, int bits, int offset) {
    const std::uint64_t count = std::uint64_t{1} << bits;
    table.assign(count * traits_, 0.0);
    for (std::uint64_t mask = 0; mask < count; ++mask)
      for (int b = 0; b < bits; ++b)
        if ((mask >> b) & 1u)
          for (int u = 0; u < traits_; ++u) table[mask * traits_ + u] += traits(offset + b, u);
  };
  fill(low_, low_bits_, 0);
  fill(high_, high_bits, low_bits_);
}

Eigen::VectorXd CoalitionTable::sum(std::uint64_t mask) const {
  Eigen::VectorXd out(traits_);
  sum(mask, out.data());
  return out;
}

bool coalition_before(std::uint64_t a, std::uint64_t b) {
  const int ca = std::popcount(a);
  const int cb = std::popcount(b);
  if (ca != cb) return ca < cb;
  const std::uint64_t diff = a ^ b;
  if (!diff) return false;
  // The first differing robot decides; a 0 there is the smaller row.
  return (a & (diff & (~diff + 1))) == 0;
}

namespace {

bool better(const RowProjection &a, const RowProjection &b) {
  if (a.residual != b.residual) return a.residual < b.residual;
  return coalition_before(a.coalition, b.coalition);
}

} // namespace

RowProjection project_row(const CoalitionTable &table, std::span<const double> target) {
  const int dims = table.traits();
  if (static_cast<int>(target.size()) != dims) throw std::invalid_argument("target has the wrong length");
  const std::int64_t count = static_cast<std::int64_t>(table.coalitions());
  RowProjection best{0, std::numeric_limits<double>::infinity()};

#pragma omp parallel if (count >= 4096)
  {
    RowProjection local{0, std::numeric_limits<double>::infinity()};
    std::vector<double> y(dims);
#pragma omp for schedule(static) nowait
    for (std::int64_t mask = 0; mask < count; ++mask) {
      table.sum(static_cast<std::uint64_t>(mask), y.data());
      double r = 0.0;
      for (int u = 0; u < dims; ++u) {
        const double d = target[u] - y[u];
        r += d * d;
      }
      RowProjection candidate{static_cast<std::uint64_t>(mask), r};
      if (better(candidate, local)) local = candidate;
    }
#pragma omp critical
    if (better(local, best)) best = local;
  }
  return best;
}

RowProjection project_row_serial(const TeamTraitMatrix &traits, std::span<const double> target) {
  const int n = traits.robots();
  const int dims = traits.traits();
  if (static_cast<int>(target.size()) != dims) throw std::invalid_argument("target has the wrong length");
  RowProjection best{0, std::numeric_limits<double>::infinity()};
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double r = 0.0;
    for (int u = 0; u < dims; ++u) {
      double y = 0.0;
      for (int i = 0; i < n; ++i)
        if ((mask >> i) & 1u) y += traits(i, u);
      const double d = target[u] - y;
      r += d * d;
    }
    RowProjection candidate{mask, r};
    if (better(candidate, best)) best = candidate;
  }
  return best;
}

void score_points(const GaussianProcess &gp, const Eigen::MatrixXd &points, double beta,
                  std::span<double> out) {
  const long rows = static_cast<long>(points.rows());
#pragma omp parallel for schedule(static) if (rows >= 64)
  for (long i = 0; i < rows; ++i) {
    const Eigen::VectorXd p = points.row(i).transpose();
    out[i] = ucb(gp, p, beta);
  }
}

void score_points_serial(const GaussianProcess &gp, const Eigen::MatrixXd &points, double beta,
                         std::span<double> out) {
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const Eigen::VectorXd p = points.row(i).transpose();
    out[i] = ucb(gp, p, beta);
  }
}

void score_coalitions(const GaussianProcess &gp, const CoalitionTable &table, double beta,
                      std::span<double> out) {
  const std::int64_t count = static_cast<std::int64_t>(table.coalitions());
#pragma omp parallel if (count >= 64)
  {
    Eigen::VectorXd y(table.traits());
#pragma omp for schedule(static)
    for (std::int64_t mask = 0; mask < count; ++mask) {
      table.sum(static_cast<std::uint64_t>(mask), y.data());
      out[mask] = ucb(gp, y, beta);
    }
  }
}

void score_coalitions_serial(const GaussianProcess &gp, const TeamTraitMatrix &traits,
                             double beta, std::span<double> out) {
  const std::uint64_t count = std::uint64_t{1} << traits.robots();
  for (std::uint64_t mask = 0; mask < count; ++mask)
    out[mask] = ucb(gp, coalition_traits(mask, traits), beta);
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

int kernel_threads() { return omp_get_max_threads(); }

void configure_threads_from_env() {
  if (const char *env = std::getenv("STEAMKIT_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) omp_set_num_threads(std::min(cap, omp_get_max_threads()));
  }
}

} // namespace steam
