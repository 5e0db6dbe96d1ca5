#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version and a plain
// serial reference with the same contract; tests check they agree and
// bench/kernel_bench times them side by side.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "steam/gp.hpp"
#include "steam/types.hpp"

namespace steam {

/// Trait sums for every coalition of a team, split into two half-tables so
/// that sum(mask) = low[mask & low_mask] + high[mask >> low_bits]. Every
/// coalition sum is therefore computed by the same two additions regardless
/// of how the enumeration is chunked across threads.
class CoalitionTable {
public:
  explicit CoalitionTable(const TeamTraitMatrix &traits);

  int robots() const { return robots_; }
  int traits() const { return traits_; }
  std::uint64_t coalitions() const { return std::uint64_t{1} << robots_; }

  /// Writes the U trait sums of `mask` into `out`.
  void sum(std::uint64_t mask, double *out) const {
    const double *lo = &low_[(mask & low_mask_) * traits_];
    const double *hi = &high_[(mask >> low_bits_) * traits_];
    for (int u = 0; u < traits_; ++u) out[u] = lo[u] + hi[u];
  }
  Eigen::VectorXd sum(std::uint64_t mask) const;

private:
  int robots_ = 0;
  int traits_ = 0;
  int low_bits_ = 0;
  std::uint64_t low_mask_ = 0;
  std::vector<double> low_;
  std::vector<double> high_;
};

/// Total order used to break ties between coalitions: fewer robots first,
/// then the lexicographically smaller 0/1 row (robot 0 is the first letter).
bool coalition_before(std::uint64_t a, std::uint64_t b);

struct RowProjection {
  std::uint64_t coalition = 0;
  double residual = 0.0; // squared Euclidean distance
};

/// Nearest coalition sum to `target` by exhaustive enumeration.
RowProjection project_row(const CoalitionTable &table, std::span<const double> target);
/// Serial reference: sums each coalition robot by robot from Q directly.
RowProjection project_row_serial(const TeamTraitMatrix &traits, std::span<const double> target);

/// UCB of each row of `points`.
void score_points(const GaussianProcess &gp, const Eigen::MatrixXd &points, double beta,
                  std::span<double> out);
void score_points_serial(const GaussianProcess &gp, const Eigen::MatrixXd &points, double beta,
                         std::span<double> out);

/// UCB of every coalition sum, indexed by coalition mask.
void score_coalitions(const GaussianProcess &gp, const CoalitionTable &table, double beta,
                      std::span<double> out);
void score_coalitions_serial(const GaussianProcess &gp, const TeamTraitMatrix &traits,
                             double beta, std::span<double> out);

/// Index of the maximum; the lowest index wins ties.
std::size_t argmax(std::span<const double> values);

/// Threads used by the parallel kernels (STEAMKIT_THREADS caps it).
int kernel_threads();
/// Applies STEAMKIT_THREADS to the OpenMP runtime; call once at startup.
void configure_threads_from_env();

} // namespace steam
