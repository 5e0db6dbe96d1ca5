#pragma once

// Slow, independent reference computations used by the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <vector>

#include "steam/gp.hpp"
#include "steam/motion.hpp"
#include "steam/scheduler.hpp"
#include "steam/types.hpp"

namespace oracle {

using steam::Cell;

// Plain Dijkstra on the 4-connected grid, unit step cost.
inline std::optional<int> grid_distance(const steam::WorldGrid &w, Cell from, Cell to) {
  const int inf = std::numeric_limits<int>::max();
  std::vector<int> dist(w.cell_count(), inf);
  using Item = std::pair<int, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  dist[w.index(from)] = 0;
  q.push({0, w.index(from)});
  while (!q.empty()) {
    auto [d, i] = q.top();
    q.pop();
    if (d > dist[i]) continue;
    const Cell c = w.cell(i);
    const Cell next[4] = {{c.x + 1, c.y}, {c.x - 1, c.y}, {c.x, c.y + 1}, {c.x, c.y - 1}};
    for (Cell n : next) {
      if (!w.free(n)) continue;
      if (d + 1 < dist[w.index(n)]) {
        dist[w.index(n)] = d + 1;
        q.push({d + 1, w.index(n)});
      }
    }
  }
  if (dist[w.index(to)] == inf) return std::nullopt;
  return dist[w.index(to)];
}

// Makespan of one full orientation of the mutex pairs, via a topological-order
// DP over every precedence edge. nullopt when the orientation is cyclic.
inline std::optional<double> orientation_makespan(const steam::SchedulingInstance &inst,
                                                  std::uint64_t bits) {
  const int n = inst.size();
  std::vector<std::vector<int>> out(n);
  std::vector<int> indeg(n, 0);
  auto add = [&](int i, int j) {
    out[i].push_back(j);
    ++indeg[j];
  };
  for (auto [i, j] : inst.precedence) add(i, j);
  for (std::size_t k = 0; k < inst.mutex.size(); ++k) {
    auto [i, j] = inst.mutex[k];
    if ((bits >> k) & 1u) add(i, j);
    else add(j, i);
  }
  std::vector<int> order;
  std::vector<int> ready;
  for (int i = 0; i < n; ++i)
    if (!indeg[i]) ready.push_back(i);
  while (!ready.empty()) {
    const int i = ready.back();
    ready.pop_back();
    order.push_back(i);
    for (int j : out[i])
      if (--indeg[j] == 0) ready.push_back(j);
  }
  if (static_cast<int>(order.size()) != n) return std::nullopt;
  std::vector<double> s = inst.initial_travel;
  for (int i : order)
    for (int j : out[i]) s[j] = std::max(s[j], s[i] + inst.durations[i] + inst.transition(i, j));
  double c = 0.0;
  for (int i = 0; i < n; ++i) c = std::max(c, s[i] + inst.durations[i]);
  return c;
}

// Minimum makespan over all 2^K orientations.
inline std::optional<double> exhaustive_makespan(const steam::SchedulingInstance &inst) {
  std::optional<double> best;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << inst.mutex.size()); ++bits)
    if (auto c = orientation_makespan(inst, bits); c && (!best || *c < *best)) best = c;
  if (inst.size() == 0) return 0.0;
  return best;
}

// Dense Gaussian elimination with partial pivoting: returns A^-1 b.
inline std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (int r = n - 1; r >= 0; --r) {
    double v = b[r];
    for (int c = r + 1; c < n; ++c) v -= a[r][c] * x[c];
    x[r] = v / a[r][r];
  }
  return x;
}

struct GpMoments {
  double mean;
  double variance;
};

// Closed-form GP posterior from the Gram matrix, no factorization reuse.
inline GpMoments gp_posterior(const std::vector<std::vector<double>> &xs, const std::vector<double> &ys,
                              double ell, double sf2, double sn2, const std::vector<double> &x) {
  auto k = [&](const std::vector<double> &a, const std::vector<double> &b) {
    double d2 = 0.0;
    for (std::size_t u = 0; u < a.size(); ++u) d2 += (a[u] - b[u]) * (a[u] - b[u]);
    return sf2 * std::exp(-d2 / (2.0 * ell * ell));
  };
  const std::size_t n = xs.size();
  if (n == 0) return {0.0, sf2};
  std::vector<std::vector<double>> gram(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) gram[i][j] = k(xs[i], xs[j]) + (i == j ? sn2 : 0.0);
  std::vector<double> kx(n);
  for (std::size_t i = 0; i < n; ++i) kx[i] = k(xs[i], x);
  const std::vector<double> alpha = solve_linear(gram, ys);
  const std::vector<double> v = solve_linear(gram, kx);
  double mean = 0.0, reduce = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean += kx[i] * alpha[i];
    reduce += kx[i] * v[i];
  }
  return {mean, sf2 - reduce};
}

// min over coalitions of |target - sum of member rows|^2, summing directly.
inline double best_residual(const Eigen::MatrixXd &q, const std::vector<double> &target) {
  const int n = static_cast<int>(q.rows());
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double r = 0.0;
    for (std::size_t u = 0; u < target.size(); ++u) {
      double y = 0.0;
      for (int i = 0; i < n; ++i)
        if ((mask >> i) & 1u) y += q(i, static_cast<Eigen::Index>(u));
      r += (target[u] - y) * (target[u] - y);
    }
    best = std::min(best, r);
  }
  return best;
}

} // namespace oracle
