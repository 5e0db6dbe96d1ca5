#pragma once

// Drivers shared by the CLI and the acceptance suite: the exhaustive
// optimum, the bound sweep, and learning/holistic runs.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "steam/active.hpp"
#include "steam/model.hpp"
#include "steam/search.hpp"

namespace steam {

struct OptimumResult {
  std::optional<Allocation> allocation;
  double efficacy = 0.0;
  std::int64_t schedules_checked = 0;
  bool limit_hit = false;
};

/// Highest-efficacy allocation whose planned makespan fits the budget.
///
/// Allocations are enumerated in non-increasing efficacy order (per-task
/// coalitions sorted by score, merged best-first) and each one is scheduled
/// until the first feasible one. Independent of the allocation search.
/// `max_schedules` > 0 caps the work; hitting it sets limit_hit.
OptimumResult brute_force_optimum(const ProblemDomain &domain,
                                  std::optional<double> time_budget = std::nullopt,
                                  std::int64_t max_schedules = 0);

struct BoundRow {
  int instance = 0;
  double alpha = 0.0;
  bool feasible = false;
  double solution_efficacy = 0.0;
  double optimal_efficacy = 0.0;
  double gap = 0.0;            // optimal - solution
  double normalized_gap = 0.0; // gap / (root - null)
  Bounds bounds;
  bool holds = true;
  bool oracle_failed = false;
  std::int64_t nodes_expanded = 0;
  std::int64_t nac_violations = 0;
  std::int64_t edges_checked = 0;
};

/// Solve every instance at every alpha and compare against the exhaustive
/// optimum. holds = gap <= posthoc (+tol) and, for alpha < 0.5, gap <= prehoc (+tol).
std::vector<BoundRow> validate_bounds(const std::vector<ProblemDomain> &instances,
                                      const std::vector<double> &alphas, double tolerance = 1e-9,
                                      std::int64_t oracle_limit = 0);

struct LearningRun {
  Strategy strategy = Strategy::Exact;
  std::uint64_t seed = 0;
  LearnResult result;
};

/// learn() for every (strategy, seed) on one team with a known ground truth.
std::vector<LearningRun> run_learning(const TeamTraitMatrix &traits,
                                      const EfficacyModel &ground_truth,
                                      const std::vector<Strategy> &strategies,
                                      const std::vector<std::uint64_t> &seeds, int budget,
                                      const LearnerConfig &config = {});

/// Mean per-step seconds of `strategy` on a random team of `robots` robots.
double mean_step_seconds(Strategy strategy, int robots, int tasks, int traits, int budget,
                         std::uint64_t seed, const LearnerConfig &config = {});

/// Ground-truth efficacy of the allocation found when searching with
/// `learned` maps in place of the domain's own. nullopt when the learned maps
/// are degenerate or the search reports infeasible.
std::optional<double> holistic_efficacy(const ProblemDomain &domain, const EfficacyModel &learned,
                                        double alpha);

/// Coefficient of determination of the least-squares line through (i, y_i).
double linear_fit_r2(const std::vector<double> &values);

} // namespace steam
