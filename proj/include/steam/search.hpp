#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "steam/model.hpp"
#include "steam/scheduler.hpp"

namespace steam {

/// Normalized efficacy lost relative to the root allocation.
double nac(double efficacy, double root_efficacy, double null_efficacy);

/// Normalized time-budget overrun. When worst == budget and makespan > budget
/// the overrun is +infinity (such a node can never be accepted).
double tbo(double makespan, double budget, double worst);

/// (1 - alpha) * nac + alpha * tbo. A zero weight drops its term outright so
/// an infinite overrun at alpha = 0 does not turn into NaN.
inline double tetam(double nac_value, double tbo_value, double alpha) {
  if (alpha == 0.0) return nac_value;
  if (alpha == 1.0) return tbo_value;
  return (1.0 - alpha) * nac_value + alpha * tbo_value;
}

struct Bounds {
  double prehoc = 0.0;
  double posthoc = 0.0;
  /// alpha >= 0.5: the bound exceeds the full efficacy range and says nothing.
  bool trivial = false;
};

/// prehoc = alpha/(1-alpha) * (root - null); posthoc = prehoc * tbo_best_open.
Bounds suboptimality_bounds(double alpha, double root_efficacy, double null_efficacy,
                            double tbo_best_open);

struct Solution {
  Allocation allocation;
  Schedule schedule;
  /// (robot, leg) -> grid path; leg 0 leaves the robot's start.
  std::map<std::pair<int, int>, Path> motion_plans;
  double efficacy = 0.0;
  double makespan = 0.0;
};

struct PhaseTimes {
  double allocation = 0.0;
  double scheduling = 0.0;
  double motion = 0.0;
};

/// One parent -> child edge of the allocation graph, recorded on demand.
struct ExpandedEdge {
  double parent_nac = 0.0;
  double child_nac = 0.0;
};

struct SearchReport {
  std::optional<Solution> solution;
  std::int64_t nodes_expanded = 0;
  std::int64_t nodes_evaluated = 0;
  std::int64_t refinements = 0;
  /// Expanded edges where the child's NAC fell below its parent's.
  std::int64_t nac_violations = 0;
  double root_efficacy = 0.0;
  double null_efficacy = 0.0;
  double worst_makespan = 0.0;
  /// Efficacy and overrun of the best-efficacy node left open at acceptance.
  double best_open_efficacy = 0.0;
  double best_open_tbo = 0.0;
  Bounds bounds;
  PhaseTimes times;
  std::vector<ExpandedEdge> edges;
};

struct SearchOptions {
  /// Overrides domain.alpha.
  std::optional<double> alpha;
  /// Overrides domain.time_budget.
  std::optional<double> time_budget;
  /// Evaluate children with OpenMP.
  bool parallel = true;
  /// Keep every expanded edge in SearchReport::edges.
  bool record_edges = false;
};

/// Greedy best-first search over the incremental allocation graph, starting
/// from the root allocation and removing one assignment per edge.
///
/// Frontier nodes are scheduled with straight-line travel estimates. A popped
/// node with zero overrun is rescheduled with planned paths; it is accepted if
/// it still fits the budget and requeued with its refined overrun otherwise.
/// Throws std::invalid_argument when the efficacy range is degenerate
/// (root efficacy <= null efficacy).
SearchReport solve(const ProblemDomain &domain, const SearchOptions &options = {});

} // namespace steam
