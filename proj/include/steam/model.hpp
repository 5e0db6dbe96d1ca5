#pragma once

#include <string>
#include <vector>

#include "steam/efficacy.hpp"
#include "steam/motion.hpp"
#include "steam/types.hpp"

namespace steam {

/// Everything needed to pose one allocation problem.
struct ProblemDomain {
  TaskNetwork network;
  TeamTraitMatrix traits;
  EfficacyModel efficacy;
  WorldGrid world;
  std::vector<Cell> robot_starts;
  /// Per-robot speed in cells per second; empty means 1.0 for everyone.
  std::vector<double> speeds;
  double time_budget = 0.0;
  double alpha = 0.0;

  int tasks() const { return network.size(); }
  int robots() const { return traits.robots(); }
  std::vector<double> robot_speeds() const;
  bool operator==(const ProblemDomain &) const;
};

struct Violation {
  std::string code;
  std::string message;
};

/// Every invariant breach found in `domain`; empty when the instance is usable.
///
/// Codes: no-robots, no-traits, negative-trait, no-tasks, negative-duration,
/// outside-grid, blocked-cell, bad-index, self-loop, precedence-cycle,
/// precedence-conflict, budget, alpha, robot-starts, speeds, efficacy-count,
/// efficacy-dims, too-many-robots, unreachable-site, degenerate-efficacy, grid.
std::vector<Violation> validate_instance(const ProblemDomain &domain);

} // namespace steam
