#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "steam/model.hpp"

namespace steam {

/// Temporal constraints of one allocation, ready for makespan minimization.
struct SchedulingInstance {
  std::vector<double> durations;
  /// x_i: time for the slowest coalition member to reach task i from its start.
  std::vector<double> initial_travel;
  /// x_ij: site i -> site j for the slowest robot shared by both coalitions, 0 otherwise.
  Eigen::MatrixXd transition;
  /// Ordered pairs (i, j): s_j >= s_i + d_i + x_ij.
  std::vector<std::pair<int, int>> precedence;
  /// Unordered pairs {i, j} with i < j that must be sequenced one way or the other.
  std::vector<std::pair<int, int>> mutex;

  int size() const { return static_cast<int>(durations.size()); }
};

struct Schedule {
  std::vector<double> starts;
  /// One entry per SchedulingInstance::mutex pair: 1 when the first task goes first.
  std::vector<std::uint8_t> orderings;
  double makespan = 0.0;
  bool operator==(const Schedule &) const = default;
};

struct ScheduleStats {
  std::int64_t branch_nodes = 0;
  std::int64_t leaves = 0;
};

/// Derives travel times and the reduced mutex set for `allocation`.
/// Returns nullopt when a needed leg is unreachable.
std::optional<SchedulingInstance> build_scheduling_instance(const ProblemDomain &domain,
                                                            const Allocation &allocation,
                                                            TravelOracle &travel,
                                                            TravelMode mode = TravelMode::Planned);

/// Minimum-makespan schedule, or nullopt when every ordering of the mutex
/// pairs induces a positive cycle. Among schedules of equal makespan the
/// lexicographically smallest start vector is returned.
std::optional<Schedule> solve_schedule(const SchedulingInstance &instance,
                                       ScheduleStats *stats = nullptr);

/// Makespan of the root allocation (every robot on every task).
std::optional<double> worst_makespan(const ProblemDomain &domain, TravelOracle &travel);

/// Earliest start times when every mutex pair has the given orientation
/// (1: first before second). nullopt on a positive cycle.
std::optional<std::vector<double>> earliest_starts(const SchedulingInstance &instance,
                                                   const std::vector<std::uint8_t> &orderings);

/// Drops precedence edges implied, with at least the same delay, by another
/// precedence path.
std::vector<std::pair<int, int>> reduce_precedence(const SchedulingInstance &instance);

/// Checks every constraint family within `tolerance`.
bool schedule_satisfies(const SchedulingInstance &instance, const Schedule &schedule,
                        double tolerance = 1e-9);

} // namespace steam
