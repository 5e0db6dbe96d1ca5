#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace steam {

/// Integer cell on the world grid.
struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell &) const = default;
};

/// N x U matrix of non-negative robot capabilities; row i is robot i.
class TeamTraitMatrix {
public:
  TeamTraitMatrix() = default;
  explicit TeamTraitMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {}

  int robots() const { return static_cast<int>(entries_.rows()); }
  int traits() const { return static_cast<int>(entries_.cols()); }
  const Eigen::MatrixXd &entries() const { return entries_; }
  double operator()(int robot, int trait) const { return entries_(robot, trait); }

  /// Column sums: the traits of the whole team pooled on one task.
  Eigen::VectorXd team_totals() const { return entries_.colwise().sum().transpose(); }

  bool operator==(const TeamTraitMatrix &other) const {
    return entries_.rows() == other.entries_.rows() && entries_.cols() == other.entries_.cols() &&
           entries_ == other.entries_;
  }

private:
  Eigen::MatrixXd entries_;
};

/// Binary M x N task-to-robot assignment. Each row is stored as a bitmask,
/// bit n set when robot n works on the task, so N is capped at 64.
class Allocation {
public:
  static constexpr int kMaxRobots = 64;

  Allocation() = default;
  Allocation(int tasks, int robots);

  static Allocation null(int tasks, int robots) { return Allocation(tasks, robots); }
  static Allocation root(int tasks, int robots);
  static Allocation from_rows(int robots, std::vector<std::uint64_t> rows);

  int tasks() const { return static_cast<int>(rows_.size()); }
  int robots() const { return robots_; }

  bool get(int task, int robot) const { return (rows_[task] >> robot) & 1u; }
  void set(int task, int robot, bool value);

  std::uint64_t row(int task) const { return rows_[task]; }
  std::span<const std::uint64_t> rows() const { return rows_; }

  /// Number of 1-entries.
  int assigned() const;
  std::uint64_t full_row() const;

  bool operator==(const Allocation &) const = default;

private:
  int robots_ = 0;
  std::vector<std::uint64_t> rows_;
};

struct AllocationHash {
  std::size_t operator()(const Allocation &a) const noexcept;
};

/// Y = A Q. Throws std::invalid_argument when A's robot count differs from Q's.
Eigen::MatrixXd aggregated_traits(const Allocation &allocation, const TeamTraitMatrix &traits);

/// Traits pooled by the robots in `coalition` (bitmask over robots).
Eigen::VectorXd coalition_traits(std::uint64_t coalition, const TeamTraitMatrix &traits);

struct TaskSpec {
  double duration = 0.0;
  Cell site;
  Cell initial;
  Cell terminal;
  bool operator==(const TaskSpec &) const = default;
};

struct TaskNetwork {
  std::vector<TaskSpec> tasks;
  /// (i, j): task i must finish before j starts.
  std::vector<std::pair<int, int>> precedence;
  /// {i, j}: tasks i and j may not overlap.
  std::vector<std::pair<int, int>> mutex;

  int size() const { return static_cast<int>(tasks.size()); }
  bool operator==(const TaskNetwork &) const = default;
};

/// True when the precedence relation (restricted to valid indices) has a cycle.
bool has_precedence_cycle(const TaskNetwork &network);

/// reach[i][j] is true when i precedes j directly or transitively.
std::vector<std::vector<bool>> precedence_closure(int task_count,
                                                  std::span<const std::pair<int, int>> precedence);

} // namespace steam
