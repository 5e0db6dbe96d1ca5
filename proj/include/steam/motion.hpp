#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "steam/types.hpp"

namespace steam {

/// 4-connected occupancy grid with unit step cost.
class WorldGrid {
public:
  WorldGrid() = default;
  WorldGrid(int width, int height, std::vector<Cell> obstacles = {});

  int width() const { return width_; }
  int height() const { return height_; }
  bool contains(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool blocked(Cell c) const { return blocked_[index(c)] != 0; }
  bool free(Cell c) const { return contains(c) && !blocked(c); }

  int index(Cell c) const { return c.y * width_ + c.x; }
  Cell cell(int index) const { return {index % width_, index / width_}; }
  int cell_count() const { return width_ * height_; }

  /// Obstacles as given, out-of-bounds entries included (validation reports them).
  const std::vector<Cell> &obstacles() const { return obstacles_; }

  bool operator==(const WorldGrid &other) const {
    return width_ == other.width_ && height_ == other.height_ && obstacles_ == other.obstacles_;
  }

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Cell> obstacles_;
  std::vector<std::uint8_t> blocked_;
};

using Path = std::vector<Cell>;

/// A* with the Manhattan heuristic. Returns the cell sequence from `from` to
/// `to` inclusive (a single cell when they coincide), or nullopt when `to` is
/// unreachable. Among equal f-values the smaller cell index expands first.
/// Throws std::invalid_argument when an endpoint is outside or blocked.
std::optional<Path> plan_path(const WorldGrid &world, Cell from, Cell to);

/// Number of steps in a path.
inline int path_length(const Path &path) { return path.empty() ? 0 : static_cast<int>(path.size()) - 1; }

enum class TravelMode {
  /// Straight-line distance / speed, no planning.
  Estimate,
  /// Planned grid path length / speed, memoized.
  Planned,
};

/// Memoized travel-time queries for a team moving on one world.
///
/// The memo is keyed by (from, to) cell pair. Concurrent readers share a lock;
/// a miss plans outside the lock and inserts under an exclusive lock, so two
/// threads may plan the same key, which is harmless.
class TravelOracle {
public:
  TravelOracle(WorldGrid world, std::vector<double> speeds);

  TravelOracle(const TravelOracle &) = delete;
  TravelOracle &operator=(const TravelOracle &) = delete;

  std::optional<double> travel_time(int robot, Cell from, Cell to,
                                    TravelMode mode = TravelMode::Planned);
  std::optional<Path> path(Cell from, Cell to);

  const WorldGrid &world() const { return world_; }
  double speed(int robot) const { return speeds_[robot]; }
  int robots() const { return static_cast<int>(speeds_.size()); }

  std::size_t planner_calls() const { return planner_calls_.load(); }
  double planning_seconds() const;
  void clear_memo();

private:
  WorldGrid world_;
  std::vector<double> speeds_;
  mutable std::shared_mutex memo_mutex_;
  std::unordered_map<std::uint64_t, std::optional<Path>> memo_;
  std::atomic<std::size_t> planner_calls_{0};
  std::atomic<std::int64_t> planning_nanos_{0};
};

} // namespace steam
