#include "steam/motion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace steam {

WorldGrid::WorldGrid(int width, int height, std::vector<Cell> obstacles)
    : width_(width), height_(height), obstacles_(std::move(obstacles)) {
  if (width < 0 || height < 0) throw std::invalid_argument("grid dimensions must be non-negative");
  blocked_.assign(static_cast<std::size_t>(width) * height, 0);
  for (Cell c : obstacles_)
    if (contains(c)) blocked_[index(c)] = 1;
}

std::optional<Path> plan_path(const WorldGrid &world, Cell from, Cell to) {
  if (!world.free(from) || !world.free(to))
    throw std::invalid_argument("path endpoint is outside the grid or blocked");
  if (from == to) return Path{from};

  const int n = world.cell_count();
  const int goal = world.index(to);
  auto h = [&](int idx) {
    Cell c = world.cell(idx);
    return std::abs(c.x - to.x) + std::abs(c.y - to.y);
  };

  std::vector<int> g(n, -1), parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);
  // (f, index): smallest f first, then smallest cell index.
  using Entry = std::pair<int, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const int start = world.index(from);
  g[start] = 0;
  open.push({h(start), start});

  static constexpr int dx[4] = {0, -1, 1, 0};
  static constexpr int dy[4] = {-1, 0, 0, 1};
  while (!open.empty()) {
    auto [f, idx] = open.top();
    open.pop();
    if (closed[idx]) continue;
    closed[idx] = 1;
    if (idx == goal) break;
    const Cell c = world.cell(idx);
    for (int k = 0; k < 4; ++k) {
      const Cell next{c.x + dx[k], c.y + dy[k]};
      if (!world.free(next)) continue;
      const int nidx = world.index(next);
      if (closed[nidx]) continue;
      const int ng = g[idx] + 1;
      if (g[nidx] < 0 || ng < g[nidx]) {
        g[nidx] = ng;
        parent[nidx] = idx;
        open.push({ng + h(nidx), nidx});
      }
    }
  }
  if (!closed[goal]) return std::nullopt;

  Path path;
  for (int idx = goal; idx != -1; idx = parent[idx]) path.push_back(world.cell(idx));
  std::reverse(path.begin(), path.end());
  return path;
}

TravelOracle::TravelOracle(WorldGrid world, std::vector<double> speeds)
    : world_(std::move(world)), speeds_(std::move(speeds)) {
  for (double s : speeds_)
    if (!(s > 0.0)) throw std::invalid_argument("robot speeds must be positive");
}

std::optional<Path> TravelOracle::path(Cell from, Cell to) {
  const std::uint64_t key =
      (static_cast<std::uint64_t>(world_.index(from)) << 32) | static_cast<std::uint32_t>(world_.index(to));
  {
    std::shared_lock lock(memo_mutex_);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  }
  const auto t0 = std::chrono::steady_clock::now();
  auto planned = plan_path(world_, from, to);
  planner_calls_.fetch_add(1);
  planning_nanos_.fetch_add(
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count());
  std::unique_lock lock(memo_mutex_);
  return memo_.try_emplace(key, std::move(planned)).first->second;
}

std::optional<double> TravelOracle::travel_time(int robot, Cell from, Cell to, TravelMode mode) {
  const double speed = speeds_.at(robot);
  if (mode == TravelMode::Estimate) {
    const double dx = from.x - to.x;
    const double dy = from.y - to.y;
    return std::sqrt(dx * dx + dy * dy) / speed;
  }
  auto p = path(from, to);
  if (!p) return std::nullopt;
  return path_length(*p) / speed;
}

double TravelOracle::planning_seconds() const { return planning_nanos_.load() * 1e-9; }

void TravelOracle::clear_memo() {
  std::unique_lock lock(memo_mutex_);
  memo_.clear();
}

} // namespace steam
