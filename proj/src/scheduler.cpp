#include "steam/scheduler.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>

namespace steam {

std::optional<SchedulingInstance> build_scheduling_instance(const ProblemDomain &domain,
                                                            const Allocation &allocation,
                                                            TravelOracle &travel, TravelMode mode) {
  const int tasks = domain.tasks();
  const int robots = domain.robots();
  SchedulingInstance inst;
  inst.durations.resize(tasks);
  inst.initial_travel.assign(tasks, 0.0);
  inst.transition = Eigen::MatrixXd::Zero(tasks, tasks);

  for (int m = 0; m < tasks; ++m) {
    inst.durations[m] = domain.network.tasks[m].duration;
    const Cell site = domain.network.tasks[m].site;
    for (int r = 0; r < robots; ++r) {
      if (!allocation.get(m, r)) continue;
      auto t = travel.travel_time(r, domain.robot_starts[r], site, mode);
      if (!t) return std::nullopt;
      inst.initial_travel[m] = std::max(inst.initial_travel[m], *t);
    }
  }

  for (int i = 0; i < tasks; ++i)
    for (int j = 0; j < tasks; ++j) {
      if (i == j) continue;
      const std::uint64_t shared = allocation.row(i) & allocation.row(j);
      if (!shared) continue;
      const Cell a = domain.network.tasks[i].site;
      const Cell b = domain.network.tasks[j].site;
      for (int r = 0; r < robots; ++r) {
        if (!((shared >> r) & 1u)) continue;
        auto t = travel.travel_time(r, a, b, mode);
        if (!t) return std::nullopt;
        inst.transition(i, j) = std::max(inst.transition(i, j), *t);
      }
    }

  std::set<std::pair<int, int>> precedence(domain.network.precedence.begin(),
                                           domain.network.precedence.end());
  std::set<std::pair<int, int>> mutex_all;
  for (auto [i, j] : domain.network.mutex) mutex_all.insert({std::min(i, j), std::max(i, j)});
  for (int i = 0; i < tasks; ++i)
    for (int j = i + 1; j < tasks; ++j)
      if (allocation.row(i) & allocation.row(j)) mutex_all.insert({i, j});

  const auto reach = precedence_closure(tasks, domain.network.precedence);
  for (auto [i, j] : mutex_all) {
    const bool forward = reach[i][j];
    const bool backward = reach[j][i];
    if (!forward && !backward) {
      inst.mutex.emplace_back(i, j);
      continue;
    }
    // Ordered by precedence already; a shared robot still needs its travel leg.
    if (allocation.row(i) & allocation.row(j)) {
      if (forward) precedence.insert({i, j});
      else precedence.insert({j, i});
    }
  }
  inst.precedence.assign(precedence.begin(), precedence.end());
  return inst;
}

namespace {

struct Edge {
  int from;
  int to;
  double weight;
};

// Longest paths from a virtual source whose edge to i weighs x_i.
// nullopt when a positive cycle keeps relaxing.
std::optional<std::vector<double>> longest_paths(const SchedulingInstance &inst,
                                                 const std::vector<Edge> &edges) {
  const int n = inst.size();
  std::vector<double> s = inst.initial_travel;
  for (int round = 0; round <= n; ++round) {
    bool changed = false;
    for (const Edge &e : edges) {
      const double candidate = s[e.from] + inst.durations[e.from] + inst.transition(e.from, e.to);
      if (candidate > s[e.to]) {
        s[e.to] = candidate;
        changed = true;
      }
    }
    if (!changed) return s;
  }
  return std::nullopt;
}

double makespan_of(const SchedulingInstance &inst, const std::vector<double> &s) {
  double c = 0.0;
  for (int i = 0; i < inst.size(); ++i) c = std::max(c, s[i] + inst.durations[i]);
  return c;
}

bool before(const SchedulingInstance &inst, const std::vector<double> &s, int i, int j) {
  return s[j] >= s[i] + inst.durations[i] + inst.transition(i, j);
}

std::vector<Edge> precedence_edges(const SchedulingInstance &inst,
                                   const std::vector<std::pair<int, int>> &precedence) {
  std::vector<Edge> edges;
  edges.reserve(precedence.size());
  for (auto [i, j] : precedence) edges.push_back({i, j, inst.durations[i] + inst.transition(i, j)});
  return edges;
}

class BranchAndBound {
public:
  BranchAndBound(const SchedulingInstance &inst, ScheduleStats *stats)
      : inst_(inst), stats_(stats), base_(precedence_edges(inst, reduce_precedence(inst))),
        orientation_(inst.mutex.size(), -1), order_(inst.mutex.size()) {
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      const auto [ai, aj] = inst.mutex[a];
      const auto [bi, bj] = inst.mutex[b];
      return inst.durations[ai] + inst.durations[aj] > inst.durations[bi] + inst.durations[bj];
    });
  }

  std::optional<Schedule> run() {
    explore();
    return best_;
  }

private:
  void explore() {
    if (stats_) ++stats_->branch_nodes;
    std::vector<Edge> edges = base_;
    for (std::size_t k = 0; k < orientation_.size(); ++k) {
      if (orientation_[k] < 0) continue;
      auto [i, j] = inst_.mutex[k];
      if (orientation_[k] == 0) std::swap(i, j);
      edges.push_back({i, j, inst_.durations[i] + inst_.transition(i, j)});
    }
    auto starts = longest_paths(inst_, edges);
    if (!starts) return;
    const std::vector<double> &s = *starts;
    const double bound = makespan_of(inst_, s);
    // Every leaf below has starts >= s componentwise, hence no smaller
    // makespan and no lexicographically smaller start vector.
    if (best_ && (bound > best_->makespan ||
                  (bound == best_->makespan &&
                   !std::lexicographical_compare(s.begin(), s.end(), best_->starts.begin(),
                                                 best_->starts.end()))))
      return;

    int pick = -1;
    for (int k : order_) {
      if (orientation_[k] >= 0) continue;
      const auto [i, j] = inst_.mutex[k];
      if (!before(inst_, s, i, j) && !before(inst_, s, j, i)) {
        pick = k;
        break;
      }
    }

    if (pick < 0) {
      if (stats_) ++stats_->leaves;
      Schedule leaf;
      leaf.starts = s;
      leaf.makespan = bound;
      leaf.orderings.resize(inst_.mutex.size());
      for (std::size_t k = 0; k < inst_.mutex.size(); ++k) {
        const auto [i, j] = inst_.mutex[k];
        leaf.orderings[k] =
            orientation_[k] >= 0 ? static_cast<std::uint8_t>(orientation_[k]) : before(inst_, s, i, j);
      }
      best_ = std::move(leaf);
      return;
    }

    const auto [i, j] = inst_.mutex[pick];
    const int first = s[i] <= s[j] ? 1 : 0;
    for (int value : {first, 1 - first}) {
      orientation_[pick] = value;
      explore();
    }
    orientation_[pick] = -1;
  }

  const SchedulingInstance &inst_;
  ScheduleStats *stats_;
  std::vector<Edge> base_;
  std::vector<int> orientation_;
  std::vector<int> order_;
  std::optional<Schedule> best_;
};

} // namespace

std::vector<std::pair<int, int>> reduce_precedence(const SchedulingInstance &inst) {
  const int n = inst.size();
  std::vector<std::pair<int, int>> edges = inst.precedence;
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<bool> active(edges.size(), true);
  auto weight = [&](std::size_t e) {
    return inst.durations[edges[e].first] + inst.transition(edges[e].first, edges[e].second);
  };
  // Longest active path from `src` to `dst` avoiding edge `skip`; -1 when none.
  // Precedence is acyclic, so n - 1 relaxation rounds settle it.
  auto longest = [&](int src, int dst, std::size_t skip) {
    std::vector<double> dist(n, -1.0);
    dist[src] = 0.0;
    for (int round = 0; round < n; ++round) {
      bool changed = false;
      for (std::size_t e = 0; e < edges.size(); ++e) {
        if (!active[e] || e == skip) continue;
        const auto [a, b] = edges[e];
        if (dist[a] < 0.0) continue;
        const double candidate = dist[a] + weight(e);
        if (candidate > dist[b]) {
          dist[b] = candidate;
          changed = true;
        }
      }
      if (!changed) break;
    }
    return dist[dst];
  };

  // Near-ties keep their edge.
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges[e];
    if (longest(i, j, e) > weight(e) * (1.0 + 1e-9) + 1e-9) active[e] = false;
  }
  std::vector<std::pair<int, int>> out;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (active[e]) out.push_back(edges[e]);
  return out;
}

std::optional<Schedule> solve_schedule(const SchedulingInstance &instance, ScheduleStats *stats) {
  if (instance.size() == 0) return Schedule{};
  return BranchAndBound(instance, stats).run();
}

std::optional<std::vector<double>> earliest_starts(const SchedulingInstance &instance,
                                                   const std::vector<std::uint8_t> &orderings) {
  std::vector<Edge> edges = precedence_edges(instance, reduce_precedence(instance));
  for (std::size_t k = 0; k < instance.mutex.size(); ++k) {
    auto [i, j] = instance.mutex[k];
    if (!orderings.at(k)) std::swap(i, j);
    edges.push_back({i, j, instance.durations[i] + instance.transition(i, j)});
  }
  return longest_paths(instance, edges);
}

std::optional<double> worst_makespan(const ProblemDomain &domain, TravelOracle &travel) {
  auto inst = build_scheduling_instance(domain, Allocation::root(domain.tasks(), domain.robots()),
                                        travel, TravelMode::Planned);
  if (!inst) return std::nullopt;
  auto schedule = solve_schedule(*inst);
  if (!schedule) return std::nullopt;
  return schedule->makespan;
}

bool schedule_satisfies(const SchedulingInstance &inst, const Schedule &schedule, double tolerance) {
  const int n = inst.size();
  if (static_cast<int>(schedule.starts.size()) != n) return false;
  if (schedule.orderings.size() != inst.mutex.size()) return false;
  const auto &s = schedule.starts;
  double c = 0.0;
  for (int i = 0; i < n; ++i) {
    if (s[i] < inst.initial_travel[i] - tolerance) return false;
    c = std::max(c, s[i] + inst.durations[i]);
  }
  if (std::abs(c - schedule.makespan) > tolerance) return false;
  for (auto [i, j] : inst.precedence)
    if (s[j] < s[i] + inst.durations[i] + inst.transition(i, j) - tolerance) return false;
  for (std::size_t k = 0; k < inst.mutex.size(); ++k) {
    auto [i, j] = inst.mutex[k];
    if (!schedule.orderings[k]) std::swap(i, j);
    if (s[j] < s[i] + inst.durations[i] + inst.transition(i, j) - tolerance) return false;
  }
  return true;
}

} // namespace steam
