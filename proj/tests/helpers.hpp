#pragma once

#include <algorithm>
#include <numeric>
#include <random>

#include "steam/efficacy.hpp"
#include "steam/model.hpp"
#include "steam/scheduler.hpp"

namespace testing {

// Open 8x8 world, unit traits, each task saturating once every robot joins.
inline steam::ProblemDomain open_domain(int tasks, int robots, double budget = 1000.0) {
  using namespace steam;
  ProblemDomain d;
  d.world = WorldGrid(8, 8);
  for (int m = 0; m < tasks; ++m) {
    TaskSpec t;
    t.duration = 1.0 + m;
    t.site = {m + 2, m + 1};
    t.initial = t.terminal = t.site;
    d.network.tasks.push_back(t);
  }
  for (int r = 0; r < robots; ++r) d.robot_starts.push_back({r, 0});
  d.traits = TeamTraitMatrix(Eigen::MatrixXd::Ones(robots, 1));
  std::vector<TraitEfficacyMap> maps;
  for (int m = 0; m < tasks; ++m)
    maps.emplace_back(LinearSaturatingMap{Eigen::VectorXd::Ones(1), static_cast<double>(robots)});
  d.efficacy = EfficacyModel(std::move(maps));
  d.time_budget = budget;
  return d;
}

inline steam::TeamTraitMatrix random_team(int robots, int traits, std::mt19937_64 &rng,
                                          double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd q(robots, traits);
  for (int r = 0; r < robots; ++r)
    for (int k = 0; k < traits; ++k) q(r, k) = u(rng);
  return steam::TeamTraitMatrix(q);
}

// Acyclic precedence over a random order; mutex pairs only between unordered tasks.
inline steam::SchedulingInstance random_scheduling_instance(std::mt19937_64 &rng, int max_tasks,
                                                             int max_mutex) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 2 + static_cast<int>(rng() % (max_tasks - 1));
  steam::SchedulingInstance inst;
  inst.durations.resize(n);
  inst.initial_travel.assign(n, 0.0);
  inst.transition = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    inst.durations[i] = 0.5 + 4.0 * u(rng);
    inst.initial_travel[i] = u(rng) < 0.5 ? 0.0 : 3.0 * u(rng);
    for (int j = 0; j < n; ++j)
      if (i != j && u(rng) < 0.4) inst.transition(i, j) = 2.0 * u(rng);
  }
  // Random topological order keeps precedence acyclic.
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (u(rng) < 0.2) inst.precedence.emplace_back(perm[a], perm[b]);
  const auto reach = steam::precedence_closure(n, inst.precedence);
  std::vector<std::pair<int, int>> free_pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!reach[i][j] && !reach[j][i]) free_pairs.emplace_back(i, j);
  std::shuffle(free_pairs.begin(), free_pairs.end(), rng);
  const int k = std::min<int>(static_cast<int>(free_pairs.size()), static_cast<int>(rng() % (max_mutex + 1)));
  inst.mutex.assign(free_pairs.begin(), free_pairs.begin() + k);
  std::sort(inst.mutex.begin(), inst.mutex.end());
  return inst;
}

} // namespace testing
