#include "steam/generator.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <stdexcept>

#include "steam/motion.hpp"
#include "steam/scheduler.hpp"

namespace steam {

namespace {

double uniform(std::mt19937_64 &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Cells reachable from `from` by 4-connected moves.
std::vector<bool> flood(const WorldGrid &world, Cell from) {
  std::vector<bool> seen(world.cell_count(), false);
  std::queue<Cell> frontier;
  seen[world.index(from)] = true;
  frontier.push(from);
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop();
    for (Cell next : {Cell{c.x, c.y - 1}, Cell{c.x - 1, c.y}, Cell{c.x + 1, c.y}, Cell{c.x, c.y + 1}}) {
      if (!world.free(next) || seen[world.index(next)]) continue;
      seen[world.index(next)] = true;
      frontier.push(next);
    }
  }
  return seen;
}

std::optional<ProblemDomain> attempt(const GeneratorParams &p, std::mt19937_64 &rng) {
  std::vector<Cell> obstacles;
  for (int y = 0; y < p.height; ++y)
    for (int x = 0; x < p.width; ++x)
      if (uniform(rng, 0.0, 1.0) < p.obstacle_density) obstacles.push_back({x, y});
  WorldGrid world(p.width, p.height, obstacles);

  std::vector<Cell> free_cells;
  for (int i = 0; i < world.cell_count(); ++i)
    if (!world.blocked(world.cell(i))) free_cells.push_back(world.cell(i));
  if (free_cells.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, free_cells.size() - 1);

  ProblemDomain d;
  d.world = world;
  for (int r = 0; r < p.robots; ++r) d.robot_starts.push_back(free_cells[pick(rng)]);
  const std::vector<bool> reach = flood(world, d.robot_starts[0]);
  for (Cell c : d.robot_starts)
    if (!reach[world.index(c)]) return std::nullopt;

  for (int m = 0; m < p.tasks; ++m) {
    TaskSpec t;
    t.duration = uniform(rng, p.min_duration, p.max_duration);
    t.site = free_cells[pick(rng)];
    if (!reach[world.index(t.site)]) return std::nullopt;
    t.initial = t.terminal = t.site;
    d.network.tasks.push_back(t);
  }

  // Edges only run from lower to higher index, so precedence stays acyclic.
  for (int i = 0; i < p.tasks; ++i)
    for (int j = i + 1; j < p.tasks; ++j)
      if (uniform(rng, 0.0, 1.0) < p.precedence_probability) d.network.precedence.emplace_back(i, j);
  const auto closure = precedence_closure(p.tasks, d.network.precedence);
  for (int i = 0; i < p.tasks; ++i)
    for (int j = i + 1; j < p.tasks; ++j)
      if (!closure[i][j] && uniform(rng, 0.0, 1.0) < p.mutex_probability)
        d.network.mutex.emplace_back(i, j);

  Eigen::MatrixXd q(p.robots, p.traits);
  for (int r = 0; r < p.robots; ++r)
    for (int u = 0; u < p.traits; ++u) q(r, u) = uniform(rng, 0.1, 1.0);
  d.traits = TeamTraitMatrix(q);

  GroundTruthOptions opts;
  opts.team_totals = d.traits.team_totals();
  opts.extent = d.traits.team_totals();
  d.efficacy = sample_ground_truth_model(rng(), p.tasks, p.traits, p.map_kind, opts);

  if (p.random_speeds)
    for (int r = 0; r < p.robots; ++r) d.speeds.push_back(uniform(rng, 0.5, 1.5));
  d.alpha = p.alpha;

  TravelOracle travel(d.world, d.robot_speeds());
  const auto worst = worst_makespan(d, travel);
  if (!worst || !(*worst > 0.0)) return std::nullopt;
  d.time_budget = p.budget_factor * *worst;
  if (!validate_instance(d).empty()) return std::nullopt;
  return d;
}

} // namespace

ProblemDomain generate_instance(const GeneratorParams &params, std::uint64_t seed) {
  if (params.tasks < 1 || params.robots < 1 || params.traits < 1)
    throw std::invalid_argument("generator needs at least one task, robot and trait");
  if (params.width < 1 || params.height < 1) throw std::invalid_argument("grid must be non-empty");
  if (!(params.budget_factor > 0.0)) throw std::invalid_argument("budget factor must be positive");
  if (params.min_duration < 0.0 || params.max_duration < params.min_duration)
    throw std::invalid_argument("bad duration range");

  std::mt19937_64 rng(seed);
  for (int tries = 0; tries < 100; ++tries)
    if (auto d = attempt(params, rng)) return std::move(*d);
  throw std::runtime_error("no valid layout after 100 attempts");
}

} // namespace steam
