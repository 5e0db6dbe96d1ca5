#include "steam/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>

#include "steam/scheduler.hpp"

namespace steam {

OptimumResult brute_force_optimum(const ProblemDomain &domain, std::optional<double> time_budget,
                                  std::int64_t max_schedules) {
  const int tasks = domain.tasks();
  const int robots = domain.robots();
  const double budget = time_budget.value_or(domain.time_budget);
  const std::uint64_t count = std::uint64_t{1} << robots;

  struct Option {
    double value;
    std::uint64_t mask;
  };
  std::vector<std::vector<Option>> options(tasks);
  for (int m = 0; m < tasks; ++m) {
    options[m].reserve(count);
    for (std::uint64_t mask = 0; mask < count; ++mask)
      options[m].push_back({task_efficacy(domain.efficacy[m], coalition_traits(mask, domain.traits)), mask});
    std::stable_sort(options[m].begin(), options[m].end(),
                     [](const Option &a, const Option &b) { return a.value > b.value; });
  }

  // Index vectors are merged best-first. A state only advances positions at or
  // after the one it last advanced, so every vector is generated exactly once.
  struct State {
    double total;
    std::vector<std::uint32_t> index;
    int last;
  };
  auto total_of = [&](const std::vector<std::uint32_t> &index) {
    double total = 0.0;
    for (int m = 0; m < tasks; ++m) total += options[m][index[m]].value;
    return total;
  };
  auto lower = [](const State &a, const State &b) { return a.total < b.total; };
  std::priority_queue<State, std::vector<State>, decltype(lower)> frontier(lower);
  std::vector<std::uint32_t> start(tasks, 0);
  frontier.push({total_of(start), start, 0});

  TravelOracle travel(domain.world, domain.robot_speeds());
  OptimumResult result;
  while (!frontier.empty()) {
    State state = frontier.top();
    frontier.pop();

    std::vector<std::uint64_t> rows(tasks);
    for (int m = 0; m < tasks; ++m) rows[m] = options[m][state.index[m]].mask;
    Allocation allocation = Allocation::from_rows(robots, std::move(rows));

    if (max_schedules > 0 && result.schedules_checked >= max_schedules) {
      result.limit_hit = true;
      return result;
    }
    ++result.schedules_checked;
    auto inst = build_scheduling_instance(domain, allocation, travel, TravelMode::Planned);
    std::optional<Schedule> schedule;
    if (inst) schedule = solve_schedule(*inst);
    if (schedule && schedule->makespan <= budget) {
      result.efficacy = total_efficacy(domain.efficacy, allocation, domain.traits);
      result.allocation = std::move(allocation);
      return result;
    }

    for (int m = state.last; m < tasks; ++m) {
      if (state.index[m] + 1 >= options[m].size()) continue;
      State next{0.0, state.index, m};
      ++next.index[m];
      next.total = total_of(next.index);
      frontier.push(std::move(next));
    }
  }
  return result;
}

std::vector<BoundRow> validate_bounds(const std::vector<ProblemDomain> &instances,
                                      const std::vector<double> &alphas, double tolerance,
                                      std::int64_t oracle_limit) {
  std::vector<BoundRow> rows;
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const ProblemDomain &domain = instances[k];
    const OptimumResult optimum = brute_force_optimum(domain, std::nullopt, oracle_limit);
    for (double alpha : alphas) {
      SearchOptions options;
      options.alpha = alpha;
      options.record_edges = true;
      SearchReport report = solve(domain, options);

      BoundRow row;
      row.instance = static_cast<int>(k);
      row.alpha = alpha;
      row.bounds = report.bounds;
      row.nodes_expanded = report.nodes_expanded;
      row.nac_violations = report.nac_violations;
      row.edges_checked = static_cast<std::int64_t>(report.edges.size());
      row.oracle_failed = optimum.limit_hit;
      row.feasible = report.solution.has_value();
      row.optimal_efficacy = optimum.efficacy;
      if (row.feasible) row.solution_efficacy = report.solution->efficacy;

      if (optimum.limit_hit) {
        row.holds = false;
      } else if (row.feasible != optimum.allocation.has_value()) {
        // The search and the oracle disagree about feasibility.
        row.holds = false;
      } else if (row.feasible) {
        row.gap = row.optimal_efficacy - row.solution_efficacy;
        row.normalized_gap = row.gap / (report.root_efficacy - report.null_efficacy);
        row.holds = row.gap <= row.bounds.posthoc + tolerance &&
                    (alpha >= 0.5 || row.gap <= row.bounds.prehoc + tolerance);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<LearningRun> run_learning(const TeamTraitMatrix &traits,
                                      const EfficacyModel &ground_truth,
                                      const std::vector<Strategy> &strategies,
                                      const std::vector<std::uint64_t> &seeds, int budget,
                                      const LearnerConfig &config) {
  std::vector<LearningRun> runs;
  for (Strategy strategy : strategies)
    for (std::uint64_t seed : seeds) {
      Evaluator evaluator = synthetic_evaluator(ground_truth, traits, 0.0, seed);
      runs.push_back({strategy, seed,
                      learn(traits, ground_truth.size(), evaluator, strategy, budget, seed, config,
                            &ground_truth)});
    }
  return runs;
}

double mean_step_seconds(Strategy strategy, int robots, int tasks, int traits, int budget,
                         std::uint64_t seed, const LearnerConfig &config) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(0.1, 1.0);
  Eigen::MatrixXd q(robots, traits);
  for (int r = 0; r < robots; ++r)
    for (int u = 0; u < traits; ++u) q(r, u) = entry(rng);
  const TeamTraitMatrix team(q);
  GroundTruthOptions opts;
  opts.team_totals = team.team_totals();
  const EfficacyModel truth =
      sample_ground_truth_model(rng(), tasks, traits, MapKind::LinearSaturating, opts);
  const LearnResult result =
      learn(team, tasks, synthetic_evaluator(truth, team), strategy, budget, seed, config);
  if (result.metrics.empty()) return 0.0;
  double total = 0.0;
  for (const auto &m : result.metrics) total += m.step_seconds;
  return total / static_cast<double>(result.metrics.size());
}

std::optional<double> holistic_efficacy(const ProblemDomain &domain, const EfficacyModel &learned,
                                        double alpha) {
  ProblemDomain swapped = domain;
  swapped.efficacy = learned;
  const double root = total_efficacy(learned, Allocation::root(domain.tasks(), domain.robots()), domain.traits);
  const double none = total_efficacy(learned, Allocation::null(domain.tasks(), domain.robots()), domain.traits);
  if (!(root > none)) return std::nullopt;
  SearchOptions options;
  options.alpha = alpha;
  const SearchReport report = solve(swapped, options);
  if (!report.solution) return std::nullopt;
  return total_efficacy(domain.efficacy, report.solution->allocation, domain.traits);
}

double linear_fit_r2(const std::vector<double> &values) {
  const std::size_t n = values.size();
  if (n < 2) return 1.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += static_cast<double>(i + 1);
    my += values[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i + 1) - mx;
    const double dy = values[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (syy == 0.0) return 1.0;
  return sxy * sxy / (sxx * syy);
}

} // namespace steam
