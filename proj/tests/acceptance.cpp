// One line per criterion; exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "steam/active.hpp"
#include "steam/experiments.hpp"
#include "steam/generator.hpp"
#include "steam/search.hpp"

using namespace steam;

namespace {

int failures = 0;

void report(int id, const std::string &name, bool ok, const std::string &detail) {
  std::printf("[%s] C%d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char *f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Every allocation, sorted by efficacy; the first one with a feasible
// orientation under the budget is optimal.
std::optional<double> enumerated_optimum(const ProblemDomain &d) {
  const int m = d.tasks(), n = d.robots();
  const std::uint64_t count = std::uint64_t{1} << (m * n);
  std::vector<std::pair<double, std::uint64_t>> all;
  all.reserve(count);
  auto decode = [&](std::uint64_t bits) {
    std::vector<std::uint64_t> rows(m);
    for (int t = 0; t < m; ++t) rows[t] = (bits >> (t * n)) & ((std::uint64_t{1} << n) - 1);
    return Allocation::from_rows(n, rows);
  };
  for (std::uint64_t bits = 0; bits < count; ++bits)
    all.emplace_back(total_efficacy(d.efficacy, decode(bits), d.traits), bits);
  std::sort(all.begin(), all.end(), [](const auto &a, const auto &b) { return a.first > b.first; });
  TravelOracle travel(d.world, d.robot_speeds());
  for (const auto &[eff, bits] : all) {
    const auto inst = build_scheduling_instance(d, decode(bits), travel);
    if (!inst) continue;
    const auto c = oracle::exhaustive_makespan(*inst);
    if (c && *c <= d.time_budget) return eff;
  }
  return std::nullopt;
}

std::vector<ProblemDomain> sweep_instances() {
  std::vector<ProblemDomain> out;
  for (int k = 0; k < 20; ++k) {
    GeneratorParams p;
    p.tasks = 2 + k % 3;
    p.robots = p.tasks == 4 ? 4 : 3 + (k / 3) % 2;
    p.traits = 2;
    p.budget_factor = 0.4 + 0.1 * (k % 5);
    p.obstacle_density = 0.1;
    out.push_back(generate_instance(p, 1000 + k));
  }
  return out;
}

void bound_sweep_and_nac() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto instances = sweep_instances();
  bool bounds_ok = true, zero_gap_ok = true;
  int checked = 0, infeasible = 0;
  std::int64_t edges = 0, violations = 0, counted = 0;
  double worst_slack = -1e300;
  for (const auto &d : instances) {
    const auto opt = enumerated_optimum(d);
    for (int a = 0; a <= 10; ++a) {
      const double alpha = 0.1 * a;
      SearchOptions o;
      o.alpha = alpha;
      o.record_edges = true;
      const SearchReport r = solve(d, o);
      edges += static_cast<std::int64_t>(r.edges.size());
      counted += r.nac_violations;
      for (const auto &e : r.edges)
        if (e.child_nac < e.parent_nac) ++violations;
      if (r.solution.has_value() != opt.has_value()) {
        bounds_ok = false;
        continue;
      }
      if (!opt) {
        ++infeasible;
        continue;
      }
      const double gap = *opt - r.solution->efficacy;
      const double normalized = gap / (r.root_efficacy - r.null_efficacy);
      if (alpha == 0.0 && gap != 0.0) zero_gap_ok = false;
      if (alpha < 0.5) {
        ++checked;
        const double b = std::min(r.bounds.prehoc, r.bounds.posthoc);
        worst_slack = std::max(worst_slack, gap - b);
        if (gap > r.bounds.prehoc + 1e-9 || gap > r.bounds.posthoc + 1e-9) bounds_ok = false;
        if (normalized > r.bounds.prehoc + 1e-9 || normalized > r.bounds.posthoc + 1e-9) bounds_ok = false;
      }
    }
  }
  const double secs = seconds_since(t0);
  report(1, "bound sweep", bounds_ok && zero_gap_ok && secs < 600.0,
         std::to_string(checked) + " runs with alpha<0.5 checked, " + std::to_string(infeasible) +
             " infeasible runs, max(gap - bound) " + fmt("%.3g", worst_slack) + ", zero gap at alpha 0: " +
             (zero_gap_ok ? "yes" : "no") + ", " + fmt("%.1f s", secs));
  report(4, "NAC monotone on expanded edges", violations == 0 && counted == 0 && edges > 0,
         std::to_string(edges) + " edges, " + std::to_string(violations) + " violations");
}

void branch_and_bound_exact() {
  std::mt19937_64 rng(2024);
  int agree = 0, mutexed = 0;
  for (int k = 0; k < 200; ++k) {
    const SchedulingInstance inst = testing::random_scheduling_instance(rng, 8, 8);
    if (!inst.mutex.empty()) ++mutexed;
    const auto s = solve_schedule(inst);
    const auto want = oracle::exhaustive_makespan(inst);
    if (s.has_value() == want.has_value() && (!s || s->makespan == *want)) ++agree;
  }
  report(2, "branch-and-bound makespan", agree == 200,
         std::to_string(agree) + "/200 exact matches, " + std::to_string(mutexed) + " with mutex pairs");
}

void budget_tightening() {
  int feasible = 0, ok = 0;
  for (int k = 0; k < 20; ++k) {
    GeneratorParams p;
    p.tasks = 3 + k % 3;
    p.robots = 4 + k % 2;
    p.budget_factor = 0.6;
    const ProblemDomain d = generate_instance(p, 3000 + k);
    SearchOptions hi;
    hi.alpha = 0.9;
    const SearchReport first = solve(d, hi);
    if (!first.solution) continue;
    ++feasible;
    SearchOptions lo;
    lo.alpha = 0.3;
    lo.time_budget = first.solution->makespan;
    const SearchReport second = solve(d, lo);
    if (second.solution && second.solution->efficacy >= first.solution->efficacy &&
        second.solution->makespan <= first.solution->makespan)
      ++ok;
  }
  report(3, "tightened budget keeps efficacy", feasible > 0 && ok == feasible,
         std::to_string(ok) + "/" + std::to_string(feasible) + " feasible instances");
}

void regret_ordering() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<Strategy> strategies{Strategy::Unconstrained, Strategy::Box, Strategy::ConvexHull,
                                         Strategy::Exact};
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  bool ok = true;
  std::string detail;
  for (int n : {4, 8}) {
    std::vector<double> final_regret(4, 0.0);
    std::vector<double> curve(60, 0.0);
    // Each seed is one trial: its own team, ground truth and learner stream.
    for (std::uint64_t seed : seeds) {
      std::mt19937_64 rng(seed * 7919 + n);
      const TeamTraitMatrix q = testing::random_team(n, 4, rng, 0.1, 1.0);
      GroundTruthOptions g;
      g.extent = q.team_totals();
      const EfficacyModel truth = sample_ground_truth_model(seed * 104729 + n, 3, 4, MapKind::GpSampled, g);
      for (const auto &run : run_learning(q, truth, strategies, {seed}, 60)) {
        final_regret[static_cast<int>(run.strategy)] += run.result.metrics.back().cumulative_regret / seeds.size();
        if (run.strategy == Strategy::Unconstrained)
          for (int i = 0; i < 60; ++i) curve[i] += run.result.metrics[i].cumulative_regret / seeds.size();
      }
    }
    const double unc = final_regret[0], box = final_regret[1], hull = final_regret[2], exact = final_regret[3];
    const double r2 = linear_fit_r2(curve);
    ok = ok && exact <= hull && exact <= box && box < unc && r2 >= 0.9;
    detail += "N=" + std::to_string(n) + " unc " + fmt("%.2f", unc) + " box " + fmt("%.2f", box) + " hull " +
              fmt("%.2f", hull) + " exact " + fmt("%.2f", exact) + " R2 " + fmt("%.3f", r2) + "; ";
  }
  const double secs = seconds_since(t0);
  report(5, "regret ordering", ok && secs < 900.0, detail + fmt("%.1f s", secs));
}

void runtime_scaling() {
  auto step = [](Strategy s, int n) { return mean_step_seconds(s, n, 3, 4, 60, 11); };
  const double e6 = step(Strategy::Exact, 6), e14 = step(Strategy::Exact, 14);
  const double b6 = step(Strategy::Box, 6), b14 = step(Strategy::Box, 14);
  const double h6 = step(Strategy::ConvexHull, 6), h14 = step(Strategy::ConvexHull, 14);
  const bool ok = e14 >= 10.0 * e6 && b14 <= 2.0 * b6 && h14 <= 2.0 * h6;
  report(6, "per-step runtime scaling", ok,
         "exact x" + fmt("%.1f", e14 / e6) + ", box x" + fmt("%.2f", b14 / b6) + ", convex-hull x" +
             fmt("%.2f", h14 / h6) + " from N=6 to N=14");
}

void projection_optimal() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int match = 0;
  for (int k = 0; k < 500; ++k) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const int traits = 1 + static_cast<int>(rng() % 4);
    const TeamTraitMatrix q = testing::random_team(n, traits, rng);
    const Eigen::VectorXd totals = q.team_totals();
    Eigen::MatrixXd target(1, traits);
    std::vector<double> t(traits);
    for (int j = 0; j < traits; ++j) t[j] = target(0, j) = 1.2 * totals[j] * u(rng) - 0.1 * totals[j];
    const Projection p = project_to_realizable(target, q, k);
    const double got = (target.row(0).transpose() - coalition_traits(p.allocation.row(0), q)).squaredNorm();
    const double best = oracle::best_residual(q.entries(), t);
    if (!p.approximate && got <= best + 1e-9 * (1.0 + best)) ++match;
  }
  report(7, "projection matches exhaustive optimum", match == 500, std::to_string(match) + "/500");
}

void hull_construction() {
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  bool in_box = true;
  for (int k = 0; k < 1000; ++k) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const int tasks = 1 + static_cast<int>(rng() % 3);
    const int traits = 1 + static_cast<int>(rng() % 4);
    const TeamTraitMatrix q = testing::random_team(n, traits, rng);
    const int vertices = 1 + static_cast<int>(rng() % 8);
    std::vector<double> lambda(vertices);
    for (double &l : lambda) l = -std::log(1.0 - u(rng));
    const double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
    for (double &l : lambda) l /= total;
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(tasks, n);
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(tasks, traits);
    for (int v = 0; v < vertices; ++v) {
      std::vector<std::uint64_t> rows(tasks);
      for (auto &r : rows) r = rng() & ((std::uint64_t{1} << n) - 1);
      const Allocation a = Allocation::from_rows(n, rows);
      for (int t = 0; t < tasks; ++t)
        for (int i = 0; i < n; ++i) s(t, i) += lambda[v] * (a.get(t, i) ? 1.0 : 0.0);
      y += lambda[v] * aggregated_traits(a, q);
    }
    in_box = in_box && s.minCoeff() >= 0.0 && s.maxCoeff() <= 1.0 + 1e-15;
    worst = std::max(worst, (s * q.entries() - y).cwiseAbs().maxCoeff());
  }
  LearnerConfig config;
  int binary = 0, exact = 0;
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const TeamTraitMatrix q = testing::random_team(n, 1 + static_cast<int>(rng() % 4), rng);
    const RealizableSet region(q);
    for (const Candidate &c : sample_candidates(Strategy::ConvexHull, region, 20, rng, config)) {
      Eigen::VectorXd bin = c.generator;
      std::uint64_t mask = 0;
      for (int i = 0; i < n; ++i) {
        bin[i] = bin[i] >= 0.5 ? 1.0 : 0.0;
        if (bin[i] == 1.0) mask |= std::uint64_t{1} << i;
      }
      ++binary;
      Eigen::VectorXd vertex(q.traits());
      region.table().sum(mask, vertex.data());
      const Eigen::VectorXd y = hull_point(q, bin);
      if (y == coalition_traits(mask, q) && (y - vertex).cwiseAbs().maxCoeff() <= 1e-12) ++exact;
    }
  }
  report(8, "convex-hull construction", worst <= 1e-12 && in_box && exact == binary,
         "max |SQ - sum lambda Y| " + fmt("%.2e", worst) + ", binary generators in Y_Q " +
             std::to_string(exact) + "/" + std::to_string(binary));
}

void gp_matches_oracle() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0, worst_interp = 0.0;
  int datasets = 0;
  for (int dims : {1, 4})
    for (int k = 0; k < 50; ++k, ++datasets) {
      const int n = 2 + static_cast<int>(rng() % 25);
      const GpHyperparameters hyper{0.2 + u(rng), 0.5 + u(rng), 1e-4 + 1e-2 * u(rng)};
      std::vector<std::vector<double>> xs(n, std::vector<double>(dims));
      std::vector<Eigen::VectorXd> inputs;
      std::vector<double> ys(n);
      for (int i = 0; i < n; ++i) {
        Eigen::VectorXd x(dims);
        for (int j = 0; j < dims; ++j) x[j] = xs[i][j] = u(rng);
        inputs.push_back(x);
        ys[i] = u(rng);
      }
      GaussianProcess gp(dims, hyper);
      gp.fit(inputs, ys);
      for (int probe = 0; probe < 10; ++probe) {
        std::vector<double> x(dims);
        Eigen::VectorXd xe(dims);
        for (int j = 0; j < dims; ++j) xe[j] = x[j] = u(rng);
        const auto want = oracle::gp_posterior(xs, ys, hyper.length_scale, hyper.signal_variance,
                                               hyper.noise_variance, x);
        const auto got = gp.predict(xe);
        worst = std::max({worst, std::abs(got.mean - want.mean), std::abs(got.variance - want.variance)});
      }
      // Noiseless fit on a well-separated grid.
      const int m = 2 + static_cast<int>(rng() % 5);
      std::vector<Eigen::VectorXd> grid;
      std::vector<double> labels;
      for (int i = 0; i < m; ++i) {
        Eigen::VectorXd x = Eigen::VectorXd::Constant(dims, 0.0);
        x[i % dims] = static_cast<double>(i);
        grid.push_back(x);
        labels.push_back(u(rng));
      }
      GaussianProcess exact(dims, {0.5, 1.0, 0.0});
      exact.fit(grid, labels);
      for (int i = 0; i < m; ++i) {
        const auto p = exact.predict(grid[i]);
        worst_interp = std::max({worst_interp, std::abs(p.mean - labels[i]), std::abs(p.variance)});
      }
    }
  report(9, "GP posterior vs Gram solve", worst <= 1e-6 && worst_interp <= 1e-6,
         std::to_string(datasets) + " datasets, max error " + fmt("%.2e", worst) + ", interpolation error " +
             fmt("%.2e", worst_interp));
}

void holistic_pipeline() {
  std::vector<double> exact_scores, unc_scores;
  for (int k = 0; k < 10; ++k) {
    GeneratorParams p;
    p.tasks = 3;
    p.robots = 4;
    p.traits = 2;
    p.map_kind = MapKind::GpSampled;
    p.budget_factor = 0.7;
    const ProblemDomain d = generate_instance(p, 5000 + k);
    const auto runs = run_learning(d.traits, d.efficacy, {Strategy::Exact, Strategy::Unconstrained}, {0}, 60);
    for (const auto &run : runs) {
      const EfficacyModel learned = run.result.state.learned_model();
      for (double alpha : {0.3, 0.5, 0.7}) {
        const double score = holistic_efficacy(d, learned, alpha).value_or(0.0);
        (run.strategy == Strategy::Exact ? exact_scores : unc_scores).push_back(score);
      }
    }
  }
  const double me = median(exact_scores), mu = median(unc_scores);
  report(10, "holistic pipeline", me >= mu,
         "median ground-truth efficacy exact " + fmt("%.4f", me) + " vs unconstrained " + fmt("%.4f", mu));
}

} // namespace

int main() {
  bound_sweep_and_nac();
  branch_and_bound_exact();
  budget_tightening();
  regret_ordering();
  runtime_scaling();
  projection_optimal();
  hull_construction();
  gp_matches_oracle();
  holistic_pipeline();
  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
