// steamkit command-line front end: solve, learn, validate-bounds, bench, gen.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "steam/active.hpp"
#include "steam/experiments.hpp"
#include "steam/generator.hpp"
#include "steam/io.hpp"
#include "steam/kernels.hpp"
#include "steam/search.hpp"

namespace fs = std::filesystem;
using namespace steam;

namespace {

enum Exit { kOk = 0, kInput = 1, kInfeasible = 2, kInternal = 3 };

// Bad user input; reported as exit code 1.
struct InputError : std::runtime_error {
  json detail;
  InputError(const std::string &what, json d = json::object())
      : std::runtime_error(what), detail(std::move(d)) {}
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path &path, const std::string &text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

json parse_json(const std::string &text, const std::string &source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    throw InputError(source + " is not valid JSON", {{"detail", e.what()}});
  }
}

ProblemDomain load_valid(const std::string &path) {
  ProblemDomain d;
  try {
    d = load_instance(parse_json(read_file(path), path));
  } catch (const SchemaError &e) {
    throw InputError(e.what(), {{"file", path}, {"path", e.path()}});
  }
  const auto violations = validate_instance(d);
  if (!violations.empty()) {
    json list = json::array();
    for (const auto &v : violations) list.push_back({{"code", v.code}, {"message", v.message}});
    throw InputError("instance failed validation", {{"file", path}, {"violations", list}});
  }
  return d;
}

// ------------------------------------------------------------------ solve

struct SolveArgs {
  std::string instance;
  std::optional<double> alpha;
  std::optional<double> budget;
  std::string out;
  std::string model;
};

int cmd_solve(const SolveArgs &a) {
  ProblemDomain d = load_valid(a.instance);
  if (!a.model.empty()) {
    try {
      d.efficacy = efficacy_from_json(parse_json(read_file(a.model), a.model), "");
    } catch (const SchemaError &e) {
      throw InputError(e.what(), {{"file", a.model}, {"path", e.path()}});
    }
    const auto violations = validate_instance(d);
    if (!violations.empty())
      throw InputError("learned model does not fit the instance: " + violations.front().message);
  }
  if (a.alpha && !(*a.alpha >= 0.0 && *a.alpha <= 1.0)) throw InputError("--alpha must lie in [0,1]");
  if (a.budget && !(*a.budget > 0.0)) throw InputError("--budget must be positive");

  SearchOptions options;
  options.alpha = a.alpha;
  options.time_budget = a.budget;
  const SearchReport report = solve(d, options);
  const std::string solution = solution_to_json(report).dump(2) + "\n";

  std::ostringstream stats;
  stats << "efficacy,makespan,nodes_expanded,nodes_evaluated,allocation_seconds,scheduling_seconds,"
           "motion_seconds\n";
  stats << (report.solution ? num(report.solution->efficacy) : "") << ','
        << (report.solution ? num(report.solution->makespan) : "") << ',' << report.nodes_expanded
        << ',' << report.nodes_evaluated << ',' << num(report.times.allocation) << ','
        << num(report.times.scheduling) << ',' << num(report.times.motion) << '\n';

  if (a.out.empty()) {
    std::cout << solution;
  } else {
    write_file(fs::path(a.out) / "solution.json", solution);
    write_file(fs::path(a.out) / "stats.csv", stats.str());
  }
  if (!report.solution) {
    std::cerr << json{{"error", "infeasible"}, {"message", "no allocation fits the time budget"}}.dump() << '\n';
    return kInfeasible;
  }
  return kOk;
}

// ------------------------------------------------------------------ learn

struct LearnArgs {
  std::string instance;
  std::vector<std::string> strategies{"unconstrained", "box", "convex-hull", "exact"};
  int budget = 60;
  std::vector<std::uint64_t> seeds{0};
  std::string config;
  std::string out;
  std::string oracle = "on";
  double noise = 0.0;
};

int cmd_learn(const LearnArgs &a) {
  const ProblemDomain d = load_valid(a.instance);
  LearnerConfig config;
  if (!a.config.empty()) {
    try {
      config = config_from_json(parse_json(read_file(a.config), a.config));
    } catch (const SchemaError &e) {
      throw InputError(e.what(), {{"file", a.config}, {"path", e.path()}});
    }
  }
  if (a.budget < 0) throw InputError("--budget must be non-negative");
  std::vector<Strategy> strategies;
  for (const auto &s : a.strategies) {
    try {
      strategies.push_back(parse_strategy(s));
    } catch (const std::invalid_argument &e) {
      throw InputError(e.what());
    }
  }
  const bool regret = a.oracle == "on";

  std::ostringstream csv;
  csv << "iteration,instantaneous_regret,cumulative_regret,best_uncovered_reward,step_seconds,"
         "strategy,seed\n";
  for (Strategy strategy : strategies)
    for (std::uint64_t seed : a.seeds) {
      if (strategy == Strategy::Exact && d.robots() > config.enumeration_cap)
        throw InputError("enumeration cap: exact strategy needs at most " +
                         std::to_string(config.enumeration_cap) + " robots");
      const Evaluator evaluator = synthetic_evaluator(d.efficacy, d.traits, a.noise, seed);
      const LearnResult r = learn(d.traits, d.tasks(), evaluator, strategy, a.budget, seed, config,
                                  regret ? &d.efficacy : nullptr);
      for (const auto &m : r.metrics)
        csv << m.iteration << ',' << (regret ? num(m.instantaneous_regret) : "") << ','
            << (regret ? num(m.cumulative_regret) : "") << ',' << num(m.best_uncovered_reward) << ','
            << num(m.step_seconds) << ',' << to_string(strategy) << ',' << seed << '\n';
      if (!a.out.empty()) {
        const std::string name = "model_" + std::string(to_string(strategy)) + "_" + std::to_string(seed) + ".json";
        write_file(fs::path(a.out) / name, efficacy_to_json(r.state.learned_model()).dump(2) + "\n");
      }
      if (r.aborted) {
        std::cerr << json{{"error", "evaluator"}, {"message", r.error}}.dump() << '\n';
        return kInternal;
      }
    }
  if (a.out.empty()) std::cout << csv.str();
  else write_file(fs::path(a.out) / "metrics.csv", csv.str());
  return kOk;
}

// ------------------------------------------------------------------ gen

struct GenArgs {
  GeneratorParams params;
  std::string map_kind = "linear-saturating";
  std::uint64_t seed = 0;
  int count = 1;
  std::string out;
};

GeneratorParams resolved(const GenArgs &a) {
  GeneratorParams p = a.params;
  try {
    p.map_kind = parse_map_kind(a.map_kind);
  } catch (const std::invalid_argument &e) {
    throw InputError(e.what());
  }
  if (p.map_kind == MapKind::GpLearned) throw InputError("gp-learned maps cannot be generated");
  return p;
}

ProblemDomain generate(const GeneratorParams &p, std::uint64_t seed) {
  try {
    return generate_instance(p, seed);
  } catch (const std::invalid_argument &e) {
    throw InputError(e.what());
  }
}

int cmd_gen(const GenArgs &a) {
  const GeneratorParams p = resolved(a);
  for (int k = 0; k < a.count; ++k) {
    const std::string text = save_instance(generate(p, a.seed + k)).dump(2) + "\n";
    if (a.out.empty()) {
      std::cout << text;
    } else if (a.count == 1) {
      write_file(a.out, text);
    } else {
      write_file(fs::path(a.out) / ("instance_" + std::to_string(k) + ".json"), text);
    }
  }
  return kOk;
}

// ------------------------------------------------------------------ validate-bounds

struct BoundsArgs {
  std::vector<std::string> instances;
  std::vector<double> alphas{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  GenArgs gen;
  int generate = 0;
  std::int64_t oracle_limit = 2000000;
  std::string out;
};

int cmd_validate_bounds(const BoundsArgs &a) {
  for (double alpha : a.alphas)
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("alpha values must lie in [0,1]");
  std::vector<ProblemDomain> instances;
  for (const auto &path : a.instances) instances.push_back(load_valid(path));
  if (a.generate > 0) {
    const GeneratorParams p = resolved(a.gen);
    for (int k = 0; k < a.generate; ++k) instances.push_back(generate(p, a.gen.seed + k));
  }
  if (instances.empty()) throw InputError("no instances: pass files or --generate");
  for (const auto &d : instances)
    if (d.robots() > 20) throw InputError("instances are too large for the exhaustive oracle");

  const auto rows = validate_bounds(instances, a.alphas, 1e-9, a.oracle_limit);
  std::ostringstream csv;
  csv << "instance,alpha,gap,normalized_gap,prehoc,posthoc,holds,oracle_failed\n";
  int failures = 0;
  for (const auto &r : rows) {
    csv << r.instance << ',' << num(r.alpha) << ',' << num(r.gap) << ',' << num(r.normalized_gap)
        << ',' << num(r.bounds.prehoc) << ',' << num(r.bounds.posthoc) << ','
        << (r.holds ? "true" : "false") << ',' << (r.oracle_failed ? "true" : "false") << '\n';
    if (!r.holds && r.alpha < 0.5) ++failures;
  }
  if (a.out.empty()) std::cout << csv.str();
  else write_file(a.out, csv.str());
  std::cerr << rows.size() << " rows, " << failures << " with alpha < 0.5 not holding\n";
  return kOk;
}

// ------------------------------------------------------------------ bench

struct BenchArgs {
  std::string kind = "search";
  GenArgs gen;
  int instances = 10;
  std::vector<double> alphas{0.3, 0.5, 0.7};
  std::vector<int> robots{4, 6, 8, 10, 12, 14};
  std::vector<std::string> strategies{"unconstrained", "box", "convex-hull", "exact"};
  int budget = 60;
  std::string out;
};

int cmd_bench(const BenchArgs &a) {
  std::ostringstream csv;
  if (a.kind == "search") {
    const GeneratorParams p = resolved(a.gen);
    csv << "instance,alpha,feasible,efficacy,makespan,nodes_expanded,allocation_seconds,"
           "scheduling_seconds,motion_seconds\n";
    for (int k = 0; k < a.instances; ++k) {
      const ProblemDomain d = generate(p, a.gen.seed + k);
      for (double alpha : a.alphas) {
        SearchOptions options;
        options.alpha = alpha;
        const SearchReport r = solve(d, options);
        csv << k << ',' << num(alpha) << ',' << (r.solution ? "true" : "false") << ','
            << (r.solution ? num(r.solution->efficacy) : "") << ','
            << (r.solution ? num(r.solution->makespan) : "") << ',' << r.nodes_expanded << ','
            << num(r.times.allocation) << ',' << num(r.times.scheduling) << ','
            << num(r.times.motion) << '\n';
      }
    }
  } else if (a.kind == "learn") {
    csv << "strategy,robots,mean_step_seconds\n";
    for (const auto &name : a.strategies) {
      Strategy s;
      try {
        s = parse_strategy(name);
      } catch (const std::invalid_argument &e) {
        throw InputError(e.what());
      }
      for (int n : a.robots) {
        if (n < 1 || n > 64) throw InputError("robot counts must lie in [1,64]");
        if (s == Strategy::Exact && n > 20) continue;
        csv << name << ',' << n << ','
            << num(mean_step_seconds(s, n, a.gen.params.tasks, a.gen.params.traits, a.budget, a.gen.seed))
            << '\n';
      }
    }
  } else {
    throw InputError("--kind must be search or learn");
  }
  if (a.out.empty()) std::cout << csv.str();
  else write_file(a.out, csv.str());
  return kOk;
}

void add_generator_options(CLI::App *cmd, GenArgs &g) {
  cmd->add_option("--tasks", g.params.tasks, "Number of tasks");
  cmd->add_option("--robots", g.params.robots, "Number of robots");
  cmd->add_option("--traits", g.params.traits, "Number of traits");
  cmd->add_option("--width", g.params.width, "Grid width");
  cmd->add_option("--height", g.params.height, "Grid height");
  cmd->add_option("--obstacles", g.params.obstacle_density, "Obstacle density");
  cmd->add_option("--map-kind", g.map_kind, "linear-saturating or gp-sampled");
  cmd->add_option("--rho", g.params.budget_factor, "Time budget as a fraction of the worst makespan");
  cmd->add_option("--gen-alpha", g.params.alpha, "Alpha stored in generated instances");
  cmd->add_option("--precedence-prob", g.params.precedence_probability, "Precedence edge probability");
  cmd->add_option("--mutex-prob", g.params.mutex_probability, "Mutex pair probability");
  cmd->add_flag("--random-speeds", g.params.random_speeds, "Draw robot speeds from [0.5, 1.5]");
  cmd->add_option("--seed", g.seed, "Base seed");
}

} // namespace

int main(int argc, char **argv) {
  configure_threads_from_env();
  CLI::App app{"Trait-based task allocation with time budgets and active learning of trait efficacy"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto *solve_cmd = app.add_subcommand("solve", "Solve one instance");
  solve_cmd->add_option("instance", solve_args.instance, "Instance JSON")->required();
  solve_cmd->add_option("--alpha", solve_args.alpha, "Trade-off weight in [0,1]");
  solve_cmd->add_option("--budget", solve_args.budget, "Override the time budget");
  solve_cmd->add_option("--out", solve_args.out, "Output directory (solution.json, stats.csv)");
  solve_cmd->add_option("--efficacy-from-model", solve_args.model, "Efficacy model JSON written by learn");

  LearnArgs learn_args;
  auto *learn_cmd = app.add_subcommand("learn", "Learn trait-efficacy maps by active sampling");
  learn_cmd->add_option("instance", learn_args.instance, "Instance JSON (its efficacy is the ground truth)")->required();
  learn_cmd->add_option("--strategy", learn_args.strategies, "unconstrained, box, convex-hull, exact");
  learn_cmd->add_option("--budget", learn_args.budget, "Queries per run");
  learn_cmd->add_option("--seed", learn_args.seeds, "Seeds (repeatable)");
  learn_cmd->add_option("--config", learn_args.config, "Learner config JSON");
  learn_cmd->add_option("--out", learn_args.out, "Output directory (metrics.csv, model_*.json)");
  learn_cmd->add_option("--oracle", learn_args.oracle, "Report regret against the instance ground truth")
      ->check(CLI::IsMember({"on", "off"}));
  learn_cmd->add_option("--noise", learn_args.noise, "Label noise standard deviation");

  BoundsArgs bounds_args;
  auto *bounds_cmd = app.add_subcommand("validate-bounds", "Compare gaps to the suboptimality bounds");
  bounds_cmd->add_option("instances", bounds_args.instances, "Instance JSON files");
  bounds_cmd->add_option("--alphas", bounds_args.alphas, "Alpha grid");
  bounds_cmd->add_option("--generate", bounds_args.generate, "Also generate this many instances");
  bounds_cmd->add_option("--oracle-limit", bounds_args.oracle_limit, "Schedules the exhaustive oracle may try");
  bounds_cmd->add_option("--out", bounds_args.out, "CSV output file");
  add_generator_options(bounds_cmd, bounds_args.gen);

  BenchArgs bench_args;
  auto *bench_cmd = app.add_subcommand("bench", "Batch timing runs");
  bench_cmd->add_option("--kind", bench_args.kind, "search or learn")->check(CLI::IsMember({"search", "learn"}));
  bench_cmd->add_option("--instances", bench_args.instances, "Generated instances (search)");
  bench_cmd->add_option("--alphas", bench_args.alphas, "Alpha grid (search)");
  bench_cmd->add_option("--team-sizes", bench_args.robots, "Robot counts (learn)");
  bench_cmd->add_option("--strategy", bench_args.strategies, "Strategies (learn)");
  bench_cmd->add_option("--budget", bench_args.budget, "Queries per run (learn)");
  bench_cmd->add_option("--out", bench_args.out, "CSV output file");
  add_generator_options(bench_cmd, bench_args.gen);

  GenArgs gen_args;
  auto *gen_cmd = app.add_subcommand("gen", "Generate random instances");
  add_generator_options(gen_cmd, gen_args);
  gen_cmd->add_option("--count", gen_args.count, "Number of instances");
  gen_cmd->add_option("--out", gen_args.out, "Output file, or directory when --count > 1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve_args);
    if (*learn_cmd) return cmd_learn(learn_args);
    if (*bounds_cmd) return cmd_validate_bounds(bounds_args);
    if (*bench_cmd) return cmd_bench(bench_args);
    if (*gen_cmd) return cmd_gen(gen_args);
  } catch (const InputError &e) {
    json err = {{"error", "input"}, {"message", e.what()}};
    err.update(e.detail);
    std::cerr << err.dump() << '\n';
    return kInput;
  } catch (const std::exception &e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return kInternal;
  }
  return kInternal;
}
