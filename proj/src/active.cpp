#include "steam/active.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace steam {

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
  case Strategy::Unconstrained: return "unconstrained";
  case Strategy::Box: return "box";
  case Strategy::ConvexHull: return "convex-hull";
  case Strategy::Exact: return "exact";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "unconstrained") return Strategy::Unconstrained;
  if (name == "box") return Strategy::Box;
  if (name == "convex-hull") return Strategy::ConvexHull;
  if (name == "exact") return Strategy::Exact;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

// ------------------------------------------------------------ RealizableSet

RealizableSet::RealizableSet(const TeamTraitMatrix &traits, int enumeration_cap)
    : traits_(traits), totals_(traits.team_totals()), cap_(enumeration_cap) {
  if (traits.robots() <= enumeration_cap) table_.emplace(traits);
}

const CoalitionTable &RealizableSet::table() const {
  if (!table_)
    throw std::length_error("enumeration cap: " + std::to_string(traits_.robots()) +
                            " robots exceed the limit of " + std::to_string(cap_));
  return *table_;
}

Eigen::MatrixXd RealizableSet::vertices() const {
  const CoalitionTable &t = table();
  Eigen::MatrixXd v(static_cast<Eigen::Index>(t.coalitions()), t.traits());
  for (std::uint64_t mask = 0; mask < t.coalitions(); ++mask)
    v.row(static_cast<Eigen::Index>(mask)) = t.sum(mask).transpose();
  return v;
}

// ------------------------------------------------------------ projection

namespace {

double residual(const Eigen::Ref<const Eigen::VectorXd> &target, std::uint64_t mask,
                const TeamTraitMatrix &traits) {
  return (target - coalition_traits(mask, traits)).squaredNorm();
}

RowProjection hill_climb(const Eigen::VectorXd &target, const TeamTraitMatrix &traits,
                         std::mt19937_64 &rng, int restarts) {
  const int n = traits.robots();
  const std::uint64_t full = n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
  RowProjection best{0, residual(target, 0, traits)};
  for (int r = 0; r < std::max(restarts, 1); ++r) {
    std::uint64_t mask = rng() & full;
    double value = residual(target, mask, traits);
    for (;;) {
      std::uint64_t step = mask;
      double step_value = value;
      for (int bit = 0; bit < n; ++bit) {
        const std::uint64_t flipped = mask ^ (std::uint64_t{1} << bit);
        const double v = residual(target, flipped, traits);
        if (v < step_value || (v == step_value && coalition_before(flipped, step))) {
          step = flipped;
          step_value = v;
        }
      }
      if (step == mask) break;
      mask = step;
      value = step_value;
    }
    if (value < best.residual || (value == best.residual && coalition_before(mask, best.coalition)))
      best = {mask, value};
  }
  return best;
}

} // namespace

namespace {

Projection project_rows(const Eigen::MatrixXd &target, const TeamTraitMatrix &traits,
                        const CoalitionTable *table, std::uint64_t seed, int restarts) {
  if (target.cols() != traits.traits())
    throw std::invalid_argument("target has the wrong number of trait columns");
  const int tasks = static_cast<int>(target.rows());
  std::vector<std::uint64_t> rows(tasks);
  Projection out;
  if (table) {
    for (int m = 0; m < tasks; ++m) {
      const Eigen::VectorXd row = target.row(m).transpose();
      rows[m] = project_row(*table, std::span<const double>(row.data(), row.size())).coalition;
    }
  } else {
    std::mt19937_64 rng(seed);
    for (int m = 0; m < tasks; ++m)
      rows[m] = hill_climb(target.row(m).transpose(), traits, rng, restarts).coalition;
    out.approximate = true;
  }
  out.allocation = Allocation::from_rows(traits.robots(), std::move(rows));
  out.traits = aggregated_traits(out.allocation, traits);
  return out;
}

} // namespace

Projection project_to_realizable(const Eigen::MatrixXd &target, const TeamTraitMatrix &traits,
                                 std::uint64_t seed, int restarts) {
  if (traits.robots() > 20) return project_rows(target, traits, nullptr, seed, restarts);
  const CoalitionTable table(traits);
  return project_rows(target, traits, &table, seed, restarts);
}

Projection project_to_realizable(const Eigen::MatrixXd &target, const RealizableSet &region,
                                 std::uint64_t seed, int restarts) {
  const bool exhaustive = region.enumerable() && region.traits().robots() <= 20;
  if (!exhaustive && region.traits().robots() <= 20)
    return project_to_realizable(target, region.traits(), seed, restarts);
  return project_rows(target, region.traits(), exhaustive ? &region.table() : nullptr, seed, restarts);
}

// ------------------------------------------------------------ candidates

Eigen::VectorXd hull_point(const TeamTraitMatrix &traits, const Eigen::VectorXd &s) {
  if (s.size() != traits.robots()) throw std::invalid_argument("generator has the wrong length");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(traits.traits());
  for (int n = 0; n < traits.robots(); ++n)
    if (s[n] != 0.0)
      for (int u = 0; u < traits.traits(); ++u) y[u] += s[n] * traits(n, u);
  return y;
}

namespace {

double uniform(std::mt19937_64 &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Eigen::VectorXd region_upper(Strategy strategy, const RealizableSet &region) {
  if (strategy == Strategy::Unconstrained)
    return Eigen::VectorXd::Constant(region.team_totals().size(), 2.0 * region.scale());
  return region.team_totals();
}

} // namespace

std::vector<Candidate> sample_candidates(Strategy strategy, const RealizableSet &region, int count,
                                         std::mt19937_64 &rng, const LearnerConfig &config) {
  if (count < 1) throw std::invalid_argument("candidate count must be at least 1");
  const int dims = static_cast<int>(region.team_totals().size());
  const double r0 = config.radius_fraction * region.scale();
  std::vector<Candidate> pool;

  if (strategy == Strategy::Exact) {
    const CoalitionTable &table = region.table();
    pool.resize(table.coalitions());
    for (std::uint64_t mask = 0; mask < table.coalitions(); ++mask) {
      pool[mask].center = table.sum(mask);
      pool[mask].coalition = mask;
    }
    return pool;
  }

  pool.resize(count);
  const Eigen::VectorXd upper = region_upper(strategy, region);
  const Eigen::MatrixXd &q = region.traits().entries();
  for (auto &c : pool) {
    c.radius = r0;
    if (strategy == Strategy::ConvexHull) {
      c.generator.resize(q.rows());
      for (Eigen::Index n = 0; n < q.rows(); ++n) c.generator[n] = uniform(rng, 0.0, 1.0);
      c.center = hull_point(region.traits(), c.generator);
    } else {
      c.center.resize(dims);
      for (int u = 0; u < dims; ++u) c.center[u] = uniform(rng, 0.0, upper[u]);
    }
  }
  return pool;
}

Eigen::VectorXd sample_neighbor(Strategy strategy, const RealizableSet &region,
                                const Candidate &candidate, std::mt19937_64 &rng) {
  const double r = candidate.radius;
  if (strategy == Strategy::Exact || !(r > 0.0)) return candidate.center;
  const int dims = static_cast<int>(candidate.center.size());

  if (strategy == Strategy::ConvexHull) {
    const Eigen::MatrixXd &q = region.traits().entries();
    const double widest = q.rowwise().norm().maxCoeff();
    const double step = widest > 0.0 ? std::min(1.0, r / widest) : 0.0;
    Eigen::VectorXd s = candidate.generator;
    for (Eigen::Index n = 0; n < s.size(); ++n)
      s[n] = std::clamp(s[n] + uniform(rng, -step, step), 0.0, 1.0);
    Eigen::VectorXd offset = hull_point(region.traits(), s) - candidate.center;
    const double norm = offset.norm();
    // Shrinking along s -> generator stays in [0,1]^N, hence in the hull.
    if (norm > r) offset *= r / norm;
    return candidate.center + offset;
  }

  // Rejection keeps the draw uniform on ball and box; the center is inside,
  // so at least 2^-U of the ball qualifies.
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::VectorXd upper = region_upper(strategy, region);
  Eigen::VectorXd dir(dims);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (int u = 0; u < dims; ++u) dir[u] = normal(rng);
    const double len = dir.norm();
    if (len > 0.0) dir /= len;
    const double rho = r * std::pow(uniform(rng, 0.0, 1.0), 1.0 / dims);
    const Eigen::VectorXd p = candidate.center + rho * dir;
    if ((p.array() >= 0.0).all() && (p.array() <= upper.array()).all()) return p;
  }
  return candidate.center;
}

// ------------------------------------------------------------ learner

LearnerState::LearnerState(const TeamTraitMatrix &traits, int tasks, Strategy strategy, int budget,
                           std::uint64_t seed, LearnerConfig config)
    : strategy_(strategy), budget_(budget), config_(config),
      region_(traits, config.enumeration_cap), rng_(seed) {
  if (tasks < 1) throw std::invalid_argument("learner needs at least one task");
  if (budget < 0) throw std::invalid_argument("budget must be non-negative");
  if (strategy == Strategy::Exact) (void)region_.table();

  const double scale = region_.scale() > 0.0 ? region_.scale() : 1.0;
  GpHyperparameters hyper{config.length_scale_fraction * scale, config.signal_variance,
                          config.noise_variance};
  gps_.assign(tasks, GaussianProcess(traits.traits(), hyper));
  if (strategy != Strategy::Exact) {
    pools_.reserve(tasks);
    for (int m = 0; m < tasks; ++m)
      pools_.push_back(sample_candidates(strategy, region_, config.candidates, rng_, config));
  }
}

Query LearnerState::select_query() {
  const int tasks = this->tasks();
  const TeamTraitMatrix &traits = region_.traits();
  const int dims = traits.traits();
  Query query;
  query.target.resize(tasks, dims);
  query.chosen.assign(tasks, 0);

  if (strategy_ == Strategy::Exact) {
    const CoalitionTable &table = region_.table();
    std::vector<double> scores(table.coalitions());
    std::vector<std::uint64_t> rows(tasks);
    for (int m = 0; m < tasks; ++m) {
      score_coalitions(gps_[m], table, config_.beta, scores);
      rows[m] = argmax(scores);
      query.chosen[m] = static_cast<int>(rows[m]);
      query.target.row(m) = table.sum(rows[m]).transpose();
    }
    query.allocation = Allocation::from_rows(traits.robots(), std::move(rows));
    query.traits = aggregated_traits(query.allocation, traits);
    return query;
  }

  const int per = std::max(config_.neighbors, 1);
  const double r0 = config_.radius_fraction * region_.scale();
  for (int m = 0; m < tasks; ++m) {
    auto &pool = pools_[m];
    const int count = static_cast<int>(pool.size());
    // Neighbors are drawn serially so the RNG stream is thread-count independent.
    Eigen::MatrixXd points(static_cast<Eigen::Index>(count) * per, dims);
    for (int c = 0; c < count; ++c)
      for (int k = 0; k < per; ++k)
        points.row(c * per + k) = sample_neighbor(strategy_, region_, pool[c], rng_).transpose();
    std::vector<double> scores(points.rows());
    score_points(gps_[m], points, config_.beta, scores);

    std::vector<double> aggregate(count);
    for (int c = 0; c < count; ++c) {
      const auto first = scores.begin() + c * per;
      aggregate[c] = config_.aggregate_max ? *std::max_element(first, first + per)
                                           : std::accumulate(first, first + per, 0.0) / per;
    }
    const int chosen = static_cast<int>(argmax(aggregate));
    const std::size_t best_neighbor =
        argmax(std::span<const double>(scores.data() + chosen * per, per));
    query.chosen[m] = chosen;
    query.target.row(m) = points.row(chosen * per + static_cast<Eigen::Index>(best_neighbor));

    Candidate &picked = pool[chosen];
    ++picked.selections;
    picked.radius = r0 * std::pow(config_.shrink, picked.selections);
  }

  Projection projected = project_to_realizable(query.target, region_, rng_(),
                                               config_.projection_restarts);
  query.allocation = std::move(projected.allocation);
  query.traits = std::move(projected.traits);
  return query;
}

void LearnerState::update(const Query &query, const std::vector<double> &labels) {
  if (static_cast<int>(labels.size()) != tasks())
    throw std::invalid_argument("need one label per task");
  for (int m = 0; m < tasks(); ++m) gps_[m].add(query.traits.row(m).transpose(), labels[m]);
  history_.push_back({query.allocation, query.traits, labels});
}

EfficacyModel LearnerState::learned_model() const {
  std::vector<TraitEfficacyMap> maps;
  for (const auto &gp : gps_) maps.emplace_back(GpLearnedMap{gp});
  return EfficacyModel(std::move(maps));
}

Evaluator synthetic_evaluator(EfficacyModel ground_truth, TeamTraitMatrix traits,
                              double noise_stddev, std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [model = std::move(ground_truth), traits = std::move(traits), noise_stddev,
          rng](const Allocation &allocation) {
    std::vector<double> labels(allocation.tasks());
    std::normal_distribution<double> noise(0.0, noise_stddev > 0.0 ? noise_stddev : 1.0);
    for (int m = 0; m < allocation.tasks(); ++m) {
      double v = task_efficacy(model[m], coalition_traits(allocation.row(m), traits));
      if (noise_stddev > 0.0) v = std::clamp(v + noise(*rng), 0.0, 1.0);
      labels[m] = v;
    }
    return labels;
  };
}

double optimal_efficacy(const EfficacyModel &ground_truth, const TeamTraitMatrix &traits) {
  const std::uint64_t count = std::uint64_t{1} << traits.robots();
  double total = 0.0;
  for (int m = 0; m < ground_truth.size(); ++m) {
    double best = 0.0;
    for (std::uint64_t mask = 0; mask < count; ++mask)
      best = std::max(best, task_efficacy(ground_truth[m], coalition_traits(mask, traits)));
    total += best;
  }
  return total;
}

LearnResult learn(const TeamTraitMatrix &traits, int tasks, const Evaluator &evaluator,
                  Strategy strategy, int budget, std::uint64_t seed, const LearnerConfig &config,
                  const EfficacyModel *ground_truth) {
  LearnResult result{LearnerState(traits, tasks, strategy, budget, seed, config), {}, false, false, {}};
  result.has_regret = ground_truth != nullptr;
  const double optimum = ground_truth ? optimal_efficacy(*ground_truth, traits) : 0.0;
  double cumulative = 0.0;
  double best_reward = -std::numeric_limits<double>::infinity();

  using Clock = std::chrono::steady_clock;
  for (int t = 0; t < budget; ++t) {
    const auto t0 = Clock::now();
    Query query = result.state.select_query();
    double seconds = std::chrono::duration<double>(Clock::now() - t0).count();

    std::vector<double> labels;
    try {
      labels = evaluator(query.allocation);
      if (static_cast<int>(labels.size()) != tasks) throw std::runtime_error("evaluator returned the wrong label count");
    } catch (const std::exception &e) {
      result.aborted = true;
      result.error = e.what();
      break;
    }

    const auto t1 = Clock::now();
    result.state.update(query, labels);
    seconds += std::chrono::duration<double>(Clock::now() - t1).count();

    IterationMetrics row;
    row.iteration = t + 1;
    if (ground_truth) {
      row.instantaneous_regret = optimum - total_efficacy(*ground_truth, query.allocation, traits);
      cumulative += row.instantaneous_regret;
      row.cumulative_regret = cumulative;
    }
    double reward = 0.0;
    for (double l : labels) reward += l;
    best_reward = std::max(best_reward, reward);
    row.best_uncovered_reward = best_reward;
    row.step_seconds = seconds;
    result.metrics.push_back(row);
  }
  return result;
}

} // namespace steam
