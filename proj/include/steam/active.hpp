#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "steam/efficacy.hpp"
#include "steam/gp.hpp"
#include "steam/kernels.hpp"
#include "steam/model.hpp"
#include "steam/types.hpp"

namespace steam {

enum class Strategy { Unconstrained, Box, ConvexHull, Exact };

std::string_view to_string(Strategy strategy);
/// Accepts unconstrained, box, convex-hull, exact. Throws std::invalid_argument.
Strategy parse_strategy(std::string_view name);

/// Learner hyperparameters. Length-like quantities are fractions of |q_bar|_inf.
struct LearnerConfig {
  int candidates = 50;
  int neighbors = 10;
  double radius_fraction = 0.25;
  double shrink = 0.8;
  double beta = 4.0;
  double length_scale_fraction = 0.3;
  double signal_variance = 1.0;
  double noise_variance = 1e-4;
  /// Aggregate neighbor UCB by max; false uses the mean.
  bool aggregate_max = true;
  /// Largest team for which coalitions are enumerated.
  int enumeration_cap = 20;
  int projection_restarts = 16;
};

/// Team-level view of which per-task trait vectors a coalition can produce.
class RealizableSet {
public:
  RealizableSet(const TeamTraitMatrix &traits, int enumeration_cap = 20);

  const TeamTraitMatrix &traits() const { return traits_; }
  const Eigen::VectorXd &team_totals() const { return totals_; }
  double scale() const { return totals_.size() ? totals_.maxCoeff() : 0.0; }
  bool enumerable() const { return table_.has_value(); }
  /// Throws std::length_error when the team exceeds the enumeration cap.
  const CoalitionTable &table() const;
  /// Every coalition sum, one row per coalition mask.
  Eigen::MatrixXd vertices() const;

private:
  TeamTraitMatrix traits_;
  Eigen::VectorXd totals_;
  int cap_;
  std::optional<CoalitionTable> table_;
};

struct Projection {
  Allocation allocation;
  Eigen::MatrixXd traits;   // Y' = A' Q
  bool approximate = false; // hill climbing was used (N > 20)
};

/// argmin over binary A of |Y - A Q|_F^2, solved row by row. Exhaustive for
/// N <= 20; otherwise bit-flip hill climbing from `restarts` random starts.
Projection project_to_realizable(const Eigen::MatrixXd &target, const TeamTraitMatrix &traits,
                                 std::uint64_t seed = 0, int restarts = 16);
/// Same, reusing the region's coalition table when it has one.
Projection project_to_realizable(const Eigen::MatrixXd &target, const RealizableSet &region,
                                 std::uint64_t seed = 0, int restarts = 16);

struct Candidate {
  Eigen::VectorXd center;
  double radius = 0.0;
  int selections = 0;
  /// Relaxed allocation row s with center = Q^T s (convex-hull strategy only).
  Eigen::VectorXd generator;
  /// Coalition mask (exact strategy only).
  std::uint64_t coalition = 0;
};

/// Q^T s accumulated robot by robot, so a binary s reproduces coalition_traits exactly.
Eigen::VectorXd hull_point(const TeamTraitMatrix &traits, const Eigen::VectorXd &s);

/// Initial candidate pool for one task. For Exact the pool is every coalition
/// sum and `count` is ignored; throws std::length_error beyond the cap.
std::vector<Candidate> sample_candidates(Strategy strategy, const RealizableSet &region, int count,
                                         std::mt19937_64 &rng, const LearnerConfig &config);

/// A point drawn uniformly from the candidate's ball, kept inside the strategy's region.
Eigen::VectorXd sample_neighbor(Strategy strategy, const RealizableSet &region,
                                const Candidate &candidate, std::mt19937_64 &rng);

struct Query {
  Allocation allocation;
  Eigen::MatrixXd traits;  // realizable, = allocation * Q
  Eigen::MatrixXd target;  // pre-projection point per task
  std::vector<int> chosen; // candidate index per task
};

struct HistoryEntry {
  Allocation allocation;
  Eigen::MatrixXd traits;
  std::vector<double> labels;
};

/// Per-task GPs, candidate pools, and query history of one learning run.
class LearnerState {
public:
  LearnerState(const TeamTraitMatrix &traits, int tasks, Strategy strategy, int budget,
               std::uint64_t seed, LearnerConfig config = {});

  /// Steps (i)-(iv): score neighborhoods, pick per task, zoom, project.
  Query select_query();
  /// Step (vi): one training pair per task.
  void update(const Query &query, const std::vector<double> &labels);

  Strategy strategy() const { return strategy_; }
  int budget() const { return budget_; }
  int tasks() const { return static_cast<int>(gps_.size()); }
  bool exhausted() const { return static_cast<int>(history_.size()) >= budget_; }
  const RealizableSet &region() const { return region_; }
  const LearnerConfig &config() const { return config_; }
  const std::vector<GaussianProcess> &models() const { return gps_; }
  const std::vector<std::vector<Candidate>> &pools() const { return pools_; }
  const std::vector<HistoryEntry> &history() const { return history_; }

  /// Learned maps (posterior mean, clamped) as an efficacy model.
  EfficacyModel learned_model() const;

private:
  Strategy strategy_;
  int budget_;
  LearnerConfig config_;
  RealizableSet region_;
  std::mt19937_64 rng_;
  std::vector<GaussianProcess> gps_;
  std::vector<std::vector<Candidate>> pools_;
  std::vector<HistoryEntry> history_;
};

/// Labels one allocation with a score in [0,1] per task.
using Evaluator = std::function<std::vector<double>(const Allocation &)>;

/// pi_m(y_m) from `ground_truth`, plus N(0, noise_stddev^2) clamped to [0,1].
Evaluator synthetic_evaluator(EfficacyModel ground_truth, TeamTraitMatrix traits,
                              double noise_stddev = 0.0, std::uint64_t seed = 0);

struct IterationMetrics {
  int iteration = 0;
  double instantaneous_regret = 0.0;
  double cumulative_regret = 0.0;
  double best_uncovered_reward = 0.0;
  double step_seconds = 0.0;
};

struct LearnResult {
  LearnerState state;
  std::vector<IterationMetrics> metrics;
  bool has_regret = false;
  /// Evaluator threw; metrics hold the completed iterations.
  bool aborted = false;
  std::string error;
};

/// Best achievable total efficacy when tasks are unconstrained: each task
/// takes its best coalition independently.
double optimal_efficacy(const EfficacyModel &ground_truth, const TeamTraitMatrix &traits);

/// Runs the loop for `budget` queries. With `ground_truth` set, regret is
/// measured against optimal_efficacy; otherwise the regret columns stay 0.
LearnResult learn(const TeamTraitMatrix &traits, int tasks, const Evaluator &evaluator,
                  Strategy strategy, int budget, std::uint64_t seed,
                  const LearnerConfig &config = {},
                  const EfficacyModel *ground_truth = nullptr);

} // namespace steam
