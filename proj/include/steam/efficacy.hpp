#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "steam/gp.hpp"
#include "steam/types.hpp"

namespace steam {

enum class MapKind { LinearSaturating, GpSampled, GpLearned };

std::string_view to_string(MapKind kind);
/// Throws std::invalid_argument for unknown names.
MapKind parse_map_kind(std::string_view name);

/// min(w.y / c, 1). Monotone non-decreasing in every trait when w >= 0.
struct LinearSaturatingMap {
  Eigen::VectorXd weights;
  double normalizer = 1.0;
};

/// A fixed draw from a GP prior, stored as values on a regular lattice over
/// [0, extent_u] per axis and evaluated by multilinear interpolation.
struct GpSampledMap {
  std::uint64_t seed = 0;
  Eigen::VectorXd extent;
  int points_per_axis = 2;
  double length_scale = 0.3; // in units of extent
  double mean = 0.5;
  double stddev = 0.25;
  std::vector<double> lattice; // row-major, axis 0 fastest
};

/// Posterior mean of a trained GP.
struct GpLearnedMap {
  GaussianProcess gp;
};

using TraitEfficacyMap = std::variant<LinearSaturatingMap, GpSampledMap, GpLearnedMap>;

MapKind kind_of(const TraitEfficacyMap &map);
int trait_count(const TraitEfficacyMap &map);

/// Score in [0,1]. Throws std::invalid_argument on a dimension mismatch or a
/// negative trait entry.
double task_efficacy(const TraitEfficacyMap &map, const Eigen::Ref<const Eigen::VectorXd> &traits);

class EfficacyModel {
public:
  EfficacyModel() = default;
  explicit EfficacyModel(std::vector<TraitEfficacyMap> maps) : maps_(std::move(maps)) {}

  int size() const { return static_cast<int>(maps_.size()); }
  const TraitEfficacyMap &operator[](int task) const { return maps_[task]; }
  const std::vector<TraitEfficacyMap> &maps() const { return maps_; }

  /// Kind shared by all maps; nullopt when empty or mixed.
  std::optional<MapKind> kind() const;
  /// True when every map is linear-saturating with non-negative weights.
  bool monotone() const;

private:
  std::vector<TraitEfficacyMap> maps_;
};

/// Sum over tasks of pi_m(y_m), y_m = Q^T a_m. Throws on shape mismatch.
double total_efficacy(const EfficacyModel &model, const Allocation &allocation,
                      const TeamTraitMatrix &traits);

struct GroundTruthOptions {
  /// Normalizer for linear-saturating maps becomes w . team_totals.
  std::optional<Eigen::VectorXd> team_totals;
  /// Lattice extent per trait for gp-sampled maps; empty means all ones.
  Eigen::VectorXd extent;
  /// 0 picks clamp(floor(4096^(1/U)), 2, 33).
  int points_per_axis = 0;
  double length_scale = 0.3;
  double mean = 0.5;
  double stddev = 0.25;
};

/// Deterministic given the seed. Throws std::invalid_argument for gp-learned.
TraitEfficacyMap sample_ground_truth(std::uint64_t seed, int traits, MapKind kind,
                                     const GroundTruthOptions &options = {});

/// One map per task, seeded from `seed` and the task index.
EfficacyModel sample_ground_truth_model(std::uint64_t seed, int tasks, int traits, MapKind kind,
                                        const GroundTruthOptions &options = {});

/// Draws the lattice values of a gp-sampled map from its parameters.
void realize_lattice(GpSampledMap &map);

int default_points_per_axis(int traits);

} // namespace steam
