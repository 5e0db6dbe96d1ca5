#pragma once

#include <cstdint>

#include "steam/efficacy.hpp"
#include "steam/model.hpp"

namespace steam {

struct GeneratorParams {
  int tasks = 3;
  int robots = 4;
  int traits = 2;
  int width = 12;
  int height = 12;
  double obstacle_density = 0.1;
  MapKind map_kind = MapKind::LinearSaturating;
  /// time_budget = budget_factor * worst_makespan.
  double budget_factor = 0.7;
  double alpha = 0.5;
  double precedence_probability = 0.2;
  double mutex_probability = 0.1;
  double min_duration = 1.0;
  double max_duration = 5.0;
  /// Speeds drawn from [0.5, 1.5] instead of all 1.0.
  bool random_speeds = false;
};

/// Random instance that passes validate_instance. Deterministic per seed.
/// Throws std::runtime_error when 100 layouts in a row leave a site unreachable.
ProblemDomain generate_instance(const GeneratorParams &params, std::uint64_t seed);

} // namespace steam
