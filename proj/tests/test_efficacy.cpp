#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "steam/efficacy.hpp"

using namespace steam;

namespace {

TraitEfficacyMap linear(std::initializer_list<double> w, double c) {
  Eigen::VectorXd weights(static_cast<Eigen::Index>(w.size()));
  Eigen::Index i = 0;
  for (double v : w) weights[i++] = v;
  return LinearSaturatingMap{weights, c};
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

} // namespace

TEST_CASE("linear saturating examples") {
  const auto map = linear({0.1}, 1.0);
  CHECK(task_efficacy(map, vec({5})) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(task_efficacy(map, vec({20})) == 1.0);
  CHECK(task_efficacy(map, vec({0})) == 0.0);
}

TEST_CASE("total efficacy sums per-task scores") {
  EfficacyModel model({linear({0.1}, 1.0), linear({0.1}, 1.0)});
  Eigen::MatrixXd q(2, 1);
  q << 5, 20;
  Allocation a(2, 2);
  a.set(0, 0, true);
  a.set(1, 1, true);
  CHECK(total_efficacy(model, a, TeamTraitMatrix(q)) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("task efficacy rejects bad trait vectors") {
  const auto map = linear({0.1, 0.2}, 1.0);
  CHECK_THROWS_AS(task_efficacy(map, vec({1})), std::invalid_argument);
  CHECK_THROWS_AS(task_efficacy(map, vec({1, -1})), std::invalid_argument);
}

TEST_CASE("adding a robot never lowers linear efficacy") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const TeamTraitMatrix q = testing::random_team(6, 3, rng);
    GroundTruthOptions opts;
    opts.team_totals = q.team_totals();
    const EfficacyModel model = sample_ground_truth_model(rng(), 3, 3, MapKind::LinearSaturating, opts);
    REQUIRE(model.monotone());
    Allocation a(3, 6);
    for (int m = 0; m < 3; ++m)
      for (int r = 0; r < 6; ++r) a.set(m, r, rng() & 1u);
    const double before = total_efficacy(model, a, q);
    for (int m = 0; m < 3; ++m)
      for (int r = 0; r < 6; ++r) {
        if (a.get(m, r)) continue;
        Allocation b = a;
        b.set(m, r, true);
        CHECK(total_efficacy(model, b, q) >= before);
      }
  }
}

TEST_CASE("ground truth is deterministic per seed") {
  GroundTruthOptions opts;
  opts.extent = vec({2.0, 3.0});
  const auto a = sample_ground_truth(42, 2, MapKind::GpSampled, opts);
  const auto b = sample_ground_truth(42, 2, MapKind::GpSampled, opts);
  const auto c = sample_ground_truth(43, 2, MapKind::GpSampled, opts);
  CHECK(std::get<GpSampledMap>(a).lattice == std::get<GpSampledMap>(b).lattice);
  CHECK(std::get<GpSampledMap>(a).lattice != std::get<GpSampledMap>(c).lattice);
  CHECK_THROWS_AS(sample_ground_truth(1, 2, MapKind::GpLearned), std::invalid_argument);
}

TEST_CASE("gp-sampled maps stay in the unit interval and interpolate the lattice") {
  GroundTruthOptions opts;
  opts.extent = vec({1.0, 1.0});
  opts.points_per_axis = 5;
  const auto map = sample_ground_truth(7, 2, MapKind::GpSampled, opts);
  const auto &g = std::get<GpSampledMap>(map);
  REQUIRE(g.lattice.size() == 25);
  // Lattice node (i, j) sits at (i/4, j/4); axis 0 is fastest.
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const double expected = std::clamp(g.lattice[i + 5 * j], 0.0, 1.0);
      CHECK(task_efficacy(map, vec({i / 4.0, j / 4.0})) == doctest::Approx(expected).epsilon(1e-12));
    }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const double v = task_efficacy(map, vec({u(rng), u(rng)}));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("lattice draws have roughly the requested spread") {
  GroundTruthOptions opts;
  opts.extent = vec({1.0});
  opts.points_per_axis = 33;
  double sum = 0.0, sq = 0.0;
  int n = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const auto map = sample_ground_truth(seed, 1, MapKind::GpSampled, opts);
    for (double v : std::get<GpSampledMap>(map).lattice) {
      sum += v;
      sq += v * v;
      ++n;
    }
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(mean == doctest::Approx(0.5).epsilon(0.05));
  CHECK(sd == doctest::Approx(0.25).epsilon(0.1));
}

TEST_CASE("default lattice resolution") {
  CHECK(default_points_per_axis(1) == 33);
  CHECK(default_points_per_axis(2) == 33);
  CHECK(default_points_per_axis(4) == 8);
  CHECK(default_points_per_axis(12) == 2);
}

TEST_CASE("model kind and monotonicity") {
  EfficacyModel model({linear({1.0}, 1.0), linear({-1.0}, 1.0)});
  CHECK(model.kind() == MapKind::LinearSaturating);
  CHECK_FALSE(model.monotone());
  CHECK(parse_map_kind("gp-sampled") == MapKind::GpSampled);
  CHECK_THROWS(parse_map_kind("cubic"));
}
