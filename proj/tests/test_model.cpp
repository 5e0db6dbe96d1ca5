#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "steam/efficacy.hpp"
#include "steam/model.hpp"

using namespace steam;

namespace {

bool has_code(const std::vector<Violation> &v, const std::string &code) {
  return std::any_of(v.begin(), v.end(), [&](const Violation &x) { return x.code == code; });
}

} // namespace

TEST_CASE("aggregated traits of the null allocation are zero") {
  std::mt19937_64 rng(1);
  const TeamTraitMatrix q = testing::random_team(3, 2, rng);
  const Eigen::MatrixXd y = aggregated_traits(Allocation::null(2, 3), q);
  CHECK(y.rows() == 2);
  CHECK(y.cols() == 2);
  CHECK(y.isZero(0.0));
}

TEST_CASE("aggregated traits sum the assigned rows") {
  Eigen::MatrixXd q(2, 2);
  q << 1, 2, 3, 4;
  const Eigen::MatrixXd y = aggregated_traits(Allocation::root(1, 2), TeamTraitMatrix(q));
  CHECK(y(0, 0) == 4.0);
  CHECK(y(0, 1) == 6.0);

  Eigen::MatrixXd q1(2, 1);
  q1 << 3, 5;
  Allocation a(1, 2);
  a.set(0, 0, true);
  CHECK(aggregated_traits(a, TeamTraitMatrix(q1))(0, 0) == 3.0);
}

TEST_CASE("aggregated traits reject a robot-count mismatch") {
  CHECK_THROWS_AS(aggregated_traits(Allocation::root(1, 3), TeamTraitMatrix(Eigen::MatrixXd::Ones(2, 1))),
                  std::invalid_argument);
}

TEST_CASE("aggregated traits match the dense product") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const TeamTraitMatrix q = testing::random_team(5, 3, rng);
    Allocation a(4, 5);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(4, 5);
    for (int m = 0; m < 4; ++m)
      for (int r = 0; r < 5; ++r)
        if (rng() & 1u) {
          a.set(m, r, true);
          dense(m, r) = 1.0;
        }
    CHECK((aggregated_traits(a, q) - dense * q.entries()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("allocation bookkeeping") {
  Allocation a = Allocation::root(3, 4);
  CHECK(a.assigned() == 12);
  a.set(1, 2, false);
  CHECK_FALSE(a.get(1, 2));
  CHECK(a.assigned() == 11);
  CHECK(a.row(1) == 0b1011u);
  CHECK(Allocation::null(3, 4).assigned() == 0);
  CHECK(AllocationHash{}(a) == AllocationHash{}(Allocation(a)));
}

TEST_CASE("valid instance has no violations") {
  CHECK(validate_instance(testing::open_domain(2, 3)).empty());
}

TEST_CASE("precedence cycle is reported") {
  ProblemDomain d = testing::open_domain(2, 2);
  d.network.precedence = {{0, 1}, {1, 0}};
  CHECK(has_code(validate_instance(d), "precedence-cycle"));
  CHECK(has_precedence_cycle(d.network));
}

TEST_CASE("zero budget is reported") {
  ProblemDomain d = testing::open_domain(1, 1);
  d.time_budget = 0.0;
  CHECK(has_code(validate_instance(d), "budget"));
}

TEST_CASE("validation catches malformed fields") {
  ProblemDomain d = testing::open_domain(2, 2);
  d.network.tasks[0].duration = -1.0;
  d.network.tasks[1].site = {20, 20};
  d.alpha = 1.5;
  d.robot_starts.pop_back();
  d.network.mutex = {{0, 5}};
  const auto v = validate_instance(d);
  CHECK(has_code(v, "negative-duration"));
  CHECK(has_code(v, "outside-grid"));
  CHECK(has_code(v, "alpha"));
  CHECK(has_code(v, "robot-starts"));
  CHECK(has_code(v, "bad-index"));
}

TEST_CASE("walled-off site is unreachable") {
  ProblemDomain d = testing::open_domain(1, 1);
  d.network.tasks[0].site = {7, 7};
  d.world = WorldGrid(8, 8, {{6, 7}, {7, 6}});
  CHECK(has_code(validate_instance(d), "unreachable-site"));
}

TEST_CASE("precedence closure is transitive") {
  const std::vector<std::pair<int, int>> p = {{0, 1}, {1, 2}};
  const auto reach = precedence_closure(3, p);
  CHECK(reach[0][2]);
  CHECK_FALSE(reach[2][0]);
}

TEST_CASE("domain equality covers the efficacy maps") {
  ProblemDomain a = testing::open_domain(2, 2);
  ProblemDomain b = a;
  CHECK(a == b);
  std::get<LinearSaturatingMap>(const_cast<TraitEfficacyMap &>(b.efficacy[1])).normalizer = 3.0;
  CHECK_FALSE(a == b);
}
