#include "steam/model.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "steam/motion.hpp"

namespace steam {

// ---------------------------------------------------------------- Allocation

Allocation::Allocation(int tasks, int robots) : robots_(robots), rows_(tasks, 0) {
  if (tasks < 0 || robots < 0 || robots > kMaxRobots)
    throw std::invalid_argument("allocation shape out of range");
}

Allocation Allocation::root(int tasks, int robots) {
  Allocation a(tasks, robots);
  for (auto &row : a.rows_) row = a.full_row();
  return a;
}

Allocation Allocation::from_rows(int robots, std::vector<std::uint64_t> rows) {
  Allocation a(0, robots);
  for (auto row : rows)
    if (row & ~a.full_row()) throw std::invalid_argument("allocation row names a missing robot");
  a.rows_ = std::move(rows);
  return a;
}

void Allocation::set(int task, int robot, bool value) {
  const std::uint64_t bit = std::uint64_t{1} << robot;
  rows_[task] = value ? (rows_[task] | bit) : (rows_[task] & ~bit);
}

int Allocation::assigned() const {
  int n = 0;
  for (auto row : rows_) n += std::popcount(row);
  return n;
}

std::uint64_t Allocation::full_row() const {
  return robots_ == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << robots_) - 1);
}

std::size_t AllocationHash::operator()(const Allocation &a) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ull ^ static_cast<std::uint64_t>(a.robots());
  for (auto row : a.rows()) {
    h ^= row + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 0xbf58476d1ce4e5b9ull;
  }
  return static_cast<std::size_t>(h ^ (h >> 31));
}

Eigen::VectorXd coalition_traits(std::uint64_t coalition, const TeamTraitMatrix &traits) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(traits.traits());
  // Fixed robot order keeps sums monotone under bit removal in floating point.
  for (int n = 0; n < traits.robots(); ++n)
    if ((coalition >> n) & 1u)
      for (int u = 0; u < traits.traits(); ++u) y[u] += traits(n, u);
  return y;
}

Eigen::MatrixXd aggregated_traits(const Allocation &allocation, const TeamTraitMatrix &traits) {
  if (allocation.robots() != traits.robots())
    throw std::invalid_argument("allocation has " + std::to_string(allocation.robots()) +
                                " robot columns but the trait matrix has " +
                                std::to_string(traits.robots()) + " rows");
  Eigen::MatrixXd y(allocation.tasks(), traits.traits());
  for (int m = 0; m < allocation.tasks(); ++m)
    y.row(m) = coalition_traits(allocation.row(m), traits).transpose();
  return y;
}

// ---------------------------------------------------------------- precedence

std::vector<std::vector<bool>> precedence_closure(int task_count,
                                                  std::span<const std::pair<int, int>> precedence) {
  std::vector<std::vector<bool>> reach(task_count, std::vector<bool>(task_count, false));
  for (auto [i, j] : precedence)
    if (i >= 0 && j >= 0 && i < task_count && j < task_count) reach[i][j] = true;
  for (int k = 0; k < task_count; ++k)
    for (int i = 0; i < task_count; ++i)
      if (reach[i][k])
        for (int j = 0; j < task_count; ++j)
          if (reach[k][j]) reach[i][j] = true;
  return reach;
}

bool has_precedence_cycle(const TaskNetwork &network) {
  const auto reach = precedence_closure(network.size(), network.precedence);
  for (int i = 0; i < network.size(); ++i)
    if (reach[i][i]) return true;
  return false;
}

// ---------------------------------------------------------------- domain

std::vector<double> ProblemDomain::robot_speeds() const {
  if (!speeds.empty()) return speeds;
  return std::vector<double>(robots(), 1.0);
}

bool ProblemDomain::operator==(const ProblemDomain &other) const {
  if (!(network == other.network && traits == other.traits && world == other.world &&
        robot_starts == other.robot_starts && speeds == other.speeds &&
        time_budget == other.time_budget && alpha == other.alpha))
    return false;
  if (efficacy.size() != other.efficacy.size()) return false;
  for (int m = 0; m < efficacy.size(); ++m) {
    const auto &a = efficacy[m];
    const auto &b = other.efficacy[m];
    if (a.index() != b.index()) return false;
    if (auto *la = std::get_if<LinearSaturatingMap>(&a)) {
      const auto &lb = std::get<LinearSaturatingMap>(b);
      if (la->weights != lb.weights || la->normalizer != lb.normalizer) return false;
    } else if (auto *ga = std::get_if<GpSampledMap>(&a)) {
      const auto &gb = std::get<GpSampledMap>(b);
      if (ga->seed != gb.seed || ga->extent != gb.extent ||
          ga->points_per_axis != gb.points_per_axis || ga->length_scale != gb.length_scale ||
          ga->mean != gb.mean || ga->stddev != gb.stddev || ga->lattice != gb.lattice)
        return false;
    } else {
      const auto &pa = std::get<GpLearnedMap>(a).gp;
      const auto &pb = std::get<GpLearnedMap>(b).gp;
      if (!(pa.hyper() == pb.hyper()) || pa.labels() != pb.labels() ||
          pa.inputs().size() != pb.inputs().size())
        return false;
      for (std::size_t k = 0; k < pa.inputs().size(); ++k)
        if (pa.inputs()[k] != pb.inputs()[k]) return false;
    }
  }
  return true;
}

namespace {

std::string cell_text(Cell c) {
  std::ostringstream os;
  os << "(" << c.x << "," << c.y << ")";
  return os.str();
}

} // namespace

std::vector<Violation> validate_instance(const ProblemDomain &domain) {
  std::vector<Violation> out;
  auto report = [&](std::string code, std::string message) {
    out.push_back({std::move(code), std::move(message)});
  };

  const int robots = domain.robots();
  const int tasks = domain.tasks();
  const int traits = domain.traits.traits();

  if (robots < 1) report("no-robots", "team trait matrix has no rows");
  if (traits < 1) report("no-traits", "team trait matrix has no columns");
  if (robots > Allocation::kMaxRobots)
    report("too-many-robots", "at most 64 robots are supported");
  for (int i = 0; i < robots; ++i)
    for (int u = 0; u < traits; ++u)
      if (!(domain.traits(i, u) >= 0.0))
        report("negative-trait", "trait " + std::to_string(u) + " of robot " + std::to_string(i) +
                                     " is negative or NaN");

  if (tasks < 1) report("no-tasks", "task network is empty");

  const WorldGrid &world = domain.world;
  if (world.width() < 1 || world.height() < 1) {
    report("grid", "world must have positive width and height");
    return out;
  }
  for (Cell c : world.obstacles())
    if (!world.contains(c)) report("outside-grid", "obstacle " + cell_text(c) + " is outside the grid");

  auto check_cell = [&](Cell c, const std::string &what) {
    if (!world.contains(c)) {
      report("outside-grid", what + " " + cell_text(c) + " is outside the grid");
      return false;
    }
    if (world.blocked(c)) {
      report("blocked-cell", what + " " + cell_text(c) + " is an obstacle");
      return false;
    }
    return true;
  };

  bool cells_ok = true;
  for (int m = 0; m < tasks; ++m) {
    const TaskSpec &t = domain.network.tasks[m];
    const std::string name = "task " + std::to_string(m);
    if (!(t.duration >= 0.0)) report("negative-duration", name + " has a negative duration");
    cells_ok &= check_cell(t.site, name + " site");
    check_cell(t.initial, name + " initial configuration");
    check_cell(t.terminal, name + " terminal configuration");
  }

  bool indices_ok = true;
  auto check_pair = [&](std::pair<int, int> p, const char *kind) {
    if (p.first < 0 || p.second < 0 || p.first >= tasks || p.second >= tasks) {
      report("bad-index", std::string(kind) + " pair references a missing task");
      indices_ok = false;
    } else if (p.first == p.second) {
      report("self-loop", std::string(kind) + " pair relates task " + std::to_string(p.first) +
                              " to itself");
    }
  };
  for (auto p : domain.network.precedence) check_pair(p, "precedence");
  for (auto p : domain.network.mutex) check_pair(p, "mutex");

  if (indices_ok) {
    for (auto [i, j] : domain.network.precedence)
      for (auto [k, l] : domain.network.precedence)
        if (i == l && j == k && i < j)
          report("precedence-conflict", "tasks " + std::to_string(i) + " and " +
                                            std::to_string(j) + " precede each other");
    if (has_precedence_cycle(domain.network))
      report("precedence-cycle", "precedence relation contains a cycle");
  }

  if (!(domain.time_budget > 0.0)) report("budget", "time budget must be positive");
  if (!(domain.alpha >= 0.0 && domain.alpha <= 1.0)) report("alpha", "alpha must lie in [0,1]");

  if (static_cast<int>(domain.robot_starts.size()) != robots) {
    report("robot-starts", "need one start cell per robot");
    cells_ok = false;
  } else {
    for (int i = 0; i < robots; ++i)
      cells_ok &= check_cell(domain.robot_starts[i], "robot " + std::to_string(i) + " start");
  }

  if (!domain.speeds.empty()) {
    if (static_cast<int>(domain.speeds.size()) != robots)
      report("speeds", "need one speed per robot");
    for (double s : domain.speeds)
      if (!(s > 0.0)) report("speeds", "speeds must be positive");
  }

  bool efficacy_ok = true;
  if (domain.efficacy.size() != tasks) {
    report("efficacy-count", "need exactly one trait-efficacy map per task");
    efficacy_ok = false;
  } else {
    for (int m = 0; m < tasks; ++m)
      if (trait_count(domain.efficacy[m]) != traits) {
        report("efficacy-dims", "map of task " + std::to_string(m) + " expects " +
                                    std::to_string(trait_count(domain.efficacy[m])) + " traits");
        efficacy_ok = false;
      }
  }

  if (efficacy_ok && robots >= 1 && robots <= Allocation::kMaxRobots && traits >= 1 && tasks >= 1) {
    bool traits_ok = true;
    for (int i = 0; i < robots; ++i)
      for (int u = 0; u < traits; ++u) traits_ok &= domain.traits(i, u) >= 0.0;
    if (traits_ok) {
      const double root =
          total_efficacy(domain.efficacy, Allocation::root(tasks, robots), domain.traits);
      const double none =
          total_efficacy(domain.efficacy, Allocation::null(tasks, robots), domain.traits);
      if (!(root > none))
        report("degenerate-efficacy", "root allocation must score above the null allocation");
    }
  }

  // Every robot must be able to reach every task site, and sites each other.
  if (cells_ok) {
    for (int i = 0; i < robots; ++i)
      for (int m = 0; m < tasks; ++m)
        if (!plan_path(world, domain.robot_starts[i], domain.network.tasks[m].site)) {
          report("unreachable-site", "robot " + std::to_string(i) + " cannot reach task " +
                                         std::to_string(m));
        }
  }

  return out;
}

} // namespace steam
