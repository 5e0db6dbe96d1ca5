#include "steam/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace steam {

double nac(double efficacy, double root_efficacy, double null_efficacy) {
  return (root_efficacy - efficacy) / (root_efficacy - null_efficacy);
}

double tbo(double makespan, double budget, double worst) {
  if (!(makespan > budget)) return 0.0;
  const double span = std::abs(worst - budget);
  if (span == 0.0) return std::numeric_limits<double>::infinity();
  return (makespan - budget) / span;
}

Bounds suboptimality_bounds(double alpha, double root_efficacy, double null_efficacy,
                            double tbo_best_open) {
  Bounds b;
  b.trivial = alpha >= 0.5;
  if (alpha >= 1.0) {
    b.prehoc = b.posthoc = std::numeric_limits<double>::infinity();
    return b;
  }
  b.prehoc = alpha / (1.0 - alpha) * (root_efficacy - null_efficacy);
  b.posthoc = alpha == 0.0 ? 0.0 : b.prehoc * tbo_best_open;
  return b;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Node {
  Allocation allocation;
  double efficacy = 0.0;
  double nac = 0.0;
  double tbo = 0.0;
  double tetam = 0.0;
  double makespan = 0.0;
  int assigned = 0;
  bool refined = false;
  bool schedulable = false;
};

struct OpenEntry {
  double tetam;
  int assigned;
  std::int64_t seq;
  std::size_t node;
};

// std heap functions build a max-heap; invert so the smallest key sits on top.
struct OpenAfter {
  bool operator()(const OpenEntry &a, const OpenEntry &b) const {
    if (a.tetam != b.tetam) return a.tetam > b.tetam;
    if (a.assigned != b.assigned) return a.assigned > b.assigned;
    return a.seq > b.seq;
  }
};

class AllocationSearch {
public:
  AllocationSearch(const ProblemDomain &domain, const SearchOptions &options)
      : domain_(domain), options_(options), alpha_(options.alpha.value_or(domain.alpha)),
        budget_(options.time_budget.value_or(domain.time_budget)),
        travel_(domain.world, domain.robot_speeds()) {}

  SearchReport run() {
    const auto t_start = Clock::now();
    const int tasks = domain_.tasks();
    const int robots = domain_.robots();
    const Allocation root = Allocation::root(tasks, robots);

    report_.root_efficacy = total_efficacy(domain_.efficacy, root, domain_.traits);
    report_.null_efficacy =
        total_efficacy(domain_.efficacy, Allocation::null(tasks, robots), domain_.traits);
    if (!(report_.root_efficacy > report_.null_efficacy))
      throw std::invalid_argument("efficacy range is degenerate: root does not beat null");

    const auto t_worst = Clock::now();
    auto worst = worst_makespan(domain_, travel_);
    scheduling_seconds_ += seconds_since(t_worst);
    if (!worst) return finish(t_start);
    report_.worst_makespan = *worst;

    visited_.insert(root);
    Node root_node = evaluate(root, TravelMode::Estimate);
    ++report_.nodes_evaluated;
    if (root_node.schedulable) push(std::move(root_node));

    while (!open_.empty()) {
      std::pop_heap(open_.begin(), open_.end(), OpenAfter{});
      const std::size_t current = open_.back().node;
      open_.pop_back();
      ++report_.nodes_expanded;

      if (nodes_[current].tbo == 0.0) {
        if (!nodes_[current].refined) {
          ++report_.refinements;
          Node refined = evaluate(nodes_[current].allocation, TravelMode::Planned);
          refined.refined = true;
          nodes_[current] = std::move(refined);
          if (nodes_[current].schedulable && nodes_[current].tbo > 0.0) {
            requeue(current);
            continue;
          }
        }
        if (nodes_[current].schedulable && nodes_[current].tbo == 0.0) {
          accept(current);
          return finish(t_start);
        }
        continue;
      }
      expand(current);
    }
    return finish(t_start);
  }

private:
  Node evaluate(const Allocation &allocation, TravelMode mode) {
    Node node;
    node.allocation = allocation;
    node.assigned = allocation.assigned();
    node.efficacy = total_efficacy(domain_.efficacy, allocation, domain_.traits);
    node.nac = nac(node.efficacy, report_.root_efficacy, report_.null_efficacy);
    const auto t0 = Clock::now();
    auto inst = build_scheduling_instance(domain_, allocation, travel_, mode);
    std::optional<Schedule> schedule;
    if (inst) schedule = solve_schedule(*inst);
    if (mode == TravelMode::Planned) scheduling_seconds_ += seconds_since(t0);
    if (!schedule) return node;
    node.schedulable = true;
    node.makespan = schedule->makespan;
    node.tbo = tbo(node.makespan, budget_, report_.worst_makespan);
    node.tetam = tetam(node.nac, node.tbo, alpha_);
    return node;
  }

  void push(Node node) {
    nodes_.push_back(std::move(node));
    requeue(nodes_.size() - 1);
  }

  void requeue(std::size_t index) {
    const Node &n = nodes_[index];
    open_.push_back({n.tetam, n.assigned, seq_++, index});
    std::push_heap(open_.begin(), open_.end(), OpenAfter{});
  }

  void expand(std::size_t parent_index) {
    const Allocation parent = nodes_[parent_index].allocation;
    const double parent_nac = nodes_[parent_index].nac;

    std::vector<Allocation> fresh;
    for (int m = 0; m < parent.tasks(); ++m)
      for (int r = 0; r < parent.robots(); ++r) {
        if (!parent.get(m, r)) continue;
        Allocation child = parent;
        child.set(m, r, false);
        if (domain_.efficacy.monotone() || options_.record_edges) {
          const double child_nac =
              nac(total_efficacy(domain_.efficacy, child, domain_.traits), report_.root_efficacy,
                  report_.null_efficacy);
          if (domain_.efficacy.monotone() && child_nac < parent_nac) ++report_.nac_violations;
          if (options_.record_edges) report_.edges.push_back({parent_nac, child_nac});
        }
        if (visited_.insert(child).second) fresh.push_back(std::move(child));
      }

    std::vector<Node> evaluated(fresh.size());
    const auto t0 = Clock::now();
    const long count = static_cast<long>(fresh.size());
#pragma omp parallel for schedule(dynamic) if (options_.parallel && count > 1)
    for (long k = 0; k < count; ++k) evaluated[k] = evaluate(fresh[k], TravelMode::Estimate);
    scheduling_seconds_ += seconds_since(t0);

    report_.nodes_evaluated += count;
    // Unschedulable children are pruned: on valid instances every leg is
    // reachable, so this only drops allocations with no consistent ordering.
    for (auto &node : evaluated)
      if (node.schedulable) push(std::move(node));
  }

  void accept(std::size_t index) {
    const Node &node = nodes_[index];
    const auto inst = build_scheduling_instance(domain_, node.allocation, travel_, TravelMode::Planned);
    Solution solution;
    solution.allocation = node.allocation;
    solution.schedule = *solve_schedule(*inst);
    solution.makespan = solution.schedule.makespan;
    solution.efficacy = node.efficacy;

    // Each robot visits its tasks in start order; leg 0 leaves its start cell.
    for (int r = 0; r < domain_.robots(); ++r) {
      std::vector<int> visits;
      for (int m = 0; m < domain_.tasks(); ++m)
        if (node.allocation.get(m, r)) visits.push_back(m);
      std::stable_sort(visits.begin(), visits.end(), [&](int a, int b) {
        return solution.schedule.starts[a] < solution.schedule.starts[b];
      });
      Cell from = domain_.robot_starts[r];
      for (std::size_t leg = 0; leg < visits.size(); ++leg) {
        const Cell to = domain_.network.tasks[visits[leg]].site;
        solution.motion_plans[{r, static_cast<int>(leg)}] = *travel_.path(from, to);
        from = to;
      }
    }
    report_.solution = std::move(solution);

    // The best-efficacy open node N' bounds the optimum from above.
    report_.best_open_efficacy = node.efficacy;
    report_.best_open_tbo = 0.0;
    bool any = false;
    for (const OpenEntry &e : open_) {
      const Node &n = nodes_[e.node];
      if (!any || n.efficacy > report_.best_open_efficacy ||
          (n.efficacy == report_.best_open_efficacy && n.tbo < report_.best_open_tbo)) {
        report_.best_open_efficacy = n.efficacy;
        report_.best_open_tbo = n.tbo;
        any = true;
      }
    }
    report_.bounds = suboptimality_bounds(alpha_, report_.root_efficacy, report_.null_efficacy,
                                          any ? report_.best_open_tbo : 0.0);
  }

  SearchReport finish(Clock::time_point t_start) {
    const double total = seconds_since(t_start);
    report_.times.motion = travel_.planning_seconds();
    report_.times.scheduling = std::max(0.0, scheduling_seconds_ - report_.times.motion);
    report_.times.allocation =
        std::max(0.0, total - report_.times.scheduling - report_.times.motion);
    if (!report_.solution) {
      report_.bounds = suboptimality_bounds(alpha_, report_.root_efficacy, report_.null_efficacy, 1.0);
    }
    return std::move(report_);
  }

  const ProblemDomain &domain_;
  const SearchOptions &options_;
  double alpha_;
  double budget_;
  TravelOracle travel_;
  SearchReport report_;
  std::vector<Node> nodes_;
  std::vector<OpenEntry> open_;
  std::unordered_set<Allocation, AllocationHash> visited_;
  std::int64_t seq_ = 0;
  double scheduling_seconds_ = 0.0;
};

} // namespace

SearchReport solve(const ProblemDomain &domain, const SearchOptions &options) {
  return AllocationSearch(domain, options).run();
}

} // namespace steam
