#include "steam/io.hpp"

#include <cmath>

namespace steam {

namespace {

const json &field(const json &obj, const std::string &key, const std::string &path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "/" + key, "missing required key \"" + key + "\"");
  return *it;
}

double number(const json &v, const std::string &path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  return v.get<double>();
}

int integer(const json &v, const std::string &path) {
  if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
  return v.get<int>();
}

const json &array(const json &v, const std::string &path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array");
  return v;
}

std::pair<int, int> int_pair(const json &v, const std::string &path) {
  if (!v.is_array() || v.size() != 2) throw SchemaError(path, "expected a pair [int, int]");
  return {integer(v[0], path + "/0"), integer(v[1], path + "/1")};
}

Cell cell(const json &v, const std::string &path) {
  auto [x, y] = int_pair(v, path);
  return {x, y};
}

json cell_json(Cell c) { return json::array({c.x, c.y}); }

std::vector<double> numbers(const json &v, const std::string &path) {
  std::vector<double> out;
  for (std::size_t i = 0; i < array(v, path).size(); ++i)
    out.push_back(number(v[i], path + "/" + std::to_string(i)));
  return out;
}

Eigen::VectorXd vector_of(const json &v, const std::string &path) {
  const std::vector<double> values = numbers(v, path);
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json vector_json(const Eigen::VectorXd &v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json map_to_json(const TraitEfficacyMap &map) {
  return std::visit(
      [](const auto &m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearSaturatingMap>) {
          return {{"weights", vector_json(m.weights)}, {"normalizer", m.normalizer}};
        } else if constexpr (std::is_same_v<T, GpSampledMap>) {
          return {{"seed", m.seed},
                  {"extent", vector_json(m.extent)},
                  {"points_per_axis", m.points_per_axis},
                  {"length_scale", m.length_scale},
                  {"mean", m.mean},
                  {"stddev", m.stddev}};
        } else {
          json inputs = json::array();
          for (const auto &x : m.gp.inputs()) inputs.push_back(vector_json(x));
          return {{"dims", m.gp.dims()},
                  {"length_scale", m.gp.hyper().length_scale},
                  {"signal_variance", m.gp.hyper().signal_variance},
                  {"noise_variance", m.gp.hyper().noise_variance},
                  {"inputs", inputs},
                  {"labels", m.gp.labels()}};
        }
      },
      map);
}

TraitEfficacyMap map_from_json(MapKind kind, const json &doc, const std::string &path) {
  switch (kind) {
  case MapKind::LinearSaturating: {
    LinearSaturatingMap m;
    m.weights = vector_of(field(doc, "weights", path), path + "/weights");
    m.normalizer = number(field(doc, "normalizer", path), path + "/normalizer");
    if (!(m.normalizer > 0.0)) throw SchemaError(path + "/normalizer", "must be positive");
    return m;
  }
  case MapKind::GpSampled: {
    GpSampledMap m;
    const json &seed = field(doc, "seed", path);
    if (!seed.is_number_unsigned() && !seed.is_number_integer())
      throw SchemaError(path + "/seed", "expected an integer");
    m.seed = seed.get<std::uint64_t>();
    m.extent = vector_of(field(doc, "extent", path), path + "/extent");
    m.points_per_axis = integer(field(doc, "points_per_axis", path), path + "/points_per_axis");
    if (m.points_per_axis < 2) throw SchemaError(path + "/points_per_axis", "must be at least 2");
    if (doc.contains("length_scale")) m.length_scale = number(doc["length_scale"], path + "/length_scale");
    if (doc.contains("mean")) m.mean = number(doc["mean"], path + "/mean");
    if (doc.contains("stddev")) m.stddev = number(doc["stddev"], path + "/stddev");
    realize_lattice(m);
    return m;
  }
  case MapKind::GpLearned: {
    const int dims = integer(field(doc, "dims", path), path + "/dims");
    if (dims < 1) throw SchemaError(path + "/dims", "must be at least 1");
    GpHyperparameters hyper;
    hyper.length_scale = number(field(doc, "length_scale", path), path + "/length_scale");
    hyper.signal_variance = number(field(doc, "signal_variance", path), path + "/signal_variance");
    hyper.noise_variance = number(field(doc, "noise_variance", path), path + "/noise_variance");
    const json &inputs = array(field(doc, "inputs", path), path + "/inputs");
    std::vector<Eigen::VectorXd> xs;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      xs.push_back(vector_of(inputs[i], path + "/inputs/" + std::to_string(i)));
      if (xs.back().size() != dims)
        throw SchemaError(path + "/inputs/" + std::to_string(i), "wrong input dimension");
    }
    const std::vector<double> ys = numbers(field(doc, "labels", path), path + "/labels");
    if (ys.size() != xs.size()) throw SchemaError(path + "/labels", "one label per input required");
    try {
      GaussianProcess gp(dims, hyper);
      gp.fit(xs, ys);
      return GpLearnedMap{std::move(gp)};
    } catch (const std::invalid_argument &e) {
      throw SchemaError(path, e.what());
    }
  }
  }
  throw SchemaError(path, "unknown map kind");
}

} // namespace

json efficacy_to_json(const EfficacyModel &model) {
  const auto kind = model.kind();
  json per_task = json::array();
  for (const auto &map : model.maps()) per_task.push_back(map_to_json(map));
  return {{"kind", kind ? std::string(to_string(*kind)) : std::string("mixed")}, {"per_task", per_task}};
}

EfficacyModel efficacy_from_json(const json &document, const std::string &path) {
  const json &kind_doc = field(document, "kind", path);
  if (!kind_doc.is_string()) throw SchemaError(path + "/kind", "expected a string");
  MapKind kind;
  try {
    kind = parse_map_kind(kind_doc.get<std::string>());
  } catch (const std::invalid_argument &e) {
    throw SchemaError(path + "/kind", e.what());
  }
  const json &per_task = array(field(document, "per_task", path), path + "/per_task");
  std::vector<TraitEfficacyMap> maps;
  for (std::size_t m = 0; m < per_task.size(); ++m)
    maps.push_back(map_from_json(kind, per_task[m], path + "/per_task/" + std::to_string(m)));
  return EfficacyModel(std::move(maps));
}

json save_instance(const ProblemDomain &domain) {
  json traits = json::array();
  for (int r = 0; r < domain.robots(); ++r) {
    json row = json::array();
    for (int u = 0; u < domain.traits.traits(); ++u) row.push_back(domain.traits(r, u));
    traits.push_back(row);
  }
  json tasks = json::array();
  for (const auto &t : domain.network.tasks)
    tasks.push_back({{"duration", t.duration},
                     {"site", cell_json(t.site)},
                     {"initial", cell_json(t.initial)},
                     {"terminal", cell_json(t.terminal)}});
  json precedence = json::array();
  for (auto [i, j] : domain.network.precedence) precedence.push_back({i, j});
  json mutex = json::array();
  for (auto [i, j] : domain.network.mutex) mutex.push_back({i, j});
  json starts = json::array();
  for (Cell c : domain.robot_starts) starts.push_back(cell_json(c));
  json obstacles = json::array();
  for (Cell c : domain.world.obstacles()) obstacles.push_back(cell_json(c));

  json doc = {{"traits", traits},
              {"tasks", tasks},
              {"precedence", precedence},
              {"mutex", mutex},
              {"robot_starts", starts},
              {"time_budget", domain.time_budget},
              {"alpha", domain.alpha},
              {"world", {{"width", domain.world.width()}, {"height", domain.world.height()}, {"obstacles", obstacles}}},
              {"efficacy", efficacy_to_json(domain.efficacy)}};
  if (!domain.speeds.empty()) doc["speeds"] = domain.speeds;
  return doc;
}

ProblemDomain load_instance(const json &doc) {
  if (!doc.is_object()) throw SchemaError("", "instance must be a JSON object");
  ProblemDomain d;

  const json &traits = array(field(doc, "traits", ""), "/traits");
  const std::size_t robots = traits.size();
  std::size_t dims = 0;
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < robots; ++r) {
    rows.push_back(numbers(traits[r], "/traits/" + std::to_string(r)));
    if (r == 0) dims = rows[0].size();
    else if (rows[r].size() != dims)
      throw SchemaError("/traits/" + std::to_string(r), "rows must all have the same length");
  }
  Eigen::MatrixXd q(robots, dims);
  for (std::size_t r = 0; r < robots; ++r)
    for (std::size_t u = 0; u < dims; ++u) q(r, u) = rows[r][u];
  d.traits = TeamTraitMatrix(q);

  const json &tasks = array(field(doc, "tasks", ""), "/tasks");
  for (std::size_t m = 0; m < tasks.size(); ++m) {
    const std::string p = "/tasks/" + std::to_string(m);
    TaskSpec t;
    t.duration = number(field(tasks[m], "duration", p), p + "/duration");
    t.site = cell(field(tasks[m], "site", p), p + "/site");
    t.initial = cell(field(tasks[m], "initial", p), p + "/initial");
    t.terminal = cell(field(tasks[m], "terminal", p), p + "/terminal");
    d.network.tasks.push_back(t);
  }
  const json &precedence = array(field(doc, "precedence", ""), "/precedence");
  for (std::size_t k = 0; k < precedence.size(); ++k)
    d.network.precedence.push_back(int_pair(precedence[k], "/precedence/" + std::to_string(k)));
  const json &mutex = array(field(doc, "mutex", ""), "/mutex");
  for (std::size_t k = 0; k < mutex.size(); ++k)
    d.network.mutex.push_back(int_pair(mutex[k], "/mutex/" + std::to_string(k)));

  const json &starts = array(field(doc, "robot_starts", ""), "/robot_starts");
  for (std::size_t r = 0; r < starts.size(); ++r)
    d.robot_starts.push_back(cell(starts[r], "/robot_starts/" + std::to_string(r)));

  d.time_budget = number(field(doc, "time_budget", ""), "/time_budget");
  d.alpha = number(field(doc, "alpha", ""), "/alpha");

  const json &world = field(doc, "world", "");
  const int width = integer(field(world, "width", "/world"), "/world/width");
  const int height = integer(field(world, "height", "/world"), "/world/height");
  if (width < 1 || height < 1) throw SchemaError("/world", "grid dimensions must be positive");
  const json &obstacles = array(field(world, "obstacles", "/world"), "/world/obstacles");
  std::vector<Cell> blocked;
  for (std::size_t k = 0; k < obstacles.size(); ++k)
    blocked.push_back(cell(obstacles[k], "/world/obstacles/" + std::to_string(k)));
  d.world = WorldGrid(width, height, std::move(blocked));

  d.efficacy = efficacy_from_json(field(doc, "efficacy", ""), "/efficacy");
  if (doc.contains("speeds")) d.speeds = numbers(doc["speeds"], "/speeds");
  return d;
}

ProblemDomain load_instance_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw SchemaError("", std::string("not valid JSON: ") + e.what());
  }
  return load_instance(doc);
}

json solution_to_json(const SearchReport &report) {
  json stats = {{"nodes_expanded", report.nodes_expanded},
                {"nodes_evaluated", report.nodes_evaluated},
                {"refinements", report.refinements},
                {"nac_violations", report.nac_violations},
                {"root_efficacy", report.root_efficacy},
                {"null_efficacy", report.null_efficacy},
                {"worst_makespan", report.worst_makespan},
                {"best_open_efficacy", report.best_open_efficacy},
                {"best_open_tbo", report.best_open_tbo}};
  json bounds = {{"prehoc", finite_or_null(report.bounds.prehoc)},
                 {"posthoc", finite_or_null(report.bounds.posthoc)},
                 {"trivial", report.bounds.trivial}};
  if (!report.solution) {
    return {{"infeasible", true}, {"allocation", nullptr}, {"starts", nullptr},
            {"makespan", nullptr}, {"efficacy", nullptr}, {"bounds", bounds}, {"stats", stats}};
  }
  const Solution &s = *report.solution;
  json allocation = json::array();
  for (int m = 0; m < s.allocation.tasks(); ++m) {
    json row = json::array();
    for (int r = 0; r < s.allocation.robots(); ++r) row.push_back(s.allocation.get(m, r) ? 1 : 0);
    allocation.push_back(row);
  }
  json plans = json::array();
  for (const auto &[key, path] : s.motion_plans) {
    json cells = json::array();
    for (Cell c : path) cells.push_back(cell_json(c));
    plans.push_back({{"robot", key.first}, {"leg", key.second}, {"path", cells}});
  }
  return {{"infeasible", false},   {"allocation", allocation}, {"starts", s.schedule.starts},
          {"makespan", s.makespan}, {"efficacy", s.efficacy},   {"bounds", bounds},
          {"motion_plans", plans},  {"stats", stats}};
}

json config_to_json(const LearnerConfig &c) {
  return {{"candidates", c.candidates},
          {"neighbors", c.neighbors},
          {"radius_fraction", c.radius_fraction},
          {"shrink", c.shrink},
          {"beta", c.beta},
          {"length_scale_fraction", c.length_scale_fraction},
          {"signal_variance", c.signal_variance},
          {"noise_variance", c.noise_variance},
          {"aggregate", c.aggregate_max ? "max" : "mean"},
          {"enumeration_cap", c.enumeration_cap},
          {"projection_restarts", c.projection_restarts}};
}

LearnerConfig config_from_json(const json &doc) {
  if (!doc.is_object()) throw SchemaError("", "config must be a JSON object");
  LearnerConfig c;
  auto read_int = [&](const char *key, int &out) {
    if (doc.contains(key)) out = integer(doc[key], std::string("/") + key);
  };
  auto read_real = [&](const char *key, double &out) {
    if (doc.contains(key)) out = number(doc[key], std::string("/") + key);
  };
  read_int("candidates", c.candidates);
  read_int("neighbors", c.neighbors);
  read_real("radius_fraction", c.radius_fraction);
  read_real("shrink", c.shrink);
  read_real("beta", c.beta);
  read_real("length_scale_fraction", c.length_scale_fraction);
  read_real("signal_variance", c.signal_variance);
  read_real("noise_variance", c.noise_variance);
  read_int("enumeration_cap", c.enumeration_cap);
  read_int("projection_restarts", c.projection_restarts);
  if (doc.contains("aggregate")) {
    const json &a = doc["aggregate"];
    if (!a.is_string() || (a != "max" && a != "mean"))
      throw SchemaError("/aggregate", "expected \"max\" or \"mean\"");
    c.aggregate_max = a == "max";
  }
  if (c.candidates < 1) throw SchemaError("/candidates", "must be at least 1");
  if (c.neighbors < 1) throw SchemaError("/neighbors", "must be at least 1");
  if (!(c.shrink > 0.0 && c.shrink <= 1.0)) throw SchemaError("/shrink", "must lie in (0,1]");
  if (c.beta < 0.0) throw SchemaError("/beta", "must be non-negative");
  return c;
}

} // namespace steam
