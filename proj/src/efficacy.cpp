#include "steam/efficacy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace steam {

std::string_view to_string(MapKind kind) {
  switch (kind) {
  case MapKind::LinearSaturating: return "linear-saturating";
  case MapKind::GpSampled: return "gp-sampled";
  case MapKind::GpLearned: return "gp-learned";
  }
  return "?";
}

MapKind parse_map_kind(std::string_view name) {
  if (name == "linear-saturating") return MapKind::LinearSaturating;
  if (name == "gp-sampled") return MapKind::GpSampled;
  if (name == "gp-learned") return MapKind::GpLearned;
  throw std::invalid_argument("unknown efficacy map kind '" + std::string(name) + "'");
}

MapKind kind_of(const TraitEfficacyMap &map) { return static_cast<MapKind>(map.index()); }

int trait_count(const TraitEfficacyMap &map) {
  struct {
    int operator()(const LinearSaturatingMap &m) const { return static_cast<int>(m.weights.size()); }
    int operator()(const GpSampledMap &m) const { return static_cast<int>(m.extent.size()); }
    int operator()(const GpLearnedMap &m) const { return m.gp.dims(); }
  } visitor;
  return std::visit(visitor, map);
}

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double interpolate(const GpSampledMap &map, const Eigen::Ref<const Eigen::VectorXd> &y) {
  const int dims = static_cast<int>(map.extent.size());
  const int k = map.points_per_axis;
  std::vector<int> base(dims);
  std::vector<double> frac(dims);
  std::vector<std::size_t> stride(dims);
  std::size_t s = 1;
  for (int u = 0; u < dims; ++u) {
    stride[u] = s;
    s *= static_cast<std::size_t>(k);
    const double extent = map.extent[u] > 0.0 ? map.extent[u] : 1.0;
    const double pos = std::clamp(y[u] / extent, 0.0, 1.0) * (k - 1);
    int i0 = std::min(static_cast<int>(std::floor(pos)), k - 2);
    base[u] = i0;
    frac[u] = pos - i0;
  }
  double value = 0.0;
  const std::uint32_t corners = 1u << dims;
  for (std::uint32_t c = 0; c < corners; ++c) {
    double weight = 1.0;
    std::size_t idx = 0;
    for (int u = 0; u < dims; ++u) {
      const bool up = (c >> u) & 1u;
      weight *= up ? frac[u] : 1.0 - frac[u];
      idx += (base[u] + (up ? 1 : 0)) * stride[u];
    }
    if (weight != 0.0) value += weight * map.lattice[idx];
  }
  return value;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

} // namespace

double task_efficacy(const TraitEfficacyMap &map, const Eigen::Ref<const Eigen::VectorXd> &traits) {
  if (traits.size() != trait_count(map))
    throw std::invalid_argument("trait vector has " + std::to_string(traits.size()) +
                                " entries, map expects " + std::to_string(trait_count(map)));
  for (Eigen::Index u = 0; u < traits.size(); ++u)
    if (!(traits[u] >= 0.0)) throw std::invalid_argument("trait vector has a negative entry");

  if (auto *linear = std::get_if<LinearSaturatingMap>(&map))
    return clamp01(std::min(linear->weights.dot(traits) / linear->normalizer, 1.0));
  if (auto *sampled = std::get_if<GpSampledMap>(&map)) return clamp01(interpolate(*sampled, traits));
  return clamp01(std::get<GpLearnedMap>(map).gp.predict(traits).mean);
}

std::optional<MapKind> EfficacyModel::kind() const {
  if (maps_.empty()) return std::nullopt;
  const MapKind first = kind_of(maps_.front());
  for (const auto &m : maps_)
    if (kind_of(m) != first) return std::nullopt;
  return first;
}

bool EfficacyModel::monotone() const {
  for (const auto &m : maps_) {
    auto *linear = std::get_if<LinearSaturatingMap>(&m);
    if (!linear || (linear->weights.array() < 0.0).any() || !(linear->normalizer > 0.0))
      return false;
  }
  return true;
}

double total_efficacy(const EfficacyModel &model, const Allocation &allocation,
                      const TeamTraitMatrix &traits) {
  if (model.size() != allocation.tasks())
    throw std::invalid_argument("efficacy model has " + std::to_string(model.size()) +
                                " maps for " + std::to_string(allocation.tasks()) + " tasks");
  if (allocation.robots() != traits.robots())
    throw std::invalid_argument("allocation and trait matrix disagree on the robot count");
  double total = 0.0;
  for (int m = 0; m < allocation.tasks(); ++m)
    total += task_efficacy(model[m], coalition_traits(allocation.row(m), traits));
  return total;
}

int default_points_per_axis(int traits) {
  if (traits <= 0) return 2;
  const double k = std::floor(std::pow(4096.0, 1.0 / traits) + 1e-9);
  return std::clamp(static_cast<int>(k), 2, 33);
}

void realize_lattice(GpSampledMap &map) {
  const int dims = static_cast<int>(map.extent.size());
  const int k = map.points_per_axis;
  if (dims < 1 || k < 2) throw std::invalid_argument("gp-sampled lattice needs U >= 1 and k >= 2");

  // The RBF kernel on a regular lattice factors into a Kronecker product of
  // one 1-D kernel per axis, so a draw is (F x F x ... x F) z with F F^T = K1.
  Eigen::MatrixXd k1(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      const double d = static_cast<double>(a - b) / (k - 1);
      k1(a, b) = std::exp(-d * d / (2.0 * map.length_scale * map.length_scale));
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k1);
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd factor = eig.eigenvectors() * root.asDiagonal();

  std::size_t total = 1;
  for (int u = 0; u < dims; ++u) total *= static_cast<std::size_t>(k);

  std::mt19937_64 rng(map.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> values(total);
  for (auto &v : values) v = normal(rng);

  std::vector<double> fiber(k), mixed(k);
  std::size_t stride = 1;
  for (int u = 0; u < dims; ++u) {
    const std::size_t block = stride * k;
    for (std::size_t outer = 0; outer < total; outer += block)
      for (std::size_t inner = 0; inner < stride; ++inner) {
        for (int a = 0; a < k; ++a) fiber[a] = values[outer + inner + a * stride];
        for (int a = 0; a < k; ++a) {
          double acc = 0.0;
          for (int b = 0; b < k; ++b) acc += factor(a, b) * fiber[b];
          mixed[a] = acc;
        }
        for (int a = 0; a < k; ++a) values[outer + inner + a * stride] = mixed[a];
      }
    stride = block;
  }
  for (auto &v : values) v = map.mean + map.stddev * v;
  map.lattice = std::move(values);
}

TraitEfficacyMap sample_ground_truth(std::uint64_t seed, int traits, MapKind kind,
                                     const GroundTruthOptions &options) {
  if (traits < 1) throw std::invalid_argument("ground truth needs at least one trait");
  switch (kind) {
  case MapKind::LinearSaturating: {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    LinearSaturatingMap map;
    map.weights.resize(traits);
    for (int u = 0; u < traits; ++u) map.weights[u] = unit(rng);
    if (map.weights.sum() <= 0.0) map.weights.setOnes();
    if (options.team_totals) {
      if (options.team_totals->size() != traits)
        throw std::invalid_argument("team totals have the wrong length");
      map.normalizer = map.weights.dot(*options.team_totals);
    } else {
      map.normalizer = map.weights.sum();
    }
    if (!(map.normalizer > 0.0)) map.normalizer = 1.0;
    return map;
  }
  case MapKind::GpSampled: {
    GpSampledMap map;
    map.seed = seed;
    map.extent = options.extent.size() ? options.extent : Eigen::VectorXd::Ones(traits);
    if (map.extent.size() != traits) throw std::invalid_argument("extent has the wrong length");
    map.points_per_axis =
        options.points_per_axis > 0 ? options.points_per_axis : default_points_per_axis(traits);
    map.length_scale = options.length_scale;
    map.mean = options.mean;
    map.stddev = options.stddev;
    realize_lattice(map);
    return map;
  }
  case MapKind::GpLearned: break;
  }
  throw std::invalid_argument("ground truth cannot be of kind gp-learned");
}

EfficacyModel sample_ground_truth_model(std::uint64_t seed, int tasks, int traits, MapKind kind,
                                        const GroundTruthOptions &options) {
  std::vector<TraitEfficacyMap> maps;
  maps.reserve(tasks);
  for (int m = 0; m < tasks; ++m)
    maps.push_back(sample_ground_truth(splitmix64(seed ^ (0x51ed27ull * (m + 1))), traits, kind,
                                       options));
  return EfficacyModel(std::move(maps));
}

} // namespace steam
