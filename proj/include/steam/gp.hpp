#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace steam {

struct GpHyperparameters {
  double length_scale = 1.0;
  double signal_variance = 1.0;
  double noise_variance = 1e-4;
  bool operator==(const GpHyperparameters &) const = default;
};

struct GpPrediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Zero-mean GP regression with k(a,b) = sf2 * exp(-|a-b|^2 / (2 l^2)).
///
/// The Gram matrix K + sn2 I is factorized on every fit. If the factorization
/// fails (duplicate inputs with sn2 = 0) a diagonal jitter starting at 1e-8 is
/// added and grown by 10x until it succeeds; jitter() reports what was used.
class GaussianProcess {
public:
  GaussianProcess() = default;
  GaussianProcess(int dims, GpHyperparameters hyper);

  /// Replaces the training set.
  void fit(const std::vector<Eigen::VectorXd> &inputs, const std::vector<double> &labels);
  /// Appends one pair and refits.
  void add(const Eigen::VectorXd &input, double label);

  GpPrediction predict(const Eigen::Ref<const Eigen::VectorXd> &point) const;
  double kernel(const Eigen::Ref<const Eigen::VectorXd> &a,
                const Eigen::Ref<const Eigen::VectorXd> &b) const;

  int dims() const { return dims_; }
  int size() const { return static_cast<int>(labels_.size()); }
  const GpHyperparameters &hyper() const { return hyper_; }
  const std::vector<Eigen::VectorXd> &inputs() const { return inputs_; }
  const std::vector<double> &labels() const { return labels_; }
  double jitter() const { return jitter_; }

private:
  void refactor();

  int dims_ = 0;
  GpHyperparameters hyper_;
  std::vector<Eigen::VectorXd> inputs_;
  std::vector<double> labels_;
  Eigen::MatrixXd train_;          // size x dims
  Eigen::MatrixXd chol_lower_;     // L with L L^T = K + (sn2 + jitter) I
  Eigen::VectorXd weights_;        // (K + sn2 I)^-1 y
  double jitter_ = 0.0;
};

/// mean + sqrt(beta) * stddev.
inline double ucb(const GpPrediction &p, double beta) {
  return p.mean + std::sqrt(beta) * std::sqrt(std::max(p.variance, 0.0));
}

inline double ucb(const GaussianProcess &gp, const Eigen::Ref<const Eigen::VectorXd> &point,
                  double beta) {
  return ucb(gp.predict(point), beta);
}

} // namespace steam
