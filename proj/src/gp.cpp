#include "steam/gp.hpp"

#include <stdexcept>

namespace steam {

GaussianProcess::GaussianProcess(int dims, GpHyperparameters hyper) : dims_(dims), hyper_(hyper) {
  if (dims < 1) throw std::invalid_argument("GP needs at least one input dimension");
  if (!(hyper.length_scale > 0.0) || !(hyper.signal_variance > 0.0))
    throw std::invalid_argument("GP length scale and signal variance must be positive");
  if (!(hyper.noise_variance >= 0.0))
    throw std::invalid_argument("GP noise variance must be non-negative");
}

double GaussianProcess::kernel(const Eigen::Ref<const Eigen::VectorXd> &a,
                               const Eigen::Ref<const Eigen::VectorXd> &b) const {
  const double d2 = (a - b).squaredNorm();
  return hyper_.signal_variance * std::exp(-d2 / (2.0 * hyper_.length_scale * hyper_.length_scale));
}

void GaussianProcess::fit(const std::vector<Eigen::VectorXd> &inputs,
                          const std::vector<double> &labels) {
  if (inputs.size() != labels.size()) throw std::invalid_argument("inputs and labels differ in length");
  for (const auto &x : inputs)
    if (x.size() != dims_) throw std::invalid_argument("GP input has the wrong dimension");
  inputs_ = inputs;
  labels_ = labels;
  refactor();
}

void GaussianProcess::add(const Eigen::VectorXd &input, double label) {
  if (input.size() != dims_) throw std::invalid_argument("GP input has the wrong dimension");
  inputs_.push_back(input);
  labels_.push_back(label);
  refactor();
}

void GaussianProcess::refactor() {
  const int n = size();
  train_.resize(n, dims_);
  for (int i = 0; i < n; ++i) train_.row(i) = inputs_[i].transpose();
  jitter_ = 0.0;
  if (n == 0) {
    chol_lower_.resize(0, 0);
    weights_.resize(0);
    return;
  }

  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) gram(i, j) = gram(j, i) = kernel(inputs_[i], inputs_[j]);

  const Eigen::Map<const Eigen::VectorXd> y(labels_.data(), n);
  double jitter = 0.0;
  for (int attempt = 0; attempt < 12; ++attempt) {
    Eigen::MatrixXd a = gram;
    a.diagonal().array() += hyper_.noise_variance + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) {
      chol_lower_ = llt.matrixL();
      weights_ = llt.solve(y);
      jitter_ = jitter;
      return;
    }
    jitter = jitter == 0.0 ? 1e-8 : jitter * 10.0;
  }
  throw std::runtime_error("GP Gram matrix is not positive definite even with jitter");
}

GpPrediction GaussianProcess::predict(const Eigen::Ref<const Eigen::VectorXd> &point) const {
  if (point.size() != dims_) throw std::invalid_argument("GP query has the wrong dimension");
  const int n = size();
  if (n == 0) return {0.0, hyper_.signal_variance};

  Eigen::VectorXd k(n);
  const double inv = 1.0 / (2.0 * hyper_.length_scale * hyper_.length_scale);
  for (int i = 0; i < n; ++i)
    k[i] = hyper_.signal_variance * std::exp(-(train_.row(i).transpose() - point).squaredNorm() * inv);

  const double mean = k.dot(weights_);
  chol_lower_.triangularView<Eigen::Lower>().solveInPlace(k);
  const double variance = std::max(hyper_.signal_variance - k.squaredNorm(), 0.0);
  return {mean, variance};
}

} // namespace steam
