#pragma once

#include "mbtl/core.hpp"

#include <utility>

namespace mbtl {

struct GpConfig {
  /// RBF signal variance. A non-positive value means "use the population
  /// variance of the targets" (floored at 1e-12).
  double signal_variance = 1.0;
  double length_scale = 1.0;  // grid-index units
  double noise_variance = 1e-4;
  double jitter = 1e-8;
};

/// Exact GP regression with an RBF kernel on grid-index coordinates and a
/// constant prior mean equal to the target mean.
class GpModel {
 public:
  static GpModel fit(const Matrix& inputs, const Vector& targets, const GpConfig& config = {});

  /// Posterior mean and standard deviation of the latent function.
  std::pair<double, double> posterior(const Vector& query) const;
  void posterior_batch(const Matrix& queries, Vector& mean, Vector& stddev) const;

  double prior_mean() const { return prior_mean_; }
  double signal_variance() const { return signal_variance_; }

 private:
  Matrix inputs_;
  Eigen::MatrixXd chol_lower_;
  Vector alpha_;
  double prior_mean_ = 0.0;
  double signal_variance_ = 1.0;
  double length_scale_ = 1.0;
};

}  // namespace mbtl
