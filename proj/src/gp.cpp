#include "mbtl/gp.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

namespace mbtl {

namespace {

Eigen::MatrixXd rbf_gram(const Matrix& a, const Matrix& b, double sf2, double ls) {
  Eigen::MatrixXd k(a.rows(), b.rows());
  const double inv = 1.0 / (2.0 * ls * ls);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      k(i, j) = sf2 * std::exp(-(a.row(i) - b.row(j)).squaredNorm() * inv);
  return k;
}

}  // namespace

GpModel GpModel::fit(const Matrix& inputs, const Vector& targets, const GpConfig& config) {
  if (inputs.rows() != targets.size() || targets.size() < 1)
    throw std::invalid_argument("GpModel::fit: inputs/targets mismatch");
  if (!targets.allFinite() || !inputs.allFinite())
    throw std::invalid_argument("GpModel::fit: non-finite value");
  if (config.length_scale <= 0) throw std::invalid_argument("GpModel::fit: length_scale <= 0");
  if (config.noise_variance < 0) throw std::invalid_argument("GpModel::fit: negative noise");

  GpModel m;
  m.inputs_ = inputs;
  m.length_scale_ = config.length_scale;
  m.prior_mean_ = targets.mean();
  if (config.signal_variance > 0) {
    m.signal_variance_ = config.signal_variance;
  } else {
    m.signal_variance_ = std::max((targets.array() - m.prior_mean_).square().mean(), 1e-12);
  }

  Eigen::MatrixXd gram = rbf_gram(inputs, inputs, m.signal_variance_, m.length_scale_);
  double jitter = config.jitter;
  for (;;) {
    Eigen::MatrixXd k = gram;
    k.diagonal().array() += config.noise_variance + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() == Eigen::Success) {
      m.chol_lower_ = llt.matrixL();
      m.alpha_ = llt.solve((targets.array() - m.prior_mean_).matrix().eval());
      return m;
    }
    if (jitter >= 1e-4) throw std::runtime_error("GpModel::fit: factorization failed");
    jitter *= 10.0;
  }
}

std::pair<double, double> GpModel::posterior(const Vector& query) const {
  Matrix q(1, query.size());
  q.row(0) = query.transpose();
  Vector mean(1), sd(1);
  posterior_batch(q, mean, sd);
  return {mean[0], sd[0]};
}

void GpModel::posterior_batch(const Matrix& queries, Vector& mean, Vector& stddev) const {
  if (queries.cols() != inputs_.cols())
    throw std::invalid_argument("GpModel::posterior: dimension mismatch");
  const Eigen::MatrixXd ks = rbf_gram(inputs_, queries, signal_variance_, length_scale_);
  mean = Vector::Constant(queries.rows(), prior_mean_) + ks.transpose() * alpha_;
  const Eigen::MatrixXd v = chol_lower_.triangularView<Eigen::Lower>().solve(ks);
  stddev = (signal_variance_ - v.colwise().squaredNorm().transpose().array())
               .max(0.0)
               .sqrt()
               .matrix();
}

}  // namespace mbtl
