#include "mbtl/detection.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace mbtl {

void ObservedHistory::validate() const {
  if (grid == nullptr) throw std::invalid_argument("ObservedHistory: missing grid");
  if (rows.size() != selected.size())
    throw std::invalid_argument("ObservedHistory: rows/selected length mismatch");
  const int n = grid->num_tasks();
  for (std::size_t i = 0; i < selected.size(); ++i) {
    if (selected[i] < 0 || selected[i] >= n)
      throw std::invalid_argument("ObservedHistory: task index out of range");
    if (rows[i].size() != n) throw std::invalid_argument("ObservedHistory: row length mismatch");
    for (std::size_t j = i + 1; j < selected.size(); ++j)
      if (selected[i] == selected[j])
        throw std::invalid_argument("ObservedHistory: duplicate selected task");
  }
}

Matrix relative_performance(const ObservedHistory& history) {
  history.validate();
  const int k = history.count();
  if (k < 1) throw std::invalid_argument("relative_performance: empty history");
  const int n = history.grid->num_tasks();
  Matrix rel(k, n);
  for (int i = 0; i < k; ++i) rel.row(i) = history.rows[static_cast<std::size_t>(i)].transpose();
  const Eigen::RowVectorXd mean = rel.colwise().mean();
  rel.rowwise() -= mean;
  return rel;
}

namespace {

double population_std(const Vector& v) {
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().mean());
}

}  // namespace

CriterionResult small_variance_criterion(const ObservedHistory& history) {
  if (history.count() < 2) return CriterionResult::kInsufficientData;
  const Matrix rel = relative_performance(history);
  const int k = history.count();
  Vector peaks(k);
  Vector spreads(k);
  for (int i = 0; i < k; ++i) {
    peaks[i] = rel(i, history.selected[static_cast<std::size_t>(i)]);
    spreads[i] = population_std(rel.row(i).transpose());
  }
  return population_std(peaks) < spreads.mean() ? CriterionResult::kTrue : CriterionResult::kFalse;
}

SlopeFit fit_slopes(const ObservedHistory& history) {
  history.validate();
  const int k = history.count();
  const int n = history.grid->num_tasks();
  const int d = history.grid->num_dims();
  SlopeFit fit;
  fit.theta_left = Vector::Zero(d);
  fit.theta_right = Vector::Zero(d);
  if (k < 1 || static_cast<long long>(k) * n < 2LL * d + 2) return fit;

  const Matrix coords = all_grid_coords(*history.grid);
  const Matrix rel = relative_performance(history);

  // Signed-difference features; both response and features are centered over
  // the trained tasks per target, which removes task-difficulty effects and
  // absorbs per-source offsets into the feature span.
  Eigen::MatrixXd design(static_cast<Eigen::Index>(k) * n, 2 * d + 1);
  Vector response(static_cast<Eigen::Index>(k) * n);
  Eigen::MatrixXd mean_feat = Eigen::MatrixXd::Zero(n, 2 * d);
  std::vector<Eigen::MatrixXd> feats(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const Vector xc = coords.row(history.selected[static_cast<std::size_t>(i)]).transpose();
    Eigen::MatrixXd f(n, 2 * d);
    for (int j = 0; j < n; ++j) {
      for (int dd = 0; dd < d; ++dd) {
        const double v = xc[dd] - coords(j, dd);
        f(j, dd) = std::min(v, 0.0);
        f(j, d + dd) = std::max(v, 0.0);
      }
    }
    mean_feat += f;
    feats[static_cast<std::size_t>(i)] = std::move(f);
  }
  mean_feat /= k;
  for (int i = 0; i < k; ++i) {
    design.middleRows(static_cast<Eigen::Index>(i) * n, n).leftCols(2 * d) =
        feats[static_cast<std::size_t>(i)] - mean_feat;
    design.middleRows(static_cast<Eigen::Index>(i) * n, n).col(2 * d).setOnes();
    response.segment(static_cast<Eigen::Index>(i) * n, n) = rel.row(i).transpose();
  }

  // Centering makes the per-dimension feature pair-sums pure source effects,
  // which are collinear for small k; take the SVD minimum-norm solution and
  // treat only an all-zero design as unusable.
  Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-9);
  if (svd.rank() < 1) return fit;
  const Vector coef = svd.solve(response);
  fit.theta_left = coef.head(d);
  fit.theta_right = coef.segment(d, d);
  fit.intercept = coef[2 * d];
  fit.ok = true;
  return fit;
}

CriterionResult slope_criterion(const SlopeFit& fit, int num_dims, SlopeRule rule) {
  if (!fit.ok) return CriterionResult::kInsufficientData;
  int consistent = 0;
  for (int d = 0; d < num_dims; ++d) {
    const double tl = fit.theta_left[d];
    const double tr = fit.theta_right[d];
    const bool hit = rule == SlopeRule::kDecreasingBothSides
                         ? (tl > 0.0 && tr < 0.0)
                         : ((tl > 0.0) == (tr > 0.0) && tl != 0.0 && tr != 0.0);
    if (hit) ++consistent;
  }
  return 2 * consistent > num_dims ? CriterionResult::kTrue : CriterionResult::kFalse;
}

Structure detect(const ObservedHistory& history, const DetectionConfig& config) {
  return detect_report(history, config).result;
}

DetectionReport detect_report(const ObservedHistory& history, const DetectionConfig& config) {
  DetectionReport report;
  report.k = history.count();
  report.result = Structure::kNone;
  if (report.k < 2) return report;

  const Matrix rel = relative_performance(history);
  Vector peaks(report.k), spreads(report.k);
  for (int i = 0; i < report.k; ++i) {
    peaks[i] = rel(i, history.selected[static_cast<std::size_t>(i)]);
    spreads[i] = population_std(rel.row(i).transpose());
  }
  report.peak_std = population_std(peaks);
  report.spread_std = spreads.mean();
  report.small_variance =
      report.peak_std < report.spread_std ? CriterionResult::kTrue : CriterionResult::kFalse;

  report.fit = fit_slopes(history);
  report.slope = slope_criterion(report.fit, history.grid->num_dims(), config.slope_rule);

  if (report.small_variance == CriterionResult::kTrue && report.slope == CriterionResult::kTrue)
    report.result = Structure::kMountain;
  return report;
}

}  // namespace mbtl
