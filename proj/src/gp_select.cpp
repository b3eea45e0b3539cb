#include "mbtl/gp_select.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mbtl {

double estimated_gap(const GapModel& gap, const Vector& x, const Vector& y,
                     double initial_slope) {
  const Vector v = x - y;
  if (!gap.learned) return initial_slope * v.cwiseAbs().sum();
  const auto d = v.size();
  double dot = 0.0;
  for (Eigen::Index i = 0; i < d; ++i)
    dot += v[i] < 0 ? gap.theta[i] * v[i] : gap.theta[d + i] * v[i];
  return -dot;
}

GapModel learn_slopes(const ObservedHistory& history) {
  history.validate();
  GapModel gap;
  const int k = history.count();
  if (k < 1) return gap;
  const int n = history.grid->num_tasks();
  const int d = history.grid->num_dims();
  gap.theta = Vector::Zero(2 * d);
  if (static_cast<long long>(k) * n < 2LL * d + 2) return gap;

  const Matrix coords = all_grid_coords(*history.grid);
  Eigen::MatrixXd design(static_cast<Eigen::Index>(k) * n, 2 * d + 1);
  Vector response(static_cast<Eigen::Index>(k) * n);
  for (int i = 0; i < k; ++i) {
    const Vector xc = coords.row(history.selected[static_cast<std::size_t>(i)]).transpose();
    for (int j = 0; j < n; ++j) {
      const Eigen::Index r = static_cast<Eigen::Index>(i) * n + j;
      for (int dd = 0; dd < d; ++dd) {
        const double v = xc[dd] - coords(j, dd);
        design(r, dd) = std::min(v, 0.0);
        design(r, d + dd) = std::max(v, 0.0);
      }
      design(r, 2 * d) = 1.0;
      response[r] = history.rows[static_cast<std::size_t>(i)][j];
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 2 * d + 1) return gap;
  const Vector coef = qr.solve(response);
  gap.theta = coef.head(2 * d);
  gap.intercept = coef[2 * d];
  gap.learned = true;
  return gap;
}

double acquisition_with_ucb(const Vector& x, double ucb, const GapModel& gap,
                            const Matrix& target_coords, const Vector& best_so_far,
                            double initial_slope) {
  const auto n = target_coords.rows();
  if (best_so_far.size() != n) throw std::invalid_argument("acquisition: best_so_far length");
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double g = estimated_gap(gap, x, target_coords.row(j).transpose(), initial_slope);
    total += std::max(ucb - g - best_so_far[j], 0.0);
  }
  return total / static_cast<double>(n);
}

double acquisition(const Vector& x, const GpModel& model, const GapModel& gap,
                   const Matrix& target_coords, const Vector& best_so_far, double beta,
                   double initial_slope) {
  const auto [mu, sd] = model.posterior(x);
  return acquisition_with_ucb(x, mu + std::sqrt(beta) * sd, gap, target_coords, best_so_far,
                              initial_slope);
}

int GpMbtlSelector::median_task(const TaskGrid& grid) {
  std::vector<int> mi(grid.dims.size());
  for (std::size_t d = 0; d < grid.dims.size(); ++d) mi[d] = (grid.dims[d] - 1) / 2;
  return task_index(grid, mi);
}

GpMbtlSelector::GpMbtlSelector(const TaskGrid& grid, GpMbtlConfig config)
    : grid_(grid), cfg_(config) {
  grid_.validate();
  if (cfg_.beta < 0) throw std::invalid_argument("GpMbtlSelector: beta must be nonnegative");
  coords_ = all_grid_coords(grid_);
}

int GpMbtlSelector::next(const ObservedHistory& history) {
  const int k = history.count();
  if (k == 0) return median_task(grid_);
  history.validate();
  const int n = grid_.num_tasks();
  if (k >= n) throw std::logic_error("GpMbtlSelector: no tasks left");

  Matrix train_x(k, grid_.num_dims());
  Vector train_y(k);
  for (int i = 0; i < k; ++i) {
    const int s = history.selected[static_cast<std::size_t>(i)];
    train_x.row(i) = coords_.row(s);
    train_y[i] = history.rows[static_cast<std::size_t>(i)][s];
  }
  const GpModel model = GpModel::fit(train_x, train_y, cfg_.gp);
  Vector mu, sd;
  model.posterior_batch(coords_, mu, sd);
  const GapModel gap = learn_slopes(history);

  Vector best = history.rows[0];
  for (int i = 1; i < k; ++i) best = best.cwiseMax(history.rows[static_cast<std::size_t>(i)]);
  if (cfg_.use_modeled_best) {
    // Original acquisition: the best-so-far term is modeled from predicted
    // source performance minus the estimated gap, not observed rows.
    Vector modeled = Vector::Constant(n, -std::numeric_limits<double>::infinity());
    for (int i = 0; i < k; ++i) {
      const int s = history.selected[static_cast<std::size_t>(i)];
      const Vector xc = coords_.row(s).transpose();
      for (int j = 0; j < n; ++j) {
        const double v =
            mu[s] - estimated_gap(gap, xc, coords_.row(j).transpose(), cfg_.initial_gap_slope);
        modeled[j] = std::max(modeled[j], v);
      }
    }
    best = modeled;
  }

  const double root_beta = std::sqrt(cfg_.beta);
  int arg = -1;
  double best_acq = -std::numeric_limits<double>::infinity();
  for (int x = 0; x < n; ++x) {
    if (std::find(history.selected.begin(), history.selected.end(), x) !=
        history.selected.end())
      continue;
    const double acq = acquisition_with_ucb(coords_.row(x).transpose(), mu[x] + root_beta * sd[x],
                                            gap, coords_, best, cfg_.initial_gap_slope);
    if (acq > best_acq) {
      best_acq = acq;
      arg = x;
    }
  }
  return arg;
}

}  // namespace mbtl
