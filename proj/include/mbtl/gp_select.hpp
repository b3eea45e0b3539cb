#pragma once

#include "mbtl/core.hpp"
#include "mbtl/gp.hpp"
#include "mbtl/history.hpp"

#include <cstdint>

namespace mbtl {

/// Linear generalization-gap model over signed grid-index context
/// differences. theta stacks the negative-part coefficients (first D) and the
/// positive-part coefficients (last D).
struct GapModel {
  Vector theta;
  double intercept = 0.0;
  bool learned = false;
};

struct GpMbtlConfig {
  double beta = 4.0;  // exploration coefficient; sqrt(beta) scales sigma
  double initial_gap_slope = 0.01;
  GpConfig gp{.signal_variance = 0.0};  // data-scaled signal variance
  bool use_modeled_best = false;        // original acquisition variant
  std::uint64_t seed = 0;
};

/// Predicted performance loss when transferring from x to y. Zero at y = x.
/// Before any successful regression this is the initial slope times the L1
/// grid-index distance; afterwards -(theta . diff(x, y)).
double estimated_gap(const GapModel& gap, const Vector& x, const Vector& y,
                     double initial_slope);

/// OLS of the observed rows on signed context differences plus an intercept.
/// learned=false on a rank-deficient design.
GapModel learn_slopes(const ObservedHistory& history);

/// Mean over targets of [mu(x) + sqrt(beta) sigma(x) - gap(x, y) - best(y)]_+.
double acquisition(const Vector& x, const GpModel& model, const GapModel& gap,
                   const Matrix& target_coords, const Vector& best_so_far, double beta,
                   double initial_slope = 0.01);

/// Same clamp-and-average with a precomputed confidence value.
double acquisition_with_ucb(const Vector& x, double ucb, const GapModel& gap,
                            const Matrix& target_coords, const Vector& best_so_far,
                            double initial_slope = 0.01);

class GpMbtlSelector final : public TaskSelector {
 public:
  GpMbtlSelector(const TaskGrid& grid, GpMbtlConfig config);

  int next(const ObservedHistory& history) override;

  /// First-round rule: per-dimension lower-median grid task.
  static int median_task(const TaskGrid& grid);

 private:
  TaskGrid grid_;
  GpMbtlConfig cfg_;
  Matrix coords_;
};

}  // namespace mbtl
