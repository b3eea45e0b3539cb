#pragma once

#include "mbtl/core.hpp"
#include "mbtl/history.hpp"

namespace mbtl {

enum class Structure { kMountain, kNone };

enum class CriterionResult { kTrue, kFalse, kInsufficientData };

/// Left/right slope vectors of the observed generalization surface around the
/// trained tasks, per context dimension.
struct SlopeFit {
  Vector theta_left;
  Vector theta_right;
  double intercept = 0.0;
  bool ok = false;
};

enum class SlopeRule {
  // A dimension counts iff the surface decreases away from the source on
  // both sides: theta_left > 0 and theta_right < 0.
  kDecreasingBothSides,
  // Literal same-sign check, kept for comparison.
  kSameSign,
};

struct DetectionConfig {
  SlopeRule slope_rule = SlopeRule::kDecreasingBothSides;
};

/// J-bar: observed rows minus their per-target mean over trained tasks.
/// Output columns have zero mean.
Matrix relative_performance(const ObservedHistory& history);

/// std over trained tasks of J-bar at their own peaks, compared with the mean
/// per-task spread of J-bar over targets. Population standard deviations.
CriterionResult small_variance_criterion(const ObservedHistory& history);

/// OLS of J-bar on signed grid-index context differences
/// [x - y]_-, [x - y]_+ (both sides centered over trained tasks per target)
/// plus an intercept. ok=false when the design is rank-deficient.
SlopeFit fit_slopes(const ObservedHistory& history);

CriterionResult slope_criterion(const SlopeFit& fit, int num_dims,
                                SlopeRule rule = SlopeRule::kDecreasingBothSides);

/// Mountain iff both criteria pass; any insufficient-data signal means None.
Structure detect(const ObservedHistory& history, const DetectionConfig& config = {});

/// Per-round diagnostics for reporting.
struct DetectionReport {
  int k = 0;
  CriterionResult small_variance = CriterionResult::kInsufficientData;
  double peak_std = 0.0;
  double spread_std = 0.0;
  SlopeFit fit;
  CriterionResult slope = CriterionResult::kInsufficientData;
  Structure result = Structure::kNone;
};

DetectionReport detect_report(const ObservedHistory& history, const DetectionConfig& config = {});

}  // namespace mbtl
