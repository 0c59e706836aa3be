// Linear-kernel feature selection for interval estimation: fit the sparse
// quantile model at both interval levels on standardized features, recover
// the primal weight vectors, and drop features small in both.
#pragma once

#include "kqr/types.hpp"

namespace kqr {

// Weight-based selection. Thresholds apply to weights in standardized
// (zero-mean, unit-variance) feature space.
FeatureSelection select_features(const Dataset& data, double coverage_target, double q_bar,
                                 double eps, double c);

// Same with the default relative threshold
// eps = 1e-4 * max(|w_lower|_inf, |w_upper|_inf).
FeatureSelection select_features(const Dataset& data, double coverage_target, double q_bar,
                                 double c);

// Keeps only the listed feature columns (indices ascending in `kept`).
Dataset project_features(const Dataset& data, const std::vector<int>& kept);

// Before/after comparison: linear-kernel paired-quantile intervals on all
// features versus on the kept features, both evaluated on `eval_set`.
struct SelectionRefit {
  PredictionInterval before;
  PredictionInterval after;
  ExperimentReport before_eval;
  ExperimentReport after_eval;
  double before_train_seconds = 0.0;
  double after_train_seconds = 0.0;
  double pct_features_reduced = 0.0;
};

SelectionRefit refit_on_selection(const Dataset& train, const Dataset& eval_set,
                                  const FeatureSelection& sel, double coverage_target,
                                  double q_bar, double c);

}  // namespace kqr
