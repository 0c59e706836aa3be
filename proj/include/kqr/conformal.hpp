// Split conformal regression on top of a fitted prediction interval: a seeded
// train/calibration split, the two-sided nonconformity score, the empirical
// quantile at level (1-alpha)(1+1/n), and the offset application.
#pragma once

#include "kqr/types.hpp"

#include <utility>

namespace kqr {

// Seeded uniform partition; the calibration part receives
// round(calib_fraction * rows) rows, clamped to [1, rows - 1].
std::pair<Dataset, Dataset> split_train_calibrate(const Dataset& data, double calib_fraction,
                                                  std::uint64_t seed);

// E_i = max{lower(x_i) - y_i, y_i - upper(x_i)} on the raw (unrepaired)
// bound predictions. Requires an interval with no offset already applied.
VectorXd nonconformity_scores(const PredictionInterval& interval, const Dataset& calib);

// Order statistic at rank ceil((1-alpha)(n+1)). Ranks past the sample size
// yield an infinite offset with the degenerate flag set.
CalibrationResult conformal_quantile(const VectorXd& scores, double alpha);

// Returns the interval with conformal_offset set from the calibration data.
PredictionInterval conformalize(const PredictionInterval& interval, const Dataset& calib,
                                double alpha);

// Same, also returning the calibration evidence for reporting.
std::pair<PredictionInterval, CalibrationResult> conformalize_with_calibration(
    const PredictionInterval& interval, const Dataset& calib, double alpha);

}  // namespace kqr
