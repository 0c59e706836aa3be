#include "kqr/conformal.hpp"

#include "kqr/models.hpp"
#include "kqr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kqr {

namespace {

Dataset take_rows(const Dataset& data, const std::vector<Eigen::Index>& rows) {
  Dataset out;
  out.inputs.resize(static_cast<Eigen::Index>(rows.size()), data.inputs.cols());
  out.targets.resize(static_cast<Eigen::Index>(rows.size()));
  for (Eigen::Index i = 0; i < out.inputs.rows(); ++i) {
    out.inputs.row(i) = data.inputs.row(rows[static_cast<std::size_t>(i)]);
    out.targets(i) = data.targets(rows[static_cast<std::size_t>(i)]);
  }
  out.column_names = data.column_names;
  return out;
}

}  // namespace

std::pair<Dataset, Dataset> split_train_calibrate(const Dataset& data, double calib_fraction,
                                                  std::uint64_t seed) {
  const Eigen::Index m = data.rows();
  if (m < 2) throw std::invalid_argument("conformal split needs at least two rows");
  if (!(calib_fraction > 0.0 && calib_fraction < 1.0))
    throw std::invalid_argument("calibration fraction must lie in (0, 1)");
  const Eigen::Index n_calib = std::clamp<Eigen::Index>(
      static_cast<Eigen::Index>(std::llround(calib_fraction * static_cast<double>(m))), 1,
      m - 1);

  Rng rng(SeedStream::root(seed).child(4));
  const std::vector<Eigen::Index> perm = rng.permutation(m);
  std::vector<Eigen::Index> calib_rows(perm.begin(), perm.begin() + n_calib);
  std::sort(calib_rows.begin(), calib_rows.end());
  std::vector<bool> held(static_cast<std::size_t>(m), false);
  for (const Eigen::Index i : calib_rows) held[static_cast<std::size_t>(i)] = true;
  std::vector<Eigen::Index> fit_rows;
  for (Eigen::Index i = 0; i < m; ++i)
    if (!held[static_cast<std::size_t>(i)]) fit_rows.push_back(i);

  return {take_rows(data, fit_rows), take_rows(data, calib_rows)};
}

VectorXd nonconformity_scores(const PredictionInterval& interval, const Dataset& calib) {
  if (interval.conformal_offset != 0.0)
    throw std::invalid_argument("nonconformity scores require an interval with no offset applied");
  if (calib.rows() == 0) throw std::invalid_argument("calibration set is empty");
  const VectorXd lower = predict_many(interval.lower, calib.inputs);
  const VectorXd upper = predict_many(interval.upper, calib.inputs);
  VectorXd scores(calib.rows());
  for (Eigen::Index i = 0; i < calib.rows(); ++i)
    scores(i) = std::max(lower(i) - calib.targets(i), calib.targets(i) - upper(i));
  return scores;
}

CalibrationResult conformal_quantile(const VectorXd& scores, double alpha) {
  if (scores.size() == 0) throw std::invalid_argument("score vector is empty");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("miscoverage level must lie in (0, 1)");
  const Eigen::Index n = scores.size();
  const auto rank = static_cast<Eigen::Index>(
      std::ceil((1.0 - alpha) * static_cast<double>(n + 1)));

  CalibrationResult result;
  result.scores = scores;
  result.level_index = rank;
  result.alpha = alpha;
  if (rank > n) {
    result.offset = std::numeric_limits<double>::infinity();
    result.degenerate = true;
    return result;
  }
  std::vector<double> sorted(scores.data(), scores.data() + n);
  std::stable_sort(sorted.begin(), sorted.end());
  result.offset = sorted[static_cast<std::size_t>(rank - 1)];
  result.degenerate = false;
  return result;
}

PredictionInterval conformalize(const PredictionInterval& interval, const Dataset& calib,
                                double alpha) {
  return conformalize_with_calibration(interval, calib, alpha).first;
}

std::pair<PredictionInterval, CalibrationResult> conformalize_with_calibration(
    const PredictionInterval& interval, const Dataset& calib, double alpha) {
  const VectorXd scores = nonconformity_scores(interval, calib);
  CalibrationResult calibration = conformal_quantile(scores, alpha);
  PredictionInterval adjusted = interval;
  adjusted.conformal_offset = calibration.offset;
  return {std::move(adjusted), std::move(calibration)};
}

}  // namespace kqr
