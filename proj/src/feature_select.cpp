#include "kqr/feature_select.hpp"

#include "kqr/interval.hpp"
#include "kqr/models.hpp"

#include <cmath>
#include <stdexcept>

namespace kqr {

namespace {

// Zero-mean, unit-variance copy; constant columns map to all zeros.
Dataset standardize(const Dataset& data) {
  Dataset out = data;
  const double m = static_cast<double>(data.rows());
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    const double mean = data.inputs.col(j).mean();
    const double var = (data.inputs.col(j).array() - mean).square().sum() / m;
    const double scale = var > 0.0 ? std::sqrt(var) : 1.0;
    out.inputs.col(j) = (data.inputs.col(j).array() - mean) / scale;
  }
  return out;
}

VectorXd primal_weights(const Dataset& standardized, double level, double c) {
  const FitReport report = fit_ssvqr(standardized, level, c, {KernelFamily::Linear, 1.0});
  if (report.solver_status != SolverStatus::Optimal)
    throw std::runtime_error(std::string("feature-selection fit did not reach optimality: ") +
                             to_string(report.solver_status));
  return standardized.inputs.transpose() * report.model.coefficients;
}

FeatureSelection select_with_weights(const Dataset& data, double coverage_target,
                                     double q_bar, double c, const double* explicit_eps) {
  if (data.cols() < 1) throw std::invalid_argument("feature selection needs at least one feature");
  if (explicit_eps && *explicit_eps < 0.0)
    throw std::invalid_argument("selection threshold must be nonnegative");

  const Dataset standardized = standardize(data);
  FeatureSelection sel;
  sel.w_lower = primal_weights(standardized, q_bar, c);
  sel.w_upper = primal_weights(standardized, q_bar + coverage_target, c);
  sel.eps = explicit_eps
                ? *explicit_eps
                : 1e-4 * std::max(sel.w_lower.lpNorm<Eigen::Infinity>(),
                                  sel.w_upper.lpNorm<Eigen::Infinity>());
  for (int j = 0; j < static_cast<int>(data.cols()); ++j) {
    const bool small = std::fabs(sel.w_lower(j)) <= sel.eps &&
                       std::fabs(sel.w_upper(j)) <= sel.eps;
    (small ? sel.dropped : sel.kept).push_back(j);
  }
  return sel;
}

}  // namespace

FeatureSelection select_features(const Dataset& data, double coverage_target, double q_bar,
                                 double eps, double c) {
  return select_with_weights(data, coverage_target, q_bar, c, &eps);
}

FeatureSelection select_features(const Dataset& data, double coverage_target, double q_bar,
                                 double c) {
  return select_with_weights(data, coverage_target, q_bar, c, nullptr);
}

Dataset project_features(const Dataset& data, const std::vector<int>& kept) {
  if (kept.empty()) throw std::invalid_argument("cannot project onto an empty feature set");
  Dataset out;
  out.inputs.resize(data.rows(), static_cast<Eigen::Index>(kept.size()));
  for (Eigen::Index j = 0; j < out.inputs.cols(); ++j) {
    const int src = kept[static_cast<std::size_t>(j)];
    if (src < 0 || src >= data.cols())
      throw std::invalid_argument("kept feature index out of range");
    out.inputs.col(j) = data.inputs.col(src);
  }
  out.targets = data.targets;
  // Labels follow either convention: one per feature, or one per feature
  // plus a trailing target label that projection must carry along.
  const auto n = static_cast<std::size_t>(data.cols());
  if (data.column_names.size() == n || data.column_names.size() == n + 1) {
    for (const int src : kept)
      out.column_names.push_back(data.column_names[static_cast<std::size_t>(src)]);
    if (data.column_names.size() == n + 1)
      out.column_names.push_back(data.column_names.back());
  }
  return out;
}

SelectionRefit refit_on_selection(const Dataset& train, const Dataset& eval_set,
                                  const FeatureSelection& sel, double coverage_target,
                                  double q_bar, double c) {
  if (sel.kept.empty()) throw std::invalid_argument("selection kept no features; cannot refit");

  IntervalConfig config;
  config.method = FitMethod::Ssvqr;
  config.coverage_target = coverage_target;
  config.q_bar = q_bar;
  config.c = c;
  config.kernel = {KernelFamily::Linear, 1.0};

  SelectionRefit out;
  const IntervalBuild full = build_interval(train, config);
  out.before = full.interval;
  out.before_train_seconds = full.train_seconds;
  out.before_eval = evaluate_interval(full.interval, eval_set);
  out.before_eval.train_seconds = full.train_seconds;

  const Dataset train_kept = project_features(train, sel.kept);
  const Dataset eval_kept = project_features(eval_set, sel.kept);
  const IntervalBuild reduced = build_interval(train_kept, config);
  out.after = reduced.interval;
  out.after_train_seconds = reduced.train_seconds;
  out.after_eval = evaluate_interval(reduced.interval, eval_kept);
  out.after_eval.train_seconds = reduced.train_seconds;

  const double n = static_cast<double>(sel.kept.size() + sel.dropped.size());
  out.pct_features_reduced = 100.0 * static_cast<double>(sel.dropped.size()) / n;
  return out;
}

}  // namespace kqr
