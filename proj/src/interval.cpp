#include "kqr/interval.hpp"

#include "kqr/metrics.hpp"
#include "kqr/rng.hpp"
#include "kqr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kqr {

namespace {

void validate_coverage(double coverage_target) {
  if (!(coverage_target > 0.0 && coverage_target < 1.0))
    throw std::invalid_argument("coverage target must lie in (0, 1)");
}

// Both quantile levels q_bar and q_bar + coverage_target must be fittable,
// i.e. stay strictly inside (0, 1).
void validate_placement(double coverage_target, double q_bar) {
  validate_coverage(coverage_target);
  if (!(q_bar > 0.0 && q_bar + coverage_target < 1.0))
    throw std::invalid_argument(
        "interval placement must keep both quantile levels inside (0, 1)");
}

Dataset subset_rows(const Dataset& data, const std::vector<Eigen::Index>& rows) {
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

FitMethod fit_method_from_string(const std::string& name) {
  if (name == "svqr") return FitMethod::Svqr;
  if (name == "ssvqr") return FitMethod::Ssvqr;
  if (name == "lssvr") return FitMethod::Lssvr;
  if (name == "tube") return FitMethod::Tube;
  throw std::invalid_argument("unknown fit method '" + name +
                              "' (expected svqr, ssvqr, lssvr, or tube)");
}

const char* to_string(FitMethod method) {
  switch (method) {
    case FitMethod::Svqr: return "svqr";
    case FitMethod::Ssvqr: return "ssvqr";
    case FitMethod::Lssvr: return "lssvr";
    case FitMethod::Tube: return "tube";
  }
  return "unknown";
}

IntervalBuild build_interval(const Dataset& data, const IntervalConfig& config) {
  validate_coverage(config.coverage_target);
  IntervalBuild out;
  out.interval.coverage_target = config.coverage_target;
  out.interval.conformal_offset = 0.0;

  switch (config.method) {
    case FitMethod::Svqr:
    case FitMethod::Ssvqr: {
      validate_placement(config.coverage_target, config.q_bar);
      const double lower_level = config.q_bar;
      const double upper_level = config.q_bar + config.coverage_target;
      auto fit = config.method == FitMethod::Svqr ? fit_svqr : fit_ssvqr;
      FitReport lower = fit(data, lower_level, config.c, config.kernel);
      FitReport upper = fit(data, upper_level, config.c, config.kernel);
      out.interval.lower = lower.model;
      out.interval.upper = upper.model;
      out.interval.q_bar = config.q_bar;
      out.train_seconds = lower.train_seconds + upper.train_seconds;
      out.primary = std::move(lower);
      out.secondary = std::move(upper);
      break;
    }
    case FitMethod::Lssvr: {
      if (data.rows() < 2)
        throw std::invalid_argument("normal-noise interval needs at least two rows");
      FitReport fit = fit_lssvr(data, config.c, config.kernel);
      const VectorXd residuals = data.targets - predict_many(fit.model, data.inputs);
      const double mean = residuals.mean();
      const double sigma = std::sqrt((residuals.array() - mean).square().sum() /
                                     static_cast<double>(data.rows() - 1));
      const double alpha = 1.0 - config.coverage_target;
      const double shift = normal_quantile(1.0 - alpha / 2.0) * sigma;
      out.interval.lower = fit.model;
      out.interval.upper = fit.model;
      out.interval.lower.bias -= shift;
      out.interval.upper.bias += shift;
      out.interval.q_bar = alpha / 2.0;
      out.train_seconds = fit.train_seconds;
      out.primary = std::move(fit);
      break;
    }
    case FitMethod::Tube: {
      TubeParams params;
      params.coverage_target = config.coverage_target;
      params.r = config.tube_r;
      params.delta = config.tube_delta;
      params.lambda = 1.0 / config.c;
      FitReport fit = fit_tube(data, params, config.kernel, config.tube);
      out.interval.lower = fit.model;
      out.interval.upper = *fit.upper;
      out.interval.q_bar = (1.0 - config.coverage_target) / 2.0;
      out.train_seconds = fit.train_seconds;
      out.primary = std::move(fit);
      break;
    }
  }
  return out;
}

PredictionInterval pi_svqr(const Dataset& data, double coverage_target, double q_bar,
                           double c, const KernelSpec& kernel) {
  IntervalConfig config;
  config.method = FitMethod::Svqr;
  config.coverage_target = coverage_target;
  config.q_bar = q_bar;
  config.c = c;
  config.kernel = kernel;
  return build_interval(data, config).interval;
}

PredictionInterval pi_ssvqr(const Dataset& data, double coverage_target, double q_bar,
                            double c, const KernelSpec& kernel) {
  IntervalConfig config;
  config.method = FitMethod::Ssvqr;
  config.coverage_target = coverage_target;
  config.q_bar = q_bar;
  config.c = c;
  config.kernel = kernel;
  return build_interval(data, config).interval;
}

PredictionInterval pi_lssvr(const Dataset& data, double coverage_target, double c,
                            const KernelSpec& kernel) {
  IntervalConfig config;
  config.method = FitMethod::Lssvr;
  config.coverage_target = coverage_target;
  config.q_bar = (1.0 - coverage_target) / 2.0;
  config.c = c;
  config.kernel = kernel;
  return build_interval(data, config).interval;
}

IntervalBounds interval_bounds(const PredictionInterval& interval, const MatrixXd& inputs) {
  IntervalBounds out;
  out.lower = predict_many(interval.lower, inputs).array() - interval.conformal_offset;
  out.upper = predict_many(interval.upper, inputs).array() + interval.conformal_offset;
  Eigen::Index crossings = 0;
  for (Eigen::Index i = 0; i < out.lower.size(); ++i) {
    if (out.lower(i) > out.upper(i)) {
      std::swap(out.lower(i), out.upper(i));
      ++crossings;
    }
  }
  out.crossing_fraction = out.lower.size() == 0
                              ? 0.0
                              : static_cast<double>(crossings) /
                                    static_cast<double>(out.lower.size());
  return out;
}

ExperimentReport evaluate_interval(const PredictionInterval& interval, const Dataset& test) {
  const IntervalBounds bounds = interval_bounds(interval, test.inputs);
  ExperimentReport report;
  report.coverage_target = interval.coverage_target;
  report.picp = picp(bounds.lower, bounds.upper, test.targets);
  report.mpiw = mpiw(bounds.lower, bounds.upper);
  report.pice = pice(report.picp, interval.coverage_target);
  report.cp_lower = coverage_probability(bounds.lower, test.targets);
  report.cp_upper = coverage_probability(bounds.upper, test.targets);
  report.sparsity_lower_pct =
      sparsity(interval.lower, default_sparsity_eps(interval.lower.coefficients));
  report.sparsity_upper_pct =
      sparsity(interval.upper, default_sparsity_eps(interval.upper.coefficients));
  report.crossing_fraction = bounds.crossing_fraction;
  return report;
}

ExperimentReport evaluate_interval(const PredictionInterval& interval, const Dataset& test,
                                   const VectorXd& true_lower, const VectorXd& true_upper) {
  ExperimentReport report = evaluate_interval(interval, test);
  const IntervalBounds bounds = interval_bounds(interval, test.inputs);
  report.rmse_lower = quantile_rmse(bounds.lower, true_lower);
  report.rmse_upper = quantile_rmse(bounds.upper, true_upper);
  return report;
}

ValidationSplit split_validation(const Dataset& data, double fraction, std::uint64_t seed,
                                 bool chronological) {
  const Eigen::Index m = data.rows();
  if (m < 2) throw std::invalid_argument("validation split needs at least two rows");
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("validation fraction must lie in (0, 1)");
  const Eigen::Index n_val = std::clamp<Eigen::Index>(
      static_cast<Eigen::Index>(std::llround(fraction * static_cast<double>(m))), 1, m - 1);

  ValidationSplit out;
  std::vector<Eigen::Index> train_rows;
  if (chronological) {
    for (Eigen::Index i = 0; i < m - n_val; ++i) train_rows.push_back(i);
    for (Eigen::Index i = m - n_val; i < m; ++i) out.val_indices.push_back(i);
  } else {
    Rng rng(SeedStream::root(seed).child(3));
    const std::vector<Eigen::Index> perm = rng.permutation(m);
    out.val_indices.assign(perm.begin(), perm.begin() + n_val);
    std::sort(out.val_indices.begin(), out.val_indices.end());
    std::vector<bool> held(static_cast<std::size_t>(m), false);
    for (const Eigen::Index i : out.val_indices) held[static_cast<std::size_t>(i)] = true;
    for (Eigen::Index i = 0; i < m; ++i)
      if (!held[static_cast<std::size_t>(i)]) train_rows.push_back(i);
  }
  out.train = subset_rows(data, train_rows);
  out.val = subset_rows(data, out.val_indices);
  return out;
}

QbarSearchResult tune_qbar(const Dataset& data, const Dataset& val,
                           const IntervalConfig& base, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("interval-placement grid is empty");
  if (base.method != FitMethod::Svqr && base.method != FitMethod::Ssvqr)
    throw std::invalid_argument("interval placement only applies to the paired-quantile methods");
  for (const double g : grid) validate_placement(base.coverage_target, g);

  QbarSearchResult result;
  bool have_best = false;
  bool best_covered = false;
  double best_picp = 0.0;
  double best_mpiw = 0.0;
  std::vector<std::string> failures;

  for (const double g : grid) {
    IntervalConfig config = base;
    config.q_bar = g;
    IntervalBuild build;
    try {
      build = build_interval(data, config);
    } catch (const std::exception& e) {
      failures.push_back("q_bar " + std::to_string(g) + ": " + e.what());
      continue;
    }
    const ExperimentReport eval = evaluate_interval(build.interval, val);
    result.table.push_back({g, eval.picp, eval.mpiw});
    const bool covered = eval.picp >= base.coverage_target;
    bool better = false;
    if (!have_best) {
      better = true;
    } else if (covered != best_covered) {
      better = covered;
    } else if (covered) {
      better = eval.mpiw < best_mpiw || (eval.mpiw == best_mpiw && g < result.q_bar);
    } else {
      better = eval.picp > best_picp ||
               (eval.picp == best_picp &&
                (eval.mpiw < best_mpiw || (eval.mpiw == best_mpiw && g < result.q_bar)));
    }
    if (better) {
      have_best = true;
      best_covered = covered;
      best_picp = eval.picp;
      best_mpiw = eval.mpiw;
      result.q_bar = g;
      result.build = std::move(build);
    }
  }
  if (!have_best) {
    std::ostringstream msg;
    msg << "every interval-placement candidate failed:";
    for (const auto& f : failures) msg << "\n  " << f;
    throw std::runtime_error(msg.str());
  }
  return result;
}

GridSearchResult grid_search(const Dataset& data, const Dataset& val,
                             const IntervalConfig& base, const std::vector<double>& c_grid,
                             const std::vector<double>& width_grid) {
  if (c_grid.empty() || width_grid.empty())
    throw std::invalid_argument("hyperparameter grids must be nonempty");

  GridSearchResult result;
  bool have_best = false;
  double best_pice = 0.0;
  double best_mpiw = 0.0;
  std::vector<std::string> failures;

  for (const double c : c_grid) {
    for (const double width : width_grid) {
      IntervalConfig config = base;
      config.c = c;
      config.kernel.width = width;
      IntervalBuild build;
      try {
        build = build_interval(data, config);
      } catch (const std::exception& e) {
        std::ostringstream key;
        key << "c " << c << ", width " << width << ": " << e.what();
        failures.push_back(key.str());
        continue;
      }
      const ExperimentReport eval = evaluate_interval(build.interval, val);
      result.table.push_back({c, width, eval.picp, eval.mpiw, eval.pice});
      bool better = false;
      if (!have_best) {
        better = true;
      } else if (eval.pice != best_pice) {
        better = eval.pice < best_pice;
      } else if (eval.mpiw != best_mpiw) {
        better = eval.mpiw < best_mpiw;
      } else if (c != result.c) {
        better = c < result.c;
      } else {
        better = width < result.width;
      }
      if (better) {
        have_best = true;
        best_pice = eval.pice;
        best_mpiw = eval.mpiw;
        result.c = c;
        result.width = width;
        result.build = std::move(build);
      }
    }
  }
  if (!have_best) {
    std::ostringstream msg;
    msg << "every hyperparameter candidate failed:";
    for (const auto& f : failures) msg << "\n  " << f;
    throw std::runtime_error(msg.str());
  }
  return result;
}

std::vector<double> default_power_grid() {
  std::vector<double> grid;
  for (int e = -8; e <= 8; ++e) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

std::vector<double> default_qbar_grid() {
  return {0.005, 0.01, 0.015, 0.02, 0.025, 0.03, 0.035, 0.04, 0.045};
}

}  // namespace kqr
