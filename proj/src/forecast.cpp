#include "kqr/forecast.hpp"

#include "kqr/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kqr {

namespace {

void validate_series(const TimeSeries& series) {
  if (series.values.size() < 2) throw std::invalid_argument("series needs at least two values");
  if (!series.timestamps.empty() &&
      static_cast<Eigen::Index>(series.timestamps.size()) != series.values.size())
    throw std::invalid_argument("timestamp count does not match value count");
}

TimeSeries slice(const TimeSeries& series, Eigen::Index begin, Eigen::Index len) {
  TimeSeries out;
  out.values = series.values.segment(begin, len);
  if (!series.timestamps.empty())
    out.timestamps.assign(series.timestamps.begin() + begin,
                          series.timestamps.begin() + begin + len);
  return out;
}

// Rows of `embedded` whose target position falls in [begin, end).
Dataset rows_in_range(const LagDataset& embedded, Eigen::Index begin, Eigen::Index end) {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index k = 0; k < embedded.targets.size(); ++k) {
    const Eigen::Index pos = embedded.target_indices[static_cast<std::size_t>(k)];
    if (pos >= begin && pos < end) rows.push_back(k);
  }
  Dataset out;
  out.inputs.resize(static_cast<Eigen::Index>(rows.size()), embedded.inputs.cols());
  out.targets.resize(static_cast<Eigen::Index>(rows.size()));
  for (Eigen::Index i = 0; i < out.inputs.rows(); ++i) {
    out.inputs.row(i) = embedded.inputs.row(rows[static_cast<std::size_t>(i)]);
    out.targets(i) = embedded.targets(rows[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace

LagDataset lag_embed(const TimeSeries& series, int lag) {
  validate_series(series);
  const Eigen::Index t = series.values.size();
  if (lag < 1) throw std::invalid_argument("lag must be positive");
  if (lag >= t) throw std::invalid_argument("lag must be smaller than the series length");
  LagDataset out;
  out.lag = lag;
  out.inputs.resize(t - lag, lag);
  out.targets.resize(t - lag);
  out.target_indices.reserve(static_cast<std::size_t>(t - lag));
  for (Eigen::Index k = 0; k < t - lag; ++k) {
    out.inputs.row(k) = series.values.segment(k, lag).transpose();
    out.targets(k) = series.values(k + lag);
    out.target_indices.push_back(k + lag);
  }
  return out;
}

ChronoSplit chrono_split(const TimeSeries& series, double train_frac,
                         double val_frac_of_train) {
  validate_series(series);
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  if (!(val_frac_of_train >= 0.0 && val_frac_of_train < 1.0))
    throw std::invalid_argument("validation fraction must lie in [0, 1)");
  const Eigen::Index t = series.values.size();
  const auto block = static_cast<Eigen::Index>(std::floor(train_frac * static_cast<double>(t)));
  const Eigen::Index test_len = t - block;
  const auto val_len =
      static_cast<Eigen::Index>(std::floor(val_frac_of_train * static_cast<double>(block)));
  const Eigen::Index train_len = block - val_len;
  if (train_len < 1 || test_len < 1)
    throw std::invalid_argument("split fractions leave an empty train or test block");

  ChronoSplit out;
  out.train_len = train_len;
  out.val_len = val_len;
  out.test_len = test_len;
  out.train = slice(series, 0, train_len);
  out.val = val_len > 0 ? slice(series, train_len, val_len) : TimeSeries{};
  out.test = slice(series, block, test_len);
  return out;
}

ForecastResult forecast_pi(const TimeSeries& series, const ForecastConfig& config) {
  validate_series(series);
  const ChronoSplit split = chrono_split(series, config.train_frac, config.val_frac_of_train);
  const Eigen::Index t = series.values.size();
  const Eigen::Index block = split.train_len + split.val_len;

  // Scale to [0,1] using only the fitting block (train+val) so nothing about
  // the test values leaks into the fitted models.
  const double block_min = series.values.head(block).minCoeff();
  const double block_max = series.values.head(block).maxCoeff();
  const double range = block_max > block_min ? block_max - block_min : 1.0;
  TimeSeries scaled;
  scaled.values = (series.values.array() - block_min) / range;
  scaled.timestamps = series.timestamps;

  const std::vector<double> c_grid =
      config.c_grid.empty() ? default_power_grid() : config.c_grid;
  const std::vector<double> width_grid =
      config.width_grid.empty() ? default_power_grid() : config.width_grid;
  if (config.lag_grid.empty()) throw std::invalid_argument("lag grid is empty");
  const bool tuning = config.lag_grid.size() > 1 || c_grid.size() > 1 || width_grid.size() > 1;
  if (tuning && split.val_len == 0)
    throw std::invalid_argument(
        "tuning over a non-singleton grid requires a nonempty validation block");

  const auto tuning_start = std::chrono::steady_clock::now();
  bool have_best = false;
  int best_lag = 0;
  double best_c = 0.0;
  double best_width = 0.0;
  double best_pice = 0.0;
  double best_mpiw = 0.0;
  std::vector<std::string> failures;

  for (const int lag : config.lag_grid) {
    if (lag < 1 || lag >= t) {
      failures.push_back("lag " + std::to_string(lag) + ": outside the series length");
      continue;
    }
    if (split.train_len - lag < 2) {
      failures.push_back("lag " + std::to_string(lag) + ": too few training windows");
      continue;
    }
    const LagDataset embedded = lag_embed(scaled, lag);
    const Dataset train_ds = rows_in_range(embedded, lag, split.train_len);
    double cand_c;
    double cand_width;
    double cand_pice;
    double cand_mpiw;
    if (tuning) {
      const Dataset val_ds = rows_in_range(embedded, split.train_len, block);
      GridSearchResult gs;
      try {
        gs = grid_search(train_ds, val_ds, config.base, c_grid, width_grid);
      } catch (const std::exception& e) {
        failures.push_back("lag " + std::to_string(lag) + ": " + e.what());
        continue;
      }
      cand_c = gs.c;
      cand_width = gs.width;
      cand_pice = 0.0;
      cand_mpiw = 0.0;
      for (const auto& entry : gs.table)
        if (entry.c == gs.c && entry.width == gs.width) {
          cand_pice = entry.pice;
          cand_mpiw = entry.mpiw;
          break;
        }
    } else {
      cand_c = c_grid.front();
      cand_width = width_grid.front();
      cand_pice = 0.0;
      cand_mpiw = 0.0;
    }
    const bool better = !have_best || cand_pice < best_pice ||
                        (cand_pice == best_pice && cand_mpiw < best_mpiw);
    if (better) {
      have_best = true;
      best_lag = lag;
      best_c = cand_c;
      best_width = cand_width;
      best_pice = cand_pice;
      best_mpiw = cand_mpiw;
    }
  }
  if (!have_best) {
    std::ostringstream msg;
    msg << "no feasible forecasting configuration:";
    for (const auto& f : failures) msg << "\n  " << f;
    throw std::runtime_error(msg.str());
  }

  ForecastResult result;
  result.lag = best_lag;
  result.c = best_c;
  result.width = best_width;
  result.scale_min = block_min;
  result.scale_range = range;
  result.tuning_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - tuning_start).count();

  // Final refit on the whole fitting block, then teacher-forced test windows.
  const LagDataset embedded = lag_embed(scaled, best_lag);
  const Dataset fit_ds = rows_in_range(embedded, best_lag, block);
  const Dataset test_ds = rows_in_range(embedded, block, t);
  IntervalConfig final_config = config.base;
  final_config.c = best_c;
  final_config.kernel.width = best_width;
  result.build = build_interval(fit_ds, final_config);

  const IntervalBounds bounds = interval_bounds(result.build.interval, test_ds.inputs);
  result.lower = bounds.lower.array() * range + block_min;
  result.upper = bounds.upper.array() * range + block_min;
  result.test_targets = test_ds.targets.array() * range + block_min;
  for (Eigen::Index pos = block; pos < t; ++pos) result.test_positions.push_back(pos);

  ExperimentReport report;
  report.coverage_target = config.base.coverage_target;
  report.picp = picp(result.lower, result.upper, result.test_targets);
  report.mpiw = mpiw(result.lower, result.upper);
  report.pice = pice(report.picp, report.coverage_target);
  report.cp_lower = coverage_probability(result.lower, result.test_targets);
  report.cp_upper = coverage_probability(result.upper, result.test_targets);
  report.sparsity_lower_pct = sparsity(
      result.build.interval.lower, default_sparsity_eps(result.build.interval.lower.coefficients));
  report.sparsity_upper_pct = sparsity(
      result.build.interval.upper, default_sparsity_eps(result.build.interval.upper.coefficients));
  report.crossing_fraction = bounds.crossing_fraction;
  report.train_seconds = result.build.train_seconds;
  result.report = report;
  return result;
}

}  // namespace kqr
