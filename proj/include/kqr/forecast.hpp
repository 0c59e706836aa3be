// Autoregressive interval forecasting: lag-window embedding, chronological
// train/validation/test splitting, and a one-step-ahead pipeline that tunes
// (lag, trade-off, kernel width) on the validation block and reports
// teacher-forced test intervals in the original scale.
#pragma once

#include "kqr/interval.hpp"
#include "kqr/types.hpp"

namespace kqr {

// Windows (x_{j-p}, ..., x_{j-1}) -> target x_j for j = p .. length-1.
LagDataset lag_embed(const TimeSeries& series, int lag);

struct ChronoSplit {
  TimeSeries train;
  TimeSeries val;   // may be empty when val_frac_of_train is 0
  TimeSeries test;
  Eigen::Index train_len = 0;
  Eigen::Index val_len = 0;
  Eigen::Index test_len = 0;
};

// First floor(train_frac * t) points form the fitting block, whose trailing
// floor(val_frac_of_train * block) points are validation; the rest is test.
ChronoSplit chrono_split(const TimeSeries& series, double train_frac,
                         double val_frac_of_train);

struct ForecastConfig {
  IntervalConfig base;                     // method, coverage, placement, tube knobs
  std::vector<int> lag_grid = {2, 4, 8, 12};
  std::vector<double> c_grid;              // empty -> default power grid
  std::vector<double> width_grid;          // empty -> default power grid
  double train_frac = 0.7;
  double val_frac_of_train = 0.1;
};

struct ForecastResult {
  int lag = 0;
  double c = 0.0;
  double width = 0.0;
  std::vector<Eigen::Index> test_positions;  // index of each target in the series
  VectorXd test_targets;                     // original scale
  VectorXd lower;                            // original scale, crossings repaired
  VectorXd upper;
  ExperimentReport report;                   // evaluated on the test block
  IntervalBuild build;                       // final refit (scaled space)
  double scale_min = 0.0;                    // min-max scaling window (train+val)
  double scale_range = 1.0;
  double tuning_seconds = 0.0;
};

ForecastResult forecast_pi(const TimeSeries& series, const ForecastConfig& config);

}  // namespace kqr
