// Prediction-interval construction: paired-quantile intervals from the QP and
// LP fitters, the normal-noise interval around the least-squares fit, the
// tube-model interval, plus the search routines that pick the interval
// placement (q_bar) and the hyperparameters (trade-off c, kernel width).
#pragma once

#include "kqr/models.hpp"
#include "kqr/types.hpp"

#include <string>
#include <vector>

namespace kqr {

enum class FitMethod { Svqr, Ssvqr, Lssvr, Tube };

FitMethod fit_method_from_string(const std::string& name);
const char* to_string(FitMethod method);

struct IntervalConfig {
  FitMethod method = FitMethod::Svqr;
  double coverage_target = 0.95;
  double q_bar = 0.025;   // lower quantile level; ignored by lssvr/tube
  double c = 1.0;         // trade-off; the tube method uses ridge weight 1/c
  KernelSpec kernel;
  double tube_r = 0.5;
  double tube_delta = 0.0;
  TubeFitOptions tube;
};

// A constructed interval together with the underlying fit reports.
struct IntervalBuild {
  PredictionInterval interval;
  FitReport primary;                  // lower-bound fit, or the joint tube fit
  std::optional<FitReport> secondary; // upper-bound fit when fitted separately
  double train_seconds = 0.0;         // total across the fits involved
};

IntervalBuild build_interval(const Dataset& data, const IntervalConfig& config);

// Convenience constructors mirroring the four methods.
PredictionInterval pi_svqr(const Dataset& data, double coverage_target, double q_bar,
                           double c, const KernelSpec& kernel);
PredictionInterval pi_ssvqr(const Dataset& data, double coverage_target, double q_bar,
                            double c, const KernelSpec& kernel);
PredictionInterval pi_lssvr(const Dataset& data, double coverage_target, double c,
                            const KernelSpec& kernel);

// Per-point bounds with the conformal offset applied and crossings repaired
// to [min, max]. Also reports the fraction of points that needed repair.
struct IntervalBounds {
  VectorXd lower;
  VectorXd upper;
  double crossing_fraction = 0.0;
};

IntervalBounds interval_bounds(const PredictionInterval& interval, const MatrixXd& inputs);

// Test-set metrics for a constructed interval. The overload with true
// quantile curves additionally fills the bound RMSE fields.
ExperimentReport evaluate_interval(const PredictionInterval& interval, const Dataset& test);
ExperimentReport evaluate_interval(const PredictionInterval& interval, const Dataset& test,
                                   const VectorXd& true_lower, const VectorXd& true_upper);

// Holds out a validation subset: the trailing rows when chronological,
// otherwise a seeded uniformly-random subset. The held-out size is
// round(fraction * rows) clamped to [1, rows - 1].
struct ValidationSplit {
  Dataset train;
  Dataset val;
  std::vector<Eigen::Index> val_indices;  // row indices in the original data
};

ValidationSplit split_validation(const Dataset& data, double fraction, std::uint64_t seed,
                                 bool chronological);

// Interval-placement search: among grid values reaching the coverage target
// on the validation set, picks the smallest MPIW; if none reaches it, picks
// the highest PICP (ties: smaller MPIW, then smaller q_bar).
struct QbarSearchResult {
  double q_bar = 0.0;
  IntervalBuild build;
  struct Entry {
    double q_bar, picp, mpiw;
  };
  std::vector<Entry> table;
};

QbarSearchResult tune_qbar(const Dataset& data, const Dataset& val,
                           const IntervalConfig& base, const std::vector<double>& grid);

// Hyperparameter search minimizing validation PICE; ties broken by smaller
// MPIW, then smaller c, then smaller width.
struct GridSearchResult {
  double c = 0.0;
  double width = 0.0;
  IntervalBuild build;
  struct Entry {
    double c, width, picp, mpiw, pice;
  };
  std::vector<Entry> table;
};

GridSearchResult grid_search(const Dataset& data, const Dataset& val,
                             const IntervalConfig& base, const std::vector<double>& c_grid,
                             const std::vector<double>& width_grid);

// Powers of two from 2^-8 to 2^8 (17 values), the default for both grids.
std::vector<double> default_power_grid();

// Default interval-placement grid for coverage target 0.95.
std::vector<double> default_qbar_grid();

}  // namespace kqr
