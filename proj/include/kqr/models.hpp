// Fitted-model constructors: quantile regression via a dual quadratic
// program, a sparse L1 variant via a linear program, least-squares kernel
// regression via a bordered linear system, and a tube (interval) model via
// subgradient descent. All produce KernelModel predictors.
#pragma once

#include "kqr/types.hpp"

namespace kqr {

// --- optimization problem builders (also used by oracle-based tests) ------

// Dual quadratic program of the pinball-loss kernel quantile regression:
// variables x = [alpha; beta], coefficients u = alpha - beta,
// minimize 1/2 u'Ku - u'y subject to sum(u) = 0, 0 <= alpha <= c*q,
// 0 <= beta <= c*(1-q).
QpBoxEqProblem svqr_dual_problem(const MatrixXd& gram, const VectorXd& targets,
                                 double q, double c);

// Linear program of the L1-regularized pinball fit: variables
// [r; p; slack_lo; slack_hi; bias], coefficients u = r - p, minimize
// 1/2 sum(r+p) + c * sum(q*slack_lo + (1-q)*slack_hi) subject to the two
// epigraph rows per training point; bias is free, everything else >= 0.
LpProblem ssvqr_linear_problem(const MatrixXd& gram, const VectorXd& targets,
                               double q, double c);

// --- model fitting --------------------------------------------------------

FitReport fit_svqr(const Dataset& data, double q, double c, const KernelSpec& kernel);

FitReport fit_ssvqr(const Dataset& data, double q, double c, const KernelSpec& kernel);

FitReport fit_lssvr(const Dataset& data, double c, const KernelSpec& kernel);

struct TubeFitOptions {
  double step = 0.1;       // base step size; epoch t uses step / sqrt(t)
  int max_epochs = 2000;
  std::uint64_t seed = 0;  // recorded in the report (initialization is deterministic)
};

// Fits the interval pair (lower model in `model`, upper model in `upper`).
FitReport fit_tube(const Dataset& data, const TubeParams& params,
                   const KernelSpec& kernel, const TubeFitOptions& options);

// --- tube objective internals (exposed for finite-difference testing) -----

double tube_objective(const MatrixXd& gram, const VectorXd& targets,
                      const TubeParams& params, const VectorXd& upper_coeffs,
                      double upper_bias, const VectorXd& lower_coeffs,
                      double lower_bias);

struct TubeGradient {
  VectorXd upper_coeffs;
  double upper_bias;
  VectorXd lower_coeffs;
  double lower_bias;
};

TubeGradient tube_subgradient(const MatrixXd& gram, const VectorXd& targets,
                              const TubeParams& params, const VectorXd& upper_coeffs,
                              double upper_bias, const VectorXd& lower_coeffs,
                              double lower_bias);

// --- prediction and diagnostics -------------------------------------------

double predict(const KernelModel& model, const VectorXd& x);

VectorXd predict_many(const KernelModel& model, const MatrixXd& inputs);

// Percentage of coefficients with |value| <= eps.
double sparsity(const KernelModel& model, double eps);

// Relative threshold used for the sparsity figures in FitReport.
double default_sparsity_eps(const VectorXd& coefficients);

}  // namespace kqr
