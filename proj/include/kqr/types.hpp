#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kqr {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Supervised dataset: row i of inputs pairs with targets[i].
struct Dataset {
  MatrixXd inputs;                        // m x n
  VectorXd targets;                       // m
  std::vector<std::string> column_names;  // n + 1 when read from headered CSV, else empty

  Eigen::Index rows() const { return inputs.rows(); }
  Eigen::Index cols() const { return inputs.cols(); }
};

enum class KernelFamily { Linear, RBF };

struct KernelSpec {
  KernelFamily family = KernelFamily::RBF;
  double width = 1.0;  // RBF only; must be > 0
};

// Fitted kernel expansion f(x) = sum_i coefficients[i] * k(support_inputs.row(i), x) + bias.
struct KernelModel {
  MatrixXd support_inputs;  // m x n
  VectorXd coefficients;    // m
  double bias = 0.0;
  KernelSpec kernel;
};

enum class SolverStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(SolverStatus s);

// Residual bundle attached to every solver solution so optimality can be audited.
struct SolverCertificate {
  double primal_feasibility = 0.0;  // max constraint violation (bounds + rows)
  double equality_residual = 0.0;
  double stationarity = 0.0;  // projected-gradient / reduced-cost criterion
  double complementarity = 0.0;
};

struct SolverSolution {
  VectorXd x;
  double objective = 0.0;
  SolverStatus status = SolverStatus::Optimal;
  int iterations = 0;
  SolverCertificate certificate;
};

// min c'x  s.t.  eq_matrix x = eq_rhs,  ub_matrix x <= ub_rhs,  lower <= x <= upper
// (+/- infinity entries allowed in lower/upper).
struct LpProblem {
  VectorXd cost;
  MatrixXd eq_matrix;  // may have 0 rows
  VectorXd eq_rhs;
  MatrixXd ub_matrix;  // may have 0 rows
  VectorXd ub_rhs;
  VectorXd lower;
  VectorXd upper;
};

// min .5 x'Gx + c'x  s.t.  eq_vector'x = eq_rhs,  lower <= x <= upper.
// gram must be symmetric PSD. use_equality=false drops the equality row.
struct QpBoxEqProblem {
  MatrixXd gram;
  VectorXd linear;
  VectorXd eq_vector;
  double eq_rhs = 0.0;
  bool use_equality = true;
  VectorXd lower;
  VectorXd upper;
};

struct FitReport {
  KernelModel model;                  // single-quantile fits; tube: lower bound
  std::optional<KernelModel> upper;   // tube only
  SolverStatus solver_status = SolverStatus::Optimal;
  double train_seconds = 0.0;
  double sparsity_pct = 0.0;          // share of near-zero coefficients in `model`, percent
  std::optional<double> sparsity_upper_pct;  // tube only
  double objective_value = 0.0;
  SolverCertificate certificate;
  VectorXd raw_solution;              // solver variables (diagnostic)
  std::vector<double> objective_trace;  // tube: best-so-far objective per epoch
  std::uint64_t seed = 0;             // tube: subgradient stream seed
  std::string init_note;              // tube: how (b1,b2) were initialized
};

// Two-sided interval [predict(lower) - conformal_offset, predict(upper) + conformal_offset].
struct PredictionInterval {
  KernelModel lower;
  KernelModel upper;
  double conformal_offset = 0.0;
  double coverage_target = 0.95;
  double q_bar = 0.025;  // lower quantile level used to build the pair
};

struct CalibrationResult {
  VectorXd scores;      // sorted ascending
  double offset = 0.0;  // +infinity when degenerate
  Eigen::Index level_index = 0;  // 1-based rank used
  double alpha = 0.1;
  bool degenerate = false;
};

struct TubeParams {
  double coverage_target = 0.95;  // 1 - alpha
  double r = 0.5;                 // in (0,1); reallocates in-tube penalty between bounds
  double delta = 0.0;             // >= 0; tube-width penalty weight
  double lambda = 0.0;            // >= 0; L2 penalty on coefficients
};

struct FeatureSelection {
  std::vector<int> kept;
  std::vector<int> dropped;
  VectorXd w_lower;  // standardized-space linear weights at the lower level
  VectorXd w_upper;
  double eps = 0.0;  // threshold actually used (absolute, in standardized space)
};

struct TimeSeries {
  std::vector<std::string> timestamps;  // optional; empty or one per value
  VectorXd values;
};

struct LagDataset {
  MatrixXd inputs;   // row i = window (x_{i-p+1}, ..., x_i)
  VectorXd targets;  // x_{i+1}
  int lag = 0;
  std::vector<Eigen::Index> target_indices;  // index into the source series per row
};

// Evaluation summary for one fitted interval on one dataset.
struct ExperimentReport {
  double picp = 0.0;
  double mpiw = 0.0;
  double pice = 0.0;
  double coverage_target = 0.0;
  double cp_lower = 0.0;  // fraction of y at or below the lower quantile prediction
  double cp_upper = 0.0;
  double sparsity_lower_pct = 0.0;
  double sparsity_upper_pct = 0.0;
  std::optional<double> rmse_lower;  // vs true quantile curves when known
  std::optional<double> rmse_upper;
  double train_seconds = 0.0;
  double crossing_fraction = 0.0;  // share of points where raw bounds crossed before repair
};

}  // namespace kqr
