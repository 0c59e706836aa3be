#include "kqr/models.hpp"

#include "kqr/kernel.hpp"
#include "kqr/losses.hpp"
#include "kqr/solvers/linear_system.hpp"
#include "kqr/solvers/lp.hpp"
#include "kqr/solvers/qp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace kqr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void validate_quantile_fit(const Dataset& data, double q, double c) {
  if (data.rows() < 2) throw std::invalid_argument("fit requires at least two training points");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1)");
  if (!(c > 0.0)) throw std::invalid_argument("trade-off parameter must be positive");
  if (data.targets.size() != data.rows())
    throw std::invalid_argument("targets length must match input row count");
}

// Picks the bias minimizing total training pinball loss with coefficients
// fixed. The optimum of this piecewise-linear 1-D problem is attained at one
// of the residual-crossing points; candidates are scanned in ascending order
// so ties resolve to the smallest bias.
double pinball_optimal_bias(const VectorXd& targets, const VectorXd& fitted_no_bias, double q) {
  std::vector<double> candidates(static_cast<std::size_t>(targets.size()));
  for (Eigen::Index i = 0; i < targets.size(); ++i)
    candidates[static_cast<std::size_t>(i)] = targets(i) - fitted_no_bias(i);
  std::sort(candidates.begin(), candidates.end());
  double best_bias = candidates.front();
  double best_loss = std::numeric_limits<double>::infinity();
  for (const double b : candidates) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < targets.size(); ++i)
      loss += pinball(q, targets(i) - fitted_no_bias(i) - b);
    if (loss < best_loss) {
      best_loss = loss;
      best_bias = b;
    }
  }
  return best_bias;
}

// Tube loss branches, tolerant of a crossed pair (upper curve below lower).
// Crossings occur transiently during unconstrained descent; the branch
// cascade below is total over all inputs, unlike the strict public loss.
double tube_point_loss(double a, double r, double u_upper, double u_lower) {
  if (u_upper > 0.0) return (1.0 - a) * u_upper;
  if (u_lower < 0.0) return -(1.0 - a) * u_lower;
  if (r * u_upper + (1.0 - r) * u_lower >= 0.0) return -a * u_upper;
  return a * u_lower;
}

// Derivatives of tube_point_loss with respect to the two predicted curves.
void tube_point_slopes(double a, double r, double u_upper, double u_lower,
                       double& d_upper, double& d_lower) {
  d_upper = 0.0;
  d_lower = 0.0;
  if (u_upper > 0.0) {
    d_upper = -(1.0 - a);
  } else if (u_lower < 0.0) {
    d_lower = 1.0 - a;
  } else if (r * u_upper + (1.0 - r) * u_lower >= 0.0) {
    d_upper = a;
  } else {
    d_lower = -a;
  }
}

double sign_or_zero(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

FitReport base_report(KernelModel model, const SolverSolution& sol, double elapsed)
{
  FitReport report;
  report.sparsity_pct = sparsity(model, default_sparsity_eps(model.coefficients));
  report.model = std::move(model);
  report.solver_status = sol.status;
  report.train_seconds = elapsed;
  report.objective_value = sol.objective;
  report.certificate = sol.certificate;
  report.raw_solution = sol.x;
  return report;
}

}  // namespace

QpBoxEqProblem svqr_dual_problem(const MatrixXd& gram, const VectorXd& targets,
                                 double q, double c) {
  const Eigen::Index m = gram.rows();
  QpBoxEqProblem p;
  p.gram.resize(2 * m, 2 * m);
  p.gram.topLeftCorner(m, m) = gram;
  p.gram.topRightCorner(m, m) = -gram;
  p.gram.bottomLeftCorner(m, m) = -gram;
  p.gram.bottomRightCorner(m, m) = gram;
  p.linear.resize(2 * m);
  p.linear.head(m) = -targets;
  p.linear.tail(m) = targets;
  p.use_equality = true;
  p.eq_vector.resize(2 * m);
  p.eq_vector.head(m).setOnes();
  p.eq_vector.tail(m).setConstant(-1.0);
  p.eq_rhs = 0.0;
  p.lower = VectorXd::Zero(2 * m);
  p.upper.resize(2 * m);
  p.upper.head(m).setConstant(c * q);
  p.upper.tail(m).setConstant(c * (1.0 - q));
  return p;
}

LpProblem ssvqr_linear_problem(const MatrixXd& gram, const VectorXd& targets,
                               double q, double c) {
  // Variable layout: [r (m), p (m), slack_lo (m), slack_hi (m), bias].
  const Eigen::Index m = gram.rows();
  const Eigen::Index n = 4 * m + 1;
  LpProblem p;
  p.cost = VectorXd::Zero(n);
  p.cost.head(2 * m).setConstant(0.5);
  p.cost.segment(2 * m, m).setConstant(c * q);
  p.cost.segment(3 * m, m).setConstant(c * (1.0 - q));
  p.eq_matrix = MatrixXd(0, n);
  p.eq_rhs = VectorXd(0);
  p.ub_matrix = MatrixXd::Zero(2 * m, n);
  p.ub_rhs.resize(2 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    // y_i - (K_i u + b) <= slack_lo_i
    p.ub_matrix.row(i).head(m) = -gram.row(i);
    p.ub_matrix.row(i).segment(m, m) = gram.row(i);
    p.ub_matrix(i, 2 * m + i) = -1.0;
    p.ub_matrix(i, 4 * m) = -1.0;
    p.ub_rhs(i) = -targets(i);
    // (K_i u + b) - y_i <= slack_hi_i
    p.ub_matrix.row(m + i).head(m) = gram.row(i);
    p.ub_matrix.row(m + i).segment(m, m) = -gram.row(i);
    p.ub_matrix(m + i, 3 * m + i) = -1.0;
    p.ub_matrix(m + i, 4 * m) = 1.0;
    p.ub_rhs(m + i) = targets(i);
  }
  p.lower = VectorXd::Zero(n);
  p.lower(4 * m) = -std::numeric_limits<double>::infinity();
  p.upper = VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  return p;
}

FitReport fit_svqr(const Dataset& data, double q, double c, const KernelSpec& kernel) {
  validate_quantile_fit(data, q, c);
  const auto start = Clock::now();
  const Eigen::Index m = data.rows();
  const MatrixXd gram = gram_matrix(kernel, data.inputs);
  const QpBoxEqProblem problem = svqr_dual_problem(gram, data.targets, q, c);
  const SolverSolution sol = solve_qp_box_eq(problem);

  const VectorXd coeffs = sol.x.head(m) - sol.x.tail(m);
  const VectorXd fitted_no_bias = gram * coeffs;

  const double margin = 1e-7 * c;
  double bias_sum = 0.0;
  int interior = 0;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double alpha = sol.x(k);
    const double beta = sol.x(m + k);
    const bool alpha_interior = alpha > margin && alpha < c * q - margin;
    const bool beta_interior = beta > margin && beta < c * (1.0 - q) - margin;
    if (alpha_interior || beta_interior) {
      bias_sum += data.targets(k) - fitted_no_bias(k);
      ++interior;
    }
  }
  const double bias = interior > 0
                          ? bias_sum / interior
                          : pinball_optimal_bias(data.targets, fitted_no_bias, q);

  KernelModel model{data.inputs, coeffs, bias, kernel};
  FitReport report = base_report(std::move(model), sol, seconds_since(start));
  report.init_note = interior > 0 ? "bias: mean over interior multipliers"
                                  : "bias: pinball-optimal fallback scan";
  return report;
}

FitReport fit_ssvqr(const Dataset& data, double q, double c, const KernelSpec& kernel) {
  validate_quantile_fit(data, q, c);
  const auto start = Clock::now();
  const Eigen::Index m = data.rows();
  const MatrixXd gram = gram_matrix(kernel, data.inputs);
  const LpProblem problem = ssvqr_linear_problem(gram, data.targets, q, c);
  const SolverSolution sol = solve_lp(problem);

  const VectorXd coeffs = sol.x.head(m) - sol.x.segment(m, m);
  KernelModel model{data.inputs, coeffs, sol.x(4 * m), kernel};
  return base_report(std::move(model), sol, seconds_since(start));
}

FitReport fit_lssvr(const Dataset& data, double c, const KernelSpec& kernel) {
  if (data.rows() < 2) throw std::invalid_argument("fit requires at least two training points");
  if (!(c > 0.0)) throw std::invalid_argument("trade-off parameter must be positive");
  if (data.targets.size() != data.rows())
    throw std::invalid_argument("targets length must match input row count");
  const auto start = Clock::now();
  const Eigen::Index m = data.rows();
  const MatrixXd gram = gram_matrix(kernel, data.inputs);

  MatrixXd system = MatrixXd::Zero(m + 1, m + 1);
  system.block(0, 1, 1, m).setOnes();
  system.block(1, 0, m, 1).setOnes();
  system.block(1, 1, m, m) = gram + (2.0 / c) * MatrixXd::Identity(m, m);
  VectorXd rhs = VectorXd::Zero(m + 1);
  rhs.tail(m) = data.targets;

  const VectorXd solution = solve_linear_system(system, rhs);
  const double bias = solution(0);
  const VectorXd coeffs = solution.tail(m);

  // Primal objective whose stationarity conditions are exactly the solved
  // bordered system: 1/2 a'Ka + (c/4) * squared residuals.
  const VectorXd residuals = data.targets - gram * coeffs - VectorXd::Constant(m, bias);
  const double objective =
      0.5 * coeffs.dot(gram * coeffs) + 0.25 * c * residuals.squaredNorm();

  SolverSolution sol;
  sol.x = solution;
  sol.objective = objective;
  sol.status = SolverStatus::Optimal;
  sol.iterations = 1;
  sol.certificate = {};
  sol.certificate.equality_residual = (system * solution - rhs).lpNorm<Eigen::Infinity>();

  KernelModel model{data.inputs, coeffs, bias, kernel};
  return base_report(std::move(model), sol, seconds_since(start));
}

double tube_objective(const MatrixXd& gram, const VectorXd& targets,
                      const TubeParams& params, const VectorXd& upper_coeffs,
                      double upper_bias, const VectorXd& lower_coeffs,
                      double lower_bias) {
  const double a = 1.0 - params.coverage_target;
  const VectorXd upper = gram * upper_coeffs + VectorXd::Constant(targets.size(), upper_bias);
  const VectorXd lower = gram * lower_coeffs + VectorXd::Constant(targets.size(), lower_bias);
  double total = 0.5 * params.lambda *
                 (upper_coeffs.squaredNorm() + lower_coeffs.squaredNorm());
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    total += tube_point_loss(a, params.r, targets(i) - upper(i), targets(i) - lower(i));
    total += params.delta * std::fabs(upper(i) - lower(i));
  }
  return total;
}

TubeGradient tube_subgradient(const MatrixXd& gram, const VectorXd& targets,
                              const TubeParams& params, const VectorXd& upper_coeffs,
                              double upper_bias, const VectorXd& lower_coeffs,
                              double lower_bias) {
  const double a = 1.0 - params.coverage_target;
  const Eigen::Index m = targets.size();
  const VectorXd upper = gram * upper_coeffs + VectorXd::Constant(m, upper_bias);
  const VectorXd lower = gram * lower_coeffs + VectorXd::Constant(m, lower_bias);
  VectorXd d_upper(m);
  VectorXd d_lower(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double du = 0.0;
    double dl = 0.0;
    tube_point_slopes(a, params.r, targets(i) - upper(i), targets(i) - lower(i), du, dl);
    const double width_sign = sign_or_zero(upper(i) - lower(i));
    d_upper(i) = du + params.delta * width_sign;
    d_lower(i) = dl - params.delta * width_sign;
  }
  TubeGradient g;
  g.upper_coeffs = params.lambda * upper_coeffs + gram * d_upper;
  g.upper_bias = d_upper.sum();
  g.lower_coeffs = params.lambda * lower_coeffs + gram * d_lower;
  g.lower_bias = d_lower.sum();
  return g;
}

FitReport fit_tube(const Dataset& data, const TubeParams& params,
                   const KernelSpec& kernel, const TubeFitOptions& options) {
  if (data.rows() < 2) throw std::invalid_argument("fit requires at least two training points");
  if (!(params.coverage_target > 0.0 && params.coverage_target < 1.0))
    throw std::invalid_argument("coverage target must lie in (0, 1)");
  if (!(params.r >= 0.0 && params.r <= 1.0))
    throw std::invalid_argument("asymmetry parameter must lie in [0, 1]");
  if (params.delta < 0.0 || params.lambda < 0.0)
    throw std::invalid_argument("width and ridge penalties must be nonnegative");
  if (!(options.step > 0.0)) throw std::invalid_argument("step size must be positive");
  if (options.max_epochs < 1) throw std::invalid_argument("epoch count must be positive");

  const auto start = Clock::now();
  const Eigen::Index m = data.rows();
  const MatrixXd gram = gram_matrix(kernel, data.inputs);
  const double a = 1.0 - params.coverage_target;

  // Deterministic start: biases at the empirical target quantiles bracketing
  // the desired coverage, coefficients at zero.
  std::vector<double> sorted(data.targets.data(), data.targets.data() + m);
  std::sort(sorted.begin(), sorted.end());
  auto empirical_quantile = [&](double p) {
    const auto idx = std::clamp<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(std::ceil(p * static_cast<double>(m))) - 1, 0,
        static_cast<std::ptrdiff_t>(m) - 1);
    return sorted[static_cast<std::size_t>(idx)];
  };
  VectorXd upper_coeffs = VectorXd::Zero(m);
  VectorXd lower_coeffs = VectorXd::Zero(m);
  double upper_bias = empirical_quantile(1.0 - a / 2.0);
  double lower_bias = empirical_quantile(a / 2.0);

  double best_objective =
      tube_objective(gram, data.targets, params, upper_coeffs, upper_bias, lower_coeffs, lower_bias);
  VectorXd best_upper = upper_coeffs;
  VectorXd best_lower = lower_coeffs;
  double best_upper_bias = upper_bias;
  double best_lower_bias = lower_bias;
  std::vector<double> trace{best_objective};

  for (int epoch = 1; epoch <= options.max_epochs; ++epoch) {
    const TubeGradient g = tube_subgradient(gram, data.targets, params, upper_coeffs,
                                            upper_bias, lower_coeffs, lower_bias);
    const double lr = options.step / std::sqrt(static_cast<double>(epoch));
    upper_coeffs -= lr * g.upper_coeffs;
    upper_bias -= lr * g.upper_bias;
    lower_coeffs -= lr * g.lower_coeffs;
    lower_bias -= lr * g.lower_bias;
    const double objective = tube_objective(gram, data.targets, params, upper_coeffs,
                                            upper_bias, lower_coeffs, lower_bias);
    if (!std::isfinite(objective)) {
      std::ostringstream msg;
      msg << "tube descent diverged at epoch " << epoch << " (objective " << objective
          << ", step " << lr << "); reduce the step size";
      throw std::runtime_error(msg.str());
    }
    if (objective < best_objective) {
      best_objective = objective;
      best_upper = upper_coeffs;
      best_lower = lower_coeffs;
      best_upper_bias = upper_bias;
      best_lower_bias = lower_bias;
    }
    trace.push_back(best_objective);
  }

  const TubeGradient g_final = tube_subgradient(gram, data.targets, params, best_upper,
                                                best_upper_bias, best_lower, best_lower_bias);
  double stationarity = std::max(std::fabs(g_final.upper_bias), std::fabs(g_final.lower_bias));
  stationarity = std::max(stationarity, g_final.upper_coeffs.lpNorm<Eigen::Infinity>());
  stationarity = std::max(stationarity, g_final.lower_coeffs.lpNorm<Eigen::Infinity>());

  FitReport report;
  report.model = KernelModel{data.inputs, best_lower, best_lower_bias, kernel};
  report.upper = KernelModel{data.inputs, best_upper, best_upper_bias, kernel};
  report.solver_status = SolverStatus::Optimal;
  report.train_seconds = seconds_since(start);
  report.sparsity_pct = sparsity(report.model, default_sparsity_eps(best_lower));
  report.sparsity_upper_pct = sparsity(*report.upper, default_sparsity_eps(best_upper));
  report.objective_value = best_objective;
  report.certificate = {};
  report.certificate.stationarity = stationarity;
  report.raw_solution.resize(2 * m + 2);
  report.raw_solution << best_upper, best_lower, best_upper_bias, best_lower_bias;
  report.objective_trace = std::move(trace);
  report.seed = options.seed;
  {
    std::ostringstream note;
    note << "bias init at empirical quantiles (" << (1.0 - a / 2.0) << ", " << (a / 2.0)
         << "), coefficients at zero";
    report.init_note = note.str();
  }
  return report;
}

double predict(const KernelModel& model, const VectorXd& x) {
  if (x.size() != model.support_inputs.cols())
    throw std::invalid_argument("prediction input dimension does not match the model");
  double value = model.bias;
  for (Eigen::Index i = 0; i < model.support_inputs.rows(); ++i)
    value += model.coefficients(i) *
             kernel_eval(model.kernel, model.support_inputs.row(i).transpose(), x);
  return value;
}

VectorXd predict_many(const KernelModel& model, const MatrixXd& inputs) {
  if (inputs.cols() != model.support_inputs.cols())
    throw std::invalid_argument("prediction input dimension does not match the model");
  const MatrixXd cross = gram_matrix(model.kernel, inputs, model.support_inputs);
  return (cross * model.coefficients).array() + model.bias;
}

double sparsity(const KernelModel& model, double eps) {
  if (eps < 0.0) throw std::invalid_argument("sparsity threshold must be nonnegative");
  const Eigen::Index m = model.coefficients.size();
  if (m == 0) return 100.0;
  Eigen::Index zeros = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    if (std::fabs(model.coefficients(i)) <= eps) ++zeros;
  return 100.0 * static_cast<double>(zeros) / static_cast<double>(m);
}

double default_sparsity_eps(const VectorXd& coefficients) {
  return coefficients.size() == 0 ? 0.0
                                  : 1e-6 * coefficients.lpNorm<Eigen::Infinity>();
}

}  // namespace kqr
