#include "kqr/datagen.hpp"
#include "kqr/kernel.hpp"
#include "kqr/losses.hpp"
#include "kqr/models.hpp"
#include "kqr/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace kqr;

namespace {

Dataset line_dataset() {
  // five 1-D points roughly on a line with wiggle
  Dataset d;
  d.inputs.resize(5, 1);
  d.inputs << -2.0, -1.0, 0.0, 1.0, 2.0;
  d.targets.resize(5);
  d.targets << -2.1, -0.8, 0.2, 0.9, 2.2;
  d.column_names = {"x", "y"};
  return d;
}

Dataset random_dataset(Eigen::Index m, Eigen::Index dims, uint64_t seed) {
  Rng rng(SeedStream::root(seed).child(1));
  Dataset d;
  d.inputs = MatrixXd::NullaryExpr(m, dims,
                                   [&](Eigen::Index, Eigen::Index) { return rng.uniform(-2.0, 2.0); });
  d.targets = VectorXd::NullaryExpr(m, [&](Eigen::Index) { return rng.uniform(-1.5, 1.5); });
  return d;
}

void check_sign_counts(const Dataset& data, const KernelModel& model, double q) {
  const VectorXd fitted = predict_many(model, data.inputs);
  int below = 0;
  int above = 0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    if (data.targets(i) < fitted(i) - 1e-9) ++below;
    if (data.targets(i) > fitted(i) + 1e-9) ++above;
  }
  const double m = static_cast<double>(data.rows());
  CHECK(below <= q * m + 1e-9);
  CHECK(above <= (1.0 - q) * m + 1e-9);
}

double below_fraction(const Dataset& data, const KernelModel& model) {
  const VectorXd fitted = predict_many(model, data.inputs);
  int below = 0;
  for (Eigen::Index i = 0; i < data.rows(); ++i)
    if (data.targets(i) < fitted(i)) ++below;
  return static_cast<double>(below) / static_cast<double>(data.rows());
}

}  // namespace

TEST_CASE("svqr: zero targets give the zero model") {
  Dataset d;
  d.inputs.resize(3, 1);
  d.inputs << 0.0, 1.0, 2.0;
  d.targets = VectorXd::Zero(3);
  const auto report = fit_svqr(d, 0.3, 5.0, {KernelFamily::RBF, 0.5});
  REQUIRE(report.solver_status == SolverStatus::Optimal);
  CHECK(report.model.coefficients.lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK(std::fabs(report.model.bias) <= 1e-9);
  CHECK(std::fabs(report.objective_value) <= 1e-12);
}

TEST_CASE("svqr: median fit satisfies the pinball sign counts") {
  const Dataset d = line_dataset();
  const auto report = fit_svqr(d, 0.5, 10.0, {KernelFamily::Linear, 1.0});
  REQUIRE(report.solver_status == SolverStatus::Optimal);
  check_sign_counts(d, report.model, 0.5);
}

TEST_CASE("svqr: tiny dual matches active-set enumeration") {
  const Dataset d = random_dataset(4, 1, 11);
  const KernelSpec kernel{KernelFamily::RBF, 0.7};
  const auto report = fit_svqr(d, 0.4, 3.0, kernel);
  REQUIRE(report.solver_status == SolverStatus::Optimal);
  const MatrixXd gram = gram_matrix(kernel, d.inputs);
  const auto reference = oracle::qp_active_set_minimum(svqr_dual_problem(gram, d.targets, 0.4, 3.0));
  REQUIRE(reference.has_value());
  CHECK(std::fabs(report.objective_value - *reference) <= 1e-5 * (1.0 + std::fabs(*reference)));
}

TEST_CASE("svqr: dual variables are feasible at the optimum") {
  const Dataset d = random_dataset(30, 2, 12);
  const double q = 0.25;
  const double c = 4.0;
  const auto report = fit_svqr(d, q, c, {KernelFamily::RBF, 0.5});
  REQUIRE(report.solver_status == SolverStatus::Optimal);
  const Eigen::Index m = d.rows();
  REQUIRE(report.raw_solution.size() == 2 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    CHECK(report.raw_solution(i) >= -1e-9);
    CHECK(report.raw_solution(i) <= c * q + 1e-9);
    CHECK(report.raw_solution(m + i) >= -1e-9);
    CHECK(report.raw_solution(m + i) <= c * (1.0 - q) + 1e-9);
  }
  CHECK(std::fabs(report.model.coefficients.sum()) <= 1e-6);
}

TEST_CASE("svqr: training fraction below the fit tracks the quantile level") {
  const Dataset d = generate_ad(AdId::AD1, 200, 3);
  for (const double q : {0.1, 0.5, 0.9}) {
    const auto report = fit_svqr(d, q, 10.0, {KernelFamily::RBF, 1.0});
    REQUIRE(report.solver_status == SolverStatus::Optimal);
    const double frac = below_fraction(d, report.model);
    CHECK_MESSAGE(std::fabs(frac - q) <= 0.03, "q=" << q << " below-fraction=" << frac);
  }
}

TEST_CASE("svqr: refitting identical data is bit-identical") {
  const Dataset d = random_dataset(20, 1, 13);
  const auto a = fit_svqr(d, 0.7, 2.0, {KernelFamily::RBF, 0.8});
  const auto b = fit_svqr(d, 0.7, 2.0, {KernelFamily::RBF, 0.8});
  for (Eigen::Index i = 0; i < a.model.coefficients.size(); ++i)
    CHECK(a.model.coefficients(i) == b.model.coefficients(i));
  CHECK(a.model.bias == b.model.bias);
  CHECK(a.objective_value == b.objective_value);
}

TEST_CASE("ssvqr: constant targets produce the constant model") {
  Dataset d;
  d.inputs.resize(4, 1);
  d.inputs << 0.0, 1.0, 2.0, 3.0;
  d.targets = VectorXd::Constant(4, 2.5);
  const auto report = fit_ssvqr(d, 0.3, 5.0, {KernelFamily::RBF, 0.5});
  REQUIRE(report.solver_status == SolverStatus::Optimal);
  CHECK(report.model.coefficients.lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK(report.model.bias == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(std::fabs(report.objective_value) <= 1e-9);
}

TEST_CASE("ssvqr: median fit satisfies the pinball sign counts") {
  const Dataset d = line_dataset();
  const auto report = fit_ssvqr(d, 0.5, 10.0, {KernelFamily::Linear, 1.0});
  REQUIRE(report.solver_status == SolverStatus::Optimal);
  check_sign_counts(d, report.model, 0.5);
}

TEST_CASE("ssvqr: tiny program matches vertex enumeration") {
  const Dataset d = random_dataset(3, 1, 14);
  const KernelSpec kernel{KernelFamily::RBF, 0.9};
  const auto report = fit_ssvqr(d, 0.6, 2.0, kernel);
  REQUIRE(report.solver_status == SolverStatus::Optimal);
  const MatrixXd gram = gram_matrix(kernel, d.inputs);
  const auto reference = oracle::lp_vertex_minimum(ssvqr_linear_problem(gram, d.targets, 0.6, 2.0));
  REQUIRE(reference.has_value());
  CHECK(std::fabs(report.objective_value - *reference) <= 1e-5 * (1.0 + std::fabs(*reference)));
}

TEST_CASE("ssvqr: split variables are complementary and the objective decomposes") {
  const Dataset d = random_dataset(12, 1, 15);
  const double q = 0.35;
  const double c = 3.0;
  const KernelSpec kernel{KernelFamily::RBF, 0.6};
  const auto report = fit_ssvqr(d, q, c, kernel);
  REQUIRE(report.solver_status == SolverStatus::Optimal);
  const Eigen::Index m = d.rows();
  for (Eigen::Index i = 0; i < m; ++i)
    CHECK(std::min(report.raw_solution(i), report.raw_solution(m + i)) <= 1e-7);
  // objective == 1/2 |u|_1 + c * total pinball loss of the fitted residuals
  const VectorXd fitted = predict_many(report.model, d.inputs);
  double expected = 0.5 * report.model.coefficients.lpNorm<1>();
  for (Eigen::Index i = 0; i < m; ++i) expected += c * pinball(q, d.targets(i) - fitted(i));
  CHECK(report.objective_value == doctest::Approx(expected).epsilon(1e-7));
}

TEST_CASE("ssvqr: training fraction below the fit tracks the quantile level") {
  const Dataset d = generate_ad(AdId::AD1, 200, 4);
  const auto report = fit_ssvqr(d, 0.5, 10.0, {KernelFamily::RBF, 1.0});
  REQUIRE(report.solver_status == SolverStatus::Optimal);
  const double frac = below_fraction(d, report.model);
  CHECK_MESSAGE(std::fabs(frac - 0.5) <= 0.03, "below-fraction=" << frac);
}

TEST_CASE("ssvqr: refitting identical data is bit-identical") {
  const Dataset d = random_dataset(15, 1, 16);
  const auto a = fit_ssvqr(d, 0.2, 6.0, {KernelFamily::RBF, 0.8});
  const auto b = fit_ssvqr(d, 0.2, 6.0, {KernelFamily::RBF, 0.8});
  for (Eigen::Index i = 0; i < a.model.coefficients.size(); ++i)
    CHECK(a.model.coefficients(i) == b.model.coefficients(i));
  CHECK(a.model.bias == b.model.bias);
}

TEST_CASE("ssvqr: wave-data fit is sparse at both tail levels") {
  const Dataset d = generate_ad(AdId::AD1, 300, 0);
  for (const double q : {0.025, 0.975}) {
    const auto report = fit_ssvqr(d, q, 10.0, {KernelFamily::RBF, 1.0});
    REQUIRE(report.solver_status == SolverStatus::Optimal);
    CHECK_MESSAGE(report.sparsity_pct >= 10.0, "q=" << q << " sparsity=" << report.sparsity_pct);
  }
}

TEST_CASE("lssvr: zero targets give the zero model") {
  Dataset d;
  d.inputs.resize(3, 1);
  d.inputs << 0.0, 0.5, 1.0;
  d.targets = VectorXd::Zero(3);
  const auto report = fit_lssvr(d, 4.0, {KernelFamily::RBF, 0.5});
  CHECK(report.model.coefficients.lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(std::fabs(report.model.bias) <= 1e-12);
}

TEST_CASE("lssvr: near-interpolation on two points with a huge trade-off") {
  Dataset d;
  d.inputs.resize(2, 1);
  d.inputs << 0.0, 1.0;
  d.targets.resize(2);
  d.targets << 0.0, 1.0;
  const auto report = fit_lssvr(d, 1e6, {KernelFamily::Linear, 1.0});
  VectorXd x0(1), x1(1);
  x0 << 0.0;
  x1 << 1.0;
  CHECK(std::fabs(predict(report.model, x0) - 0.0) <= 1e-3);
  CHECK(std::fabs(predict(report.model, x1) - 1.0) <= 1e-3);
  CHECK(std::fabs(report.model.bias) <= 1e-2);
  CHECK(report.model.coefficients(0) == doctest::Approx(-1.0).epsilon(1e-2));
  CHECK(report.model.coefficients(1) == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("lssvr: bordered system residual meets the budget") {
  const Dataset d = random_dataset(40, 2, 17);
  const auto report = fit_lssvr(d, 7.0, {KernelFamily::RBF, 0.4});
  CHECK(report.certificate.equality_residual <= 1e-8);
  CHECK(std::fabs(report.model.coefficients.sum()) <= 1e-8);  // first row of the system
}

TEST_CASE("lssvr: refitting identical data is bit-identical") {
  const Dataset d = random_dataset(10, 1, 18);
  const auto a = fit_lssvr(d, 3.0, {KernelFamily::RBF, 0.8});
  const auto b = fit_lssvr(d, 3.0, {KernelFamily::RBF, 0.8});
  for (Eigen::Index i = 0; i < a.model.coefficients.size(); ++i)
    CHECK(a.model.coefficients(i) == b.model.coefficients(i));
  CHECK(a.model.bias == b.model.bias);
}

TEST_CASE("tube: objective at a centered constant start is the in-tube loss times m") {
  const Eigen::Index m = 7;
  Dataset d;
  d.inputs = MatrixXd::Zero(m, 1);
  d.inputs.col(0).setLinSpaced(m, -1.0, 1.0);
  const double kappa = 1.5;
  d.targets = VectorXd::Constant(m, kappa);
  TubeParams params;
  params.coverage_target = 0.9;
  params.r = 0.5;
  params.delta = 0.0;
  params.lambda = 0.0;
  const MatrixXd gram = gram_matrix(KernelSpec{KernelFamily::RBF, 1.0}, d.inputs);
  const double at_init = tube_objective(gram, d.targets, params, VectorXd::Zero(m), kappa + 1.0,
                                        VectorXd::Zero(m), kappa - 1.0);
  // per point: both residuals in-tube and symmetric, so the loss is alpha * 1
  CHECK(at_init == doctest::Approx(static_cast<double>(m) * 0.1).epsilon(1e-12));
}

TEST_CASE("tube: subgradient matches central finite differences") {
  Rng rng(SeedStream::root(21).child(2));
  const Dataset d = generate_ad(AdId::AD1, 8, 5);
  const MatrixXd gram = gram_matrix(KernelSpec{KernelFamily::RBF, 0.7}, d.inputs);
  TubeParams params;
  params.coverage_target = 0.85;
  params.r = 0.4;
  params.delta = 0.3;
  params.lambda = 0.2;
  const Eigen::Index m = d.rows();
  const VectorXd up = VectorXd::NullaryExpr(m, [&](Eigen::Index) { return rng.uniform(-0.5, 0.5); });
  const VectorXd lo = VectorXd::NullaryExpr(m, [&](Eigen::Index) { return rng.uniform(-0.5, 0.5); });
  const double up_bias = 2.1;
  const double lo_bias = -0.7;
  const auto g = tube_subgradient(gram, d.targets, params, up, up_bias, lo, lo_bias);
  const double h = 1e-6;
  auto objective_at = [&](const VectorXd& u, double ub, const VectorXd& l, double lb) {
    return tube_objective(gram, d.targets, params, u, ub, l, lb);
  };
  for (Eigen::Index i = 0; i < m; ++i) {
    VectorXd up_plus = up, up_minus = up;
    up_plus(i) += h;
    up_minus(i) -= h;
    const double numeric =
        (objective_at(up_plus, up_bias, lo, lo_bias) - objective_at(up_minus, up_bias, lo, lo_bias)) /
        (2.0 * h);
    CHECK_MESSAGE(std::fabs(numeric - g.upper_coeffs(i)) <= 1e-4 * (1.0 + std::fabs(numeric)),
                  "upper coeff " << i << ": fd=" << numeric << " analytic=" << g.upper_coeffs(i));
    VectorXd lo_plus = lo, lo_minus = lo;
    lo_plus(i) += h;
    lo_minus(i) -= h;
    const double numeric_lo =
        (objective_at(up, up_bias, lo_plus, lo_bias) - objective_at(up, up_bias, lo_minus, lo_bias)) /
        (2.0 * h);
    CHECK_MESSAGE(std::fabs(numeric_lo - g.lower_coeffs(i)) <= 1e-4 * (1.0 + std::fabs(numeric_lo)),
                  "lower coeff " << i << ": fd=" << numeric_lo << " analytic=" << g.lower_coeffs(i));
  }
  const double fd_up_bias =
      (objective_at(up, up_bias + h, lo, lo_bias) - objective_at(up, up_bias - h, lo, lo_bias)) /
      (2.0 * h);
  CHECK(std::fabs(fd_up_bias - g.upper_bias) <= 1e-4 * (1.0 + std::fabs(fd_up_bias)));
  const double fd_lo_bias =
      (objective_at(up, up_bias, lo, lo_bias + h) - objective_at(up, up_bias, lo, lo_bias - h)) /
      (2.0 * h);
  CHECK(std::fabs(fd_lo_bias - g.lower_bias) <= 1e-4 * (1.0 + std::fabs(fd_lo_bias)));
}

TEST_CASE("tube: recorded trace is non-increasing and descent improves the start") {
  const Dataset d = generate_ad(AdId::AD1, 60, 6);
  TubeParams params;
  params.coverage_target = 0.95;
  params.lambda = 0.01;
  TubeFitOptions options;
  options.step = 0.05;
  options.max_epochs = 200;
  const auto report = fit_tube(d, params, {KernelFamily::RBF, 1.0}, options);
  REQUIRE(report.upper.has_value());
  REQUIRE(report.objective_trace.size() == 201);
  for (std::size_t i = 1; i < report.objective_trace.size(); ++i)
    CHECK(report.objective_trace[i] <= report.objective_trace[i - 1] + 1e-12);
  CHECK(report.objective_trace.back() <= report.objective_trace.front());
  CHECK(report.objective_value == doctest::Approx(report.objective_trace.back()));
}

TEST_CASE("tube: identical options give bit-identical models") {
  const Dataset d = generate_ad(AdId::AD3, 40, 7);
  TubeParams params;
  params.coverage_target = 0.9;
  TubeFitOptions options;
  options.step = 0.05;
  options.max_epochs = 100;
  options.seed = 9;
  const auto a = fit_tube(d, params, {KernelFamily::RBF, 0.8}, options);
  const auto b = fit_tube(d, params, {KernelFamily::RBF, 0.8}, options);
  for (Eigen::Index i = 0; i < a.model.coefficients.size(); ++i) {
    CHECK(a.model.coefficients(i) == b.model.coefficients(i));
    CHECK(a.upper->coefficients(i) == b.upper->coefficients(i));
  }
  CHECK(a.model.bias == b.model.bias);
  CHECK(a.upper->bias == b.upper->bias);
  CHECK(a.seed == 9);
}

TEST_CASE("predict: constant model, single support point, training consistency") {
  KernelModel constant;
  constant.support_inputs = MatrixXd::Zero(2, 1);
  constant.coefficients = VectorXd::Zero(2);
  constant.bias = 3.0;
  constant.kernel = {KernelFamily::RBF, 1.0};
  VectorXd x(1);
  x << -4.2;
  CHECK(predict(constant, x) == doctest::Approx(3.0));

  KernelModel single;
  single.support_inputs = MatrixXd::Constant(1, 1, 1.0);
  single.coefficients = VectorXd::Constant(1, 2.0);
  single.bias = 0.0;
  single.kernel = {KernelFamily::Linear, 1.0};
  x << 4.0;
  CHECK(predict(single, x) == doctest::Approx(8.0));

  const Dataset d = line_dataset();
  const KernelSpec kernel{KernelFamily::RBF, 0.9};
  const auto report = fit_svqr(d, 0.5, 5.0, kernel);
  const MatrixXd gram = gram_matrix(kernel, d.inputs);
  const VectorXd manual = gram * report.model.coefficients +
                          VectorXd::Constant(d.rows(), report.model.bias);
  const VectorXd via_predict = predict_many(report.model, d.inputs);
  CHECK((manual - via_predict).lpNorm<Eigen::Infinity>() <= 1e-8);

  VectorXd wrong(2);
  wrong << 0.0, 1.0;
  CHECK_THROWS_AS((void)predict(report.model, wrong), std::invalid_argument);
}

TEST_CASE("sparsity: thresholds and report consistency") {
  KernelModel model;
  model.support_inputs = MatrixXd::Zero(4, 1);
  model.coefficients = VectorXd::Zero(4);
  model.bias = 0.0;
  model.kernel = {KernelFamily::RBF, 1.0};
  CHECK(sparsity(model, 0.0) == doctest::Approx(100.0));
  CHECK(sparsity(model, 5.0) == doctest::Approx(100.0));

  model.coefficients.resize(4);
  model.coefficients << 1.0, 0.0, 2.0, 0.0;
  CHECK(sparsity(model, 1e-9) == doctest::Approx(50.0));

  const Dataset d = generate_ad(AdId::AD1, 40, 8);
  const auto report = fit_ssvqr(d, 0.25, 5.0, {KernelFamily::RBF, 1.0});
  CHECK(report.sparsity_pct ==
        doctest::Approx(sparsity(report.model, default_sparsity_eps(report.model.coefficients))));
}
