#include "kqr/solvers/linear_system.hpp"
#include "kqr/solvers/lp.hpp"
#include "kqr/solvers/qp.hpp"

#include "oracles.hpp"
#include "random_instances.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace kqr;

namespace {

LpProblem box_only_lp() {
  LpProblem p;
  p.cost = VectorXd::Constant(1, 1.0);
  p.eq_matrix = MatrixXd(0, 1);
  p.eq_rhs = VectorXd(0);
  p.ub_matrix = MatrixXd(0, 1);
  p.ub_rhs = VectorXd(0);
  p.lower = VectorXd::Constant(1, 1.0);
  p.upper = VectorXd::Constant(1, 3.0);
  return p;
}

double lp_feasibility_violation(const LpProblem& p, const VectorXd& x) {
  double v = 0.0;
  for (Eigen::Index r = 0; r < p.eq_matrix.rows(); ++r)
    v = std::max(v, std::fabs(p.eq_matrix.row(r).dot(x) - p.eq_rhs(r)));
  for (Eigen::Index r = 0; r < p.ub_matrix.rows(); ++r)
    v = std::max(v, p.ub_matrix.row(r).dot(x) - p.ub_rhs(r));
  for (Eigen::Index j = 0; j < p.cost.size(); ++j) {
    if (std::isfinite(p.lower(j))) v = std::max(v, p.lower(j) - x(j));
    if (std::isfinite(p.upper(j))) v = std::max(v, x(j) - p.upper(j));
  }
  return v;
}

}  // namespace

TEST_CASE("lp: minimizes over a pure box") {
  const auto sol = solve_lp(box_only_lp());
  REQUIRE(sol.status == SolverStatus::Optimal);
  CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lp: two-variable simplex example") {
  LpProblem p;
  p.cost = VectorXd(2);
  p.cost << -1.0, -1.0;
  p.eq_matrix = MatrixXd(0, 2);
  p.eq_rhs = VectorXd(0);
  p.ub_matrix = MatrixXd(1, 2);
  p.ub_matrix << 1.0, 1.0;
  p.ub_rhs = VectorXd::Constant(1, 1.0);
  p.lower = VectorXd::Zero(2);
  p.upper = VectorXd::Constant(2, std::numeric_limits<double>::infinity());
  const auto sol = solve_lp(p);
  REQUIRE(sol.status == SolverStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(sol.x.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(lp_feasibility_violation(p, sol.x) <= 1e-8);
}

TEST_CASE("lp: equality plus inequality with negative data") {
  // min -2x + y  s.t.  x + y = 2,  x - y <= 1,  0 <= x <= 3, 0 <= y <= 3.
  // Optimum at x = 1.5, y = 0.5 (row active), objective -2.5.
  LpProblem p;
  p.cost = VectorXd(2);
  p.cost << -2.0, 1.0;
  p.eq_matrix = MatrixXd(1, 2);
  p.eq_matrix << 1.0, 1.0;
  p.eq_rhs = VectorXd::Constant(1, 2.0);
  p.ub_matrix = MatrixXd(1, 2);
  p.ub_matrix << 1.0, -1.0;
  p.ub_rhs = VectorXd::Constant(1, 1.0);
  p.lower = VectorXd::Zero(2);
  p.upper = VectorXd::Constant(2, 3.0);
  const auto sol = solve_lp(p);
  REQUIRE(sol.status == SolverStatus::Optimal);
  CHECK(sol.x(0) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(sol.x(1) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.objective == doctest::Approx(-2.5).epsilon(1e-9));
}

TEST_CASE("lp: matches vertex-enumeration oracle on random instances") {
  Rng rng(SeedStream::root(41).child(7));
  int solved = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const LpProblem p = testgen::random_lp(rng);
    const auto sol = solve_lp(p);
    REQUIRE_MESSAGE(sol.status == SolverStatus::Optimal,
                    "trial " << trial << " status " << to_string(sol.status));
    const auto reference = oracle::lp_vertex_minimum(p);
    REQUIRE_MESSAGE(reference.has_value(), "oracle found no vertex on trial " << trial);
    const double scale = 1.0 + std::fabs(*reference);
    CHECK_MESSAGE(std::fabs(sol.objective - *reference) <= 1e-6 * scale,
                  "trial " << trial << ": got " << sol.objective << " expected " << *reference);
    CHECK(lp_feasibility_violation(p, sol.x) <= 1e-7);
    ++solved;
  }
  CHECK(solved == 60);
}

TEST_CASE("lp: strong duality on inequality-form instances") {
  // Primal: min c'x  s.t. Ax <= b, x >= 0 with A > 0 elementwise (bounded).
  // Dual:   max b'y  s.t. A'y <= c, y <= 0  ==  -min (-b)'y.
  Rng rng(SeedStream::root(42).child(3));
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.below(3));
    const Eigen::Index rows = 2 + static_cast<Eigen::Index>(rng.below(2));
    MatrixXd a = MatrixXd::NullaryExpr(rows, n,
                                       [&](Eigen::Index, Eigen::Index) { return rng.uniform(0.2, 2.0); });
    VectorXd b = VectorXd::NullaryExpr(rows, [&](Eigen::Index) { return rng.uniform(0.5, 2.0); });
    VectorXd c = VectorXd::NullaryExpr(n, [&](Eigen::Index) { return rng.uniform(-2.0, 2.0); });

    LpProblem primal;
    primal.cost = c;
    primal.eq_matrix = MatrixXd(0, n);
    primal.eq_rhs = VectorXd(0);
    primal.ub_matrix = a;
    primal.ub_rhs = b;
    primal.lower = VectorXd::Zero(n);
    primal.upper = VectorXd::Constant(n, std::numeric_limits<double>::infinity());

    LpProblem dual;
    dual.cost = -b;
    dual.eq_matrix = MatrixXd(0, rows);
    dual.eq_rhs = VectorXd(0);
    dual.ub_matrix = a.transpose();
    dual.ub_rhs = c;
    dual.lower = VectorXd::Constant(rows, -std::numeric_limits<double>::infinity());
    dual.upper = VectorXd::Zero(rows);

    const auto ps = solve_lp(primal);
    const auto ds = solve_lp(dual);
    REQUIRE(ps.status == SolverStatus::Optimal);
    REQUIRE(ds.status == SolverStatus::Optimal);
    const double gap = std::fabs(ps.objective - (-ds.objective));
    CHECK_MESSAGE(gap <= 1e-7 * (1.0 + std::fabs(ps.objective)),
                  "trial " << trial << " duality gap " << gap);
  }
}

TEST_CASE("lp: reports infeasibility") {
  LpProblem p = box_only_lp();       // x in [1, 3]
  p.ub_matrix = MatrixXd(1, 1);
  p.ub_matrix << -1.0;               // -x <= -5  i.e.  x >= 5
  p.ub_rhs = VectorXd::Constant(1, -5.0);
  const auto sol = solve_lp(p);
  CHECK(sol.status == SolverStatus::Infeasible);
}

TEST_CASE("lp: reports unboundedness") {
  LpProblem p;
  p.cost = VectorXd::Constant(1, -1.0);
  p.eq_matrix = MatrixXd(0, 1);
  p.eq_rhs = VectorXd(0);
  p.ub_matrix = MatrixXd(0, 1);
  p.ub_rhs = VectorXd(0);
  p.lower = VectorXd::Zero(1);
  p.upper = VectorXd::Constant(1, std::numeric_limits<double>::infinity());
  const auto sol = solve_lp(p);
  CHECK(sol.status == SolverStatus::Unbounded);
}

TEST_CASE("lp: honors the iteration cap") {
  Rng rng(SeedStream::root(43).child(1));
  const LpProblem p = testgen::random_lp(rng);
  const auto sol = solve_lp(p, kLpDefaultTol, 1);
  CHECK(sol.status == SolverStatus::IterationLimit);
}

TEST_CASE("lp: repeated solves are bit-identical") {
  Rng rng1(SeedStream::root(44).child(2));
  Rng rng2(SeedStream::root(44).child(2));
  const LpProblem p1 = testgen::random_lp(rng1);
  const LpProblem p2 = testgen::random_lp(rng2);
  const auto a = solve_lp(p1);
  const auto b = solve_lp(p2);
  REQUIRE(a.x.size() == b.x.size());
  for (Eigen::Index i = 0; i < a.x.size(); ++i) CHECK(a.x(i) == b.x(i));
  CHECK(a.objective == b.objective);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("lp: optimal certificate is tight") {
  Rng rng(SeedStream::root(45).child(9));
  for (int trial = 0; trial < 10; ++trial) {
    const LpProblem p = testgen::random_lp(rng);
    const auto sol = solve_lp(p);
    REQUIRE(sol.status == SolverStatus::Optimal);
    CHECK(sol.certificate.primal_feasibility <= 1e-7);
    CHECK(sol.certificate.stationarity <= 1e-7);
    CHECK(std::fabs(sol.certificate.complementarity) <= 1e-6);
  }
}

TEST_CASE("qp: box-constrained scalar parabola") {
  QpBoxEqProblem p;
  p.gram = MatrixXd::Constant(1, 1, 1.0);
  p.linear = VectorXd::Zero(1);
  p.use_equality = false;
  p.eq_vector = VectorXd::Zero(1);
  p.lower = VectorXd::Constant(1, -1.0);
  p.upper = VectorXd::Constant(1, 1.0);
  const auto sol = solve_qp_box_eq(p);
  REQUIRE(sol.status == SolverStatus::Optimal);
  CHECK(std::fabs(sol.x(0)) <= 1e-8);
  CHECK(std::fabs(sol.objective) <= 1e-12);
}

TEST_CASE("qp: equality-coupled pair splits evenly") {
  QpBoxEqProblem p;
  p.gram = MatrixXd::Identity(2, 2);
  p.linear = VectorXd::Constant(2, -1.0);
  p.use_equality = true;
  p.eq_vector = VectorXd::Ones(2);
  p.eq_rhs = 1.0;
  p.lower = VectorXd::Zero(2);
  p.upper = VectorXd::Ones(2);
  const auto sol = solve_qp_box_eq(p);
  REQUIRE(sol.status == SolverStatus::Optimal);
  CHECK(sol.x(0) == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(sol.x(1) == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(sol.objective == doctest::Approx(-0.75).epsilon(1e-9));
}

TEST_CASE("qp: matches active-set oracle on random instances") {
  Rng rng(SeedStream::root(46).child(5));
  for (int trial = 0; trial < 60; ++trial) {
    const QpBoxEqProblem p = testgen::random_qp(rng);
    const auto sol = solve_qp_box_eq(p);
    REQUIRE_MESSAGE(sol.status == SolverStatus::Optimal,
                    "trial " << trial << " status " << to_string(sol.status));
    const auto reference = oracle::qp_active_set_minimum(p);
    REQUIRE_MESSAGE(reference.has_value(), "oracle empty on trial " << trial);
    const double scale = 1.0 + std::fabs(*reference);
    CHECK_MESSAGE(std::fabs(sol.objective - *reference) <= 1e-5 * scale,
                  "trial " << trial << ": got " << sol.objective << " expected " << *reference);
    if (p.use_equality)
      CHECK(std::fabs(p.eq_vector.dot(sol.x) - p.eq_rhs) <= 1e-6 * (1.0 + std::fabs(p.eq_rhs)));
    for (Eigen::Index j = 0; j < sol.x.size(); ++j) {
      CHECK(sol.x(j) >= p.lower(j) - 1e-9);
      CHECK(sol.x(j) <= p.upper(j) + 1e-9);
    }
  }
}

TEST_CASE("qp: solution is invariant to objective scaling") {
  Rng rng(SeedStream::root(47).child(4));
  const QpBoxEqProblem p = testgen::random_qp(rng);
  QpBoxEqProblem scaled = p;
  scaled.gram *= 7.25;
  scaled.linear *= 7.25;
  const auto a = solve_qp_box_eq(p);
  const auto b = solve_qp_box_eq(scaled);
  REQUIRE(a.status == SolverStatus::Optimal);
  REQUIRE(b.status == SolverStatus::Optimal);
  for (Eigen::Index j = 0; j < a.x.size(); ++j)
    CHECK(a.x(j) == doctest::Approx(b.x(j)).epsilon(1e-5));
  CHECK(b.objective == doctest::Approx(7.25 * a.objective).epsilon(1e-7));
}

TEST_CASE("qp: repeated solves are bit-identical") {
  Rng rng1(SeedStream::root(48).child(6));
  Rng rng2(SeedStream::root(48).child(6));
  const QpBoxEqProblem p1 = testgen::random_qp(rng1);
  const QpBoxEqProblem p2 = testgen::random_qp(rng2);
  const auto a = solve_qp_box_eq(p1);
  const auto b = solve_qp_box_eq(p2);
  for (Eigen::Index j = 0; j < a.x.size(); ++j) CHECK(a.x(j) == b.x(j));
  CHECK(a.objective == b.objective);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("qp: infeasible equality is detected") {
  QpBoxEqProblem p;
  p.gram = MatrixXd::Identity(2, 2);
  p.linear = VectorXd::Zero(2);
  p.use_equality = true;
  p.eq_vector = VectorXd::Ones(2);
  p.eq_rhs = 10.0;  // unreachable inside [0,1]^2
  p.lower = VectorXd::Zero(2);
  p.upper = VectorXd::Ones(2);
  const auto sol = solve_qp_box_eq(p);
  CHECK(sol.status == SolverStatus::Infeasible);
}

TEST_CASE("qp: rejects asymmetric gram input") {
  QpBoxEqProblem p;
  p.gram = MatrixXd(2, 2);
  p.gram << 1.0, 0.5, -0.5, 1.0;
  p.linear = VectorXd::Zero(2);
  p.use_equality = false;
  p.eq_vector = VectorXd::Zero(2);
  p.lower = VectorXd::Constant(2, -1.0);
  p.upper = VectorXd::Ones(2);
  CHECK_THROWS_AS((void)solve_qp_box_eq(p), std::invalid_argument);
}

TEST_CASE("linear system: identity and permutation") {
  const MatrixXd eye = MatrixXd::Identity(3, 3);
  VectorXd rhs(3);
  rhs << 4.0, -1.0, 0.5;
  CHECK((solve_linear_system(eye, rhs) - rhs).lpNorm<Eigen::Infinity>() <= 1e-14);

  MatrixXd swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  VectorXd r2(2);
  r2 << 2.0, 5.0;
  const VectorXd x = solve_linear_system(swap, r2);
  CHECK(x(0) == doctest::Approx(5.0));
  CHECK(x(1) == doctest::Approx(2.0));
}

TEST_CASE("linear system: random well-conditioned solve meets the residual budget") {
  Rng rng(SeedStream::root(49).child(8));
  const Eigen::Index n = 6;
  MatrixXd m = MatrixXd::NullaryExpr(n, n,
                                     [&](Eigen::Index, Eigen::Index) { return rng.uniform(-1.0, 1.0); });
  const MatrixXd a = m * m.transpose() + MatrixXd::Identity(n, n);
  const VectorXd rhs = VectorXd::NullaryExpr(n, [&](Eigen::Index) { return rng.uniform(-3.0, 3.0); });
  const VectorXd x = solve_linear_system(a, rhs);
  CHECK((a * x - rhs).lpNorm<Eigen::Infinity>() <= 1e-8 * (1.0 + rhs.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("linear system: singular matrix raises with diagnostics") {
  MatrixXd a(2, 2);
  a << 1.0, 1.0, 1.0, 1.0;
  VectorXd rhs(2);
  rhs << 1.0, 2.0;
  CHECK_THROWS_AS((void)solve_linear_system(a, rhs), std::runtime_error);
}
