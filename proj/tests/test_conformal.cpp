#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "kqr/conformal.hpp"
#include "kqr/datagen.hpp"
#include "kqr/interval.hpp"
#include "kqr/metrics.hpp"

using kqr::Dataset;
using kqr::KernelSpec;
using kqr::MatrixXd;
using kqr::PredictionInterval;
using kqr::VectorXd;

namespace {

KernelSpec rbf(double width) {
  KernelSpec k;
  k.family = kqr::KernelFamily::RBF;
  k.width = width;
  return k;
}

// Interval with constant bounds [lo, hi] everywhere.
PredictionInterval constant_interval(double lo, double hi) {
  PredictionInterval pi;
  pi.coverage_target = 0.95;
  for (kqr::KernelModel* model : {&pi.lower, &pi.upper}) {
    model->kernel = rbf(1.0);
    model->support_inputs = MatrixXd::Zero(1, 1);
    model->coefficients = VectorXd::Zero(1);
  }
  pi.lower.bias = lo;
  pi.upper.bias = hi;
  return pi;
}

Dataset points(std::initializer_list<double> ys) {
  Dataset data;
  data.inputs = MatrixXd::Zero(static_cast<Eigen::Index>(ys.size()), 1);
  data.targets.resize(static_cast<Eigen::Index>(ys.size()));
  Eigen::Index i = 0;
  for (const double y : ys) data.targets(i++) = y;
  return data;
}

}  // namespace

TEST_CASE("calibration split partitions the rows") {
  Dataset data;
  data.inputs.resize(10, 1);
  for (Eigen::Index i = 0; i < 10; ++i) data.inputs(i, 0) = static_cast<double>(i);
  data.targets = data.inputs.col(0);

  SUBCASE("half-and-half split") {
    const auto [fit_part, calib_part] = kqr::split_train_calibrate(data, 0.5, 3);
    CHECK(fit_part.rows() == 5);
    CHECK(calib_part.rows() == 5);
    std::vector<bool> seen(10, false);
    for (Eigen::Index i = 0; i < 5; ++i) {
      seen[static_cast<std::size_t>(fit_part.inputs(i, 0))] = true;
      seen[static_cast<std::size_t>(calib_part.inputs(i, 0))] = true;
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
  }

  SUBCASE("same seed reproduces the partition") {
    const auto a = kqr::split_train_calibrate(data, 0.4, 9);
    const auto b = kqr::split_train_calibrate(data, 0.4, 9);
    CHECK(a.first.inputs == b.first.inputs);
    CHECK(a.second.inputs == b.second.inputs);
  }

  SUBCASE("rounding clamps to leave one row on each side") {
    const auto [fit_part, calib_part] = kqr::split_train_calibrate(data, 0.99, 0);
    CHECK(calib_part.rows() == 9);
    CHECK(fit_part.rows() == 1);
  }

  SUBCASE("degenerate fractions are rejected") {
    CHECK_THROWS_AS(kqr::split_train_calibrate(data, 0.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(kqr::split_train_calibrate(data, 1.0, 0), std::invalid_argument);
  }
}

TEST_CASE("nonconformity scores take the two-sided max form") {
  const PredictionInterval pi = constant_interval(0.0, 1.0);

  const VectorXd scores = kqr::nonconformity_scores(pi, points({0.0, 0.5, 3.0, -0.25, 1.0}));
  CHECK(scores(0) == doctest::Approx(0.0));    // exactly on the lower bound
  CHECK(scores(1) == doctest::Approx(-0.5));   // midpoint of a width-1 interval
  CHECK(scores(2) == doctest::Approx(2.0));    // above the upper bound by 2
  CHECK(scores(3) == doctest::Approx(0.25));   // below the lower bound
  CHECK(scores(4) == doctest::Approx(0.0));    // exactly on the upper bound

  SUBCASE("an already-offset interval is rejected") {
    PredictionInterval shifted = pi;
    shifted.conformal_offset = 0.1;
    CHECK_THROWS_AS(kqr::nonconformity_scores(shifted, points({0.5})), std::invalid_argument);
  }
  SUBCASE("empty calibration set is rejected") {
    Dataset empty;
    empty.inputs.resize(0, 1);
    empty.targets.resize(0);
    CHECK_THROWS_AS(kqr::nonconformity_scores(pi, empty), std::invalid_argument);
  }
}

TEST_CASE("conformal quantile picks the documented order statistic") {
  SUBCASE("ninety-ninth of one to ninety-nine") {
    VectorXd scores(99);
    for (int i = 0; i < 99; ++i) scores(i) = static_cast<double>(i + 1);
    const kqr::CalibrationResult result = kqr::conformal_quantile(scores, 0.1);
    CHECK(result.level_index == 90);
    CHECK(result.offset == doctest::Approx(90.0));
    CHECK_FALSE(result.degenerate);
  }
  SUBCASE("single score") {
    VectorXd scores(1);
    scores << 5.0;
    const kqr::CalibrationResult result = kqr::conformal_quantile(scores, 0.5);
    CHECK(result.level_index == 1);
    CHECK(result.offset == doctest::Approx(5.0));
  }
  SUBCASE("rank beyond the sample is degenerate") {
    VectorXd scores(3);
    scores << 1.0, 2.0, 3.0;
    const kqr::CalibrationResult result = kqr::conformal_quantile(scores, 0.05);
    CHECK(result.level_index == 4);
    CHECK(result.degenerate);
    CHECK(std::isinf(result.offset));
  }
  SUBCASE("unsorted input is handled") {
    VectorXd scores(4);
    scores << 3.0, -1.0, 2.0, 0.0;
    // rank = ceil(0.5 * 5) = 3 -> third smallest = 2.
    const kqr::CalibrationResult result = kqr::conformal_quantile(scores, 0.5);
    CHECK(result.level_index == 3);
    CHECK(result.offset == doctest::Approx(2.0));
  }
  SUBCASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(kqr::conformal_quantile(VectorXd(), 0.1), std::invalid_argument);
    VectorXd one(1);
    one << 0.0;
    CHECK_THROWS_AS(kqr::conformal_quantile(one, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(kqr::conformal_quantile(one, 1.0), std::invalid_argument);
  }
}

TEST_CASE("offset never decreases as the miscoverage level shrinks") {
  VectorXd scores(25);
  for (int i = 0; i < 25; ++i) scores(i) = std::sin(3.7 * i) * (i % 7);
  double previous = -std::numeric_limits<double>::infinity();
  Eigen::Index previous_rank = 0;
  for (const double alpha : {0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.02}) {
    const kqr::CalibrationResult result = kqr::conformal_quantile(scores, alpha);
    CHECK(result.offset >= previous);
    CHECK(result.level_index >= previous_rank);
    previous = result.offset;
    previous_rank = result.level_index;
  }
}

TEST_CASE("conformal offset widens every interval additively") {
  const PredictionInterval pi = constant_interval(0.0, 1.0);
  // One calibration point 0.3 above the upper bound at alpha = 0.5:
  // rank ceil(0.5*2) = 1, offset = 0.3.
  const auto [adjusted, calibration] =
      kqr::conformalize_with_calibration(pi, points({1.3}), 0.5);
  CHECK(calibration.offset == doctest::Approx(0.3));
  CHECK(adjusted.conformal_offset == doctest::Approx(0.3));

  MatrixXd inputs = MatrixXd::Zero(6, 1);
  const kqr::IntervalBounds raw = kqr::interval_bounds(pi, inputs);
  const kqr::IntervalBounds wide = kqr::interval_bounds(adjusted, inputs);
  CHECK(raw.crossing_fraction == 0.0);
  CHECK(wide.crossing_fraction == 0.0);
  CHECK(kqr::mpiw(wide.lower, wide.upper) ==
        doctest::Approx(kqr::mpiw(raw.lower, raw.upper) + 2.0 * calibration.offset)
            .epsilon(1e-12));

  SUBCASE("zero offset leaves the interval unchanged") {
    // Calibration point exactly on the upper bound: score 0.
    const PredictionInterval same = kqr::conformalize(pi, points({1.0}), 0.5);
    CHECK(same.conformal_offset == 0.0);
    const kqr::IntervalBounds bounds = kqr::interval_bounds(same, inputs);
    CHECK(bounds.lower == raw.lower);
    CHECK(bounds.upper == raw.upper);
  }
}

TEST_CASE("fitted pipeline obeys the additive width relation") {
  const Dataset pool = kqr::generate_ad(kqr::AdId::AD1, 120, 21);
  const auto [fit_part, calib_part] = kqr::split_train_calibrate(pool, 0.5, 21);
  const PredictionInterval raw_pi = kqr::pi_ssvqr(fit_part, 0.9, 0.05, 1.0, rbf(0.5));
  const auto [adjusted, calibration] =
      kqr::conformalize_with_calibration(raw_pi, calib_part, 0.1);
  REQUIRE_FALSE(calibration.degenerate);

  const Dataset test = kqr::generate_ad(kqr::AdId::AD1, 200, 1021);
  const kqr::IntervalBounds raw = kqr::interval_bounds(raw_pi, test.inputs);
  const kqr::IntervalBounds wide = kqr::interval_bounds(adjusted, test.inputs);
  REQUIRE(raw.crossing_fraction == 0.0);
  REQUIRE(wide.crossing_fraction == 0.0);
  CHECK(kqr::mpiw(wide.lower, wide.upper) ==
        doctest::Approx(kqr::mpiw(raw.lower, raw.upper) + 2.0 * calibration.offset)
            .epsilon(1e-10));
}

TEST_CASE("split conformal intervals cover at the nominal rate") {
  // Monte-Carlo check of the finite-sample guarantee at alpha = 0.1.
  const int trials = 200;
  double coverage_sum = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const auto seed = static_cast<std::uint64_t>(trial);
    const Dataset pool = kqr::generate_ad(kqr::AdId::AD1, 120, seed);
    const auto [fit_part, calib_part] = kqr::split_train_calibrate(pool, 0.5, seed);
    const PredictionInterval raw_pi = kqr::pi_ssvqr(fit_part, 0.9, 0.05, 1.0, rbf(0.5));
    const PredictionInterval adjusted = kqr::conformalize(raw_pi, calib_part, 0.1);
    const Dataset test = kqr::generate_ad(kqr::AdId::AD1, 100, 100000 + seed);
    coverage_sum += kqr::evaluate_interval(adjusted, test).picp;
  }
  const double mean_coverage = coverage_sum / trials;
  CHECK(mean_coverage >= 0.88);
  CHECK(mean_coverage <= 0.96);
}

TEST_CASE("repeated pipelines are exactly stable") {
  std::vector<double> picps;
  std::vector<double> mpiws;
  for (int run = 0; run < 10; ++run) {
    const Dataset pool = kqr::generate_ad(kqr::AdId::AD2, 100, 5);
    const auto [fit_part, calib_part] = kqr::split_train_calibrate(pool, 0.5, 5);
    const PredictionInterval adjusted =
        kqr::conformalize(kqr::pi_ssvqr(fit_part, 0.9, 0.05, 2.0, rbf(1.0)), calib_part, 0.1);
    const Dataset test = kqr::generate_ad(kqr::AdId::AD2, 150, 9005);
    const kqr::ExperimentReport report = kqr::evaluate_interval(adjusted, test);
    picps.push_back(report.picp);
    mpiws.push_back(report.mpiw);
  }
  for (int run = 1; run < 10; ++run) {
    CHECK(picps[static_cast<std::size_t>(run)] == picps[0]);
    CHECK(mpiws[static_cast<std::size_t>(run)] == mpiws[0]);
  }
  // Standard deviation across runs is exactly zero, bit for bit.
  const double picp_mean = std::accumulate(picps.begin(), picps.end(), 0.0) / 10.0;
  double variance = 0.0;
  for (const double p : picps) variance += (p - picp_mean) * (p - picp_mean);
  CHECK(variance == 0.0);
}
