#include "commands.hpp"
#include "common.hpp"

#include "kqr/conformal.hpp"
#include "kqr/datagen.hpp"
#include "kqr/rng.hpp"
#include "kqr/serialize.hpp"

#include <cmath>
#include <iostream>
#include <memory>

namespace kqr::cli {

namespace {

struct ConformalOptions {
  std::string config_path;
  DatasetInput data;       // file mode
  std::string test_path;   // file mode evaluation set
  std::string ad;          // synthetic mode
  long long m = 300;       // synthetic train pool size
  long long test_m = 500;  // synthetic test size
  std::string noise_scale = "stddev";
  MethodOptions method;
  double calib_fraction = 0.5;
  double alpha = 0.1;
  long long trials = 1;
  bool vary_seed = true;
  std::uint64_t seed = 0;
  std::string timing = "wall";
  std::string out_report;
  std::string out_calibration;
};

struct TrialOutcome {
  double raw_picp = 0.0;
  double raw_mpiw = 0.0;
  double picp = 0.0;
  double mpiw = 0.0;
  double offset = 0.0;
  Eigen::Index level_index = 0;
  Eigen::Index calib_rows = 0;
  Eigen::Index fit_rows = 0;
  Eigen::Index test_rows = 0;
  bool degenerate = false;
  double train_seconds = 0.0;
  CalibrationResult calibration;
};

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (const double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

// Population standard deviation; exactly 0 when all values are identical
// (the mean of n equal values can round, so that case returns early).
double std_of(const std::vector<double>& values) {
  bool constant = true;
  for (const double v : values) constant = constant && v == values.front();
  if (constant) return 0.0;
  const double mean = mean_of(values);
  double sum_sq = 0.0;
  for (const double v : values) sum_sq += (v - mean) * (v - mean);
  return std::sqrt(sum_sq / static_cast<double>(values.size()));
}

void run(const ConformalOptions& options) {
  const TimingMode timing = timing_mode_from_string(options.timing);
  const bool synthetic = !options.ad.empty();
  if (synthetic == !options.data.path.empty()) {
    throw std::invalid_argument("pass exactly one of --ad (synthetic trials) or "
                                "--data (file mode)");
  }
  if (!synthetic && options.test_path.empty()) {
    throw std::invalid_argument("file mode needs --test for evaluation");
  }
  if (options.trials < 1) {
    throw std::invalid_argument("--trials must be at least 1");
  }
  if (!options.out_calibration.empty() && options.trials != 1) {
    throw std::invalid_argument("--out-calibration requires --trials 1");
  }

  ConfigEcho echo;
  options.data.echo(echo, "data");
  echo.add("test", options.test_path);
  echo.add("ad", options.ad);
  echo.add("m", options.m);
  echo.add("test-m", options.test_m);
  echo.add("noise-scale", options.noise_scale);
  options.method.echo(echo);
  echo.add("calib-fraction", options.calib_fraction);
  echo.add("alpha", options.alpha);
  echo.add("trials", options.trials);
  echo.add("vary-seed", options.vary_seed);
  echo.add("seed", options.seed);
  echo.add("timing-mode", options.timing);
  echo.add("out-report", options.out_report);
  echo.add("out-calibration", options.out_calibration);
  echo.print("conformal");

  const IntervalConfig config = options.method.interval_config();
  const AdId ad = synthetic ? ad_from_string(options.ad) : AdId::AD1;
  const NoiseScale scale = noise_scale_from_string(options.noise_scale);

  Dataset file_data;
  Dataset file_test;
  if (!synthetic) {
    file_data = options.data.read();
    DatasetInput test_input = options.data;
    test_input.path = options.test_path;
    file_test = test_input.read();
  }

  const SeedStream root = SeedStream::root(options.seed);
  std::vector<TrialOutcome> outcomes;
  outcomes.reserve(static_cast<std::size_t>(options.trials));
  for (long long t = 0; t < options.trials; ++t) {
    const SeedStream stream = root.child(options.vary_seed ? static_cast<std::uint64_t>(t)
                                                           : 0);
    TrialOutcome outcome;
    const Dataset pool = synthetic
                             ? generate_ad(ad, options.m, stream.child(0).state, scale)
                             : file_data;
    const Dataset test_set =
        synthetic ? generate_ad(ad, options.test_m, stream.child(1).state, scale)
                  : file_test;

    const auto [fit_part, calib_part] =
        split_train_calibrate(pool, options.calib_fraction, stream.child(2).state);
    const IntervalBuild build = build_interval(fit_part, config);
    const auto [conformalized, calibration] =
        conformalize_with_calibration(build.interval, calib_part, options.alpha);

    const ExperimentReport raw = evaluate_interval(build.interval, test_set);
    const ExperimentReport adjusted = evaluate_interval(conformalized, test_set);

    outcome.raw_picp = raw.picp;
    outcome.raw_mpiw = raw.mpiw;
    outcome.picp = adjusted.picp;
    outcome.mpiw = adjusted.mpiw;
    outcome.offset = calibration.offset;
    outcome.level_index = calibration.level_index;
    outcome.calib_rows = calib_part.rows();
    outcome.fit_rows = fit_part.rows();
    outcome.test_rows = test_set.rows();
    outcome.degenerate = calibration.degenerate;
    outcome.train_seconds = build.train_seconds;
    outcome.calibration = calibration;
    outcomes.push_back(std::move(outcome));
  }

  long long degenerate_trials = 0;
  std::vector<double> picps, mpiws, raw_picps, raw_mpiws, offsets;
  double train_seconds_total = 0.0;
  for (const TrialOutcome& outcome : outcomes) {
    degenerate_trials += outcome.degenerate ? 1 : 0;
    picps.push_back(outcome.picp);
    mpiws.push_back(outcome.mpiw);
    raw_picps.push_back(outcome.raw_picp);
    raw_mpiws.push_back(outcome.raw_mpiw);
    offsets.push_back(outcome.offset);
    train_seconds_total += outcome.train_seconds;
  }
  if (timing == TimingMode::None) train_seconds_total = 0.0;
  if (degenerate_trials > 0) {
    std::cerr << "warning: calibration set too small for alpha="
              << options.alpha << " in " << degenerate_trials
              << " trial(s); offset is infinite (degenerate)\n";
  }

  ReportDocument doc;
  doc.command = "conformal";
  doc.config = echo.pairs();
  add_metric(doc, "trials", options.trials);
  add_metric(doc, "fit_rows", static_cast<long long>(outcomes.front().fit_rows));
  add_metric(doc, "calib_rows", static_cast<long long>(outcomes.front().calib_rows));
  add_metric(doc, "test_rows", static_cast<long long>(outcomes.front().test_rows));
  add_metric(doc, "level_index",
             static_cast<long long>(outcomes.front().level_index));
  add_metric(doc, "degenerate_trials", degenerate_trials);
  add_metric(doc, "offset_mean", mean_of(offsets));
  add_metric(doc, "raw_picp_mean", mean_of(raw_picps));
  add_metric(doc, "raw_mpiw_mean", mean_of(raw_mpiws));
  add_metric(doc, "picp_mean", mean_of(picps));
  add_metric(doc, "picp_std", std_of(picps));
  add_metric(doc, "mpiw_mean", mean_of(mpiws));
  add_metric(doc, "mpiw_std", std_of(mpiws));
  add_metric(doc, "train_seconds_total", train_seconds_total);

  OutputGuard guard;
  emit_report(options.out_report, doc, guard);
  if (!options.out_calibration.empty()) {
    guard.track(options.out_calibration);
    save_calibration(options.out_calibration, outcomes.front().calibration);
  }
  guard.commit();
}

}  // namespace

void register_conformal(CLI::App& app) {
  auto options = std::make_shared<ConformalOptions>();
  CLI::App* cmd = app.add_subcommand(
      "conformal",
      "split-conformal interval pipeline, single run or repeated trials");
  add_config_option(*cmd, options->config_path);
  add_dataset_options(*cmd, options->data, "--data");
  cmd->add_option("--test", options->test_path, "evaluation CSV for file mode");
  cmd->add_option("--ad", options->ad,
                  "synthetic mode: generator AD1..AD6, fresh data per trial");
  cmd->add_option("--m", options->m, "synthetic train-pool rows (default: 300)");
  cmd->add_option("--test-m", options->test_m,
                  "synthetic evaluation rows (default: 500)");
  cmd->add_option("--noise-scale", options->noise_scale,
                  "stddev or variance reading of the generator noise parameter");
  add_method_options(*cmd, options->method);
  cmd->add_option("--calib-fraction", options->calib_fraction,
                  "fraction of the pool held out for calibration (default: 0.5)");
  cmd->add_option("--alpha", options->alpha,
                  "miscoverage level of the conformal guarantee (default: 0.1)");
  cmd->add_option("--trials", options->trials,
                  "number of repeated pipelines to aggregate (default: 1)");
  cmd->add_flag("--vary-seed,!--no-vary-seed", options->vary_seed,
                "derive a fresh seed stream per trial (default) or reuse one");
  cmd->add_option("--seed", options->seed, "random seed (default: 0)");
  cmd->add_option("--timing-mode", options->timing,
                  "wall (default) or none to zero timing fields for byte-stable output");
  cmd->add_option("--out-report", options->out_report,
                  "report path; a one-row CSV twin is written beside it as <path>.csv");
  cmd->add_option("--out-calibration", options->out_calibration,
                  "serialize the calibration evidence (single trial only)");
  cmd->callback([options, cmd] {
    apply_config_file(*cmd, options->config_path);
    run(*options);
  });
}

}  // namespace kqr::cli
