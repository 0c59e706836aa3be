#include "commands.hpp"
#include "common.hpp"

#include "kqr/csv.hpp"
#include "kqr/datagen.hpp"
#include "kqr/serialize.hpp"

#include <cmath>
#include <memory>
#include <numeric>

namespace kqr::cli {

namespace {

struct EvaluateOptions {
  std::string config_path;
  std::string interval_path;
  DatasetInput data;
  std::string ad;
  std::string noise_scale = "stddev";
  std::string out_report;
  std::string out_bounds;
};

void run(const EvaluateOptions& options) {
  require_value(options.interval_path, "--interval");
  require_value(options.data.path, "--data");
  ConfigEcho echo;
  echo.add("interval", options.interval_path);
  options.data.echo(echo, "data");
  echo.add("ad", options.ad);
  echo.add("noise-scale", options.noise_scale);
  echo.add("out-report", options.out_report);
  echo.add("out-bounds", options.out_bounds);
  echo.print("evaluate");

  const PredictionInterval interval = load_interval(options.interval_path);
  const Dataset data = options.data.read();

  ExperimentReport report;
  if (!options.ad.empty()) {
    const auto [true_lower, true_upper] = true_quantile_curves(
        ad_from_string(options.ad), noise_scale_from_string(options.noise_scale),
        interval, data.inputs);
    report = evaluate_interval(interval, data, true_lower, true_upper);
  } else {
    report = evaluate_interval(interval, data);
  }

  ReportDocument doc;
  doc.command = "evaluate";
  doc.config = echo.pairs();
  add_metric(doc, "eval_rows", static_cast<long long>(data.rows()));
  add_metric(doc, "coverage_target", interval.coverage_target);
  add_metric(doc, "qbar", interval.q_bar);
  add_metric(doc, "conformal_offset", interval.conformal_offset);
  add_metric(doc, "degenerate_offset",
             static_cast<long long>(std::isinf(interval.conformal_offset) ? 1 : 0));
  add_experiment_metrics(doc, report);

  OutputGuard guard;
  emit_report(options.out_report, doc, guard);
  if (!options.out_bounds.empty()) {
    const IntervalBounds bounds = interval_bounds(interval, data.inputs);
    std::vector<Eigen::Index> indices(static_cast<std::size_t>(data.rows()));
    std::iota(indices.begin(), indices.end(), Eigen::Index{0});
    guard.track(options.out_bounds);
    write_bounds_csv(options.out_bounds, indices, data.targets, bounds.lower,
                     bounds.upper, "y");
  }
  guard.commit();
}

}  // namespace

void register_evaluate(CLI::App& app) {
  auto options = std::make_shared<EvaluateOptions>();
  CLI::App* cmd = app.add_subcommand(
      "evaluate", "score a stored prediction interval against a dataset");
  add_config_option(*cmd, options->config_path);
  cmd->add_option("--interval", options->interval_path,
                  "interval header file written by interval --out-interval (required)");
  add_dataset_options(*cmd, options->data, "--data");
  cmd->add_option("--ad", options->ad,
                  "synthetic generator the data came from; adds bound RMSE columns");
  cmd->add_option("--noise-scale", options->noise_scale,
                  "stddev or variance reading of the generator noise parameter");
  cmd->add_option("--out-report", options->out_report,
                  "report path; a one-row CSV twin is written beside it as <path>.csv");
  cmd->add_option("--out-bounds", options->out_bounds,
                  "per-point CSV: index, y, lower, upper");
  cmd->callback([options, cmd] {
    apply_config_file(*cmd, options->config_path);
    run(*options);
  });
}

}  // namespace kqr::cli
