#include "commands.hpp"
#include "common.hpp"

#include "kqr/csv.hpp"
#include "kqr/forecast.hpp"

#include <memory>

namespace kqr::cli {

namespace {

struct ForecastOptions {
  std::string config_path;
  std::string series_path;
  bool header = true;
  bool timestamp_column = false;
  MethodOptions method;
  std::string lag_grid = "2,4,8,12";
  std::string c_grid;      // empty = fixed --c; "default" = power grid
  std::string width_grid;  // empty = fixed --width; "default" = power grid
  double train_fraction = 0.7;
  double val_fraction = 0.1;
  std::uint64_t seed = 0;
  std::string timing = "wall";
  std::string out_report;
  std::string out_bounds;
};

void run(const ForecastOptions& options) {
  require_value(options.series_path, "--series");
  const TimingMode timing = timing_mode_from_string(options.timing);

  ConfigEcho echo;
  echo.add("series", options.series_path);
  echo.add("header", options.header);
  echo.add("timestamp-column", options.timestamp_column);
  options.method.echo(echo);
  echo.add("lag-grid", options.lag_grid);
  echo.add("c-grid", options.c_grid);
  echo.add("width-grid", options.width_grid);
  echo.add("train-fraction", options.train_fraction);
  echo.add("val-fraction", options.val_fraction);
  echo.add("seed", options.seed);
  echo.add("timing-mode", options.timing);
  echo.add("out-report", options.out_report);
  echo.add("out-bounds", options.out_bounds);
  echo.print("forecast");

  const TimeSeries series =
      read_series_csv(options.series_path, options.header, options.timestamp_column);

  ForecastConfig config;
  config.base = options.method.interval_config();
  config.lag_grid = parse_int_list(options.lag_grid, "--lag-grid");
  if (options.c_grid.empty()) {
    config.c_grid = {config.base.c};
  } else if (options.c_grid != "default") {
    config.c_grid = parse_double_list(options.c_grid, "--c-grid");
  }  // "default" leaves the grid empty -> library power grid
  if (options.width_grid.empty()) {
    config.width_grid = {config.base.kernel.width};
  } else if (options.width_grid != "default") {
    config.width_grid = parse_double_list(options.width_grid, "--width-grid");
  }
  config.train_frac = options.train_fraction;
  config.val_frac_of_train = options.val_fraction;

  ForecastResult result = forecast_pi(series, config);
  if (timing == TimingMode::None) {
    result.tuning_seconds = 0.0;
    result.report.train_seconds = 0.0;
  }

  ReportDocument doc;
  doc.command = "forecast";
  doc.config = echo.pairs();
  add_metric(doc, "series_length", static_cast<long long>(series.values.size()));
  add_metric(doc, "test_rows", static_cast<long long>(result.test_positions.size()));
  add_metric(doc, "final_lag", static_cast<long long>(result.lag));
  add_metric(doc, "final_c", result.c);
  add_metric(doc, "final_width", result.width);
  add_metric(doc, "scale_min", result.scale_min);
  add_metric(doc, "scale_range", result.scale_range);
  add_metric(doc, "tuning_seconds", result.tuning_seconds);
  add_experiment_metrics(doc, result.report);

  OutputGuard guard;
  emit_report(options.out_report, doc, guard);
  if (!options.out_bounds.empty()) {
    guard.track(options.out_bounds);
    write_bounds_csv(options.out_bounds, result.test_positions, result.test_targets,
                     result.lower, result.upper, "y_true");
  }
  guard.commit();
}

}  // namespace

void register_forecast(CLI::App& app) {
  auto options = std::make_shared<ForecastOptions>();
  CLI::App* cmd = app.add_subcommand(
      "forecast", "one-step-ahead interval forecasting for a univariate series");
  add_config_option(*cmd, options->config_path);
  cmd->add_option("--series", options->series_path, "input series CSV (required)");
  cmd->add_flag("--header,!--no-header", options->header,
                "first CSV row holds column names (default: on)");
  cmd->add_flag("--timestamp-column", options->timestamp_column,
                "first column is a timestamp label, second the value");
  add_method_options(*cmd, options->method);
  cmd->add_option("--lag-grid", options->lag_grid,
                  "comma list of window lengths to try (default: 2,4,8,12)");
  cmd->add_option("--c-grid", options->c_grid,
                  "comma list of trade-off candidates, or \"default\" for the "
                  "17-point power grid; empty keeps --c fixed");
  cmd->add_option("--width-grid", options->width_grid,
                  "comma list of rbf width candidates, or \"default\"; empty keeps "
                  "--width fixed");
  cmd->add_option("--train-fraction", options->train_fraction,
                  "leading fraction of the series used for fitting (default: 0.7)");
  cmd->add_option("--val-fraction", options->val_fraction,
                  "trailing fraction of the fit block held out for tuning "
                  "(default: 0.1)");
  cmd->add_option("--seed", options->seed,
                  "random seed (recorded; the pipeline itself is deterministic)");
  cmd->add_option("--timing-mode", options->timing,
                  "wall (default) or none to zero timing fields for byte-stable output");
  cmd->add_option("--out-report", options->out_report,
                  "report path; a one-row CSV twin is written beside it as <path>.csv");
  cmd->add_option("--out-bounds", options->out_bounds,
                  "per-point CSV: index, y_true, lower, upper");
  cmd->callback([options, cmd] {
    apply_config_file(*cmd, options->config_path);
    run(*options);
  });
}

}  // namespace kqr::cli
