#include "commands.hpp"
#include "common.hpp"

#include "kqr/csv.hpp"
#include "kqr/datagen.hpp"
#include "kqr/serialize.hpp"

#include <chrono>
#include <memory>
#include <numeric>

namespace kqr::cli {

namespace {

struct IntervalOptions {
  std::string config_path;
  DatasetInput data;
  std::string test_path;
  MethodOptions method;
  std::string c_grid;      // comma list or "default"; empty = keep --c
  std::string width_grid;  // comma list or "default"; empty = keep --width
  std::string qbar_grid;   // comma list or "default"; empty = keep --qbar
  double val_fraction = 0.1;
  bool chronological = false;
  std::uint64_t seed = 0;
  std::string ad;  // when set, adds bound RMSE against the true quantiles
  std::string noise_scale = "stddev";
  std::string timing = "wall";
  std::string out_report;
  std::string out_bounds;
  std::string out_interval;
};

std::vector<double> resolve_grid(const std::string& text, double fallback,
                                 const std::string& what) {
  if (text.empty()) return {fallback};
  if (text == "default") return default_power_grid();
  return parse_double_list(text, what);
}

void run(const IntervalOptions& options) {
  require_value(options.data.path, "--data");
  const TimingMode timing = timing_mode_from_string(options.timing);

  ConfigEcho echo;
  options.data.echo(echo, "data");
  echo.add("test", options.test_path);
  options.method.echo(echo);
  echo.add("c-grid", options.c_grid);
  echo.add("width-grid", options.width_grid);
  echo.add("qbar-grid", options.qbar_grid);
  echo.add("val-fraction", options.val_fraction);
  echo.add("chronological", options.chronological);
  echo.add("seed", options.seed);
  echo.add("ad", options.ad);
  echo.add("noise-scale", options.noise_scale);
  echo.add("timing-mode", options.timing);
  echo.add("out-report", options.out_report);
  echo.add("out-bounds", options.out_bounds);
  echo.add("out-interval", options.out_interval);
  echo.print("interval");

  const Dataset data = options.data.read();
  IntervalConfig config = options.method.interval_config();

  const std::vector<double> c_grid = resolve_grid(options.c_grid, config.c, "--c-grid");
  const std::vector<double> width_grid =
      resolve_grid(options.width_grid, config.kernel.width, "--width-grid");
  const bool search_cw = c_grid.size() > 1 || width_grid.size() > 1;
  std::vector<double> qbar_grid;
  if (!options.qbar_grid.empty()) {
    qbar_grid = options.qbar_grid == "default" ? default_qbar_grid()
                                               : parse_double_list(options.qbar_grid,
                                                                   "--qbar-grid");
  }
  config.c = c_grid.front();
  config.kernel.width = width_grid.front();

  double tuning_seconds = 0.0;
  if (search_cw || !qbar_grid.empty()) {
    const auto started = std::chrono::steady_clock::now();
    const ValidationSplit split =
        split_validation(data, options.val_fraction, options.seed, options.chronological);
    if (search_cw) {
      const GridSearchResult result =
          grid_search(split.train, split.val, config, c_grid, width_grid);
      config.c = result.c;
      config.kernel.width = result.width;
    }
    if (!qbar_grid.empty()) {
      const QbarSearchResult result =
          tune_qbar(split.train, split.val, config, qbar_grid);
      config.q_bar = result.q_bar;
    }
    tuning_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
  }

  IntervalBuild build = build_interval(data, config);

  const Dataset test = options.test_path.empty()
                           ? data
                           : [&] {
                               DatasetInput input = options.data;
                               input.path = options.test_path;
                               return input.read();
                             }();

  ExperimentReport report;
  if (!options.ad.empty()) {
    const auto [true_lower, true_upper] = true_quantile_curves(
        ad_from_string(options.ad), noise_scale_from_string(options.noise_scale),
        build.interval, test.inputs);
    report = evaluate_interval(build.interval, test, true_lower, true_upper);
  } else {
    report = evaluate_interval(build.interval, test);
  }
  report.train_seconds = build.train_seconds;
  if (timing == TimingMode::None) {
    report.train_seconds = 0.0;
    tuning_seconds = 0.0;
  }

  ReportDocument doc;
  doc.command = "interval";
  doc.config = echo.pairs();
  add_metric(doc, "train_rows", static_cast<long long>(data.rows()));
  add_metric(doc, "eval_rows", static_cast<long long>(test.rows()));
  add_metric(doc, "final_c", config.c);
  add_metric(doc, "final_width", config.kernel.width);
  add_metric(doc, "final_qbar", build.interval.q_bar);
  add_metric(doc, "tuning_seconds", tuning_seconds);
  add_metric(doc, "solver_status_primary", to_string(build.primary.solver_status));
  if (build.secondary.has_value()) {
    add_metric(doc, "solver_status_secondary", to_string(build.secondary->solver_status));
  }
  add_experiment_metrics(doc, report);

  OutputGuard guard;
  emit_report(options.out_report, doc, guard);
  if (!options.out_bounds.empty()) {
    const IntervalBounds bounds = interval_bounds(build.interval, test.inputs);
    std::vector<Eigen::Index> indices(static_cast<std::size_t>(test.rows()));
    std::iota(indices.begin(), indices.end(), Eigen::Index{0});
    guard.track(options.out_bounds);
    write_bounds_csv(options.out_bounds, indices, test.targets, bounds.lower,
                     bounds.upper, "y");
  }
  if (!options.out_interval.empty()) {
    guard.track(options.out_interval);
    save_interval(options.out_interval, build.interval);
  }
  guard.commit();
}

}  // namespace

void register_interval(CLI::App& app) {
  auto options = std::make_shared<IntervalOptions>();
  CLI::App* cmd = app.add_subcommand(
      "interval", "fit a prediction interval, optionally tuning on a validation split");
  add_config_option(*cmd, options->config_path);
  add_dataset_options(*cmd, options->data, "--data");
  cmd->add_option("--test", options->test_path,
                  "evaluation CSV (same layout); default: evaluate on --data");
  add_method_options(*cmd, options->method);
  cmd->add_option("--c-grid", options->c_grid,
                  "comma list of trade-off candidates, or \"default\" for the 17-point "
                  "power grid; enables validation search");
  cmd->add_option("--width-grid", options->width_grid,
                  "comma list of rbf width candidates, or \"default\"");
  cmd->add_option("--qbar-grid", options->qbar_grid,
                  "comma list of interval placements, or \"default\"; searched after "
                  "the (c, width) grid");
  cmd->add_option("--val-fraction", options->val_fraction,
                  "held-out fraction for tuning (default: 0.1)");
  cmd->add_flag("--chronological", options->chronological,
                "hold out the trailing rows instead of a random subset");
  cmd->add_option("--seed", options->seed, "random seed (default: 0)");
  cmd->add_option("--ad", options->ad,
                  "synthetic generator the data came from; adds bound RMSE columns");
  cmd->add_option("--noise-scale", options->noise_scale,
                  "stddev or variance reading of the generator noise parameter");
  cmd->add_option("--timing-mode", options->timing,
                  "wall (default) or none to zero timing fields for byte-stable output");
  cmd->add_option("--out-report", options->out_report,
                  "report path; a one-row CSV twin is written beside it as <path>.csv");
  cmd->add_option("--out-bounds", options->out_bounds,
                  "per-point CSV: index, y, lower, upper");
  cmd->add_option("--out-interval", options->out_interval,
                  "serialize the fitted interval (header plus two model files)");
  cmd->callback([options, cmd] {
    apply_config_file(*cmd, options->config_path);
    run(*options);
  });
}

}  // namespace kqr::cli
