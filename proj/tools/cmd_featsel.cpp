#include "commands.hpp"
#include "common.hpp"

#include "kqr/csv.hpp"
#include "kqr/feature_select.hpp"
#include "kqr/io.hpp"

#include <memory>
#include <string>

namespace kqr::cli {

namespace {

struct FeatselOptions {
  std::string config_path;
  DatasetInput data;
  std::string test_path;
  double coverage = 0.95;
  double q_bar = 0.025;
  double c = 1.0;
  double eps = 0.0;
  bool eps_set = false;
  std::string timing = "wall";
  std::string out_report;
  std::string out_selected;
};

// kept/dropped indices as a comma list of column names when available,
// otherwise of 0-based indices.
std::string column_list(const std::vector<int>& indices, const Dataset& data) {
  const bool named =
      data.column_names.size() == static_cast<std::size_t>(data.cols()) + 1;
  std::string out;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i > 0) out += ',';
    out += named ? data.column_names[static_cast<std::size_t>(indices[i])]
                 : std::to_string(indices[i]);
  }
  return out;
}

void run(const FeatselOptions& options) {
  require_value(options.data.path, "--data");
  const TimingMode timing = timing_mode_from_string(options.timing);

  ConfigEcho echo;
  options.data.echo(echo, "data");
  echo.add("test", options.test_path);
  echo.add("coverage", options.coverage);
  echo.add("qbar", options.q_bar);
  echo.add("c", options.c);
  echo.add("eps", options.eps_set ? format_double(options.eps) : std::string());
  echo.add("timing-mode", options.timing);
  echo.add("out-report", options.out_report);
  echo.add("out-selected", options.out_selected);
  echo.print("featsel");

  const Dataset data = options.data.read();
  const Dataset eval_set = options.test_path.empty()
                               ? data
                               : [&] {
                                   DatasetInput input = options.data;
                                   input.path = options.test_path;
                                   return input.read();
                                 }();

  const FeatureSelection sel =
      options.eps_set
          ? select_features(data, options.coverage, options.q_bar, options.eps,
                            options.c)
          : select_features(data, options.coverage, options.q_bar, options.c);
  SelectionRefit refit = refit_on_selection(data, eval_set, sel, options.coverage,
                                            options.q_bar, options.c);
  refit.before_eval.train_seconds = refit.before_train_seconds;
  refit.after_eval.train_seconds = refit.after_train_seconds;
  if (timing == TimingMode::None) {
    refit.before_eval.train_seconds = 0.0;
    refit.after_eval.train_seconds = 0.0;
  }

  ReportDocument doc;
  doc.command = "featsel";
  doc.config = echo.pairs();
  add_metric(doc, "n_features", static_cast<long long>(data.cols()));
  add_metric(doc, "n_kept", static_cast<long long>(sel.kept.size()));
  add_metric(doc, "n_dropped", static_cast<long long>(sel.dropped.size()));
  add_metric(doc, "pct_features_reduced", refit.pct_features_reduced);
  add_metric(doc, "eps_used", sel.eps);
  add_metric(doc, "kept_columns", column_list(sel.kept, data));
  add_metric(doc, "dropped_columns", column_list(sel.dropped, data));
  add_experiment_metrics(doc, refit.before_eval, "before_");
  add_experiment_metrics(doc, refit.after_eval, "after_");

  OutputGuard guard;
  emit_report(options.out_report, doc, guard);
  if (!options.out_selected.empty()) {
    guard.track(options.out_selected);
    write_dataset_csv(options.out_selected, project_features(data, sel.kept),
                      options.data.header);
  }
  guard.commit();
}

}  // namespace

void register_featsel(CLI::App& app) {
  auto options = std::make_shared<FeatselOptions>();
  CLI::App* cmd = app.add_subcommand(
      "featsel",
      "select features by sparse linear quantile weights and compare refits");
  add_config_option(*cmd, options->config_path);
  add_dataset_options(*cmd, options->data, "--data");
  cmd->add_option("--test", options->test_path,
                  "evaluation CSV (same layout); default: evaluate on --data");
  cmd->add_option("--coverage", options->coverage,
                  "nominal coverage of the interval pair (default: 0.95)");
  cmd->add_option("--qbar", options->q_bar,
                  "lower quantile level of the pair (default: 0.025)");
  cmd->add_option("--c", options->c, "loss/regularization trade-off (default: 1)");
  CLI::Option* eps_opt = cmd->add_option(
      "--eps", options->eps,
      "absolute weight threshold in standardized feature space; default: "
      "1e-4 of the largest weight magnitude");
  cmd->add_option("--timing-mode", options->timing,
                  "wall (default) or none to zero timing fields for byte-stable output");
  cmd->add_option("--out-report", options->out_report,
                  "report path; a one-row CSV twin is written beside it as <path>.csv");
  cmd->add_option("--out-selected", options->out_selected,
                  "write the dataset restricted to the kept features");
  cmd->callback([options, eps_opt, cmd] {
    apply_config_file(*cmd, options->config_path);
    options->eps_set = eps_opt->count() > 0;
    run(*options);
  });
}

}  // namespace kqr::cli
