// Shared command plumbing: failure-safe output tracking, resolved-config
// echo, comma-list parsing, timing-mode handling, and the report/bounds
// emission helpers every subcommand uses.
#pragma once

#include "kqr/csv.hpp"
#include "kqr/datagen.hpp"
#include "kqr/interval.hpp"
#include "kqr/report.hpp"
#include "kqr/types.hpp"

#include <CLI11.hpp>

#include <string>
#include <utility>
#include <vector>

namespace kqr::cli {

// Declared output files; anything tracked but not committed is deleted when
// the command unwinds, so failures leave no partial outputs behind.
class OutputGuard {
 public:
  OutputGuard() = default;
  OutputGuard(const OutputGuard&) = delete;
  OutputGuard& operator=(const OutputGuard&) = delete;
  ~OutputGuard();

  void track(const std::string& path);
  void commit() { committed_ = true; }

 private:
  std::vector<std::string> paths_;
  bool committed_ = false;
};

enum class TimingMode { Wall, None };

TimingMode timing_mode_from_string(const std::string& name);
const char* to_string(TimingMode mode);

// "0.5,1,2" -> {0.5, 1, 2}; rejects empty items.
std::vector<double> parse_double_list(const std::string& text, const std::string& what);
std::vector<int> parse_int_list(const std::string& text, const std::string& what);

// Registers --config on the subcommand. Call apply_config_file at the top of
// the callback: it loads flat "key=value" lines (keys are the long flag
// names, '#' comments allowed) into every option the command line did not
// set, keeping flag > file > default precedence. Empty values mean "unset".
void add_config_option(CLI::App& cmd, std::string& path);
void apply_config_file(CLI::App& cmd, const std::string& path);

// Ordered resolved-configuration pairs; keys equal the long flag names so a
// report's config section can be replayed through --config.
class ConfigEcho {
 public:
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add(const std::string& key, long long value);
  void add(const std::string& key, std::uint64_t value);
  void add(const std::string& key, bool value);

  const std::vector<std::pair<std::string, std::string>>& pairs() const {
    return pairs_;
  }

  // Prints "command=<name>" then "key=value" per entry to standard output.
  void print(const std::string& command) const;

 private:
  std::vector<std::pair<std::string, std::string>> pairs_;
};

// --- shared option bundles -------------------------------------------------

// Dataset input: path, header flag, target-column selector.
struct DatasetInput {
  std::string path;
  bool header = true;
  std::string target;  // name or 0-based index; empty = last column

  Dataset read() const;
  void echo(ConfigEcho& echo, const std::string& path_key) const;
};

void add_dataset_options(CLI::App& cmd, DatasetInput& input, const std::string& flag);

// Missing-required check usable after config application.
void require_value(const std::string& value, const std::string& flag);

// Interval-method parameters shared by the fitting commands.
struct MethodOptions {
  std::string method = "ssvqr";
  double coverage = 0.95;
  double q_bar = 0.025;
  double c = 1.0;
  std::string kernel = "rbf";
  double width = 1.0;
  double tube_r = 0.5;
  double tube_delta = 0.0;
  double tube_step = 0.1;
  int tube_epochs = 2000;

  IntervalConfig interval_config() const;
  void echo(ConfigEcho& echo) const;
};

void add_method_options(CLI::App& cmd, MethodOptions& options);

// --- report emission -------------------------------------------------------

// Writes the structured-text report at `path` and its one-row CSV twin at
// `path + ".csv"`; prints the text to standard output as well.
void emit_report(const std::string& path, const ReportDocument& doc,
                 OutputGuard& guard);

// True conditional quantile curves for a synthetic generator at the
// interval's two levels; used for the optional bound-RMSE columns.
std::pair<VectorXd, VectorXd> true_quantile_curves(AdId ad, NoiseScale scale,
                                                   const PredictionInterval& interval,
                                                   const MatrixXd& inputs);

NoiseScale noise_scale_from_string(const std::string& name);

}  // namespace kqr::cli
