#include "common.hpp"

#include "kqr/io.hpp"
#include "kqr/kernel.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace kqr::cli {

OutputGuard::~OutputGuard() {
  if (committed_) return;
  for (const auto& path : paths_) {
    std::error_code ignore;
    std::filesystem::remove(path, ignore);
  }
}

void OutputGuard::track(const std::string& path) { paths_.push_back(path); }

TimingMode timing_mode_from_string(const std::string& name) {
  if (name == "wall") return TimingMode::Wall;
  if (name == "none") return TimingMode::None;
  throw std::invalid_argument("unknown timing mode \"" + name +
                              "\" (expected \"wall\" or \"none\")");
}

const char* to_string(TimingMode mode) {
  return mode == TimingMode::Wall ? "wall" : "none";
}

namespace {

std::vector<std::string> split_items(const std::string& text, const std::string& what) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream stream(text);
  while (std::getline(stream, item, ',')) {
    if (item.empty()) {
      throw std::invalid_argument(what + ": empty item in list \"" + text + "\"");
    }
    items.push_back(item);
  }
  if (items.empty()) {
    throw std::invalid_argument(what + ": empty list");
  }
  return items;
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> values;
  for (const auto& item : split_items(text, what)) {
    values.push_back(parse_double(item, what));
  }
  return values;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> values;
  for (const auto& item : split_items(text, what)) {
    values.push_back(static_cast<int>(parse_int(item, what)));
  }
  return values;
}

void add_config_option(CLI::App& cmd, std::string& path) {
  cmd.add_option("--config", path,
                 "flat key=value file of long flag names; explicit flags take "
                 "precedence");
}

namespace {

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

}  // namespace

void apply_config_file(CLI::App& cmd, const std::string& path) {
  if (path.empty()) return;
  const std::string content = read_text_file(path);
  std::istringstream stream(content);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const std::string entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ": line " + std::to_string(line_number) +
                                  ": expected key=value, got \"" + entry + "\"");
    }
    const std::string key = trim(entry.substr(0, eq));
    const std::string value = trim(entry.substr(eq + 1));
    if (key == "config") {
      throw std::invalid_argument(path + ": config files cannot nest");
    }
    CLI::Option* option = cmd.get_option_no_throw("--" + key);
    if (option == nullptr) {
      throw std::invalid_argument(path + ": unknown config key \"" + key + "\"");
    }
    if (option->count() > 0 || value.empty()) continue;
    option->add_result(value);
    option->run_callback();
  }
}

void ConfigEcho::add(const std::string& key, const std::string& value) {
  pairs_.emplace_back(key, value);
}
void ConfigEcho::add(const std::string& key, double value) {
  pairs_.emplace_back(key, format_double(value));
}
void ConfigEcho::add(const std::string& key, long long value) {
  pairs_.emplace_back(key, std::to_string(value));
}
void ConfigEcho::add(const std::string& key, std::uint64_t value) {
  pairs_.emplace_back(key, std::to_string(value));
}
void ConfigEcho::add(const std::string& key, bool value) {
  pairs_.emplace_back(key, value ? "true" : "false");
}

void ConfigEcho::print(const std::string& command) const {
  std::cout << "command=" << command << "\n";
  for (const auto& [key, value] : pairs_) {
    std::cout << key << "=" << value << "\n";
  }
}

Dataset DatasetInput::read() const {
  CsvReadOptions options;
  options.header = header;
  if (!target.empty()) options.target = target;
  return read_dataset_csv(path, options);
}

void DatasetInput::echo(ConfigEcho& echo, const std::string& path_key) const {
  echo.add(path_key, path);
  echo.add("header", header);
  echo.add("target", target);
}

void add_dataset_options(CLI::App& cmd, DatasetInput& input, const std::string& flag) {
  cmd.add_option(flag, input.path, "input dataset CSV");
  cmd.add_flag("--header,!--no-header", input.header,
               "first CSV row holds column names (default: on)");
  cmd.add_option("--target", input.target,
                 "target column: header name or 0-based index (default: last)");
}

void require_value(const std::string& value, const std::string& flag) {
  if (value.empty()) {
    throw std::invalid_argument(flag + " is required (flag or config file)");
  }
}

IntervalConfig MethodOptions::interval_config() const {
  IntervalConfig config;
  config.method = fit_method_from_string(method);
  config.coverage_target = coverage;
  config.q_bar = q_bar;
  config.c = c;
  config.kernel.family = kernel_family_from_string(kernel);
  config.kernel.width = width;
  config.tube_r = tube_r;
  config.tube_delta = tube_delta;
  config.tube.step = tube_step;
  config.tube.max_epochs = tube_epochs;
  return config;
}

void MethodOptions::echo(ConfigEcho& echo) const {
  echo.add("method", method);
  echo.add("coverage", coverage);
  echo.add("qbar", q_bar);
  echo.add("c", c);
  echo.add("kernel", kernel);
  echo.add("width", width);
  echo.add("tube-r", tube_r);
  echo.add("tube-delta", tube_delta);
  echo.add("tube-step", tube_step);
  echo.add("tube-epochs", static_cast<long long>(tube_epochs));
}

void add_method_options(CLI::App& cmd, MethodOptions& options) {
  cmd.add_option("--method", options.method,
                 "interval method: svqr, ssvqr, lssvr, tube (default: ssvqr)");
  cmd.add_option("--coverage", options.coverage,
                 "nominal coverage of the interval (default: 0.95)");
  cmd.add_option("--qbar", options.q_bar,
                 "lower quantile level of the pair (default: 0.025)");
  cmd.add_option("--c", options.c, "loss/regularization trade-off (default: 1)");
  cmd.add_option("--kernel", options.kernel, "kernel family: rbf or linear");
  cmd.add_option("--width", options.width, "rbf kernel width (default: 1)");
  cmd.add_option("--tube-r", options.tube_r,
                 "tube loss in-tube penalty split (default: 0.5)");
  cmd.add_option("--tube-delta", options.tube_delta,
                 "tube width penalty weight (default: 0)");
  cmd.add_option("--tube-step", options.tube_step,
                 "tube subgradient base step size (default: 0.1)");
  cmd.add_option("--tube-epochs", options.tube_epochs,
                 "tube subgradient epochs (default: 2000)");
}

void emit_report(const std::string& path, const ReportDocument& doc,
                 OutputGuard& guard) {
  const std::string text = render_report_text(doc);
  std::cout << text;
  if (!path.empty()) {
    guard.track(path);
    guard.track(path + ".csv");
    atomic_write_file(path, text);
    atomic_write_file(path + ".csv", render_report_csv(doc));
  }
}

std::pair<VectorXd, VectorXd> true_quantile_curves(AdId ad, NoiseScale scale,
                                                   const PredictionInterval& interval,
                                                   const MatrixXd& inputs) {
  if (inputs.cols() != 1) {
    throw std::invalid_argument(
        "true-quantile columns need one-dimensional inputs (synthetic generators)");
  }
  const double lower_level = interval.q_bar;
  const double upper_level = interval.q_bar + interval.coverage_target;
  VectorXd lower(inputs.rows());
  VectorXd upper(inputs.rows());
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    lower(i) = true_quantile(ad, lower_level, inputs(i, 0), scale);
    upper(i) = true_quantile(ad, upper_level, inputs(i, 0), scale);
  }
  return {std::move(lower), std::move(upper)};
}

NoiseScale noise_scale_from_string(const std::string& name) {
  if (name == "stddev") return NoiseScale::StdDev;
  if (name == "variance") return NoiseScale::Variance;
  throw std::invalid_argument("unknown noise scale \"" + name +
                              "\" (expected \"stddev\" or \"variance\")");
}

}  // namespace kqr::cli
