#include "kqr/report.hpp"

#include "kqr/csv.hpp"
#include "kqr/io.hpp"

#include <stdexcept>

namespace kqr {

namespace {

constexpr const char* kReportMagic = "kqr-report v1";

void check_key(const std::string& key) {
  if (key.empty() || key.find('=') != std::string::npos ||
      key.find('\n') != std::string::npos) {
    throw std::invalid_argument("report keys must be nonempty and free of '=' and"
                                " line breaks: \"" + key + "\"");
  }
}

void check_value(const std::string& value) {
  if (value.find('\n') != std::string::npos) {
    throw std::invalid_argument("report values must be single-line: \"" + value +
                                "\"");
  }
}

}  // namespace

void add_metric(ReportDocument& doc, const std::string& key, const std::string& value) {
  check_key(key);
  check_value(value);
  doc.metrics.emplace_back(key, value);
}

void add_metric(ReportDocument& doc, const std::string& key, double value) {
  add_metric(doc, key, format_double(value));
}

void add_metric(ReportDocument& doc, const std::string& key, long long value) {
  add_metric(doc, key, std::to_string(value));
}

void add_experiment_metrics(ReportDocument& doc, const ExperimentReport& report,
                            const std::string& prefix) {
  add_metric(doc, prefix + "picp", report.picp);
  add_metric(doc, prefix + "mpiw", report.mpiw);
  add_metric(doc, prefix + "pice", report.pice);
  add_metric(doc, prefix + "coverage_target", report.coverage_target);
  add_metric(doc, prefix + "cp_lower", report.cp_lower);
  add_metric(doc, prefix + "cp_upper", report.cp_upper);
  add_metric(doc, prefix + "sparsity_lower_pct", report.sparsity_lower_pct);
  add_metric(doc, prefix + "sparsity_upper_pct", report.sparsity_upper_pct);
  if (report.rmse_lower.has_value()) {
    add_metric(doc, prefix + "rmse_lower", *report.rmse_lower);
  }
  if (report.rmse_upper.has_value()) {
    add_metric(doc, prefix + "rmse_upper", *report.rmse_upper);
  }
  add_metric(doc, prefix + "crossing_fraction", report.crossing_fraction);
  add_metric(doc, prefix + "train_seconds", report.train_seconds);
}

std::string render_report_text(const ReportDocument& doc) {
  check_value(doc.command);
  std::string out(kReportMagic);
  out += "\ncommand=";
  out += doc.command;
  out += "\n[config]\n";
  for (const auto& [key, value] : doc.config) {
    check_key(key);
    check_value(value);
    out += key;
    out += '=';
    out += value;
    out += '\n';
  }
  out += "[metrics]\n";
  for (const auto& [key, value] : doc.metrics) {
    check_key(key);
    check_value(value);
    out += key;
    out += '=';
    out += value;
    out += '\n';
  }
  return out;
}

std::string render_report_csv(const ReportDocument& doc) {
  std::string header = "command";
  std::string values = csv_quote(doc.command);
  const auto append = [&](const std::pair<std::string, std::string>& field) {
    header += ',';
    header += csv_quote(field.first);
    values += ',';
    values += csv_quote(field.second);
  };
  for (const auto& field : doc.config) append(field);
  for (const auto& field : doc.metrics) append(field);
  return header + "\n" + values + "\n";
}

ReportDocument parse_report_text(const std::string& content) {
  std::vector<std::string> lines;
  std::string line;
  for (const char ch : content) {
    if (ch == '\n') {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(std::move(line));
      line.clear();
    } else {
      line += ch;
    }
  }
  if (!line.empty()) lines.push_back(std::move(line));

  if (lines.empty() || lines[0] != kReportMagic) {
    throw std::runtime_error(std::string("not a report file: expected \"") +
                             kReportMagic + "\"");
  }
  if (lines.size() < 2 || lines[1].rfind("command=", 0) != 0) {
    throw std::runtime_error("report file missing the command line");
  }
  ReportDocument doc;
  doc.command = lines[1].substr(8);

  enum class Section { None, Config, Metrics };
  Section section = Section::None;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const std::string& current = lines[i];
    if (current == "[config]") {
      section = Section::Config;
      continue;
    }
    if (current == "[metrics]") {
      section = Section::Metrics;
      continue;
    }
    const auto eq = current.find('=');
    if (eq == std::string::npos || section == Section::None) {
      throw std::runtime_error("malformed report line: \"" + current + "\"");
    }
    auto& target = section == Section::Config ? doc.config : doc.metrics;
    target.emplace_back(current.substr(0, eq), current.substr(eq + 1));
  }
  return doc;
}

}  // namespace kqr
