// Run reports: a human-readable structured-text document with a fixed field
// order (the resolved configuration followed by the metrics) plus a
// machine-readable one-row CSV twin with the same fields as columns.
#pragma once

#include "kqr/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace kqr {

struct ReportDocument {
  std::string command;
  // Resolved configuration, one entry per option, in declaration order.
  std::vector<std::pair<std::string, std::string>> config;
  // Metric fields in emission order.
  std::vector<std::pair<std::string, std::string>> metrics;
};

void add_metric(ReportDocument& doc, const std::string& key, const std::string& value);
void add_metric(ReportDocument& doc, const std::string& key, double value);
void add_metric(ReportDocument& doc, const std::string& key, long long value);

// Appends the standard interval-evaluation fields (picp, mpiw, pice, coverage
// probabilities, sparsity, optional bound RMSE, crossing fraction, train
// time), each key prefixed to keep multi-evaluation reports unambiguous.
void add_experiment_metrics(ReportDocument& doc, const ExperimentReport& report,
                            const std::string& prefix = "");

// Text layout:
//   kqr-report v1
//   command=<name>
//   [config]
//   key=value        (config-file compatible)
//   [metrics]
//   key=value
std::string render_report_text(const ReportDocument& doc);

// Header row of field names (command, config keys, metric keys) and one
// value row.
std::string render_report_csv(const ReportDocument& doc);

// Inverse of render_report_text; used to audit and re-run stored reports.
ReportDocument parse_report_text(const std::string& content);

}  // namespace kqr
