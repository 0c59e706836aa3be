// CSV ingestion and emission for datasets, univariate series, and per-point
// interval bounds. Plain comma separation with optional double-quoted cells,
// decimal-point floats, UTF-8 passed through verbatim.
#pragma once

#include "kqr/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kqr {

struct CsvReadOptions {
  bool header = true;  // first row holds column names
  // Target column: a header name, or a 0-based column index. Empty selects
  // the last column.
  std::optional<std::string> target;
};

// Reads a supervised dataset. Features keep their file order with the target
// column removed; column_names (when headered) stores the feature names
// followed by the target name, matching what the writer emits.
Dataset read_dataset_csv(const std::string& path, const CsvReadOptions& options = {});

// Features first, target last; header from column_names when it holds
// exactly cols()+1 labels, otherwise synthesized as x1..xn,y.
std::string render_dataset_csv(const Dataset& data, bool header);
void write_dataset_csv(const std::string& path, const Dataset& data, bool header);

// Single value column, optionally preceded by a timestamp column.
TimeSeries read_series_csv(const std::string& path, bool header,
                           bool timestamp_column);
std::string render_series_csv(const TimeSeries& series, bool header);
void write_series_csv(const std::string& path, const TimeSeries& series, bool header);

// Plot-ready per-point table: index, observed value, lower, upper.
std::string render_bounds_csv(const std::vector<Eigen::Index>& indices,
                              const VectorXd& y, const VectorXd& lower,
                              const VectorXd& upper, const std::string& y_label);
void write_bounds_csv(const std::string& path, const std::vector<Eigen::Index>& indices,
                      const VectorXd& y, const VectorXd& lower, const VectorXd& upper,
                      const std::string& y_label);

// One CSV cell, double-quoted only when it contains a comma, quote, or
// line break.
std::string csv_quote(const std::string& cell);

// Parses one CSV document into rows of cells (quoted cells unescaped,
// CR/LF tolerated, fully blank lines skipped).
std::vector<std::vector<std::string>> parse_csv(const std::string& content);

}  // namespace kqr
