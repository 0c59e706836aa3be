#include "kqr/csv.hpp"

#include "kqr/io.hpp"

#include <sstream>
#include <stdexcept>

namespace kqr {

std::string csv_quote(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) {
    return cell;
  }
  std::string quoted = "\"";
  for (const char ch : cell) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  return quoted;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& content) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool in_quotes = false;
  bool row_started = false;
  const auto end_cell = [&] {
    row.push_back(std::move(cell));
    cell.clear();
  };
  const auto end_row = [&] {
    if (row_started || !row.empty()) {
      end_cell();
      rows.push_back(std::move(row));
      row.clear();
    }
    row_started = false;
  };
  for (std::size_t i = 0; i < content.size(); ++i) {
    const char ch = content[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cell += ch;
      }
      continue;
    }
    switch (ch) {
      case '"':
        in_quotes = true;
        row_started = true;
        break;
      case ',':
        end_cell();
        row_started = true;
        break;
      case '\r':
        break;  // swallowed; the matching \n ends the row
      case '\n':
        end_row();
        break;
      default:
        cell += ch;
        row_started = true;
        break;
    }
  }
  if (in_quotes) {
    throw std::runtime_error("unterminated quoted CSV cell");
  }
  end_row();  // file may lack a final newline
  return rows;
}

namespace {

[[noreturn]] void csv_error(const std::string& path, std::size_t row_number,
                            const std::string& message) {
  std::ostringstream msg;
  msg << path << ": row " << row_number << ": " << message;
  throw std::runtime_error(msg.str());
}

double parse_cell(const std::string& path, std::size_t row_number,
                  const std::vector<std::string>& row, std::size_t column) {
  try {
    return parse_double(row[column], "CSV cell");
  } catch (const std::runtime_error&) {
    std::ostringstream msg;
    msg << path << ": row " << row_number << ", column " << column + 1
        << ": not a number: \"" << row[column] << "\"";
    throw std::runtime_error(msg.str());
  }
}

// Resolves the target selector to a 0-based column: header-name match first,
// then a plain column index.
std::size_t resolve_target(const std::string& path,
                           const std::vector<std::string>& header_names,
                           const std::optional<std::string>& selector,
                           std::size_t columns) {
  if (!selector.has_value() || selector->empty()) {
    return columns - 1;
  }
  for (std::size_t j = 0; j < header_names.size(); ++j) {
    if (header_names[j] == *selector) {
      return j;
    }
  }
  long long index = 0;
  try {
    index = parse_int(*selector, "target column");
  } catch (const std::runtime_error&) {
    throw std::runtime_error(path + ": unknown target column \"" + *selector + "\"");
  }
  if (index < 0 || static_cast<std::size_t>(index) >= columns) {
    std::ostringstream msg;
    msg << path << ": target column index " << index << " out of range for "
        << columns << " columns";
    throw std::runtime_error(msg.str());
  }
  return static_cast<std::size_t>(index);
}

}  // namespace

Dataset read_dataset_csv(const std::string& path, const CsvReadOptions& options) {
  const auto rows = parse_csv(read_text_file(path));
  std::size_t first_data = 0;
  std::vector<std::string> header_names;
  if (options.header) {
    if (rows.empty()) {
      throw std::runtime_error(path + ": empty file, expected a header row");
    }
    header_names = rows[0];
    first_data = 1;
  }
  if (rows.size() <= first_data) {
    throw std::runtime_error(path + ": no data rows");
  }
  const std::size_t columns = rows[first_data].size();
  if (columns < 2) {
    throw std::runtime_error(path +
                             ": need at least two columns (features and a target)");
  }
  if (options.header && header_names.size() != columns) {
    csv_error(path, 1, "header has " + std::to_string(header_names.size()) +
                           " cells but data rows have " + std::to_string(columns));
  }
  const std::size_t target = resolve_target(path, header_names, options.target, columns);

  const auto m = static_cast<Eigen::Index>(rows.size() - first_data);
  const auto n = static_cast<Eigen::Index>(columns - 1);
  Dataset data;
  data.inputs.resize(m, n);
  data.targets.resize(m);
  for (std::size_t r = first_data; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != columns) {
      csv_error(path, r + 1, "expected " + std::to_string(columns) + " cells, got " +
                                 std::to_string(row.size()));
    }
    const auto i = static_cast<Eigen::Index>(r - first_data);
    Eigen::Index feature = 0;
    for (std::size_t j = 0; j < columns; ++j) {
      const double value = parse_cell(path, r + 1, row, j);
      if (j == target) {
        data.targets(i) = value;
      } else {
        data.inputs(i, feature++) = value;
      }
    }
  }
  if (options.header) {
    for (std::size_t j = 0; j < columns; ++j) {
      if (j != target) data.column_names.push_back(header_names[j]);
    }
    data.column_names.push_back(header_names[target]);
  }
  return data;
}

std::string render_dataset_csv(const Dataset& data, bool header) {
  if (data.inputs.rows() != data.targets.size()) {
    throw std::invalid_argument("dataset row count mismatch");
  }
  const Eigen::Index n = data.cols();
  std::string out;
  if (header) {
    const bool named =
        data.column_names.size() == static_cast<std::size_t>(n) + 1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j > 0) out += ',';
      out += named ? csv_quote(data.column_names[static_cast<std::size_t>(j)])
                   : "x" + std::to_string(j + 1);
    }
    out += ',';
    out += named ? csv_quote(data.column_names[static_cast<std::size_t>(n)]) : "y";
    out += '\n';
  }
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j > 0) out += ',';
      out += format_double(data.inputs(i, j));
    }
    out += ',';
    out += format_double(data.targets(i));
    out += '\n';
  }
  return out;
}

void write_dataset_csv(const std::string& path, const Dataset& data, bool header) {
  atomic_write_file(path, render_dataset_csv(data, header));
}

TimeSeries read_series_csv(const std::string& path, bool header,
                           bool timestamp_column) {
  const auto rows = parse_csv(read_text_file(path));
  const std::size_t first_data = header ? 1 : 0;
  if (rows.size() <= first_data) {
    throw std::runtime_error(path + ": no data rows");
  }
  const std::size_t expected = timestamp_column ? 2 : 1;
  TimeSeries series;
  series.values.resize(static_cast<Eigen::Index>(rows.size() - first_data));
  for (std::size_t r = first_data; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != expected) {
      csv_error(path, r + 1, "expected " + std::to_string(expected) +
                                 " column(s), got " + std::to_string(row.size()));
    }
    if (timestamp_column) {
      series.timestamps.push_back(row[0]);
    }
    series.values(static_cast<Eigen::Index>(r - first_data)) =
        parse_cell(path, r + 1, row, expected - 1);
  }
  return series;
}

std::string render_series_csv(const TimeSeries& series, bool header) {
  const bool stamped = !series.timestamps.empty();
  if (stamped &&
      series.timestamps.size() != static_cast<std::size_t>(series.values.size())) {
    throw std::invalid_argument("series timestamp count mismatch");
  }
  std::string out;
  if (header) {
    out += stamped ? "timestamp,value\n" : "value\n";
  }
  for (Eigen::Index i = 0; i < series.values.size(); ++i) {
    if (stamped) {
      out += csv_quote(series.timestamps[static_cast<std::size_t>(i)]);
      out += ',';
    }
    out += format_double(series.values(i));
    out += '\n';
  }
  return out;
}

void write_series_csv(const std::string& path, const TimeSeries& series, bool header) {
  atomic_write_file(path, render_series_csv(series, header));
}

std::string render_bounds_csv(const std::vector<Eigen::Index>& indices,
                              const VectorXd& y, const VectorXd& lower,
                              const VectorXd& upper, const std::string& y_label) {
  const auto m = y.size();
  if (static_cast<Eigen::Index>(indices.size()) != m || lower.size() != m ||
      upper.size() != m) {
    throw std::invalid_argument("bounds table column lengths differ");
  }
  std::string out = "index," + csv_quote(y_label) + ",lower,upper\n";
  for (Eigen::Index i = 0; i < m; ++i) {
    out += std::to_string(indices[static_cast<std::size_t>(i)]);
    out += ',';
    out += format_double(y(i));
    out += ',';
    out += format_double(lower(i));
    out += ',';
    out += format_double(upper(i));
    out += '\n';
  }
  return out;
}

void write_bounds_csv(const std::string& path, const std::vector<Eigen::Index>& indices,
                      const VectorXd& y, const VectorXd& lower, const VectorXd& upper,
                      const std::string& y_label) {
  atomic_write_file(path, render_bounds_csv(indices, y, lower, upper, y_label));
}

}  // namespace kqr
