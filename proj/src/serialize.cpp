#include "kqr/serialize.hpp"

#include "kqr/io.hpp"
#include "kqr/kernel.hpp"

#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace kqr {

namespace {

constexpr std::string_view kModelMagic = "kqr-model v1";
constexpr std::string_view kIntervalMagic = "kqr-interval v1";
constexpr std::string_view kCalibrationMagic = "kqr-calibration v1";

std::vector<std::string> split_lines(const std::string& content) {
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
  return lines;
}

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream stream(line);
  std::string token;
  while (stream >> token) tokens.push_back(std::move(token));
  return tokens;
}

// Sequential reader over "key value..." lines with strict key order.
class LineReader {
 public:
  explicit LineReader(const std::string& content) : lines_(split_lines(content)) {}

  void expect_magic(std::string_view magic) {
    const std::string line = next(std::string(magic).c_str());
    if (line != magic) {
      throw std::runtime_error("unsupported file format: expected \"" +
                               std::string(magic) + "\", got \"" + line + "\"");
    }
  }

  // Line "key <rest>"; returns <rest>.
  std::string value(const char* key) {
    const std::string line = next(key);
    const std::string prefix = std::string(key) + " ";
    if (line.rfind(prefix, 0) != 0) {
      throw std::runtime_error(std::string("expected \"") + key + " ...\", got \"" +
                               line + "\"");
    }
    return line.substr(prefix.size());
  }

  void keyword(const char* key) {
    const std::string line = next(key);
    if (line != key) {
      throw std::runtime_error(std::string("expected \"") + key + "\", got \"" +
                               line + "\"");
    }
  }

  std::string next(const char* what) {
    if (pos_ >= lines_.size()) {
      throw std::runtime_error(std::string("truncated file: expected ") + what);
    }
    return lines_[pos_++];
  }

  void expect_end() {
    if (pos_ != lines_.size()) {
      throw std::runtime_error("trailing content after record: \"" + lines_[pos_] +
                               "\"");
    }
  }

 private:
  std::vector<std::string> lines_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string render_model(const KernelModel& model) {
  if (model.support_inputs.rows() != model.coefficients.size()) {
    throw std::invalid_argument("model coefficient count differs from support rows");
  }
  std::string out(kModelMagic);
  out += '\n';
  out += "kernel ";
  out += to_string(model.kernel.family);
  out += "\nwidth " + format_double(model.kernel.width);
  out += "\nbias " + format_double(model.bias);
  out += "\nsupport_rows " + std::to_string(model.support_inputs.rows());
  out += "\nsupport_cols " + std::to_string(model.support_inputs.cols());
  out += "\ncoefficients\n";
  for (Eigen::Index i = 0; i < model.coefficients.size(); ++i) {
    out += format_double(model.coefficients(i));
    out += '\n';
  }
  out += "support\n";
  for (Eigen::Index i = 0; i < model.support_inputs.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.support_inputs.cols(); ++j) {
      if (j > 0) out += ' ';
      out += format_double(model.support_inputs(i, j));
    }
    out += '\n';
  }
  return out;
}

KernelModel parse_model(const std::string& content) {
  LineReader reader(content);
  reader.expect_magic(kModelMagic);
  KernelModel model;
  model.kernel.family = kernel_family_from_string(reader.value("kernel"));
  model.kernel.width = parse_double(reader.value("width"), "kernel width");
  model.bias = parse_double(reader.value("bias"), "bias");
  const long long rows = parse_int(reader.value("support_rows"), "support_rows");
  const long long cols = parse_int(reader.value("support_cols"), "support_cols");
  if (rows < 0 || cols < 0) {
    throw std::runtime_error("negative dimensions in model file");
  }
  reader.keyword("coefficients");
  model.coefficients.resize(rows);
  for (long long i = 0; i < rows; ++i) {
    model.coefficients(i) = parse_double(reader.next("a coefficient"), "coefficient");
  }
  reader.keyword("support");
  model.support_inputs.resize(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    const auto tokens = split_tokens(reader.next("a support row"));
    if (static_cast<long long>(tokens.size()) != cols) {
      throw std::runtime_error("support row " + std::to_string(i) + " has " +
                               std::to_string(tokens.size()) + " values, expected " +
                               std::to_string(cols));
    }
    for (long long j = 0; j < cols; ++j) {
      model.support_inputs(i, j) =
          parse_double(tokens[static_cast<std::size_t>(j)], "support value");
    }
  }
  reader.expect_end();
  return model;
}

void save_model(const std::string& path, const KernelModel& model) {
  atomic_write_file(path, render_model(model));
}

KernelModel load_model(const std::string& path) {
  try {
    return parse_model(read_text_file(path));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

namespace {

// pi.interval -> pi.lower.model / pi.upper.model beside the header.
std::pair<std::filesystem::path, std::filesystem::path> interval_model_paths(
    const std::filesystem::path& header_path) {
  const std::filesystem::path stem = header_path.stem();
  const std::filesystem::path dir = header_path.parent_path();
  return {dir / (stem.string() + ".lower.model"),
          dir / (stem.string() + ".upper.model")};
}

}  // namespace

void save_interval(const std::string& header_path, const PredictionInterval& interval) {
  const auto [lower_path, upper_path] =
      interval_model_paths(std::filesystem::path(header_path));
  save_model(lower_path.string(), interval.lower);
  save_model(upper_path.string(), interval.upper);
  std::string out(kIntervalMagic);
  out += '\n';
  out += "coverage_target " + format_double(interval.coverage_target);
  out += "\nq_bar " + format_double(interval.q_bar);
  out += "\nconformal_offset " + format_double(interval.conformal_offset);
  out += "\nlower_model " + lower_path.filename().string();
  out += "\nupper_model " + upper_path.filename().string();
  out += '\n';
  atomic_write_file(header_path, out);
}

PredictionInterval load_interval(const std::string& header_path) {
  PredictionInterval interval;
  std::string lower_name;
  std::string upper_name;
  try {
    LineReader reader(read_text_file(header_path));
    reader.expect_magic(kIntervalMagic);
    interval.coverage_target =
        parse_double(reader.value("coverage_target"), "coverage_target");
    interval.q_bar = parse_double(reader.value("q_bar"), "q_bar");
    interval.conformal_offset =
        parse_double(reader.value("conformal_offset"), "conformal_offset");
    lower_name = reader.value("lower_model");
    upper_name = reader.value("upper_model");
    reader.expect_end();
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(header_path + ": " + e.what());
  }
  const std::filesystem::path dir =
      std::filesystem::path(header_path).parent_path();
  interval.lower = load_model((dir / lower_name).string());
  interval.upper = load_model((dir / upper_name).string());
  return interval;
}

std::string render_calibration(const CalibrationResult& calibration) {
  std::string out(kCalibrationMagic);
  out += '\n';
  out += "alpha " + format_double(calibration.alpha);
  out += "\noffset " + format_double(calibration.offset);
  out += "\nlevel_index " + std::to_string(calibration.level_index);
  out += "\ndegenerate " + std::string(calibration.degenerate ? "1" : "0");
  out += "\nscore_count " + std::to_string(calibration.scores.size());
  out += "\nscores\n";
  for (Eigen::Index i = 0; i < calibration.scores.size(); ++i) {
    out += format_double(calibration.scores(i));
    out += '\n';
  }
  return out;
}

CalibrationResult parse_calibration(const std::string& content) {
  LineReader reader(content);
  reader.expect_magic(kCalibrationMagic);
  CalibrationResult calibration;
  calibration.alpha = parse_double(reader.value("alpha"), "alpha");
  calibration.offset = parse_double(reader.value("offset"), "offset");
  calibration.level_index =
      static_cast<Eigen::Index>(parse_int(reader.value("level_index"), "level_index"));
  const long long degenerate = parse_int(reader.value("degenerate"), "degenerate");
  if (degenerate != 0 && degenerate != 1) {
    throw std::runtime_error("degenerate flag must be 0 or 1");
  }
  calibration.degenerate = degenerate == 1;
  const long long count = parse_int(reader.value("score_count"), "score_count");
  if (count < 0) {
    throw std::runtime_error("negative score_count");
  }
  reader.keyword("scores");
  calibration.scores.resize(count);
  for (long long i = 0; i < count; ++i) {
    calibration.scores(i) = parse_double(reader.next("a score"), "score");
  }
  reader.expect_end();
  return calibration;
}

void save_calibration(const std::string& path, const CalibrationResult& calibration) {
  atomic_write_file(path, render_calibration(calibration));
}

CalibrationResult load_calibration(const std::string& path) {
  try {
    return parse_calibration(read_text_file(path));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace kqr
