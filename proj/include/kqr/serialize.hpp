// Versioned structured-text persistence for fitted models, prediction
// intervals, and conformal calibration evidence. Floats are written in
// shortest round-trip decimal form, so loading reproduces every value
// bit for bit.
#pragma once

#include "kqr/types.hpp"

#include <string>

namespace kqr {

// Single kernel expansion: kernel spec, bias, coefficient vector, and the
// support inputs, one row per line.
std::string render_model(const KernelModel& model);
KernelModel parse_model(const std::string& content);
void save_model(const std::string& path, const KernelModel& model);
KernelModel load_model(const std::string& path);

// A prediction interval is stored as a small header file (coverage target,
// interval placement, conformal offset) next to two model files named
// <stem>.lower.model and <stem>.upper.model. Loading resolves the model
// names relative to the header's directory.
void save_interval(const std::string& header_path, const PredictionInterval& interval);
PredictionInterval load_interval(const std::string& header_path);

// Calibration evidence: sorted scores, the selected rank, and the offset.
std::string render_calibration(const CalibrationResult& calibration);
CalibrationResult parse_calibration(const std::string& content);
void save_calibration(const std::string& path, const CalibrationResult& calibration);
CalibrationResult load_calibration(const std::string& path);

}  // namespace kqr
