#pragma once

#include <CLI11.hpp>

namespace kqr::cli {

void register_generate(CLI::App& app);
void register_interval(CLI::App& app);
void register_featsel(CLI::App& app);
void register_conformal(CLI::App& app);
void register_forecast(CLI::App& app);
void register_gridsearch(CLI::App& app);
void register_evaluate(CLI::App& app);

}  // namespace kqr::cli
