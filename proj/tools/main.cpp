#include "commands.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"kernel quantile regression toolkit: prediction intervals, sparse "
               "feature selection, split-conformal calibration, and interval "
               "forecasting"};
  app.require_subcommand(1);

  kqr::cli::register_generate(app);
  kqr::cli::register_interval(app);
  kqr::cli::register_featsel(app);
  kqr::cli::register_conformal(app);
  kqr::cli::register_forecast(app);
  kqr::cli::register_gridsearch(app);
  kqr::cli::register_evaluate(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
