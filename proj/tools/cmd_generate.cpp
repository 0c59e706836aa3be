#include "commands.hpp"
#include "common.hpp"

#include "kqr/csv.hpp"
#include "kqr/datagen.hpp"

#include <memory>

namespace kqr::cli {

namespace {

struct GenerateOptions {
  std::string config_path;
  std::string ad = "AD1";
  long long m = 300;
  std::uint64_t seed = 0;
  std::string noise_scale = "stddev";
  bool header = true;
  std::string out;
};

void run(const GenerateOptions& options) {
  require_value(options.out, "--out");
  const AdId ad = ad_from_string(options.ad);
  const NoiseScale scale = noise_scale_from_string(options.noise_scale);
  if (options.m < 1) {
    throw std::invalid_argument("--m must be at least 1");
  }

  ConfigEcho echo;
  echo.add("ad", options.ad);
  echo.add("m", options.m);
  echo.add("seed", options.seed);
  echo.add("noise-scale", options.noise_scale);
  echo.add("header", options.header);
  echo.add("out", options.out);
  echo.print("generate");

  const Dataset data = generate_ad(ad, options.m, options.seed, scale);
  OutputGuard guard;
  guard.track(options.out);
  write_dataset_csv(options.out, data, options.header);
  guard.commit();
}

}  // namespace

void register_generate(CLI::App& app) {
  auto options = std::make_shared<GenerateOptions>();
  CLI::App* cmd = app.add_subcommand(
      "generate", "sample a synthetic regression dataset to CSV");
  add_config_option(*cmd, options->config_path);
  cmd->add_option("--ad", options->ad, "generator name: AD1..AD6 (default: AD1)");
  cmd->add_option("--m", options->m, "number of rows (default: 300)");
  cmd->add_option("--seed", options->seed, "random seed (default: 0)");
  cmd->add_option("--noise-scale", options->noise_scale,
                  "read the normal noise parameter as stddev or variance");
  cmd->add_flag("--header,!--no-header", options->header,
                "write a column-name header row (default: on)");
  cmd->add_option("--out", options->out, "output CSV path (required)");
  cmd->callback([options, cmd] {
    apply_config_file(*cmd, options->config_path);
    run(*options);
  });
}

}  // namespace kqr::cli
