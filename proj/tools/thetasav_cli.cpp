// Command-line driver: `thetasav run --config FILE [--key value ...]`.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "thetasav/config.hpp"
#include "thetasav/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Energy-stable phase-field / flow solver"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "Run an experiment");
  std::string config_path;
  run->add_option("--config", config_path, "key = value configuration file");

  std::map<std::string, std::string> flags;
  for (const std::string& key : thetasav::config_keys()) {
    run->add_option("--" + key, flags[key], "override '" + key + "'");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : thetasav::kExitConfig;
  }

  try {
    thetasav::ConfigMap overrides;
    for (const auto& [key, value] : flags) {
      if (run->count("--" + key) > 0) overrides[key] = value;
    }
    const thetasav::ConfigMap file =
        config_path.empty() ? thetasav::ConfigMap{} : thetasav::read_config_file(config_path);
    const thetasav::RunConfig cfg = thetasav::build_config(file, overrides);
    const thetasav::RunOutcome outcome = thetasav::run(cfg, std::cout);
    if (outcome.exit_code != thetasav::kExitOk) std::cerr << "error: " << outcome.message << '\n';
    return outcome.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return thetasav::exit_code_for(e);
  }
}
