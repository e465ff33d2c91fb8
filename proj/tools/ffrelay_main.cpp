// SPDX-License-Identifier: Apache-2.0
//
// ffrelay: joint FIR-relay and MIMO-OFDM transceiver design
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ffrelay/harness.hpp"

namespace {

ffrelay::SystemConfig load_config(const std::string& path) {
  if (path.empty()) return ffrelay::SystemConfig{};
  std::ifstream in(path);
  if (!in) {
    throw ffrelay::UsageError("cannot read config file " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ffrelay::SystemConfig::from_json(buffer.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint FIR-relay and MIMO-OFDM transceiver design experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string experiment = "mse_vs_relay_power";
  std::vector<double> sweep;
  int trials = 50;
  std::uint64_t seed = 1;
  std::string out_path = "results.csv";

  CLI::App* run = app.add_subcommand("run", "run a Monte Carlo experiment");
  run->add_option("--config", config_path, "system config JSON file");
  run->add_option("--experiment", experiment,
                  "mse_vs_relay_power | mse_vs_taps | ber_vs_relay_power | "
                  "convergence | rate_vs_relay_power | validate");
  run->add_option("--sweep", sweep,
                  "comma-separated sweep values (relay power dB, or tap "
                  "counts for mse_vs_taps)")
      ->delimiter(',');
  run->add_option("--trials", trials, "channel realizations per sweep point");
  run->add_option("--seed", seed, "master seed");
  run->add_option("--out", out_path, "output CSV path");

  std::uint64_t validate_seed = 1;
  CLI::App* validate =
      app.add_subcommand("validate", "run the analytic self-check suite");
  validate->add_option("--seed", validate_seed, "seed for the random draws");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    ffrelay::ExperimentSpec spec;
    if (app.got_subcommand(validate)) {
      spec.experiment = ffrelay::Experiment::kValidate;
      spec.seed = validate_seed;
      spec.trials = 1;
    } else {
      spec.experiment = ffrelay::parse_experiment(experiment);
      spec.base_config = load_config(config_path);
      spec.sweep = sweep;
      spec.trials = trials;
      spec.seed = seed;
      spec.out_path = out_path;
    }
    return ffrelay::run_experiment(spec, std::cout);
  } catch (const ffrelay::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
