// SPDX-License-Identifier: Apache-2.0
//
// ffrelay: joint FIR-relay and MIMO-OFDM transceiver design
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef FFRELAY_HARNESS_HPP
#define FFRELAY_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ffrelay/sysmodel.hpp"

namespace ffrelay {

/// Invalid user input (unknown experiment, empty sweep, bad trial count).
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

enum class Experiment {
  kMseVsRelayPower,
  kMseVsTaps,
  kBerVsRelayPower,
  kConvergence,
  kRateVsRelayPower,
  kValidate,
};

Experiment parse_experiment(const std::string& name);
std::string experiment_name(Experiment e);

struct ExperimentSpec {
  Experiment experiment = Experiment::kMseVsRelayPower;
  SystemConfig base_config;
  std::vector<double> sweep;  // relay powers in dB, or tap counts
  int trials = 50;
  std::uint64_t seed = 1;
  std::string out_path;

  void validate() const;
};

struct ResultRow {
  std::string experiment;
  int trial = 0;
  double sweep_value = 0.0;
  int l_r = 0;
  std::string metric_name;
  double metric_value = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;
};

/// One self-check of the validation suite.
struct ValidationItem {
  std::string name;
  double deviation = 0.0;
  double threshold = 0.0;
  bool invert = false;  // pass when deviation EXCEEDS threshold (negative
                        // controls)
  bool passed() const {
    return invert ? deviation > threshold : deviation <= threshold;
  }
};

/// Runs the analytic-equivalence and solver self-checks (reparameterization
/// vs direct evaluation, circulant diagonalization, frequency-domain model
/// with the prefix bound both honored and violated, selection identities,
/// QCQP optimality) and reports the observed deviations.
std::vector<ValidationItem> validate_library(std::uint64_t seed);

/// Exact CSV header emitted by run_experiment.
extern const char kCsvHeader[];

/// Runs the experiment described by spec: per (trial, sweep point) designs
/// the link with Algorithm 1 (MSE/BER experiments) or Algorithm 2 (rate),
/// writes one CSV row per metric plus a resolved-config JSON sidecar, and
/// prints per-sweep-point means with standard errors. Trials run on a worker
/// pool capped by FFRELAY_THREADS; row order does not depend on scheduling.
/// Returns a process exit code: 0 success, 1 internal/numerical or I/O
/// failure. Throws UsageError for an invalid spec (exit code 2 at the CLI).
int run_experiment(const ExperimentSpec& spec, std::ostream& summary);

}  // namespace ffrelay

#endif  // FFRELAY_HARNESS_HPP
