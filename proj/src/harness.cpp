// SPDX-License-Identifier: Apache-2.0
//
// ffrelay: joint FIR-relay and MIMO-OFDM transceiver design
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ffrelay/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ffrelay/altopt.hpp"
#include "ffrelay/blockmat.hpp"
#include "ffrelay/oracle.hpp"
#include "ffrelay/relayopt.hpp"
#include "ffrelay/rng.hpp"

namespace ffrelay {

const char kCsvHeader[] =
    "experiment,trial,sweep_value,l_r,metric_name,metric_value,iterations,seed";

Experiment parse_experiment(const std::string& name) {
  if (name == "mse_vs_relay_power") return Experiment::kMseVsRelayPower;
  if (name == "mse_vs_taps") return Experiment::kMseVsTaps;
  if (name == "ber_vs_relay_power") return Experiment::kBerVsRelayPower;
  if (name == "convergence") return Experiment::kConvergence;
  if (name == "rate_vs_relay_power") return Experiment::kRateVsRelayPower;
  if (name == "validate") return Experiment::kValidate;
  throw UsageError("unknown experiment: " + name);
}

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::kMseVsRelayPower: return "mse_vs_relay_power";
    case Experiment::kMseVsTaps: return "mse_vs_taps";
    case Experiment::kBerVsRelayPower: return "ber_vs_relay_power";
    case Experiment::kConvergence: return "convergence";
    case Experiment::kRateVsRelayPower: return "rate_vs_relay_power";
    case Experiment::kValidate: return "validate";
  }
  throw UsageError("unknown experiment enum value");
}

void ExperimentSpec::validate() const {
  if (experiment != Experiment::kValidate && sweep.empty()) {
    throw UsageError("sweep must be nonempty");
  }
  if (trials < 1) throw UsageError("trials must be >= 1");
  if (experiment == Experiment::kMseVsTaps) {
    for (double v : sweep) {
      if (v < 1.0 || v != std::floor(v)) {
        throw UsageError("tap sweep values must be positive integers");
      }
    }
  }
  try {
    base_config.validate();
  } catch (const InvalidDimensionError& e) {
    throw UsageError(std::string("invalid base config: ") + e.what());
  }
}

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

unsigned worker_count() {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("FFRELAY_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < n) {
      n = static_cast<unsigned>(cap);
    }
  }
  return n;
}

struct Task {
  int trial = 0;
  int sweep_index = 0;
};

SystemConfig config_for_point(const ExperimentSpec& spec, double sweep_value) {
  SystemConfig cfg = spec.base_config;
  if (spec.experiment == Experiment::kMseVsTaps) {
    cfg = cfg.with_relay_taps(static_cast<int>(sweep_value));
  } else {
    cfg.p_r_max = db_to_linear(sweep_value);
  }
  return cfg;
}

std::vector<ResultRow> run_task(const ExperimentSpec& spec, const Task& task) {
  const double sweep_value = spec.sweep[task.sweep_index];
  const SystemConfig cfg = config_for_point(spec, sweep_value);
  const std::uint64_t chan_seed =
      derive_seed(spec.seed, static_cast<std::uint64_t>(task.trial));
  const ChannelRealization ch = generate_channel(cfg, chan_seed);

  DesignResult result;
  if (spec.experiment == Experiment::kRateVsRelayPower) {
    result = algorithm2(cfg, ch);
  } else {
    result = algorithm1(cfg, ch, WeightMatrices::identity(cfg.n, cfg.gamma));
  }

  const std::string name = experiment_name(spec.experiment);
  std::vector<ResultRow> rows;
  const auto push = [&](const std::string& metric, double value) {
    rows.push_back(ResultRow{name, task.trial, sweep_value, cfg.l_r, metric,
                             value, result.iterations, chan_seed});
  };
  push("sum_mse", result.metrics.sum_mse);
  push("sum_rate_bits", result.metrics.sum_rate_bits);
  push("mean_ber", result.metrics.mean_ber);
  if (spec.experiment == Experiment::kConvergence) {
    // End-of-sweep weighted MSE values, one row per sweep.
    for (std::size_t i = 1; i < result.trace.size(); i += 2) {
      push("trace_sum_mse_sweep_" + std::to_string((i + 1) / 2),
           result.trace[i]);
    }
  }
  return rows;
}

void write_rows(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << "\n";
  for (const auto& row : rows) {
    out << row.experiment << ',' << row.trial << ','
        << format_double(row.sweep_value) << ',' << row.l_r << ','
        << row.metric_name << ',' << format_double(row.metric_value) << ','
        << row.iterations << ',' << row.seed << "\n";
  }
}

void write_sidecar(const ExperimentSpec& spec) {
  nlohmann::ordered_json j;
  j["experiment"] = experiment_name(spec.experiment);
  j["sweep"] = spec.sweep;
  j["trials"] = spec.trials;
  j["seed"] = spec.seed;
  j["config"] = nlohmann::ordered_json::parse(spec.base_config.to_json());
  std::ofstream out(spec.out_path + ".config.json");
  if (!out) {
    throw std::runtime_error("cannot write config sidecar next to " +
                             spec.out_path);
  }
  out << j.dump(2) << "\n";
}

void print_summary(const ExperimentSpec& spec,
                   const std::vector<ResultRow>& rows, std::ostream& out) {
  const std::string primary =
      spec.experiment == Experiment::kRateVsRelayPower ? "sum_rate_bits"
      : spec.experiment == Experiment::kBerVsRelayPower ? "mean_ber"
                                                        : "sum_mse";
  out << experiment_name(spec.experiment) << ": " << spec.trials
      << " trial(s), metric " << primary << "\n";
  for (double sweep_value : spec.sweep) {
    double sum = 0.0;
    double sumsq = 0.0;
    long count = 0;
    for (const auto& row : rows) {
      if (row.metric_name == primary && row.sweep_value == sweep_value) {
        sum += row.metric_value;
        sumsq += row.metric_value * row.metric_value;
        ++count;
      }
    }
    const double mean = sum / std::max<long>(count, 1);
    double se = 0.0;
    if (count > 1) {
      const double var =
          std::max(0.0, (sumsq / count - mean * mean) * count / (count - 1.0));
      se = std::sqrt(var / count);
    }
    out << "  sweep=" << sweep_value << "  mean=" << mean << "  se=" << se
        << "  (n=" << count << ")\n";
  }
}

}  // namespace

std::vector<ValidationItem> validate_library(std::uint64_t seed) {
  std::vector<ValidationItem> items;
  Crng rng(derive_seed(seed, 9001));

  SystemConfig cfg;  // defaults mirror the experimental setup
  cfg.l_r = 3;
  cfg.n_cp = cfg.min_cp();

  const auto random_matrix = [&rng](Eigen::Index r, Eigen::Index c) {
    CMatrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.cnormal(1.0);
    }
    return m;
  };

  // Reparameterized weighted MSE and relay power against the direct chain.
  {
    double worst_mse = 0.0;
    double worst_power = 0.0;
    for (int draw = 0; draw < 4; ++draw) {
      const ChannelRealization ch = generate_channel(cfg, derive_seed(seed, draw));
      RelayFilter relay;
      for (int l = 0; l < cfg.l_r; ++l) {
        relay.r_taps.push_back(random_matrix(cfg.m_t, cfg.m_r));
      }
      std::vector<CMatrix> v;
      std::vector<CMatrix> u;
      WeightMatrices theta;
      for (int n = 0; n < cfg.n; ++n) {
        v.push_back(random_matrix(cfg.n_t, cfg.gamma));
        u.push_back(random_matrix(cfg.gamma, cfg.n_r));
        RVector t(cfg.gamma);
        for (int k = 0; k < cfg.gamma; ++k) t(k) = 0.1 + rng.uniform_co();
        theta.theta.push_back(t);
      }
      const auto parts = assemble_mse_parts(cfg, ch, v, u, theta);
      const CVector r = relay_to_vec(relay);
      const auto quad = weighted_mse_quadratic(parts, r);
      const auto direct = weighted_mse_direct(cfg, ch, relay, v, u, theta);
      for (int n = 0; n < cfg.n; ++n) {
        worst_mse = std::max(worst_mse, std::abs(quad[n] - direct[n]) /
                                            (1.0 + std::abs(direct[n])));
      }
      const CMatrix pi = assemble_power_form(cfg, ch, v);
      const double via_form = r.dot(pi * r).real();
      const double via_chain = relay_power_direct(cfg, ch, relay, v);
      worst_power = std::max(worst_power, std::abs(via_form - via_chain) /
                                              (1.0 + std::abs(via_chain)));
    }
    items.push_back({"weighted MSE: quadratic vs direct", worst_mse, 1e-8});
    items.push_back({"relay power: quadratic vs direct", worst_power, 1e-8});
  }

  // Block circulant diagonalization.
  {
    double worst = 0.0;
    for (int draw = 0; draw < 5; ++draw) {
      BlockRow row;
      for (int l = 0; l < 8; ++l) row.blocks.push_back(random_matrix(2, 3));
      const CMatrix h_c = blk_circulant(row);
      const CMatrix w_rx = kron(dft_matrix(8).adjoint(), CMatrix::Identity(2, 2));
      const CMatrix w_tx = kron(dft_matrix(8), CMatrix::Identity(3, 3));
      const auto blocks = circulant_diag_blocks(row);
      std::vector<CMatrix> ordered(blocks.begin(), blocks.end());
      const CMatrix lhs = w_rx * h_c * w_tx;
      const CMatrix rhs = assemble_frame_blockdiag(ordered);
      worst = std::max(worst, (lhs - rhs).norm() / h_c.norm());
    }
    items.push_back({"circulant diagonalization", worst, 1e-9});
  }

  // Frequency-domain model, legal prefix and violated prefix.
  {
    const ChannelRealization ch = generate_channel(cfg, derive_seed(seed, 77));
    RelayFilter relay;
    for (int l = 0; l < cfg.l_r; ++l) {
      relay.r_taps.push_back(random_matrix(cfg.m_t, cfg.m_r));
    }
    items.push_back(
        {"frequency model (n_cp at bound)",
         verify_frequency_model(cfg, ch, relay), 1e-9});
    SystemConfig bad = cfg;
    bad.n_cp = cfg.min_cp() - 2;
    items.push_back({"frequency model, violated prefix (negative control)",
                     verify_frequency_model(bad, ch, relay), 1e-3, true});
  }

  // Selection identities.
  {
    const SelectionMatrices sel = selection_matrices(cfg);
    double worst = 0.0;
    for (int draw = 0; draw < 5; ++draw) {
      RelayFilter relay;
      for (int l = 0; l < cfg.l_r; ++l) {
        relay.r_taps.push_back(random_matrix(cfg.m_t, cfg.m_r));
      }
      const CVector r = relay_to_vec(relay);
      const CMatrix rm = relay_matrix(cfg, relay);
      worst = std::max(
          worst, (sel.e1.transpose().cast<Complex>() * r - vec(rm.transpose()))
                     .norm());
      worst = std::max(
          worst,
          (sel.e2.adjoint().cast<Complex>() * r - vec(rm)).norm());
    }
    items.push_back({"selection identities", worst, 0.0});
  }

  // QCQP hand instances and KKT residuals.
  {
    QcqpInstance scalar;
    scalar.big_q = CMatrix::Constant(1, 1, 1.0);
    scalar.q = CVector::Constant(1, 2.0);
    scalar.z = 4.0;
    scalar.pi = CMatrix::Constant(1, 1, 1.0);
    scalar.p_r_max = 1.0;
    const QcqpSolution sol = solve_relay_qcqp(scalar);
    double worst = std::abs(sol.objective - 1.0);
    worst = std::max(worst, std::abs(sol.mu - 1.0));
    worst = std::max(worst, std::abs(sol.r(0).real() - 1.0));
    for (int draw = 0; draw < 10; ++draw) {
      const int dim = 2 + draw;
      const CMatrix a = random_matrix(dim + 1, dim);
      const CMatrix b = random_matrix(dim, dim);
      QcqpInstance inst;
      inst.big_q = a.adjoint() * a;
      inst.q = CVector(random_matrix(dim, 1));
      inst.z = 1.0;
      inst.pi = b.adjoint() * b + CMatrix::Identity(dim, dim);
      inst.p_r_max = 0.5 + rng.uniform_co();
      const QcqpSolution s = solve_relay_qcqp(inst);
      worst = std::max(worst, s.kkt_residual / (inst.q.norm() + 1.0));
      worst = std::max(worst, std::max(0.0, -s.constraint_slack) / inst.p_r_max);
      worst = std::max(worst, std::abs(std::min(0.0, s.mu)));
    }
    items.push_back({"relay QCQP optimality", worst, 1e-7});
  }

  return items;
}

int run_experiment(const ExperimentSpec& spec, std::ostream& summary) {
  spec.validate();

  if (spec.experiment == Experiment::kValidate) {
    const auto items = validate_library(spec.seed);
    bool all_ok = true;
    for (const auto& item : items) {
      summary << (item.passed() ? "PASS" : "FAIL") << "  " << item.name
              << "  deviation=" << item.deviation
              << (item.invert ? "  (must exceed " : "  (must stay within ")
              << item.threshold << ")\n";
      all_ok = all_ok && item.passed();
    }
    return all_ok ? 0 : 1;
  }

  std::vector<Task> tasks;
  for (int trial = 0; trial < spec.trials; ++trial) {
    for (int sweep_index = 0; sweep_index < static_cast<int>(spec.sweep.size());
         ++sweep_index) {
      tasks.push_back(Task{trial, sweep_index});
    }
  }

  std::vector<std::vector<ResultRow>> per_task(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const unsigned workers =
      std::min<std::size_t>(worker_count(), tasks.size());
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned wk = 0; wk < workers; ++wk) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) break;
        try {
          per_task[i] = run_task(spec, tasks[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<ResultRow> rows;
  for (const auto& chunk : per_task) {
    rows.insert(rows.end(), chunk.begin(), chunk.end());
  }

  std::ofstream out(spec.out_path);
  if (!out) {
    summary << "error: cannot open output file " << spec.out_path << "\n";
    return 1;
  }
  write_rows(out, rows);
  if (!out.good()) {
    summary << "error: failed writing " << spec.out_path << "\n";
    return 1;
  }
  write_sidecar(spec);
  print_summary(spec, rows, summary);
  return 0;
}

}  // namespace ffrelay
