// SPDX-License-Identifier: Apache-2.0
//
// ffrelay: joint FIR-relay and MIMO-OFDM transceiver design
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef FFRELAY_ALTOPT_HPP
#define FFRELAY_ALTOPT_HPP

#include <cstdint>
#include <vector>

#include "ffrelay/quadforms.hpp"
#include "ffrelay/sysmodel.hpp"
#include "ffrelay/txrxopt.hpp"
#include "ffrelay/types.hpp"

namespace ffrelay {

struct AltOptOptions {
  double tol = 1e-6;   // relative weighted-MSE change at which to stop
  int max_iters = 50;  // cap on full relay/transceiver/allocation sweeps
  int restarts = 1;    // extra random initializations (1 = the default deterministic start)
  std::uint64_t restart_seed = 0;
};

struct Metrics {
  double sum_mse = 0.0;        // sum over streams of (d p - 1)^2 + 1
  double sum_rate_bits = 0.0;  // sum log2(1 + d^2 p^2)
  double mean_ber = 0.0;       // uncoded QPSK, averaged over streams
  RMatrix per_stream_snr;      // N x Gamma, d^2 p^2
};

struct DesignResult {
  RelayFilter relay;
  std::vector<SubcarrierTransceiver> transceivers;
  PowerAllocation allocation;
  WeightMatrices weights;      // final weights (updated per sweep in Alg. 2)
  std::vector<double> trace;   // weighted sum MSE: after relay update, after
                               // transceiver+allocation update, per sweep
  int iterations = 0;          // full sweeps executed
  bool converged = false;
  Metrics metrics;
};

/// Weighted-sum-MSE alternating optimization with fixed weights: per sweep,
/// the relay QCQP, then per-subcarrier whitened-SVD transceivers, then the
/// closed-form power split. From the first diagonalizing iterate onward the
/// recorded trace is nonincreasing (up to 1e-9 relative slack per step): a
/// genuine violation throws NumericalConsistencyError, and a stalled
/// transceiver refresh (possible because the construction fixes unit
/// effective noise) ends the run on the last consistent design instead of
/// oscillating. The sweep-1 transceiver entry replaces the arbitrary
/// initialization and is exempt.
DesignResult algorithm1(const SystemConfig& cfg, const ChannelRealization& ch,
                        const WeightMatrices& theta,
                        const AltOptOptions& opts = {});

/// Rate-targeting variant: starts from identity weights, refreshes them from
/// the eigen-gains after every relay update, and water-fills the source
/// power. Stops on the weighted-MSE change; monotonicity is enforced only
/// across steps that share the same weights.
DesignResult algorithm2(const SystemConfig& cfg, const ChannelRealization& ch,
                        const AltOptOptions& opts = {});

/// Gaussian tail probability Q(x).
double gaussian_tail(double x);

/// Link metrics from the parallel eigen-subchannel form (unit effective
/// noise): SNR = d^2 p^2, rate = sum log2(1+SNR), QPSK per-bit
/// BER = Q(sqrt(SNR)).
Metrics compute_metrics(const SystemConfig& cfg,
                        const std::vector<SubcarrierTransceiver>& transceivers,
                        const PowerAllocation& allocation);

}  // namespace ffrelay

#endif  // FFRELAY_ALTOPT_HPP
