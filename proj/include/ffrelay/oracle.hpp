// SPDX-License-Identifier: Apache-2.0
//
// ffrelay: joint FIR-relay and MIMO-OFDM transceiver design
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef FFRELAY_ORACLE_HPP
#define FFRELAY_ORACLE_HPP

#include <cstdint>
#include <vector>

#include "ffrelay/quadforms.hpp"
#include "ffrelay/sysmodel.hpp"
#include "ffrelay/types.hpp"

namespace ffrelay {

/// One OFDM symbol pushed through the literal time-domain signal chain.
struct TimeDomainFrame {
  CVector s;      // N Gamma symbols, frame stacking (subcarrier N-1 first)
  CVector x;      // N N_t time-domain signal
  CVector x_cp;   // (N + N_cp) N_t with cyclic prefix
  CVector n_r;    // relay noise, (N+L_g+L_r-2) M_r
  CVector y_t;    // relay transmit samples, (N+L_g-1) M_t
  CVector n_d;    // destination noise, N N_r
  CVector y_d;    // destination samples, N N_r
  CVector s_hat;  // N Gamma estimates, frame stacking
};

/// Sample statistics over simulated frames.
struct FrameStats {
  std::vector<CMatrix> mse_matrix;  // per subcarrier, avg (e e^H)
  std::vector<double> wmse_mean;    // per subcarrier, avg e^H Theta_n e
  std::vector<double> wmse_se;      // standard error of the above
  double wmse_total_mean = 0.0;     // avg of the per-frame subcarrier sums
  double wmse_total_se = 0.0;       // its standard error (frames correlate
                                    // the subcarriers, so this is not the
                                    // quadrature sum of the per-subcarrier
                                    // errors)
  double relay_power_mean = 0.0;    // avg tr(y_t y_t^H)
  double relay_power_se = 0.0;
  long num_frames = 0;
};

/// Draws s ~ CN(0, I), n_r ~ CN(0, sigma_r^2 I), n_d ~ CN(0, sigma_d^2 I) and
/// runs the matrix chain stage by stage (precode, IDFT, prefix, SR filter,
/// relay FIR, RD filter, DFT, per-subcarrier receive filters). Returns
/// sample-average error outer products, weighted error traces, and relay
/// transmit power. Frames are seeded independently by index.
FrameStats simulate_frames(const SystemConfig& cfg,
                           const ChannelRealization& ch,
                           const RelayFilter& relay,
                           const std::vector<CMatrix>& v,
                           const std::vector<CMatrix>& u,
                           const WeightMatrices& theta, long num_frames,
                           std::uint64_t seed);

/// Maximum per-column relative deviation between the noiseless time-domain
/// channel map (W^H (x) I) G R F T_cp (W (x) I) and the block-diagonal
/// frequency-domain map built from the effective subcarrier channels.
/// Expected <= 1e-9 whenever n_cp >= l_f + l_r + l_g - 3; large when the
/// prefix is too short (the config is deliberately not re-validated here so
/// that the violated bound can be probed as a negative control).
double verify_frequency_model(const SystemConfig& cfg,
                              const ChannelRealization& ch,
                              const RelayFilter& relay);

}  // namespace ffrelay

#endif  // FFRELAY_ORACLE_HPP
