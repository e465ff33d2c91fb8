// SPDX-License-Identifier: Apache-2.0
//
// ffrelay: joint FIR-relay and MIMO-OFDM transceiver design
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef FFRELAY_QUADFORMS_HPP
#define FFRELAY_QUADFORMS_HPP

#include <vector>

#include "ffrelay/sysmodel.hpp"
#include "ffrelay/types.hpp"

namespace ffrelay {

/// Diagonal positive definite per-subcarrier weights.
struct WeightMatrices {
  std::vector<RVector> theta;  // N entries, each of length Gamma

  static WeightMatrices identity(int n, int gamma);
  void validate() const;
};

/// Complete data of the relay-filter subproblem:
///   min_r  r^H Q r - r^H q - q^H r + z   s.t.  r^H Pi r <= p_r_max.
struct QcqpInstance {
  CMatrix big_q;   // Hermitian PSD, relay_dim x relay_dim
  CVector q;       // relay_dim
  double z = 0.0;  // sum of c_n + tr(Theta_n), real >= 0
  CMatrix pi;      // Hermitian PD power form
  double p_r_max = 0.0;
};

/// Per-subcarrier pieces of the reparameterized weighted MSE,
/// tr(Theta_n M_n) = r^H Q_n r - r^H q_n - q_n^H r + z_n.
struct QuadraticMseParts {
  std::vector<CMatrix> q_n;   // Q_{1,n} + Q_{2,n}, Hermitian PSD
  std::vector<CVector> lin_n;  // q_n
  std::vector<double> z_n;     // c_n + tr(Theta_n)
};

/// Assembly route. The Kronecker route realizes the defining formulas with
/// explicit E1/E2 and I (x) K products; the structured route exploits the
/// selection structure (same numbers, no large intermediates) and is the
/// default. Both must agree to 1e-10; a test enforces it.
enum class AssemblyMode { kStructured, kKronecker };

/// Signal quadratic forms Q_{1,n} (one per subcarrier).
std::vector<CMatrix> assemble_q1(const SystemConfig& cfg,
                                 const ChannelRealization& ch,
                                 const std::vector<CMatrix>& v,
                                 const std::vector<CMatrix>& u,
                                 const WeightMatrices& theta,
                                 AssemblyMode mode = AssemblyMode::kStructured);

/// Relay-noise quadratic forms Q_{2,n} and offsets
/// c_n = sigma_d^2 tr(Theta_n U_n U_n^H).
std::pair<std::vector<CMatrix>, std::vector<double>> assemble_q2_c(
    const SystemConfig& cfg, const ChannelRealization& ch,
    const std::vector<CMatrix>& u, const WeightMatrices& theta,
    AssemblyMode mode = AssemblyMode::kStructured);

/// Cross-term vectors q_n.
std::vector<CVector> assemble_q(const SystemConfig& cfg,
                                const ChannelRealization& ch,
                                const std::vector<CMatrix>& v,
                                const std::vector<CMatrix>& u,
                                const WeightMatrices& theta,
                                AssemblyMode mode = AssemblyMode::kStructured);

/// Relay transmit power form: E tr(y_t y_t^H) = r^H Pi r.
CMatrix assemble_power_form(const SystemConfig& cfg,
                            const ChannelRealization& ch,
                            const std::vector<CMatrix>& v,
                            AssemblyMode mode = AssemblyMode::kStructured);

/// All per-subcarrier pieces in one pass.
QuadraticMseParts assemble_mse_parts(
    const SystemConfig& cfg, const ChannelRealization& ch,
    const std::vector<CMatrix>& v, const std::vector<CMatrix>& u,
    const WeightMatrices& theta,
    AssemblyMode mode = AssemblyMode::kStructured);

/// Aggregated QCQP data (Q = sum Q_n etc.).
QcqpInstance build_qcqp_instance(
    const SystemConfig& cfg, const ChannelRealization& ch,
    const std::vector<CMatrix>& v, const std::vector<CMatrix>& u,
    const WeightMatrices& theta,
    AssemblyMode mode = AssemblyMode::kStructured);

/// Per-subcarrier weighted MSE evaluated through the quadratic pieces.
/// Throws NumericalConsistencyError if an imaginary residue above
/// 1e-9 (1 + |value|) survives.
std::vector<double> weighted_mse_quadratic(const QuadraticMseParts& parts,
                                           const CVector& r);

/// Per-subcarrier weighted MSE evaluated from the matrix signal chain with
/// exact second-order statistics (E ss^H = I and the noise covariances); the
/// independent route the quadratic pieces are checked against.
std::vector<double> weighted_mse_direct(const SystemConfig& cfg,
                                        const ChannelRealization& ch,
                                        const RelayFilter& relay,
                                        const std::vector<CMatrix>& v,
                                        const std::vector<CMatrix>& u,
                                        const WeightMatrices& theta);

/// E tr(y_t y_t^H) evaluated from the matrix chain (no reparameterization).
double relay_power_direct(const SystemConfig& cfg,
                          const ChannelRealization& ch,
                          const RelayFilter& relay,
                          const std::vector<CMatrix>& v);

}  // namespace ffrelay

#endif  // FFRELAY_QUADFORMS_HPP
