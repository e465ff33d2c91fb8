// SPDX-License-Identifier: Apache-2.0
//
// ffrelay: joint FIR-relay and MIMO-OFDM transceiver design
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef FFRELAY_SYSMODEL_HPP
#define FFRELAY_SYSMODEL_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ffrelay/blockmat.hpp"
#include "ffrelay/types.hpp"

namespace ffrelay {

/// All dimensions, filter lengths, noise powers, and power budgets of the
/// relay-assisted MIMO-OFDM link. Powers and variances are linear (not dB).
struct SystemConfig {
  int n = 16;       // OFDM subcarriers
  int n_t = 2;      // source transmit antennas
  int m_r = 2;      // relay receive antennas
  int m_t = 2;      // relay transmit antennas
  int n_r = 2;      // destination receive antennas
  int gamma = 2;    // data streams per subcarrier
  int l_f = 3;      // source-relay channel taps
  int l_r = 4;      // relay FIR filter taps
  int l_g = 3;      // relay-destination channel taps
  int n_cp = 7;     // cyclic prefix length
  double sigma_r2 = 1.0;   // relay noise variance
  double sigma_d2 = 1.0;   // destination noise variance
  double p_s_max = 100.0;  // source power budget
  double p_r_max = 100.0;  // relay power budget
  double sigma_f2 = 1.0;   // SR tap variance
  double sigma_g2 = 1.0;   // RD tap variance

  /// Shortest cyclic prefix covering the overall FIR channel.
  int min_cp() const { return l_f + l_r + l_g - 3; }

  /// Throws InvalidDimensionError on any violated invariant
  /// (counts >= 1, gamma <= min antenna count, n_cp >= min_cp, powers > 0,
  /// variances >= 0).
  void validate() const;

  /// Copy with a different relay filter length; n_cp is re-minimized when the
  /// source config used the minimal prefix, otherwise kept if still legal.
  SystemConfig with_relay_taps(int taps) const;

  // Derived stacking sizes (valid after validate()).
  int relay_dim() const { return m_t * l_r * m_r; }          // length of r
  int relay_rows() const { return (n + l_g - 1) * m_t; }     // rows of R
  int relay_cols() const { return (n + l_g + l_r - 2) * m_r; }  // cols of R

  std::string to_json() const;
  static SystemConfig from_json(const std::string& text);
};

/// One random draw of the SR taps {F_k} (M_r x N_t) and RD taps {G_k}
/// (N_r x M_t).
struct ChannelRealization {
  std::vector<CMatrix> f_taps;
  std::vector<CMatrix> g_taps;
};

/// Relay FIR filter bank: L_r taps, each M_t x M_r.
struct RelayFilter {
  std::vector<CMatrix> r_taps;
};

/// Effective flat MIMO channel and noise covariance seen by one subcarrier.
struct SubcarrierChannel {
  CMatrix h;       // N_r x N_t, includes the sqrt(N) DFT gain
  CMatrix sigma;   // N_r x N_r Hermitian PD
};

/// i.i.d. Rayleigh taps, entries CN(0, sigma_f2) / CN(0, sigma_g2),
/// reproducible from the seed.
ChannelRealization generate_channel(const SystemConfig& cfg,
                                    std::uint64_t seed);

/// Cyclic-prefix insertion matrix T_cp ((N+N_cp)N_t x N N_t) and the column
/// truncation matrix T ((N + L_f+L_r+L_g-3) N_t x N N_t).
std::pair<CMatrix, CMatrix> build_cp_matrices(const SystemConfig& cfg);

/// Zero-padded first row block of the RD filtering matrix:
/// [G_0 ... G_{L_g-1} 0 ... 0], size N_r x M_t (N+L_g-1).
CMatrix g_tilde(const SystemConfig& cfg, const ChannelRealization& ch);

/// Realized filtering matrices of the signal chain.
CMatrix relay_matrix(const SystemConfig& cfg, const RelayFilter& relay);
CMatrix sr_matrix(const SystemConfig& cfg, const ChannelRealization& ch);
CMatrix rd_matrix(const SystemConfig& cfg, const ChannelRealization& ch);
/// SR filtering matrix with its input window matched to N + N_cp blocks (the
/// transmitted frame length); equals sr_matrix at the minimal prefix.
CMatrix sr_matrix_window(const SystemConfig& cfg,
                         const ChannelRealization& ch);

/// Subcarrier combining vector w_n, entries exp(+i 2 pi (N-n-1) l / N) /
/// sqrt(N). The effective channel is sqrt(N) Hc_first (w_n (x) I_{N_t}); the
/// receive-side projections apply w_n^H (x) I_{N_r}. (This orientation is the
/// one that makes the DFT diagonalization identity hold; the tests pin it.)
CVector subcarrier_vector(int n_sub, int n);

/// Effective per-subcarrier channels H_n = sqrt(N) Gt R F T (w_n^H (x) I)^T
/// and noise covariances Sigma_n, for n = 0..N-1 in ascending order.
std::vector<SubcarrierChannel> effective_subcarrier_channels(
    const SystemConfig& cfg, const ChannelRealization& ch,
    const RelayFilter& relay);

/// Relay tap vectorization r = vec(Rbar^T) and its inverse.
CVector relay_to_vec(const RelayFilter& relay);
RelayFilter vec_to_relay(const SystemConfig& cfg, const CVector& r);

/// Frame-order (descending subcarrier index) block diagonal stacking; the one
/// place where per-subcarrier lists are reversed into the stacked layout.
CMatrix assemble_frame_blockdiag(const std::vector<CMatrix>& per_subcarrier);

}  // namespace ffrelay

#endif  // FFRELAY_SYSMODEL_HPP
