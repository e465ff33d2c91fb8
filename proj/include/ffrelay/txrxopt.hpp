// SPDX-License-Identifier: Apache-2.0
//
// ffrelay: joint FIR-relay and MIMO-OFDM transceiver design
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef FFRELAY_TXRXOPT_HPP
#define FFRELAY_TXRXOPT_HPP

#include "ffrelay/types.hpp"

namespace ffrelay {

/// Channel-diagonalizing transceiver of one subcarrier: columns of v_tilde
/// are orthonormal, U H Vt = diag(d) with d >= 0 descending, and
/// U Sigma U^H = I (unit effective noise).
struct SubcarrierTransceiver {
  CMatrix v_tilde;  // N_t x Gamma
  CMatrix u;        // Gamma x N_r
  RVector d;        // Gamma eigen-gains
};

/// Source power split over the N x Gamma eigen-subchannels, with the duals
/// that certify it.
struct PowerAllocation {
  RMatrix p;        // N x Gamma stream amplitudes, >= 0
  double mu = 0.0;  // dual of the total-power equality
  RMatrix lambda;   // N x Gamma nonnegative duals of p >= 0
  bool degenerate = false;  // all gains were zero; uniform fallback
};

/// KKT residuals of an allocation for the weighted-MSE problem.
struct KktReport {
  double stationarity = 0.0;   // max |2 th d^2 p - 2 th d + 2 mu p - lambda|
  double primal_power = 0.0;   // |sum p^2 - P| / P
  double primal_sign = 0.0;    // max(-p, 0)
  double dual_sign = 0.0;      // max(-lambda, 0)
  double complementarity = 0.0;  // max |lambda p|
};

/// Whitened-SVD transceiver: with H_w = Sigma^{-1/2} H = A S B^H, take
/// v_tilde = top-Gamma right singular vectors, u = A_Gamma^H Sigma^{-1/2},
/// d = top-Gamma singular values. Throws PreconditionError when Sigma is
/// (numerically) singular.
SubcarrierTransceiver design_transceiver(const CMatrix& h, const CMatrix& sigma,
                                         int gamma);

/// Minimum weighted-MSE split of p_s_max over the eigen-subchannels:
/// p = theta d / (theta d^2 + mu) with mu the root of the power equality,
/// found by monotone bisection over the dual interval on which the curvature
/// theta d^2 + mu stays positive for every stream. Zero-gain streams bound
/// that interval at mu = 0: when the equality cannot bind there, they absorb
/// the spare budget (their error does not depend on their amplitude) while
/// live streams sit at 1/d. If every gain is zero the split is undefined and
/// a uniform allocation is returned with the degenerate flag set.
PowerAllocation allocate_power_mse(const RMatrix& theta, const RMatrix& d,
                                   double p_s_max);

/// Rate-optimal water-filling: p^2 = (1/nu - 1/d^2)_+ with the water level
/// fixed by the power equality (exact active-set solve).
PowerAllocation allocate_power_rate(const RMatrix& d, double p_s_max);

/// Rate-matching weights: the Gamma largest eigenvalues of H^H Sigma^{-1} H
/// in descending order, clamped below at 1e-12 to stay positive definite.
RVector rate_weights(const CMatrix& h, const CMatrix& sigma, int gamma);

/// Residuals of the four KKT conditions of the weighted-MSE allocation.
KktReport check_allocation_kkt(const RMatrix& theta, const RMatrix& d,
                               double p_s_max, const PowerAllocation& alloc);

}  // namespace ffrelay

#endif  // FFRELAY_TXRXOPT_HPP
