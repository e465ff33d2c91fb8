// SPDX-License-Identifier: Apache-2.0
//
// ffrelay: joint FIR-relay and MIMO-OFDM transceiver design
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef FFRELAY_RELAYOPT_HPP
#define FFRELAY_RELAYOPT_HPP

#include <utility>
#include <vector>

#include "ffrelay/quadforms.hpp"
#include "ffrelay/types.hpp"

namespace ffrelay {

/// Global solution of the single-constraint relay QCQP together with its
/// optimality certificate.
struct QcqpSolution {
  CVector r;
  double mu = 0.0;               // dual of the power constraint, >= 0
  double objective = 0.0;        // r^H Q r - 2 Re(r^H q) + z
  double kkt_residual = 0.0;     // ||(Q + mu Pi) r - q||
  double constraint_slack = 0.0; // p_r_max - r^H Pi r
  // Every (mu, r(mu)^H Pi r(mu)) pair evaluated while bracketing/bisecting;
  // the constraint value is strictly decreasing in mu.
  std::vector<std::pair<double, double>> bisection_trace;
};

/// Homogenized matrices of the lifted problem:
///   min tr(B1 R) s.t. tr(B2 R) <= 0, R = rr^H.
struct HomogenizedForm {
  CMatrix b1;
  CMatrix b2;
};

/// Exact solve of  min r^H Q r - r^H q - q^H r + z  s.t.  r^H Pi r <= P.
/// Q PSD and Pi PD make the problem convex, so the KKT point found by dual
/// bisection is the global minimizer: if the (minimum-norm) unconstrained
/// stationary point is feasible it is returned with mu = 0; otherwise mu > 0
/// is bracketed by doubling and bisected until r(mu)^H Pi r(mu) hits P to
/// 1e-10 relative. Throws PreconditionError when Q is not PSD-Hermitian or
/// Pi is not PD.
QcqpSolution solve_relay_qcqp(const QcqpInstance& inst);

HomogenizedForm homogenize(const QcqpInstance& inst);

}  // namespace ffrelay

#endif  // FFRELAY_RELAYOPT_HPP
