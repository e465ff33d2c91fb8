// SPDX-License-Identifier: Apache-2.0
//
// ffrelay: joint FIR-relay and MIMO-OFDM transceiver design
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ffrelay/relayopt.hpp"

#include <cmath>

namespace ffrelay {

namespace {

double objective_value(const QcqpInstance& inst, const CVector& r) {
  const Complex quad = r.dot(inst.big_q * r);
  const Complex cross = r.dot(inst.q);
  return quad.real() - 2.0 * cross.real() + inst.z;
}

double constraint_value(const QcqpInstance& inst, const CVector& r) {
  return r.dot(inst.pi * r).real();
}

// r(mu) = (Q + mu Pi)^{-1} q; Q + mu Pi is PD for every mu > 0 and for mu = 0
// with nonsingular Q.
CVector shifted_solve(const QcqpInstance& inst, double mu) {
  const CMatrix lhs = inst.big_q + mu * inst.pi;
  Eigen::LDLT<CMatrix> ldlt(lhs);
  return ldlt.solve(inst.q);
}

}  // namespace

QcqpSolution solve_relay_qcqp(const QcqpInstance& inst) {
  const Eigen::Index dim = inst.big_q.rows();
  if (inst.big_q.cols() != dim || inst.q.size() != dim ||
      inst.pi.rows() != dim || inst.pi.cols() != dim) {
    throw InvalidDimensionError("solve_relay_qcqp: inconsistent sizes");
  }
  if (inst.p_r_max <= 0.0) {
    throw PreconditionError("solve_relay_qcqp: power budget must be > 0");
  }
  const double q_scale = inst.big_q.norm();
  if ((inst.big_q - inst.big_q.adjoint()).norm() > 1e-10 * (1.0 + q_scale)) {
    throw PreconditionError("solve_relay_qcqp: Q is not Hermitian");
  }
  if ((inst.pi - inst.pi.adjoint()).norm() > 1e-10 * (1.0 + inst.pi.norm())) {
    throw PreconditionError("solve_relay_qcqp: Pi is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> q_eig(inst.big_q);
  Eigen::SelfAdjointEigenSolver<CMatrix> pi_eig(inst.pi);
  const double q_max = q_eig.eigenvalues().maxCoeff();
  if (q_eig.eigenvalues().minCoeff() < -1e-9 * std::max(q_max, 1.0)) {
    throw PreconditionError("solve_relay_qcqp: Q is not PSD");
  }
  if (pi_eig.eigenvalues().minCoeff() <= 0.0) {
    throw PreconditionError("solve_relay_qcqp: Pi is not PD");
  }

  QcqpSolution sol;
  if (inst.q.norm() == 0.0) {
    sol.r = CVector::Zero(dim);
    sol.mu = 0.0;
    sol.objective = inst.z;
    sol.kkt_residual = 0.0;
    sol.constraint_slack = inst.p_r_max;
    return sol;
  }

  // Minimum-norm unconstrained stationary point, when one exists.
  const double rank_tol = 1e-12 * std::max(q_max, 1.0);
  CVector pinv_coeffs = q_eig.eigenvectors().adjoint() * inst.q;
  for (Eigen::Index i = 0; i < dim; ++i) {
    pinv_coeffs(i) = q_eig.eigenvalues()(i) > rank_tol
                         ? pinv_coeffs(i) / q_eig.eigenvalues()(i)
                         : Complex(0.0, 0.0);
  }
  const CVector r0 = q_eig.eigenvectors() * pinv_coeffs;
  const bool consistent =
      (inst.big_q * r0 - inst.q).norm() <= 1e-9 * (inst.q.norm() + 1.0);
  if (consistent && constraint_value(inst, r0) <= inst.p_r_max) {
    sol.r = r0;
    sol.mu = 0.0;
    sol.objective = objective_value(inst, r0);
    sol.kkt_residual = (inst.big_q * r0 - inst.q).norm();
    sol.constraint_slack = inst.p_r_max - constraint_value(inst, r0);
    return sol;
  }

  // The constraint binds. r(mu)^H Pi r(mu) decreases strictly in mu, so
  // bracket by doubling and bisect.
  double mu_hi = 1.0;
  double value_hi = constraint_value(inst, shifted_solve(inst, mu_hi));
  sol.bisection_trace.emplace_back(mu_hi, value_hi);
  int doublings = 0;
  while (value_hi > inst.p_r_max && doublings < 60) {
    mu_hi *= 2.0;
    value_hi = constraint_value(inst, shifted_solve(inst, mu_hi));
    sol.bisection_trace.emplace_back(mu_hi, value_hi);
    ++doublings;
  }
  if (value_hi > inst.p_r_max) {
    throw NumericalConsistencyError(
        "solve_relay_qcqp: failed to bracket the dual variable");
  }
  double mu_lo = 0.0;  // constraint value above P (possibly +inf) there
  for (int it = 0; it < 200; ++it) {
    const double gap = value_hi - inst.p_r_max;  // <= 0 on the feasible side
    if (std::abs(gap) <= 1e-10 * inst.p_r_max &&
        mu_hi * std::abs(gap) <= 1e-7 * inst.p_r_max) {
      break;
    }
    const double mid = 0.5 * (mu_lo + mu_hi);
    if (mid == mu_lo || mid == mu_hi) break;
    const double value_mid = constraint_value(inst, shifted_solve(inst, mid));
    sol.bisection_trace.emplace_back(mid, value_mid);
    if (value_mid > inst.p_r_max) {
      mu_lo = mid;
    } else {
      mu_hi = mid;
      value_hi = value_mid;
    }
  }
  sol.mu = mu_hi;
  sol.r = shifted_solve(inst, mu_hi);
  sol.objective = objective_value(inst, sol.r);
  sol.kkt_residual = ((inst.big_q + sol.mu * inst.pi) * sol.r - inst.q).norm();
  sol.constraint_slack = inst.p_r_max - constraint_value(inst, sol.r);
  return sol;
}

HomogenizedForm homogenize(const QcqpInstance& inst) {
  const Eigen::Index dim = inst.big_q.rows();
  HomogenizedForm form;
  form.b1 = CMatrix::Zero(dim + 1, dim + 1);
  form.b1.topLeftCorner(dim, dim) = inst.big_q;
  form.b1.topRightCorner(dim, 1) = -inst.q;
  form.b1.bottomLeftCorner(1, dim) = -inst.q.adjoint();
  form.b1(dim, dim) = inst.z;
  form.b2 = CMatrix::Zero(dim + 1, dim + 1);
  form.b2.topLeftCorner(dim, dim) = inst.pi;
  form.b2(dim, dim) = -inst.p_r_max;
  return form;
}

}  // namespace ffrelay
