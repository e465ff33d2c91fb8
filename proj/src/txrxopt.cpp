// SPDX-License-Identifier: Apache-2.0
//
// ffrelay: joint FIR-relay and MIMO-OFDM transceiver design
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ffrelay/txrxopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace ffrelay {

namespace {

CMatrix inverse_sqrt(const CMatrix& sigma) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(sigma);
  const double max_ev = eig.eigenvalues().maxCoeff();
  if (eig.eigenvalues().minCoeff() <= 1e-14 * std::max(max_ev, 1.0)) {
    throw PreconditionError("design_transceiver: Sigma is singular");
  }
  const RVector inv_sqrt = eig.eigenvalues().cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * inv_sqrt.asDiagonal() *
         eig.eigenvectors().adjoint();
}

}  // namespace

SubcarrierTransceiver design_transceiver(const CMatrix& h,
                                         const CMatrix& sigma, int gamma) {
  if (sigma.rows() != h.rows() || sigma.cols() != h.rows()) {
    throw InvalidDimensionError("design_transceiver: Sigma must be N_r x N_r");
  }
  if (gamma < 1 || gamma > std::min(h.rows(), h.cols())) {
    throw InvalidDimensionError("design_transceiver: bad stream count");
  }
  const CMatrix whitener = inverse_sqrt(sigma);
  const CMatrix h_w = whitener * h;
  Eigen::JacobiSVD<CMatrix> svd(h_w, Eigen::ComputeThinU | Eigen::ComputeThinV);

  SubcarrierTransceiver out;
  out.v_tilde = svd.matrixV().leftCols(gamma);
  out.u = svd.matrixU().leftCols(gamma).adjoint() * whitener;
  out.d = svd.singularValues().head(gamma);

  // Deterministic phases: rotate each right singular vector so its first
  // non-negligible entry is real positive, with the matching counter-rotation
  // on the receive side so U H Vt = diag(d) is preserved.
  for (int k = 0; k < gamma; ++k) {
    Eigen::Index lead = 0;
    for (Eigen::Index i = 0; i < out.v_tilde.rows(); ++i) {
      if (std::abs(out.v_tilde(i, k)) > 1e-12) {
        lead = i;
        break;
      }
    }
    const Complex pivot = out.v_tilde(lead, k);
    if (std::abs(pivot) > 0.0) {
      const Complex phase = pivot / std::abs(pivot);
      out.v_tilde.col(k) *= std::conj(phase);
      out.u.row(k) *= phase;
    }
  }
  return out;
}

PowerAllocation allocate_power_mse(const RMatrix& theta, const RMatrix& d,
                                   double p_s_max) {
  if (theta.rows() != d.rows() || theta.cols() != d.cols()) {
    throw InvalidDimensionError("allocate_power_mse: theta/d shape mismatch");
  }
  if (p_s_max <= 0.0 || (theta.array() <= 0.0).any() ||
      (d.array() < 0.0).any()) {
    throw PreconditionError("allocate_power_mse: need theta > 0, d >= 0, P > 0");
  }
  PowerAllocation out;
  out.lambda = RMatrix::Zero(d.rows(), d.cols());

  const double d_max = d.maxCoeff();
  if (d_max == 0.0) {
    out.p = RMatrix::Constant(
        d.rows(), d.cols(),
        std::sqrt(p_s_max / static_cast<double>(d.size())));
    out.degenerate = true;
    return out;
  }

  // Power delivered at a given dual value; strictly decreasing on
  // (-min theta d^2, inf) over the active (d > 0) streams.
  const auto power_at = [&](double mu) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      const double di = d(i);
      if (di == 0.0) continue;
      const double amp = theta(i) * di / (theta(i) * di * di + mu);
      total += amp * amp;
    }
    return total;
  };

  // With a zero-gain stream present the dual may not go below zero, and the
  // minimum is the hard case when the power equality cannot bind there: the
  // live streams sit at their unconstrained optimum 1/d (mu = 0) and the
  // zero-gain streams, whose error does not depend on their amplitude,
  // absorb the remaining budget.
  Eigen::Index dead = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) == 0.0) ++dead;
  }
  if (dead > 0 && power_at(0.0) <= p_s_max) {
    out.mu = 0.0;
    out.p = RMatrix::Zero(d.rows(), d.cols());
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (d(i) > 0.0) out.p(i) = 1.0 / d(i);
    }
    const double spare = p_s_max - out.p.squaredNorm();
    const double fill = std::sqrt(std::max(0.0, spare) /
                                  static_cast<double>(dead));
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (d(i) == 0.0) out.p(i) = fill;
    }
    return out;
  }

  double mu_floor = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) > 0.0) mu_floor = std::min(mu_floor, theta(i) * d(i) * d(i));
  }
  if (dead > 0) mu_floor = 0.0;  // dual floor set by the zero-gain streams
  double lo = -mu_floor + 1e-12 * std::max(mu_floor, 1.0);
  if (power_at(lo) < p_s_max) {
    // Pathologically close to the pole; nudge closer until bracketed.
    double step = (lo + mu_floor);
    while (power_at(lo) < p_s_max && step > 0.0) {
      step *= 0.5;
      lo = -mu_floor + step;
    }
  }
  double hi = std::max(1.0, mu_floor);
  while (power_at(hi) >= p_s_max) hi *= 2.0;

  double mu = 0.5 * (lo + hi);
  for (int it = 0; it < 300; ++it) {
    mu = 0.5 * (lo + hi);
    const double delivered = power_at(mu);
    if (std::abs(delivered - p_s_max) <= 1e-12 * p_s_max) break;
    if (delivered > p_s_max) {
      lo = mu;
    } else {
      hi = mu;
    }
    if (lo == hi) break;
  }

  out.mu = mu;
  out.p = RMatrix::Zero(d.rows(), d.cols());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) > 0.0) {
      out.p(i) = std::max(0.0, theta(i) * d(i) / (theta(i) * d(i) * d(i) + mu));
    }
  }
  // Remove the bisection residue so the power equality holds exactly.
  const double delivered = out.p.squaredNorm();
  if (delivered > 0.0) out.p *= std::sqrt(p_s_max / delivered);
  return out;
}

PowerAllocation allocate_power_rate(const RMatrix& d, double p_s_max) {
  if (p_s_max <= 0.0 || (d.array() < 0.0).any()) {
    throw PreconditionError("allocate_power_rate: need d >= 0, P > 0");
  }
  PowerAllocation out;
  out.p = RMatrix::Zero(d.rows(), d.cols());
  out.lambda = RMatrix::Zero(d.rows(), d.cols());

  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) > 0.0) active.push_back(i);
  }
  if (active.empty()) {
    out.p = RMatrix::Constant(
        d.rows(), d.cols(),
        std::sqrt(p_s_max / static_cast<double>(d.size())));
    out.degenerate = true;
    return out;
  }
  std::sort(active.begin(), active.end(), [&](Eigen::Index a, Eigen::Index b) {
    return d(a) > d(b);
  });

  // Largest prefix of streams (by gain) sharing a common water level.
  double level = 0.0;
  std::size_t count = active.size();
  double inv_gain_sum = 0.0;
  for (std::size_t k = 0; k < active.size(); ++k) {
    inv_gain_sum += 1.0 / (d(active[k]) * d(active[k]));
    const double candidate = (p_s_max + inv_gain_sum) / static_cast<double>(k + 1);
    const double next_inv =
        (k + 1 < active.size())
            ? 1.0 / (d(active[k + 1]) * d(active[k + 1]))
            : std::numeric_limits<double>::infinity();
    if (candidate <= next_inv) {
      level = candidate;
      count = k + 1;
      break;
    }
  }
  for (std::size_t k = 0; k < count; ++k) {
    const Eigen::Index i = active[k];
    out.p(i) = std::sqrt(std::max(0.0, level - 1.0 / (d(i) * d(i))));
  }
  out.mu = 1.0 / level;  // water-level dual
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (out.p(i) == 0.0) {
      out.lambda(i) = std::max(0.0, out.mu - d(i) * d(i));
    }
  }
  return out;
}

RVector rate_weights(const CMatrix& h, const CMatrix& sigma, int gamma) {
  const CMatrix whitener = inverse_sqrt(sigma);
  const CMatrix h_w = whitener * h;
  const CMatrix gram = h_w.adjoint() * h_w;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(
      0.5 * (gram + gram.adjoint().eval()));
  RVector weights(gamma);
  const Eigen::Index total = eig.eigenvalues().size();
  for (int k = 0; k < gamma; ++k) {
    // Eigen sorts ascending; pick from the top.
    weights(k) = std::max(eig.eigenvalues()(total - 1 - k), 1e-12);
  }
  return weights;
}

KktReport check_allocation_kkt(const RMatrix& theta, const RMatrix& d,
                               double p_s_max, const PowerAllocation& alloc) {
  KktReport report;
  report.primal_power =
      std::abs(alloc.p.squaredNorm() - p_s_max) / p_s_max;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double p = alloc.p(i);
    const double lambda = alloc.lambda(i);
    const double grad = 2.0 * theta(i) * d(i) * d(i) * p -
                        2.0 * theta(i) * d(i) + 2.0 * alloc.mu * p - lambda;
    report.stationarity = std::max(report.stationarity, std::abs(grad));
    report.primal_sign = std::max(report.primal_sign, -p);
    report.dual_sign = std::max(report.dual_sign, -lambda);
    report.complementarity =
        std::max(report.complementarity, std::abs(lambda * p));
  }
  return report;
}

}  // namespace ffrelay
