// SPDX-License-Identifier: Apache-2.0
//
// ffrelay: joint FIR-relay and MIMO-OFDM transceiver design
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ffrelay/relayopt.hpp"
#include "testutil.hpp"

using namespace ffrelay;

namespace {

QcqpInstance scalar_instance(double q, double lin, double z, double pi,
                             double p) {
  QcqpInstance inst;
  inst.big_q = CMatrix::Constant(1, 1, q);
  inst.q = CVector::Constant(1, lin);
  inst.z = z;
  inst.pi = CMatrix::Constant(1, 1, pi);
  inst.p_r_max = p;
  return inst;
}

QcqpInstance random_instance(Crng& rng, int dim) {
  QcqpInstance inst;
  const CMatrix a = testutil::random_matrix(rng, dim + 1, dim);
  inst.big_q = a.adjoint() * a;
  inst.q = CVector(testutil::random_matrix(rng, dim, 1));
  inst.z = 1.0 + rng.uniform_co();
  const CMatrix b = testutil::random_matrix(rng, dim, dim);
  inst.pi = b.adjoint() * b +
            (0.05 + rng.uniform_co()) * CMatrix::Identity(dim, dim);
  inst.p_r_max = 0.2 + 2.0 * rng.uniform_co();
  return inst;
}

double objective(const QcqpInstance& inst, const CVector& r) {
  return (r.dot(inst.big_q * r) - r.dot(inst.q) - inst.q.dot(r)).real() +
         inst.z;
}

double constraint(const QcqpInstance& inst, const CVector& r) {
  return r.dot(inst.pi * r).real();
}

// Best of uniformly drawn feasible points, refined by projected gradient
// with radial feasibility scaling. Independent of the KKT solve.
double sampling_oracle(Crng& rng, const QcqpInstance& inst, int samples) {
  const int dim = static_cast<int>(inst.q.size());
  CVector best = CVector::Zero(dim);
  double best_value = objective(inst, best);
  for (int s = 0; s < samples; ++s) {
    CVector cand(dim);
    for (int i = 0; i < dim; ++i) cand(i) = rng.cnormal(1.0);
    const double radius = std::sqrt(rng.uniform_oc());
    cand *= radius * std::sqrt(inst.p_r_max / constraint(inst, cand));
    const double value = objective(inst, cand);
    if (value < best_value) {
      best_value = value;
      best = cand;
    }
  }
  double step = 0.1;
  for (int it = 0; it < 400; ++it) {
    CVector cand = best - step * (2.0 * (inst.big_q * best - inst.q));
    const double power = constraint(inst, cand);
    if (power > inst.p_r_max) {
      cand *= std::sqrt(inst.p_r_max / power);
    }
    const double value = objective(inst, cand);
    if (value < best_value) {
      best_value = value;
      best = cand;
    } else {
      step *= 0.5;
      if (step < 1e-14) break;
    }
  }
  return best_value;
}

}  // namespace

TEST_CASE("solve_relay_qcqp - interior scalar optimum") {
  const QcqpSolution sol = solve_relay_qcqp(scalar_instance(1, 1, 1, 1, 4));
  CHECK(sol.mu == 0.0);
  CHECK(std::abs(sol.r(0) - Complex(1.0)) <= 1e-10);
  CHECK(std::abs(sol.objective - 0.0) <= 1e-10);
}

TEST_CASE("solve_relay_qcqp - boundary scalar optimum by hand KKT") {
  const QcqpSolution sol = solve_relay_qcqp(scalar_instance(1, 2, 4, 1, 1));
  CHECK(std::abs(sol.mu - 1.0) <= 1e-8);
  CHECK(std::abs(sol.r(0) - Complex(1.0)) <= 1e-10);
  CHECK(std::abs(sol.objective - 1.0) <= 1e-10);
}

TEST_CASE("solve_relay_qcqp - zero linear term returns the origin") {
  QcqpInstance inst = scalar_instance(1, 0, 3, 1, 1);
  const QcqpSolution sol = solve_relay_qcqp(inst);
  CHECK(sol.r.norm() == 0.0);
  CHECK(sol.objective == 3.0);
}

TEST_CASE("solve_relay_qcqp - preconditions") {
  QcqpInstance bad_pi = scalar_instance(1, 1, 0, -1, 1);
  CHECK_THROWS_AS((void)solve_relay_qcqp(bad_pi), PreconditionError);
  QcqpInstance bad_q = scalar_instance(-1, 1, 0, 1, 1);
  CHECK_THROWS_AS((void)solve_relay_qcqp(bad_q), PreconditionError);
  QcqpInstance bad_p = scalar_instance(1, 1, 0, 1, -2);
  CHECK_THROWS_AS((void)solve_relay_qcqp(bad_p), PreconditionError);
}

TEST_CASE("solve_relay_qcqp - KKT certificate on random instances") {
  Crng rng(2024);
  for (int draw = 0; draw < 25; ++draw) {
    const int dim = 2 + draw % 15;
    const QcqpInstance inst = random_instance(rng, dim);
    const QcqpSolution sol = solve_relay_qcqp(inst);
    CHECK(sol.mu >= 0.0);
    CHECK(constraint(inst, sol.r) <= inst.p_r_max * (1.0 + 1e-8));
    CHECK(sol.kkt_residual <= 1e-7 * (inst.q.norm() + 1.0));
    CHECK(sol.mu * std::abs(sol.constraint_slack) <= 1e-6 * inst.p_r_max);
  }
}

TEST_CASE("solve_relay_qcqp - beats the sampling + projected-gradient oracle") {
  Crng rng(777);
  const QcqpInstance inst = random_instance(rng, 8);
  const QcqpSolution sol = solve_relay_qcqp(inst);
  const double oracle = sampling_oracle(rng, inst, 100000);
  CHECK(sol.objective <= oracle + 1e-6);
}

TEST_CASE("solve_relay_qcqp - singular Q with the linear term off-range") {
  // Q = diag(1, 0): q has weight on the null direction, so no unconstrained
  // stationary point exists and the constraint must bind.
  QcqpInstance inst;
  inst.big_q = CMatrix::Zero(2, 2);
  inst.big_q(0, 0) = 1.0;
  inst.q = CVector(2);
  inst.q << Complex(1.0), Complex(1.0);
  inst.z = 0.0;
  inst.pi = CMatrix::Identity(2, 2);
  inst.p_r_max = 1.0;
  const QcqpSolution sol = solve_relay_qcqp(inst);
  CHECK(sol.mu > 0.0);
  CHECK(std::abs(constraint(inst, sol.r) - inst.p_r_max) <=
        1e-8 * inst.p_r_max);
  CHECK(sol.kkt_residual <= 1e-7 * (inst.q.norm() + 1.0));
}

TEST_CASE("solve_relay_qcqp - constraint value decreases along the dual trace") {
  Crng rng(31);
  const QcqpInstance inst = random_instance(rng, 6);
  QcqpInstance tight = inst;
  tight.p_r_max *= 1e-3;  // force a deep bisection
  const QcqpSolution sol = solve_relay_qcqp(tight);
  REQUIRE(sol.bisection_trace.size() > 3);
  auto trace = sol.bisection_trace;
  std::sort(trace.begin(), trace.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < trace.size(); ++i) {
    CHECK(trace[i].second <= trace[i - 1].second);
    // Strict once the duals are meaningfully separated; adjacent bisection
    // midpoints can tie at machine precision.
    if (trace[i].first - trace[i - 1].first >
        1e-9 * (1.0 + trace[i - 1].first)) {
      CHECK(trace[i].second < trace[i - 1].second);
    }
  }
}

TEST_CASE("solve_relay_qcqp - objective scaling covariance") {
  Crng rng(57);
  const QcqpInstance inst = random_instance(rng, 5);
  QcqpInstance scaled = inst;
  const double alpha = 3.7;
  scaled.big_q *= alpha;
  scaled.q *= alpha;
  scaled.z *= alpha;
  const QcqpSolution a = solve_relay_qcqp(inst);
  const QcqpSolution b = solve_relay_qcqp(scaled);
  CHECK((a.r - b.r).norm() <= 1e-8 * (1.0 + a.r.norm()));
}

TEST_CASE("homogenize - scalar instance and lift identities") {
  const QcqpInstance inst = scalar_instance(1, 2, 4, 1, 1);
  const HomogenizedForm form = homogenize(inst);
  CMatrix b1(2, 2);
  b1 << 1, -2, -2, 4;
  CMatrix b2(2, 2);
  b2 << 1, 0, 0, -1;
  CHECK((form.b1 - b1).norm() == 0.0);
  CHECK((form.b2 - b2).norm() == 0.0);

  const QcqpSolution sol = solve_relay_qcqp(inst);
  CVector lifted(2);
  lifted << sol.r(0), Complex(1.0);
  const CMatrix lift = lifted * lifted.adjoint();
  CHECK(std::abs((form.b1 * lift).trace().real() - sol.objective) <= 1e-10);
  CHECK((form.b2 * lift).trace().real() <= 1e-10);
  Eigen::JacobiSVD<CMatrix> svd(lift);
  CHECK(svd.singularValues()(1) <= 1e-12 * svd.singularValues()(0));
}

TEST_CASE("homogenize - no linear or constant term") {
  Crng rng(58);
  QcqpInstance inst = random_instance(rng, 3);
  inst.q.setZero();
  inst.z = 0.0;
  const HomogenizedForm form = homogenize(inst);
  CHECK((form.b1.topLeftCorner(3, 3) - inst.big_q).norm() == 0.0);
  CHECK(form.b1.row(3).norm() == 0.0);
  CHECK(form.b1.col(3).norm() == 0.0);
}
