// SPDX-License-Identifier: Apache-2.0
//
// ffrelay: joint FIR-relay and MIMO-OFDM transceiver design
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include <cmath>

#include "ffrelay/sysmodel.hpp"
#include "testutil.hpp"

using namespace ffrelay;

TEST_CASE("SystemConfig - invariant violations are rejected") {
  SystemConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  SystemConfig bad = cfg;
  bad.gamma = 3;  // exceeds min antenna count (2)
  CHECK_THROWS_AS(bad.validate(), InvalidDimensionError);
  bad = cfg;
  bad.n_cp = cfg.min_cp() - 1;
  CHECK_THROWS_AS(bad.validate(), InvalidDimensionError);
  bad = cfg;
  bad.p_s_max = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidDimensionError);
  bad = cfg;
  bad.l_r = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidDimensionError);
}

TEST_CASE("SystemConfig - JSON round trip with exact field names") {
  SystemConfig cfg = testutil::shape(1);
  cfg.sigma_r2 = 0.25;
  cfg.p_r_max = 42.0;
  const std::string text = cfg.to_json();
  for (const char* field :
       {"\"n\"", "\"n_t\"", "\"m_r\"", "\"m_t\"", "\"n_r\"", "\"gamma\"",
        "\"l_f\"", "\"l_r\"", "\"l_g\"", "\"n_cp\"", "\"sigma_r2\"",
        "\"sigma_d2\"", "\"p_s_max\"", "\"p_r_max\"", "\"sigma_f2\"",
        "\"sigma_g2\""}) {
    CHECK(text.find(field) != std::string::npos);
  }
  const SystemConfig back = SystemConfig::from_json(text);
  CHECK(back.n == cfg.n);
  CHECK(back.n_t == cfg.n_t);
  CHECK(back.m_r == cfg.m_r);
  CHECK(back.m_t == cfg.m_t);
  CHECK(back.n_r == cfg.n_r);
  CHECK(back.gamma == cfg.gamma);
  CHECK(back.l_f == cfg.l_f);
  CHECK(back.l_r == cfg.l_r);
  CHECK(back.l_g == cfg.l_g);
  CHECK(back.n_cp == cfg.n_cp);
  CHECK(back.sigma_r2 == cfg.sigma_r2);
  CHECK(back.p_r_max == cfg.p_r_max);
}

TEST_CASE("SystemConfig - with_relay_taps keeps the prefix minimal") {
  SystemConfig cfg;
  REQUIRE(cfg.n_cp == cfg.min_cp());
  const SystemConfig one_tap = cfg.with_relay_taps(1);
  CHECK(one_tap.l_r == 1);
  CHECK(one_tap.n_cp == one_tap.min_cp());
  CHECK_NOTHROW(one_tap.validate());
}

TEST_CASE("generate_channel - deterministic and variance-faithful") {
  const SystemConfig cfg = testutil::shape(1);
  const ChannelRealization a = generate_channel(cfg, 123);
  const ChannelRealization b = generate_channel(cfg, 123);
  for (int k = 0; k < cfg.l_f; ++k) {
    CHECK((a.f_taps[k] - b.f_taps[k]).norm() == 0.0);
  }
  for (int k = 0; k < cfg.l_g; ++k) {
    CHECK((a.g_taps[k] - b.g_taps[k]).norm() == 0.0);
  }
  const ChannelRealization c = generate_channel(cfg, 124);
  CHECK((a.f_taps[0] - c.f_taps[0]).norm() > 0.0);

  SystemConfig silent = cfg;
  silent.sigma_f2 = 0.0;
  silent.sigma_g2 = 0.0;
  const ChannelRealization zero = generate_channel(silent, 5);
  for (const auto& f : zero.f_taps) CHECK(f.norm() == 0.0);
  for (const auto& g : zero.g_taps) CHECK(g.norm() == 0.0);
}

TEST_CASE("generate_channel - Monte Carlo moment check") {
  SystemConfig cfg;
  cfg.n_t = 1;
  cfg.m_r = 1;
  cfg.m_t = 1;
  cfg.n_r = 1;
  cfg.gamma = 1;
  cfg.l_f = 1;
  cfg.l_g = 1;
  cfg.l_r = 1;
  cfg.n_cp = cfg.min_cp();
  cfg.sigma_f2 = 1.0;
  const int samples = 10000;
  double sum = 0.0;
  double sumsq = 0.0;
  for (int i = 0; i < samples; ++i) {
    const ChannelRealization ch = generate_channel(cfg, 10'000 + i);
    const double mag2 = std::norm(ch.f_taps[0](0, 0));
    sum += mag2;
    sumsq += mag2 * mag2;
  }
  const double mean = sum / samples;
  const double var = sumsq / samples - mean * mean;
  const double se = std::sqrt(var / samples);
  CHECK(std::abs(mean - cfg.sigma_f2) <= 3.0 * se);
}

TEST_CASE("build_cp_matrices - hand cases") {
  SystemConfig cfg;
  cfg.n = 2;
  cfg.n_t = cfg.m_r = cfg.m_t = cfg.n_r = 1;
  cfg.gamma = 1;
  cfg.l_f = 2;
  cfg.l_r = 1;
  cfg.l_g = 1;
  cfg.n_cp = 1;
  const auto [t_cp, t] = build_cp_matrices(cfg);
  CMatrix expected(3, 2);
  expected << 1, 0, 0, 1, 1, 0;
  CHECK((t_cp - expected).norm() == 0.0);
  // T zero-pads x by (L_f+L_r+L_g-3) N_t samples.
  CHECK(t.rows() == (cfg.n + cfg.min_cp()) * cfg.n_t);
  CHECK((t.topRows(2) - CMatrix::Identity(2, 2)).norm() == 0.0);
  CHECK(t.bottomRows(t.rows() - 2).norm() == 0.0);

  SystemConfig no_prefix = cfg;
  no_prefix.l_f = 1;
  no_prefix.n_cp = 0;
  const auto [t_cp0, t0] = build_cp_matrices(no_prefix);
  CHECK((t_cp0 - CMatrix::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("effective_subcarrier_channels - flat single-tap scalar chain") {
  SystemConfig cfg;
  cfg.n = 4;
  cfg.n_t = cfg.m_r = cfg.m_t = cfg.n_r = 1;
  cfg.gamma = 1;
  cfg.l_f = cfg.l_r = cfg.l_g = 1;
  cfg.n_cp = 0;
  cfg.sigma_r2 = 0.3;
  cfg.sigma_d2 = 0.6;
  ChannelRealization ch;
  const Complex f(0.8, -0.4);
  const Complex g(-1.1, 0.2);
  const Complex rho(0.5, 0.9);
  ch.f_taps = {CMatrix::Constant(1, 1, f)};
  ch.g_taps = {CMatrix::Constant(1, 1, g)};
  RelayFilter relay;
  relay.r_taps = {CMatrix::Constant(1, 1, rho)};
  const auto channels = effective_subcarrier_channels(cfg, ch, relay);
  for (int n = 0; n < cfg.n; ++n) {
    CHECK(std::abs(channels[n].h(0, 0) - g * rho * f) < 1e-12);
    const double expected_sigma =
        cfg.sigma_r2 * std::norm(g * rho) + cfg.sigma_d2;
    CHECK(std::abs(channels[n].sigma(0, 0) - Complex(expected_sigma)) < 1e-12);
  }
}

TEST_CASE("effective_subcarrier_channels - zero relay") {
  const SystemConfig cfg = testutil::shape(1);
  const ChannelRealization ch = generate_channel(cfg, 3);
  RelayFilter relay;
  relay.r_taps.assign(cfg.l_r, CMatrix::Zero(cfg.m_t, cfg.m_r));
  const auto channels = effective_subcarrier_channels(cfg, ch, relay);
  for (const auto& sc : channels) {
    CHECK(sc.h.norm() == 0.0);
    CHECK((sc.sigma - cfg.sigma_d2 * CMatrix::Identity(cfg.n_r, cfg.n_r))
              .norm() == 0.0);
  }
}

TEST_CASE("effective_subcarrier_channels - noise covariance is Hermitian PD") {
  Crng rng(17);
  for (int shape = 0; shape < 3; ++shape) {
    const SystemConfig cfg = testutil::shape(shape);
    const ChannelRealization ch = generate_channel(cfg, 100 + shape);
    const RelayFilter relay = testutil::random_relay(rng, cfg);
    for (const auto& sc : effective_subcarrier_channels(cfg, ch, relay)) {
      CHECK((sc.sigma - sc.sigma.adjoint()).norm() <= 1e-12 * sc.sigma.norm());
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(sc.sigma);
      CHECK(eig.eigenvalues().minCoeff() >= cfg.sigma_d2 * (1.0 - 1e-9));
    }
  }
}

TEST_CASE("relay vectorization - round trip and length") {
  Crng rng(23);
  const SystemConfig cfg = testutil::shape(1);
  const RelayFilter relay = testutil::random_relay(rng, cfg);
  const CVector r = relay_to_vec(relay);
  CHECK(r.size() == cfg.relay_dim());
  const RelayFilter back = vec_to_relay(cfg, r);
  for (int l = 0; l < cfg.l_r; ++l) {
    CHECK((relay.r_taps[l] - back.r_taps[l]).norm() == 0.0);
  }
}

TEST_CASE("assemble_frame_blockdiag - reverses subcarrier order") {
  std::vector<CMatrix> blocks = {CMatrix::Constant(1, 1, 1.0),
                                 CMatrix::Constant(1, 1, 2.0),
                                 CMatrix::Constant(1, 1, 3.0)};
  const CMatrix frame = assemble_frame_blockdiag(blocks);
  CHECK(frame(0, 0) == Complex(3.0));
  CHECK(frame(1, 1) == Complex(2.0));
  CHECK(frame(2, 2) == Complex(1.0));
  CHECK(std::abs(frame(0, 1)) == 0.0);
}
