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
#include <complex>

#include "ffrelay/blockmat.hpp"
#include "ffrelay/sysmodel.hpp"
#include "testutil.hpp"

using namespace ffrelay;

TEST_CASE("dft_matrix - forced small values") {
  const CMatrix w1 = dft_matrix(1);
  CHECK(w1.rows() == 1);
  CHECK(std::abs(w1(0, 0) - Complex(1.0, 0.0)) < 1e-15);

  const CMatrix w2 = dft_matrix(2);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(w2(0, 0) - Complex(s, 0)) < 1e-15);
  CHECK(std::abs(w2(0, 1) - Complex(s, 0)) < 1e-15);
  CHECK(std::abs(w2(1, 0) - Complex(s, 0)) < 1e-15);
  CHECK(std::abs(w2(1, 1) - Complex(-s, 0)) < 1e-15);

  // Entry (2,2) of the 4-point matrix is exp(i pi/2)/2.
  const CMatrix w4 = dft_matrix(4);
  CHECK(std::abs(w4(1, 1) - Complex(0.0, 0.5)) < 1e-15);
}

TEST_CASE("dft_matrix - unitarity") {
  for (int n : {1, 2, 3, 5, 8, 16, 17}) {
    const CMatrix w = dft_matrix(n);
    const double err =
        (w.adjoint() * w - CMatrix::Identity(n, n)).norm();
    CHECK(err <= 1e-12 * n);
  }
}

TEST_CASE("dft_matrix - rejects empty") {
  CHECK_THROWS_AS((void)dft_matrix(0), InvalidDimensionError);
}

TEST_CASE("blk_toeplitz - single tap is block diagonal") {
  Crng rng(7);
  BlockToeplitzSpec spec;
  spec.row_block.blocks = {testutil::random_matrix(rng, 2, 3)};
  spec.num_row_blocks = 3;
  const CMatrix r = blk_toeplitz(spec);
  CHECK(r.rows() == 6);
  CHECK(r.cols() == 9);
  const CMatrix expected =
      kron(CMatrix::Identity(3, 3), spec.row_block.blocks[0]);
  CHECK((r - expected).norm() == 0.0);
}

TEST_CASE("blk_toeplitz - two taps layout") {
  Crng rng(8);
  const CMatrix a = testutil::random_matrix(rng, 2, 2);
  const CMatrix b = testutil::random_matrix(rng, 2, 2);
  BlockToeplitzSpec spec;
  spec.row_block.blocks = {a, b};
  spec.num_row_blocks = 2;
  const CMatrix r = blk_toeplitz(spec);
  CHECK(r.rows() == 4);
  CHECK(r.cols() == 6);
  CHECK((r.block(0, 0, 2, 2) - a).norm() == 0.0);
  CHECK((r.block(0, 2, 2, 2) - b).norm() == 0.0);
  CHECK(r.block(0, 4, 2, 2).norm() == 0.0);
  CHECK(r.block(2, 0, 2, 2).norm() == 0.0);
  CHECK((r.block(2, 2, 2, 2) - a).norm() == 0.0);
  CHECK((r.block(2, 4, 2, 2) - b).norm() == 0.0);
}

TEST_CASE("blk_toeplitz - scalar hand construction") {
  BlockToeplitzSpec spec;
  for (double v : {1.0, 2.0, 3.0}) {
    spec.row_block.blocks.push_back(CMatrix::Constant(1, 1, v));
  }
  spec.num_row_blocks = 2;
  const CMatrix r = blk_toeplitz(spec);
  CMatrix expected(2, 4);
  expected << 1, 2, 3, 0, 0, 1, 2, 3;
  CHECK((r - expected).norm() == 0.0);
}

TEST_CASE("blk_toeplitz - output dimensions match the spec") {
  Crng rng(9);
  for (int draw = 0; draw < 10; ++draw) {
    BlockToeplitzSpec spec;
    const int rpb = 1 + static_cast<int>(rng.uniform_co() * 3);
    const int cpb = 1 + static_cast<int>(rng.uniform_co() * 3);
    const int taps = 1 + static_cast<int>(rng.uniform_co() * 4);
    for (int l = 0; l < taps; ++l) {
      spec.row_block.blocks.push_back(testutil::random_matrix(rng, rpb, cpb));
    }
    spec.num_row_blocks = 1 + static_cast<int>(rng.uniform_co() * 5);
    const CMatrix r = blk_toeplitz(spec);
    CHECK(r.rows() == spec.num_row_blocks * rpb);
    CHECK(r.cols() == (spec.num_row_blocks + taps - 1) * cpb);
  }
}

TEST_CASE("blk_toeplitz_window - truncates and pads") {
  BlockRow row;
  row.blocks = {CMatrix::Constant(1, 1, 1.0), CMatrix::Constant(1, 1, 2.0)};
  const CMatrix truncated = blk_toeplitz_window(row, 3, 3);
  CMatrix expected(3, 3);
  expected << 1, 2, 0, 0, 1, 2, 0, 0, 1;
  CHECK((truncated - expected).norm() == 0.0);
  const CMatrix padded = blk_toeplitz_window(row, 2, 4);
  CHECK(padded.cols() == 4);
  CHECK(padded.col(3).norm() == 0.0);
}

TEST_CASE("circulant_diag_blocks - two-point DFT by hand") {
  BlockRow row;
  row.blocks = {CMatrix::Constant(1, 1, Complex(1.0, 2.0)),
                CMatrix::Constant(1, 1, Complex(0.5, -1.0))};
  const auto blocks = circulant_diag_blocks(row);
  const Complex sum = blocks[0](0, 0) + blocks[1](0, 0);
  const Complex expected_sum = Complex(2.0, 4.0);  // (H0+H1) + (H0-H1) = 2 H0
  CHECK(std::abs(sum - expected_sum) < 1e-14);
  // One of the two blocks is H0+H1, the other H0-H1.
  const Complex plus = Complex(1.5, 1.0);
  const Complex minus = Complex(0.5, 3.0);
  const bool order_a = std::abs(blocks[0](0, 0) - plus) < 1e-14 &&
                       std::abs(blocks[1](0, 0) - minus) < 1e-14;
  const bool order_b = std::abs(blocks[0](0, 0) - minus) < 1e-14 &&
                       std::abs(blocks[1](0, 0) - plus) < 1e-14;
  CHECK((order_a || order_b));
}

TEST_CASE("circulant_diag_blocks - zero and impulse cases") {
  BlockRow zeros;
  for (int l = 0; l < 5; ++l) zeros.blocks.push_back(CMatrix::Zero(2, 2));
  for (const auto& b : circulant_diag_blocks(zeros)) CHECK(b.norm() == 0.0);

  BlockRow impulse;
  impulse.blocks.push_back(CMatrix::Identity(2, 2));
  for (int l = 1; l < 4; ++l) impulse.blocks.push_back(CMatrix::Zero(2, 2));
  for (const auto& b : circulant_diag_blocks(impulse)) {
    CHECK((b - CMatrix::Identity(2, 2)).norm() < 1e-14);
  }
}

TEST_CASE("circulant diagonalization equality - 20 random instances") {
  Crng rng(31415);
  for (int draw = 0; draw < 20; ++draw) {
    const int n = 2 + static_cast<int>(rng.uniform_co() * 15);
    const int rows = 1 + static_cast<int>(rng.uniform_co() * 3);
    const int cols = 1 + static_cast<int>(rng.uniform_co() * 3);
    BlockRow row;
    for (int l = 0; l < n; ++l) {
      row.blocks.push_back(testutil::random_matrix(rng, rows, cols));
    }
    const CMatrix h_c = blk_circulant(row);
    const CMatrix lhs = kron(dft_matrix(n).adjoint(),
                             CMatrix::Identity(rows, rows)) *
                        h_c *
                        kron(dft_matrix(n), CMatrix::Identity(cols, cols));
    const CMatrix rhs = assemble_frame_blockdiag(circulant_diag_blocks(row));
    CHECK((lhs - rhs).norm() <= 1e-9 * h_c.norm());
  }
}

TEST_CASE("selection_matrices - scalar system collapses to [1]") {
  SystemConfig cfg;
  cfg.n = 1;
  cfg.n_t = cfg.m_r = cfg.m_t = cfg.n_r = 1;
  cfg.gamma = 1;
  cfg.l_f = cfg.l_r = cfg.l_g = 1;
  cfg.n_cp = 0;
  const SelectionMatrices sel = selection_matrices(cfg);
  CHECK(sel.e1.rows() == 1);
  CHECK(sel.e1.cols() == 1);
  CHECK(sel.e1(0, 0) == 1.0);
  CHECK(sel.e2(0, 0) == 1.0);
}

TEST_CASE("selection_matrices - hand case, two taps") {
  // M_t = M_r = 1, L_r = 2, N = 2, L_g = 1: R = [[r0 r1 0],[0 r0 r1]].
  SystemConfig cfg;
  cfg.n = 2;
  cfg.n_t = cfg.m_r = cfg.m_t = cfg.n_r = 1;
  cfg.gamma = 1;
  cfg.l_f = 1;
  cfg.l_r = 2;
  cfg.l_g = 1;
  cfg.n_cp = cfg.min_cp();
  const SelectionMatrices sel = selection_matrices(cfg);
  CHECK(sel.e1.rows() == 2);
  CHECK(sel.e1.cols() == 6);
  CVector r(2);
  r << 1.0, 2.0;
  const RelayFilter relay = vec_to_relay(cfg, r);
  const CMatrix rm = relay_matrix(cfg, relay);
  CHECK((sel.e1.transpose().cast<Complex>() * r - vec(rm.transpose())).norm() ==
        0.0);
  CHECK((sel.e2.adjoint().cast<Complex>() * r - vec(rm)).norm() == 0.0);
}

TEST_CASE("selection identities - exact over random draws and shapes") {
  Crng rng(99);
  for (int shape = 0; shape < 5; ++shape) {
    SystemConfig cfg;
    cfg.n = 2 + shape;
    cfg.n_t = 1 + shape % 2;
    cfg.m_r = 1 + (shape + 1) % 2;
    cfg.m_t = 1 + shape % 3;
    cfg.n_r = 1;
    cfg.gamma = 1;
    cfg.l_f = 1 + shape % 2;
    cfg.l_r = 1 + shape % 3;
    cfg.l_g = 1 + (shape + 1) % 3;
    cfg.n_cp = cfg.min_cp();
    const SelectionMatrices sel = selection_matrices(cfg);
    for (int draw = 0; draw < 20; ++draw) {
      const RelayFilter relay = testutil::random_relay(rng, cfg);
      const CVector r = relay_to_vec(relay);
      const CMatrix rm = relay_matrix(cfg, relay);
      CHECK((sel.e1.transpose().cast<Complex>() * r - vec(rm.transpose()))
                .norm() == 0.0);
      CHECK((sel.e2.adjoint().cast<Complex>() * r - vec(rm)).norm() == 0.0);
    }
  }
}

TEST_CASE("selection_matrices - row structure (orthogonal rows, one hit per "
          "row block of R)") {
  const SystemConfig cfg = testutil::shape(1);
  const SelectionMatrices sel = selection_matrices(cfg);
  const int repeats = cfg.n + cfg.l_g - 1;
  const RMatrix gram1 = sel.e1 * sel.e1.transpose();
  const RMatrix gram2 = sel.e2 * sel.e2.transpose();
  CHECK((gram1 - repeats * RMatrix::Identity(cfg.relay_dim(), cfg.relay_dim()))
            .norm() == 0.0);
  CHECK((gram2 - repeats * RMatrix::Identity(cfg.relay_dim(), cfg.relay_dim()))
            .norm() == 0.0);
}

TEST_CASE("circulant_diag_blocks - experimental config matches effective channels") {
  // The per-subcarrier channels built by sysmodel must be the diagonal
  // blocks of the circulant decomposition of the end-to-end first row block.
  const SystemConfig cfg = testutil::shape(2);
  Crng rng(5);
  const ChannelRealization ch = generate_channel(cfg, 4242);
  const RelayFilter relay = testutil::random_relay(rng, cfg);
  const auto channels = effective_subcarrier_channels(cfg, ch, relay);

  const CMatrix h_first = g_tilde(cfg, ch) * relay_matrix(cfg, relay) *
                          sr_matrix(cfg, ch) *
                          build_cp_matrices(cfg).second;
  BlockRow row;
  for (int l = 0; l < cfg.n; ++l) {
    row.blocks.push_back(h_first.block(0, l * cfg.n_t, cfg.n_r, cfg.n_t));
  }
  const auto blocks = circulant_diag_blocks(row);
  for (int n = 0; n < cfg.n; ++n) {
    // sqrt(N) Hc_first (w_n (x) I) cancels the 1/sqrt(N) inside w_n, so the
    // effective channel IS the diagonalization block.
    CHECK((channels[n].h - blocks[n]).norm() <=
          1e-9 * (1.0 + channels[n].h.norm()));
  }
}
