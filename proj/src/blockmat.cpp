// SPDX-License-Identifier: Apache-2.0
//
// ffrelay: joint FIR-relay and MIMO-OFDM transceiver design
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ffrelay/blockmat.hpp"

#include <cmath>

#include "ffrelay/sysmodel.hpp"

namespace ffrelay {

void BlockRow::validate() const {
  if (blocks.empty()) {
    throw InvalidDimensionError("BlockRow: needs at least one block");
  }
  const Eigen::Index r = blocks.front().rows();
  const Eigen::Index c = blocks.front().cols();
  if (r < 1 || c < 1) {
    throw InvalidDimensionError("BlockRow: blocks must be nonempty");
  }
  for (const auto& b : blocks) {
    if (b.rows() != r || b.cols() != c) {
      throw InvalidDimensionError("BlockRow: blocks differ in shape");
    }
  }
}

void BlockToeplitzSpec::validate() const {
  row_block.validate();
  if (num_row_blocks < 1) {
    throw InvalidDimensionError("BlockToeplitzSpec: num_row_blocks < 1");
  }
}

CMatrix dft_matrix(Eigen::Index n) {
  if (n < 1) throw InvalidDimensionError("dft_matrix: N must be >= 1");
  CMatrix w(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) {
      const double phase =
          2.0 * M_PI * static_cast<double>((k * l) % n) / static_cast<double>(n);
      w(k, l) = scale * Complex(std::cos(phase), std::sin(phase));
    }
  }
  return w;
}

CMatrix blk_toeplitz(const BlockToeplitzSpec& spec) {
  spec.validate();
  return blk_toeplitz_window(
      spec.row_block, spec.num_row_blocks,
      spec.num_row_blocks + spec.row_block.length() - 1);
}

CMatrix blk_toeplitz_window(const BlockRow& row_block,
                            Eigen::Index num_row_blocks,
                            Eigen::Index num_input_blocks) {
  row_block.validate();
  if (num_row_blocks < 1 || num_input_blocks < 1) {
    throw InvalidDimensionError("blk_toeplitz_window: block counts must be >= 1");
  }
  const Eigen::Index rpb = row_block.rows_per_block();
  const Eigen::Index cpb = row_block.cols_per_block();
  const Eigen::Index taps = row_block.length();
  CMatrix out = CMatrix::Zero(num_row_blocks * rpb, num_input_blocks * cpb);
  for (Eigen::Index i = 0; i < num_row_blocks; ++i) {
    for (Eigen::Index l = 0; l < taps; ++l) {
      const Eigen::Index j = i + l;
      if (j >= num_input_blocks) break;
      out.block(i * rpb, j * cpb, rpb, cpb) = row_block.blocks[l];
    }
  }
  return out;
}

std::vector<CMatrix> circulant_diag_blocks(const BlockRow& first_row_block) {
  first_row_block.validate();
  const Eigen::Index n = first_row_block.length();
  const Eigen::Index rpb = first_row_block.rows_per_block();
  const Eigen::Index cpb = first_row_block.cols_per_block();
  std::vector<CMatrix> out;
  out.reserve(n);
  for (Eigen::Index sub = 0; sub < n; ++sub) {
    CMatrix blk = CMatrix::Zero(rpb, cpb);
    for (Eigen::Index l = 0; l < n; ++l) {
      const double phase = 2.0 * M_PI *
                           static_cast<double>((l * (n - sub - 1)) % n) /
                           static_cast<double>(n);
      blk += first_row_block.blocks[l] *
             Complex(std::cos(phase), std::sin(phase));
    }
    out.push_back(std::move(blk));
  }
  return out;
}

CMatrix blk_circulant(const BlockRow& first_row_block) {
  first_row_block.validate();
  const Eigen::Index n = first_row_block.length();
  const Eigen::Index rpb = first_row_block.rows_per_block();
  const Eigen::Index cpb = first_row_block.cols_per_block();
  CMatrix out(n * rpb, n * cpb);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index l = (j - i + n) % n;
      out.block(i * rpb, j * cpb, rpb, cpb) = first_row_block.blocks[l];
    }
  }
  return out;
}

CVector vec(const CMatrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix unvec(const CVector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) {
    throw InvalidDimensionError("unvec: size mismatch");
  }
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

SelectionMatrices selection_matrices(const SystemConfig& cfg) {
  cfg.validate();
  const int dim = cfg.relay_dim();
  const Eigen::Index big =
      static_cast<Eigen::Index>(cfg.relay_rows()) * cfg.relay_cols();
  SelectionMatrices sel;
  sel.e1 = RMatrix::Zero(dim, big);
  sel.e2 = RMatrix::Zero(dim, big);
  for (int k = 0; k < dim; ++k) {
    CVector basis = CVector::Zero(dim);
    basis(k) = 1.0;
    const RelayFilter rf = vec_to_relay(cfg, basis);
    const CMatrix r = relay_matrix(cfg, rf);
    const CVector v_rt = vec(r.transpose());
    const CVector v_r = vec(r);
    for (Eigen::Index i = 0; i < big; ++i) {
      if (v_rt(i).real() != 0.0) sel.e1(k, i) = 1.0;
      if (v_r(i).real() != 0.0) sel.e2(k, i) = 1.0;
    }
  }
  return sel;
}

}  // namespace ffrelay
