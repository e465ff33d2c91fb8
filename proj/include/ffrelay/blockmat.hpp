// SPDX-License-Identifier: Apache-2.0
//
// ffrelay: joint FIR-relay and MIMO-OFDM transceiver design
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef FFRELAY_BLOCKMAT_HPP
#define FFRELAY_BLOCKMAT_HPP

#include <vector>

#include "ffrelay/types.hpp"

namespace ffrelay {

struct SystemConfig;  // sysmodel.hpp

/// Ordered list of equally sized blocks [B_0, B_1, ..., B_{L-1}]; the first
/// row block of a block Toeplitz/circulant matrix.
struct BlockRow {
  std::vector<CMatrix> blocks;

  Eigen::Index rows_per_block() const {
    return blocks.empty() ? 0 : blocks.front().rows();
  }
  Eigen::Index cols_per_block() const {
    return blocks.empty() ? 0 : blocks.front().cols();
  }
  Eigen::Index length() const {
    return static_cast<Eigen::Index>(blocks.size());
  }
  /// Throws InvalidDimensionError unless all blocks share one shape and L >= 1.
  void validate() const;
};

struct BlockToeplitzSpec {
  BlockRow row_block;
  Eigen::Index num_row_blocks = 0;

  void validate() const;
};

/// Row-selection matrices tying the relay tap vector r = vec(Rbar^T) to the
/// vectorizations of the realized block Toeplitz filter matrix R:
///   vec(R^T) = E1^T r        and        vec(R) = E2^H r.
/// Both are real 0/1 matrices of size
///   M_t L_r M_r  x  M_t (N+L_r+L_g-2) (N+L_g-1) M_r,
/// with orthogonal rows of squared norm N+L_g-1 (each tap entry recurs once
/// per row block of R).
struct SelectionMatrices {
  RMatrix e1;
  RMatrix e2;
};

/// Unitary N x N matrix with entry (k+1, l+1) = exp(i 2 pi k l / N) / sqrt(N).
CMatrix dft_matrix(Eigen::Index n);

/// Realizes the block Toeplitz matrix: row block i carries the blocks of
/// row_block shifted right by i block positions, zeros elsewhere. Output is
/// num_row_blocks*rpb x (num_row_blocks+L-1)*cpb.
CMatrix blk_toeplitz(const BlockToeplitzSpec& spec);

/// Same as blk_toeplitz but with the input window forced to num_input_blocks
/// column blocks: columns beyond the window are dropped (zero boundary) and a
/// short window is padded with zero column blocks. Used by the time-domain
/// simulator where the cyclic prefix length sets the input span.
CMatrix blk_toeplitz_window(const BlockRow& row_block,
                            Eigen::Index num_row_blocks,
                            Eigen::Index num_input_blocks);

/// Diagonal blocks of the DFT block-diagonalization of the block circulant
/// matrix with first row block [H_0, ..., H_{N-1}]. Entry n of the result is
///   sum_l H_l exp(+i 2 pi l (N-n-1) / N),
/// i.e. the block associated with the n-th subcarrier vector w_n; the realized
/// block diagonal stacks these in descending n (frame order).
std::vector<CMatrix> circulant_diag_blocks(const BlockRow& first_row_block);

/// Block circulant matrix with the given first row block (row block i is the
/// first row block cyclically shifted right by i block positions).
CMatrix blk_circulant(const BlockRow& first_row_block);

/// Column-stacking vectorization.
CVector vec(const CMatrix& m);

/// Inverse of vec for a known shape.
CMatrix unvec(const CVector& v, Eigen::Index rows, Eigen::Index cols);

/// Kronecker product a (x) b, dense.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Builds E1/E2 constructively from their defining identities by scanning
/// where each entry of r lands inside vec(R^T) and vec(R).
SelectionMatrices selection_matrices(const SystemConfig& cfg);

}  // namespace ffrelay

#endif  // FFRELAY_BLOCKMAT_HPP
