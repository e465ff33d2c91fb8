// SPDX-License-Identifier: Apache-2.0
//
// ffrelay: joint FIR-relay and MIMO-OFDM transceiver design
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ffrelay/quadforms.hpp"

#include <cmath>
#include <utility>

namespace ffrelay {

namespace {

// Nonzero coordinates of the realized filter matrix R for one basis entry of
// r = vec(Rbar^T): the tap entry (tx j, tap l, rx b) lands at
// (i M_t + j, (i+l) M_r + b) for every row block i.
struct RelayBasis {
  std::vector<std::vector<std::pair<int, int>>> positions;  // per r index
  int rows = 0;
  int cols = 0;
};

RelayBasis relay_basis(const SystemConfig& cfg) {
  RelayBasis basis;
  basis.rows = cfg.relay_rows();
  basis.cols = cfg.relay_cols();
  basis.positions.resize(cfg.relay_dim());
  const int row_blocks = cfg.n + cfg.l_g - 1;
  for (int j = 0; j < cfg.m_t; ++j) {
    for (int l = 0; l < cfg.l_r; ++l) {
      for (int b = 0; b < cfg.m_r; ++b) {
        const int k = (j * cfg.l_r + l) * cfg.m_r + b;
        auto& pos = basis.positions[k];
        pos.reserve(row_blocks);
        for (int i = 0; i < row_blocks; ++i) {
          pos.emplace_back(i * cfg.m_t + j, (i + l) * cfg.m_r + b);
        }
      }
    }
  }
  return basis;
}

// Shared per-(cfg, ch) matrices of both assembly routes.
struct ChainParts {
  CMatrix ft;        // F T: (N+L_g+L_r-2)M_r x N N_t
  CMatrix gt;        // Gt: N_r x M_t (N+L_g-1)
  CMatrix g;         // blkToeplitz(Gbar, N)
  CMatrix tx_front;  // F_w T_cp (W (x) I_{N_t}): relay_cols x N N_t
};

ChainParts chain_parts(const SystemConfig& cfg, const ChannelRealization& ch) {
  ChainParts parts;
  const CMatrix f = sr_matrix(cfg, ch);
  parts.ft = f.leftCols(static_cast<Eigen::Index>(cfg.n) * cfg.n_t);
  parts.gt = g_tilde(cfg, ch);
  parts.g = rd_matrix(cfg, ch);
  const auto [t_cp, t] = build_cp_matrices(cfg);
  const CMatrix w_big = kron(dft_matrix(cfg.n),
                             CMatrix::Identity(cfg.n_t, cfg.n_t));
  parts.tx_front = sr_matrix_window(cfg, ch) * t_cp * w_big;
  return parts;
}

// (w_n^H (x) I)^T V_n stacked over the N row blocks.
CMatrix stack_subcarrier_precoder(const CVector& w, const CMatrix& v_n) {
  CMatrix out(w.size() * v_n.rows(), v_n.cols());
  for (Eigen::Index l = 0; l < w.size(); ++l) {
    out.block(l * v_n.rows(), 0, v_n.rows(), v_n.cols()) = w(l) * v_n;
  }
  return out;
}

// Receive-side projection (w_n^H (x) I_{N_r}) X for a frame-stacked X; the
// row vector w_n^H carries the conjugated subcarrier-vector entries.
CMatrix collapse_rx_rows(const CVector& w, const CMatrix& x, int n_r) {
  CMatrix out = CMatrix::Zero(n_r, x.cols());
  for (Eigen::Index l = 0; l < w.size(); ++l) {
    out += std::conj(w(l)) * x.block(l * n_r, 0, n_r, x.cols());
  }
  return out;
}

RVector theta_sqrt(const RVector& theta) { return theta.cwiseSqrt(); }

void check_sizes(const SystemConfig& cfg, const std::vector<CMatrix>& v,
                 const std::vector<CMatrix>& u, const WeightMatrices& theta) {
  if (static_cast<int>(v.size()) != cfg.n ||
      static_cast<int>(u.size()) != cfg.n ||
      static_cast<int>(theta.theta.size()) != cfg.n) {
    throw InvalidDimensionError("quadforms: need one V, U, Theta per subcarrier");
  }
  for (int n = 0; n < cfg.n; ++n) {
    if (v[n].rows() != cfg.n_t || v[n].cols() != cfg.gamma) {
      throw InvalidDimensionError("quadforms: V_n must be N_t x Gamma");
    }
    if (u[n].rows() != cfg.gamma || u[n].cols() != cfg.n_r) {
      throw InvalidDimensionError("quadforms: U_n must be Gamma x N_r");
    }
    if (theta.theta[n].size() != cfg.gamma) {
      throw InvalidDimensionError("quadforms: Theta_n must be Gamma x Gamma");
    }
  }
}

CMatrix hermitian_part(const CMatrix& x) {
  return 0.5 * (x + x.adjoint().eval());
}

}  // namespace

WeightMatrices WeightMatrices::identity(int n, int gamma) {
  WeightMatrices w;
  w.theta.assign(n, RVector::Ones(gamma));
  return w;
}

void WeightMatrices::validate() const {
  for (const auto& t : theta) {
    if ((t.array() <= 0.0).any()) {
      throw InvalidDimensionError("WeightMatrices: diagonal must be positive");
    }
  }
}

std::vector<CMatrix> assemble_q1(const SystemConfig& cfg,
                                 const ChannelRealization& ch,
                                 const std::vector<CMatrix>& v,
                                 const std::vector<CMatrix>& u,
                                 const WeightMatrices& theta,
                                 AssemblyMode mode) {
  cfg.validate();
  check_sizes(cfg, v, u, theta);
  const ChainParts parts = chain_parts(cfg, ch);
  const RelayBasis basis = relay_basis(cfg);
  const int dim = cfg.relay_dim();
  const double scale_n = static_cast<double>(cfg.n);

  std::vector<CMatrix> out;
  out.reserve(cfg.n);
  for (int n = 0; n < cfg.n; ++n) {
    const CVector w = subcarrier_vector(n, cfg.n);
    const CMatrix b_mat =
        theta_sqrt(theta.theta[n]).asDiagonal() * u[n] * parts.gt;
    const CMatrix t_n = parts.ft * stack_subcarrier_precoder(w, v[n]);

    CMatrix q1;
    if (mode == AssemblyMode::kStructured) {
      q1 = CMatrix::Zero(dim, dim);
      for (int gamma = 0; gamma < cfg.gamma; ++gamma) {
        // Column k of y_gamma is R_k^T (row gamma of B)^T.
        CMatrix y_gamma = CMatrix::Zero(basis.cols, dim);
        for (int k = 0; k < dim; ++k) {
          for (const auto& [row, col] : basis.positions[k]) {
            y_gamma(col, k) += b_mat(gamma, row);
          }
        }
        const CMatrix proj = t_n.transpose() * y_gamma;  // Gamma x dim
        q1.noalias() += scale_n * proj.adjoint() * proj;
      }
    } else {
      const SelectionMatrices sel = selection_matrices(cfg);
      const CMatrix e1t = sel.e1.transpose().cast<Complex>();
      const CMatrix a = kron(b_mat, CMatrix::Identity(basis.cols, basis.cols));
      const CMatrix k_n = t_n * t_n.adjoint();
      const CMatrix k_bar =
          kron(CMatrix::Identity(cfg.gamma, cfg.gamma), k_n);
      const CMatrix ae1t = a * e1t;
      q1 = scale_n * ae1t.adjoint() * k_bar.conjugate() * ae1t;
    }
    out.push_back(hermitian_part(q1));
  }
  return out;
}

std::pair<std::vector<CMatrix>, std::vector<double>> assemble_q2_c(
    const SystemConfig& cfg, const ChannelRealization& ch,
    const std::vector<CMatrix>& u, const WeightMatrices& theta,
    AssemblyMode mode) {
  cfg.validate();
  const std::vector<CMatrix> v_dummy(
      cfg.n, CMatrix::Zero(cfg.n_t, cfg.gamma));
  check_sizes(cfg, v_dummy, u, theta);
  const CMatrix g = rd_matrix(cfg, ch);
  const RelayBasis basis = relay_basis(cfg);
  const int dim = cfg.relay_dim();

  std::vector<CMatrix> q2;
  std::vector<double> c;
  q2.reserve(cfg.n);
  c.reserve(cfg.n);
  for (int n = 0; n < cfg.n; ++n) {
    const CVector w = subcarrier_vector(n, cfg.n);
    const CMatrix wg = collapse_rx_rows(w, g, cfg.n_r);  // N_r x relay_rows
    const CMatrix g_n = theta_sqrt(theta.theta[n]).asDiagonal() * u[n] * wg;

    CMatrix q2_n;
    if (mode == AssemblyMode::kStructured) {
      // Column k of z is vec(g_n R_k); Q_{2,n} = sigma_r^2 z^H z.
      CMatrix z = CMatrix::Zero(static_cast<Eigen::Index>(cfg.gamma) *
                                    basis.cols,
                                dim);
      for (int k = 0; k < dim; ++k) {
        for (const auto& [row, col] : basis.positions[k]) {
          z.block(static_cast<Eigen::Index>(col) * cfg.gamma, k, cfg.gamma, 1) +=
              g_n.col(row);
        }
      }
      q2_n = cfg.sigma_r2 * z.adjoint() * z;
    } else {
      const SelectionMatrices sel = selection_matrices(cfg);
      const CMatrix e2 = sel.e2.cast<Complex>();
      const CMatrix m_n = g_n.adjoint() * g_n;
      const CMatrix m_bar =
          kron(CMatrix::Identity(basis.cols, basis.cols), m_n);
      q2_n = cfg.sigma_r2 * e2 * m_bar * e2.adjoint();
    }
    q2.push_back(hermitian_part(q2_n));
    c.push_back(cfg.sigma_d2 *
                (theta.theta[n].asDiagonal() * (u[n] * u[n].adjoint()))
                    .real()
                    .trace());
  }
  return {std::move(q2), std::move(c)};
}

std::vector<CVector> assemble_q(const SystemConfig& cfg,
                                const ChannelRealization& ch,
                                const std::vector<CMatrix>& v,
                                const std::vector<CMatrix>& u,
                                const WeightMatrices& theta,
                                AssemblyMode mode) {
  cfg.validate();
  check_sizes(cfg, v, u, theta);
  const ChainParts parts = chain_parts(cfg, ch);
  const RelayBasis basis = relay_basis(cfg);
  const int dim = cfg.relay_dim();
  const double sqrt_n = std::sqrt(static_cast<double>(cfg.n));

  std::vector<CVector> out;
  out.reserve(cfg.n);
  for (int n = 0; n < cfg.n; ++n) {
    const CVector w = subcarrier_vector(n, cfg.n);
    const CMatrix t_n = parts.ft * stack_subcarrier_precoder(w, v[n]);
    // C_n = (Theta_n U_n Gt)^H (t_n V-part)^H has the shape of R.
    const CMatrix c_n = (theta.theta[n].asDiagonal() * u[n] * parts.gt)
                            .adjoint() *
                        t_n.adjoint();
    CVector q_n(dim);
    if (mode == AssemblyMode::kStructured) {
      for (int k = 0; k < dim; ++k) {
        Complex acc = 0.0;
        for (const auto& [row, col] : basis.positions[k]) {
          acc += c_n(row, col);
        }
        q_n(k) = sqrt_n * acc;
      }
    } else {
      const SelectionMatrices sel = selection_matrices(cfg);
      q_n = sqrt_n * sel.e2.cast<Complex>() * vec(c_n);
    }
    out.push_back(std::move(q_n));
  }
  return out;
}

CMatrix assemble_power_form(const SystemConfig& cfg,
                            const ChannelRealization& ch,
                            const std::vector<CMatrix>& v,
                            AssemblyMode mode) {
  cfg.validate();
  const ChainParts parts = chain_parts(cfg, ch);
  const RelayBasis basis = relay_basis(cfg);
  const int dim = cfg.relay_dim();

  const CMatrix v_frame = assemble_frame_blockdiag(v);
  const CMatrix a = parts.tx_front * v_frame;  // relay_cols x N Gamma
  CMatrix pi = a * a.adjoint();
  pi += cfg.sigma_r2 * CMatrix::Identity(basis.cols, basis.cols);
  pi = hermitian_part(pi);

  CMatrix pi_tilde(dim, dim);
  if (mode == AssemblyMode::kStructured) {
    const CMatrix pi_conj = pi.conjugate();
    // w_j = Pi^* R_j^T, assembled column by column from the basis positions.
    std::vector<CMatrix> w_j(dim);
    for (int j = 0; j < dim; ++j) {
      w_j[j] = CMatrix::Zero(basis.cols, basis.rows);
      for (const auto& [row, col] : basis.positions[j]) {
        w_j[j].col(row) += pi_conj.col(col);
      }
    }
    for (int k = 0; k < dim; ++k) {
      for (int j = 0; j < dim; ++j) {
        Complex acc = 0.0;
        for (const auto& [row, col] : basis.positions[k]) {
          acc += w_j[j](col, row);
        }
        pi_tilde(k, j) = acc;
      }
    }
  } else {
    const SelectionMatrices sel = selection_matrices(cfg);
    const CMatrix e1 = sel.e1.cast<Complex>();
    const CMatrix pi_bar =
        kron(CMatrix::Identity(basis.rows, basis.rows), pi);
    pi_tilde = e1 * pi_bar.conjugate() * e1.transpose();
  }
  return hermitian_part(pi_tilde);
}

QuadraticMseParts assemble_mse_parts(const SystemConfig& cfg,
                                     const ChannelRealization& ch,
                                     const std::vector<CMatrix>& v,
                                     const std::vector<CMatrix>& u,
                                     const WeightMatrices& theta,
                                     AssemblyMode mode) {
  QuadraticMseParts parts;
  parts.q_n = assemble_q1(cfg, ch, v, u, theta, mode);
  auto [q2, c] = assemble_q2_c(cfg, ch, u, theta, mode);
  for (int n = 0; n < cfg.n; ++n) {
    parts.q_n[n] = hermitian_part(parts.q_n[n] + q2[n]);
  }
  parts.lin_n = assemble_q(cfg, ch, v, u, theta, mode);
  parts.z_n.reserve(cfg.n);
  for (int n = 0; n < cfg.n; ++n) {
    parts.z_n.push_back(c[n] + theta.theta[n].sum());
  }
  return parts;
}

QcqpInstance build_qcqp_instance(const SystemConfig& cfg,
                                 const ChannelRealization& ch,
                                 const std::vector<CMatrix>& v,
                                 const std::vector<CMatrix>& u,
                                 const WeightMatrices& theta,
                                 AssemblyMode mode) {
  const QuadraticMseParts parts = assemble_mse_parts(cfg, ch, v, u, theta, mode);
  QcqpInstance inst;
  const int dim = cfg.relay_dim();
  inst.big_q = CMatrix::Zero(dim, dim);
  inst.q = CVector::Zero(dim);
  inst.z = 0.0;
  for (int n = 0; n < cfg.n; ++n) {
    inst.big_q += parts.q_n[n];
    inst.q += parts.lin_n[n];
    inst.z += parts.z_n[n];
  }
  inst.big_q = hermitian_part(inst.big_q);
  inst.pi = assemble_power_form(cfg, ch, v, mode);
  inst.p_r_max = cfg.p_r_max;
  return inst;
}

std::vector<double> weighted_mse_quadratic(const QuadraticMseParts& parts,
                                           const CVector& r) {
  const std::size_t n = parts.q_n.size();
  if (parts.lin_n.size() != n || parts.z_n.size() != n) {
    throw InvalidDimensionError("weighted_mse_quadratic: ragged parts");
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex quad = r.dot(parts.q_n[i] * r);  // r^H Q r
    const Complex cross = r.dot(parts.lin_n[i]);   // r^H q
    const Complex value = quad - cross - std::conj(cross) + parts.z_n[i];
    if (std::abs(value.imag()) > 1e-9 * (1.0 + std::abs(value.real()))) {
      throw NumericalConsistencyError(
          "weighted_mse_quadratic: non-real MSE value");
    }
    out[i] = value.real();
  }
  return out;
}

std::vector<double> weighted_mse_direct(const SystemConfig& cfg,
                                        const ChannelRealization& ch,
                                        const RelayFilter& relay,
                                        const std::vector<CMatrix>& v,
                                        const std::vector<CMatrix>& u,
                                        const WeightMatrices& theta) {
  cfg.validate();
  check_sizes(cfg, v, u, theta);
  const auto channels = effective_subcarrier_channels(cfg, ch, relay);
  std::vector<double> out(cfg.n);
  for (int n = 0; n < cfg.n; ++n) {
    const CMatrix a = u[n] * channels[n].h * v[n];
    const Complex term1 =
        (theta.theta[n].asDiagonal() * (a * a.adjoint())).trace();
    const Complex term2 =
        (theta.theta[n].asDiagonal() *
         (u[n] * channels[n].sigma * u[n].adjoint()))
            .trace();
    const Complex term3 = (theta.theta[n].asDiagonal() * a.adjoint()).trace();
    const double term5 = theta.theta[n].sum();
    out[n] = (term1 + term2 - term3 - std::conj(term3)).real() + term5;
  }
  return out;
}

double relay_power_direct(const SystemConfig& cfg,
                          const ChannelRealization& ch,
                          const RelayFilter& relay,
                          const std::vector<CMatrix>& v) {
  cfg.validate();
  const ChainParts parts = chain_parts(cfg, ch);
  const CMatrix r = relay_matrix(cfg, relay);
  const CMatrix signal = r * parts.tx_front * assemble_frame_blockdiag(v);
  return signal.squaredNorm() + cfg.sigma_r2 * r.squaredNorm();
}

}  // namespace ffrelay
