// SPDX-License-Identifier: Apache-2.0
//
// ffrelay: joint FIR-relay and MIMO-OFDM transceiver design
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ffrelay/sysmodel.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "ffrelay/rng.hpp"

namespace ffrelay {

void SystemConfig::validate() const {
  const auto need = [](bool ok, const char* msg) {
    if (!ok) throw InvalidDimensionError(std::string("SystemConfig: ") + msg);
  };
  need(n >= 1, "n must be >= 1");
  need(n_t >= 1 && m_r >= 1 && m_t >= 1 && n_r >= 1,
       "antenna counts must be >= 1");
  need(gamma >= 1, "gamma must be >= 1");
  need(gamma <= std::min(std::min(n_t, m_r), std::min(m_t, n_r)),
       "gamma must not exceed min(n_t, m_r, m_t, n_r)");
  need(l_f >= 1 && l_r >= 1 && l_g >= 1, "tap counts must be >= 1");
  need(n_cp >= min_cp(), "n_cp must be >= l_f + l_r + l_g - 3");
  need(p_s_max > 0.0 && p_r_max > 0.0, "power budgets must be > 0");
  need(sigma_r2 >= 0.0 && sigma_d2 >= 0.0, "noise variances must be >= 0");
  need(sigma_f2 >= 0.0 && sigma_g2 >= 0.0, "tap variances must be >= 0");
}

SystemConfig SystemConfig::with_relay_taps(int taps) const {
  SystemConfig out = *this;
  const bool was_minimal = (n_cp == min_cp());
  out.l_r = taps;
  if (was_minimal || out.n_cp < out.min_cp()) out.n_cp = out.min_cp();
  return out;
}

std::string SystemConfig::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["n_t"] = n_t;
  j["m_r"] = m_r;
  j["m_t"] = m_t;
  j["n_r"] = n_r;
  j["gamma"] = gamma;
  j["l_f"] = l_f;
  j["l_r"] = l_r;
  j["l_g"] = l_g;
  j["n_cp"] = n_cp;
  j["sigma_r2"] = sigma_r2;
  j["sigma_d2"] = sigma_d2;
  j["p_s_max"] = p_s_max;
  j["p_r_max"] = p_r_max;
  j["sigma_f2"] = sigma_f2;
  j["sigma_g2"] = sigma_g2;
  return j.dump(2);
}

SystemConfig SystemConfig::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  SystemConfig cfg;
  cfg.n = j.at("n").get<int>();
  cfg.n_t = j.at("n_t").get<int>();
  cfg.m_r = j.at("m_r").get<int>();
  cfg.m_t = j.at("m_t").get<int>();
  cfg.n_r = j.at("n_r").get<int>();
  cfg.gamma = j.at("gamma").get<int>();
  cfg.l_f = j.at("l_f").get<int>();
  cfg.l_r = j.at("l_r").get<int>();
  cfg.l_g = j.at("l_g").get<int>();
  cfg.n_cp = j.value("n_cp", -1);
  if (cfg.n_cp < 0) cfg.n_cp = cfg.min_cp();
  cfg.sigma_r2 = j.at("sigma_r2").get<double>();
  cfg.sigma_d2 = j.at("sigma_d2").get<double>();
  cfg.p_s_max = j.at("p_s_max").get<double>();
  cfg.p_r_max = j.at("p_r_max").get<double>();
  cfg.sigma_f2 = j.at("sigma_f2").get<double>();
  cfg.sigma_g2 = j.at("sigma_g2").get<double>();
  cfg.validate();
  return cfg;
}

ChannelRealization generate_channel(const SystemConfig& cfg,
                                    std::uint64_t seed) {
  cfg.validate();
  Crng rng(derive_seed(seed, 0));
  ChannelRealization ch;
  ch.f_taps.reserve(cfg.l_f);
  for (int k = 0; k < cfg.l_f; ++k) {
    CMatrix f(cfg.m_r, cfg.n_t);
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      for (Eigen::Index j = 0; j < f.cols(); ++j) {
        f(i, j) = rng.cnormal(cfg.sigma_f2);
      }
    }
    ch.f_taps.push_back(std::move(f));
  }
  ch.g_taps.reserve(cfg.l_g);
  for (int k = 0; k < cfg.l_g; ++k) {
    CMatrix g(cfg.n_r, cfg.m_t);
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (Eigen::Index j = 0; j < g.cols(); ++j) {
        g(i, j) = rng.cnormal(cfg.sigma_g2);
      }
    }
    ch.g_taps.push_back(std::move(g));
  }
  return ch;
}

std::pair<CMatrix, CMatrix> build_cp_matrices(const SystemConfig& cfg) {
  const Eigen::Index nnt = static_cast<Eigen::Index>(cfg.n) * cfg.n_t;
  CMatrix t_cp = CMatrix::Zero((cfg.n + cfg.n_cp) * cfg.n_t, nnt);
  t_cp.topRows(nnt) = CMatrix::Identity(nnt, nnt);
  for (int i = 0; i < cfg.n_cp; ++i) {
    t_cp.block((cfg.n + i) * cfg.n_t, i * cfg.n_t, cfg.n_t, cfg.n_t) =
        CMatrix::Identity(cfg.n_t, cfg.n_t);
  }
  CMatrix t = CMatrix::Zero((cfg.n + cfg.min_cp()) * cfg.n_t, nnt);
  t.topRows(nnt) = CMatrix::Identity(nnt, nnt);
  return {t_cp, t};
}

CMatrix g_tilde(const SystemConfig& cfg, const ChannelRealization& ch) {
  CMatrix gt = CMatrix::Zero(cfg.n_r, static_cast<Eigen::Index>(cfg.m_t) *
                                          (cfg.n + cfg.l_g - 1));
  for (int k = 0; k < cfg.l_g; ++k) {
    gt.block(0, k * cfg.m_t, cfg.n_r, cfg.m_t) = ch.g_taps[k];
  }
  return gt;
}

CMatrix relay_matrix(const SystemConfig& cfg, const RelayFilter& relay) {
  BlockToeplitzSpec spec;
  spec.row_block.blocks = relay.r_taps;
  spec.num_row_blocks = cfg.n + cfg.l_g - 1;
  return blk_toeplitz(spec);
}

CMatrix sr_matrix(const SystemConfig& cfg, const ChannelRealization& ch) {
  BlockToeplitzSpec spec;
  spec.row_block.blocks = ch.f_taps;
  spec.num_row_blocks = cfg.n + cfg.l_g + cfg.l_r - 2;
  return blk_toeplitz(spec);
}

CMatrix sr_matrix_window(const SystemConfig& cfg,
                         const ChannelRealization& ch) {
  BlockRow row;
  row.blocks = ch.f_taps;
  return blk_toeplitz_window(row, cfg.n + cfg.l_g + cfg.l_r - 2,
                             cfg.n + cfg.n_cp);
}

CMatrix rd_matrix(const SystemConfig& cfg, const ChannelRealization& ch) {
  BlockToeplitzSpec spec;
  spec.row_block.blocks = ch.g_taps;
  spec.num_row_blocks = cfg.n;
  return blk_toeplitz(spec);
}

CVector subcarrier_vector(int n_sub, int n) {
  CVector w(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int l = 0; l < n; ++l) {
    const double phase = 2.0 * M_PI *
                         static_cast<double>(((n - n_sub - 1) * l) % n) /
                         static_cast<double>(n);
    w(l) = scale * Complex(std::cos(phase), std::sin(phase));
  }
  return w;
}

std::vector<SubcarrierChannel> effective_subcarrier_channels(
    const SystemConfig& cfg, const ChannelRealization& ch,
    const RelayFilter& relay) {
  cfg.validate();
  if (static_cast<int>(relay.r_taps.size()) != cfg.l_r ||
      relay.r_taps.front().rows() != cfg.m_t ||
      relay.r_taps.front().cols() != cfg.m_r) {
    throw InvalidDimensionError(
        "effective_subcarrier_channels: relay taps inconsistent with config");
  }
  const CMatrix r = relay_matrix(cfg, relay);
  const CMatrix f = sr_matrix(cfg, ch);
  const CMatrix g = rd_matrix(cfg, ch);
  const CMatrix gt = g_tilde(cfg, ch);
  const auto [t_cp, t] = build_cp_matrices(cfg);
  // First row block of the circulant end-to-end channel: Gt R F T.
  const CMatrix h_first = gt * r * f * t;  // N_r x N N_t
  const CMatrix gr_noise = g * r;          // N N_r x (N+L_g+L_r-2) M_r
  const double sqrt_n = std::sqrt(static_cast<double>(cfg.n));

  std::vector<SubcarrierChannel> out(cfg.n);
  for (int sub = 0; sub < cfg.n; ++sub) {
    const CVector w = subcarrier_vector(sub, cfg.n);
    // H_n = sqrt(N) * sum_l h_first[l] * w(l)
    CMatrix h = CMatrix::Zero(cfg.n_r, cfg.n_t);
    CMatrix wg = CMatrix::Zero(cfg.n_r, gr_noise.cols());
    for (int l = 0; l < cfg.n; ++l) {
      h += w(l) * h_first.block(0, l * cfg.n_t, cfg.n_r, cfg.n_t);
      wg += std::conj(w(l)) *
            gr_noise.block(l * cfg.n_r, 0, cfg.n_r, gr_noise.cols());
    }
    h *= sqrt_n;
    CMatrix sigma = cfg.sigma_r2 * (wg * wg.adjoint()) +
                    cfg.sigma_d2 * CMatrix::Identity(cfg.n_r, cfg.n_r);
    sigma = 0.5 * (sigma + sigma.adjoint().eval());
    out[sub] = SubcarrierChannel{std::move(h), std::move(sigma)};
  }
  return out;
}

CVector relay_to_vec(const RelayFilter& relay) {
  const Eigen::Index m_t = relay.r_taps.front().rows();
  const Eigen::Index m_r = relay.r_taps.front().cols();
  const Eigen::Index l_r = static_cast<Eigen::Index>(relay.r_taps.size());
  CVector r(m_t * l_r * m_r);
  for (Eigen::Index j = 0; j < m_t; ++j) {
    for (Eigen::Index l = 0; l < l_r; ++l) {
      for (Eigen::Index b = 0; b < m_r; ++b) {
        r((j * l_r + l) * m_r + b) = relay.r_taps[l](j, b);
      }
    }
  }
  return r;
}

RelayFilter vec_to_relay(const SystemConfig& cfg, const CVector& r) {
  if (r.size() != cfg.relay_dim()) {
    throw InvalidDimensionError("vec_to_relay: wrong vector length");
  }
  RelayFilter relay;
  relay.r_taps.assign(cfg.l_r, CMatrix::Zero(cfg.m_t, cfg.m_r));
  for (int j = 0; j < cfg.m_t; ++j) {
    for (int l = 0; l < cfg.l_r; ++l) {
      for (int b = 0; b < cfg.m_r; ++b) {
        relay.r_taps[l](j, b) =
            r((static_cast<Eigen::Index>(j) * cfg.l_r + l) * cfg.m_r + b);
      }
    }
  }
  return relay;
}

CMatrix assemble_frame_blockdiag(const std::vector<CMatrix>& per_subcarrier) {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  for (const auto& m : per_subcarrier) {
    rows += m.rows();
    cols += m.cols();
  }
  CMatrix out = CMatrix::Zero(rows, cols);
  Eigen::Index ro = 0;
  Eigen::Index co = 0;
  for (auto it = per_subcarrier.rbegin(); it != per_subcarrier.rend(); ++it) {
    out.block(ro, co, it->rows(), it->cols()) = *it;
    ro += it->rows();
    co += it->cols();
  }
  return out;
}

}  // namespace ffrelay
