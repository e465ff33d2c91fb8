// SPDX-License-Identifier: Apache-2.0
//
// ffrelay: joint FIR-relay and MIMO-OFDM transceiver design
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef FFRELAY_RNG_HPP
#define FFRELAY_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "ffrelay/types.hpp"

namespace ffrelay {

/// splitmix64 step; used to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic substream seed for (master seed, index). Mixing both inputs
/// through splitmix64 keeps adjacent indices statistically unrelated.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s = a ^ (index * 0x9e3779b97f4a7c15ULL + 0x165667b19e3779f9ULL);
  splitmix64(s);
  return splitmix64(s);
}

/// Complex-Gaussian stream with a platform-independent Box-Muller transform
/// on top of mt19937_64 (std::normal_distribution is not pinned by the
/// standard, so it is avoided here).
class Crng {
 public:
  explicit Crng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in (0, 1]; never returns 0 so log() below is safe.
  double uniform_oc() {
    // 53-bit mantissa draw mapped to (0, 1].
    return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform in [0, 1).
  double uniform_co() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Standard real normal N(0, 1).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_oc();
    const double u2 = uniform_co();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Circularly-symmetric complex normal CN(0, variance).
  Complex cnormal(double variance) {
    const double scale = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return Complex(scale * re, scale * im);
  }

  /// Vector of i.i.d. CN(0, variance) entries.
  CVector cnormal_vector(Eigen::Index n, double variance) {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cnormal(variance);
    return v;
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ffrelay

#endif  // FFRELAY_RNG_HPP
