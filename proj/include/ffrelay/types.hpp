// SPDX-License-Identifier: Apache-2.0
//
// ffrelay: joint FIR-relay and MIMO-OFDM transceiver design
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef FFRELAY_TYPES_HPP
#define FFRELAY_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ffrelay {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Thrown when an input matrix/vector has inconsistent dimensions.
class InvalidDimensionError : public std::invalid_argument {
 public:
  explicit InvalidDimensionError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// Thrown when a solver precondition (definiteness, positivity) fails.
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// Thrown when two evaluation routes that must agree drift apart, or when a
/// provably real quantity comes back with a non-negligible imaginary part.
class NumericalConsistencyError : public std::runtime_error {
 public:
  explicit NumericalConsistencyError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace ffrelay

#endif  // FFRELAY_TYPES_HPP
