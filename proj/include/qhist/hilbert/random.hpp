// Copyright 2026 The qhist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "qhist/hilbert/state.hpp"
#include "qhist/hilbert/tensor_space.hpp"

namespace qhist {

using Rng = std::mt19937_64;

inline Matrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal moved into Q.
inline Matrix haar_unitary(Eigen::Index n, Rng& rng) {
  const Matrix z = ginibre(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = std::abs(r(i, i));
    if (a > 0) q.col(i) *= r(i, i) / a;
  }
  return q;
}

inline Vector random_unit_vector(Eigen::Index n, Rng& rng) {
  Vector v = ginibre(n, 1, rng).col(0);
  return v / v.norm();
}

inline QState random_pure_state(const TensorSpace& space, Rng& rng) {
  return QState::pure(space, random_unit_vector(static_cast<Eigen::Index>(space.total_dim()), rng));
}

/// Random density matrix of the given rank (Ginibre ensemble).
inline QState random_mixed_state(const TensorSpace& space, Eigen::Index rank, Rng& rng) {
  Matrix k = ginibre(static_cast<Eigen::Index>(space.total_dim()), rank, rng);
  k /= k.norm();
  return QState::mixed(space, k * k.adjoint());
}

}  // namespace qhist
