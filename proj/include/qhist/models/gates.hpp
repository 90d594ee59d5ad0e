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

#include "qhist/hilbert/tensor_space.hpp"

namespace qhist::gates {

inline Matrix hadamard() {
  Matrix h(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  h << r, r, r, -r;
  return h;
}

inline Matrix pauli_x() {
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

/// Control first, target second.
inline Matrix cnot() {
  Matrix c = Matrix::Zero(4, 4);
  c(0, 0) = c(1, 1) = 1;
  c(2, 3) = c(3, 2) = 1;
  return c;
}

/// sum_s |s><s| x U_s, control first.
inline Matrix controlled(const std::vector<Matrix>& branches) {
  const Eigen::Index d = static_cast<Eigen::Index>(branches.size());
  const Eigen::Index e = branches.empty() ? 0 : branches.front().rows();
  Matrix out = Matrix::Zero(d * e, d * e);
  for (Eigen::Index s = 0; s < d; ++s) out.block(s * e, s * e, e, e) = branches[s];
  return out;
}

inline Vector basis_vector(Eigen::Index dim, Eigen::Index i) {
  Vector v = Vector::Zero(dim);
  v(i) = 1.0;
  return v;
}

}  // namespace qhist::gates
