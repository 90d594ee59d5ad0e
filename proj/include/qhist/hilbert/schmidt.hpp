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

#include <algorithm>

#include "qhist/core/errors.hpp"
#include "qhist/hilbert/linalg.hpp"
#include "qhist/hilbert/state.hpp"
#include "qhist/hilbert/tensor_space.hpp"

namespace qhist {

/// psi = sum_i sqrt(d_i) |A_i> |B_i>, with A on the cut factors and B on
/// the complement (both in space order).
struct SchmidtDecomposition {
  RealVector coefficients;  // d_i, nonincreasing
  Matrix left_vectors;      // columns |A_i>
  Matrix right_vectors;     // columns |B_i>
  TensorSpace left_space;
  TensorSpace right_space;

  std::size_t rank() const { return static_cast<std::size_t>(coefficients.size()); }

  Vector reconstruct(const Fragment& cut) const {
    const IndexSplit split(cut);
    Matrix block = Matrix::Zero(left_vectors.rows(), right_vectors.rows());
    for (Eigen::Index i = 0; i < coefficients.size(); ++i) {
      block += std::sqrt(coefficients(i)) * left_vectors.col(i) * right_vectors.col(i).transpose();
    }
    return split.unreshape(block);
  }
};

inline SchmidtDecomposition schmidt(const QState& psi, const Fragment& cut) {
  if (!psi.is_pure()) throw PreconditionError("schmidt: state is mixed");
  if (!(cut.space() == psi.space())) throw InvariantError("schmidt: fragment belongs to another space");
  const IndexSplit split(cut);
  const Matrix m = split.reshape(psi.vector());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  const double largest = s.size() > 0 ? s(0) : 0.0;
  const double floor = spectral_noise_floor(std::max(m.rows(), m.cols()), largest);
  Eigen::Index keep = 0;
  while (keep < s.size() && s(keep) > floor) ++keep;
  SchmidtDecomposition out;
  out.coefficients = s.head(keep).cwiseAbs2();
  out.left_vectors = svd.matrixU().leftCols(keep);
  out.right_vectors = svd.matrixV().leftCols(keep).conjugate();
  out.left_space = cut.subspace();
  out.right_space = cut.complement().subspace();
  return out;
}

}  // namespace qhist
