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
#include <optional>
#include <string>

#include "qhist/core/errors.hpp"
#include "qhist/core/tolerances.hpp"
#include "qhist/hilbert/linalg.hpp"
#include "qhist/hilbert/tensor_space.hpp"

namespace qhist {

enum class StateKind { pure, mixed };

/// A pure vector or a density matrix over a TensorSpace. Mixed states may
/// additionally carry a factor K with rho = K K^dagger, which is what the
/// history machinery propagates.
class QState {
 public:
  QState() = default;

  static QState pure(const TensorSpace& space, const Vector& psi, const Tolerances& tol = {}) {
    QState s(space, StateKind::pure, true);
    s.vector_ = psi;
    s.check_dim(psi.size());
    const double n = psi.norm();
    if (std::abs(n - 1.0) > tol.norm) {
      throw InvariantError("pure state has norm " + std::to_string(n) + ", expected 1");
    }
    return s;
  }

  /// Unnormalized pure vector such as a branch C_alpha |psi>.
  static QState unnormalized(const TensorSpace& space, const Vector& psi) {
    QState s(space, StateKind::pure, false);
    s.vector_ = psi;
    s.check_dim(psi.size());
    return s;
  }

  static QState mixed(const TensorSpace& space, const Matrix& rho, const Tolerances& tol = {}) {
    QState s(space, StateKind::mixed, true);
    s.check_dim(rho.rows());
    if (rho.rows() != rho.cols()) throw InvariantError("density matrix is not square");
    if (hermiticity_error(rho) > tol.ortho) throw InvariantError("density matrix is not Hermitian");
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > tol.norm) {
      throw InvariantError("density matrix has trace " + std::to_string(tr) + ", expected 1");
    }
    s.factor_ = psd_factor(rho, tol.psd);
    s.matrix_ = rho;
    return s;
  }

  /// Mixed state given through a factor K, rho = K K^dagger.
  static QState from_factor(const TensorSpace& space, const Matrix& k, const Tolerances& tol = {}) {
    QState s(space, StateKind::mixed, true);
    s.check_dim(k.rows());
    const double tr = k.squaredNorm();
    if (std::abs(tr - 1.0) > tol.norm) {
      throw InvariantError("state factor has trace " + std::to_string(tr) + ", expected 1");
    }
    s.factor_ = k;
    return s;
  }

  /// Density matrix stored without validation, e.g. p_alpha rho_alpha or a
  /// reduced state computed from an already validated one.
  static QState unchecked_mixed(const TensorSpace& space, const Matrix& rho, bool normalized = false) {
    QState s(space, StateKind::mixed, normalized);
    s.check_dim(rho.rows());
    s.matrix_ = rho;
    return s;
  }

  const TensorSpace& space() const { return space_; }
  StateKind kind() const { return kind_; }
  bool is_pure() const { return kind_ == StateKind::pure; }
  bool normalized() const { return normalized_; }

  const Vector& vector() const {
    if (!is_pure()) throw PreconditionError("state is mixed, no state vector");
    return vector_;
  }

  Matrix density() const {
    if (is_pure()) return vector_ * vector_.adjoint();
    if (matrix_) return *matrix_;
    return factor_ * factor_.adjoint();
  }

  /// Columns K with rho = K K^dagger.
  Matrix factor() const {
    if (is_pure()) return vector_;
    if (factor_.size() > 0 || !matrix_) return factor_;
    return psd_factor(*matrix_, Tolerances{}.psd);
  }

  double trace() const {
    if (is_pure()) return vector_.squaredNorm();
    if (matrix_) return matrix_->trace().real();
    return factor_.squaredNorm();
  }

 private:
  QState(const TensorSpace& space, StateKind kind, bool normalized)
      : space_(space), kind_(kind), normalized_(normalized) {}

  void check_dim(Eigen::Index n) const {
    if (static_cast<std::size_t>(n) != space_.total_dim()) {
      throw InvariantError("state has dimension " + std::to_string(n) + ", space has " +
                           std::to_string(space_.total_dim()));
    }
  }

  TensorSpace space_;
  StateKind kind_ = StateKind::pure;
  bool normalized_ = true;
  Vector vector_;
  Matrix factor_;
  std::optional<Matrix> matrix_;
};

/// Reduced state on the kept factors, in the space's factor order.
inline QState partial_trace(const QState& state, const Fragment& keep) {
  if (!(keep.space() == state.space())) throw InvariantError("partial_trace: fragment belongs to another space");
  const IndexSplit split(keep);
  const Matrix r = split.reshape(state.factor());
  const Matrix rho = r * r.adjoint();
  return QState::unchecked_mixed(keep.subspace(), rho, state.normalized());
}

}  // namespace qhist
