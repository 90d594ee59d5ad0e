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

#include <string>
#include <utility>
#include <vector>

#include "qhist/core/errors.hpp"
#include "qhist/core/tolerances.hpp"
#include "qhist/hilbert/linalg.hpp"
#include "qhist/hilbert/operator.hpp"

namespace qhist {

/// Complete set of orthogonal projectors (Schroedinger picture) attached to
/// one event time.
struct ProjectorFamily {
  std::size_t time = 0;
  std::vector<Operator> projectors;
  std::vector<std::string> labels;

  ProjectorFamily() = default;

  ProjectorFamily(std::size_t t, std::vector<Operator> ps, std::vector<std::string> ls = {})
      : time(t), projectors(std::move(ps)), labels(std::move(ls)) {
    if (labels.empty()) {
      for (std::size_t i = 0; i < projectors.size(); ++i) labels.push_back(std::to_string(i));
    }
  }

  std::size_t size() const { return projectors.size(); }

  /// Projectors onto the computational basis states of one factor.
  static ProjectorFamily basis(const TensorSpace& space, const std::string& label, std::size_t t) {
    const std::size_t d = space.dim(space.index_of(label));
    std::vector<Operator> ps;
    for (std::size_t i = 0; i < d; ++i) {
      Matrix p = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
      ps.emplace_back(space, std::vector<std::string>{label}, p);
    }
    return ProjectorFamily(t, std::move(ps));
  }

  /// Checks Hermiticity, idempotence and completeness on the union of the
  /// projectors' targets. Mutual orthogonality follows from these three.
  void validate(const TensorSpace& space, const Tolerances& tol) const {
    const std::string where = "projector family at t=" + std::to_string(time);
    if (projectors.empty()) throw InvariantError(where + " is empty");
    if (labels.size() != projectors.size()) throw InvariantError(where + " has mismatched labels");
    for (std::size_t i = 0; i < labels.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (labels[i] == labels[j]) throw InvariantError(where + " repeats label '" + labels[i] + "'");
      }
    }
    std::vector<std::size_t> all;
    for (const auto& p : projectors) {
      if (!(p.space() == space)) throw InvariantError(where + " uses another space");
      all.insert(all.end(), p.targets().begin(), p.targets().end());
    }
    Matrix sum;
    for (std::size_t i = 0; i < projectors.size(); ++i) {
      const Matrix m = projectors[i].widened(all).local();
      if (!is_projector(m, tol.ortho)) {
        throw InvariantError(where + ": '" + labels[i] + "' is not a Hermitian idempotent");
      }
      sum = i == 0 ? m : Matrix(sum + m);
    }
    const Matrix defect = sum - Matrix::Identity(sum.rows(), sum.cols());
    if (defect.cwiseAbs().maxCoeff() > tol.ortho) throw InvariantError(where + " does not sum to the identity");
  }
};

}  // namespace qhist
