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
#include "qhist/hilbert/tensor_space.hpp"

namespace qhist {

/// Discrete-time unitary evolution. Step s takes the state from time s to
/// time s + 1 by applying its gates in order.
class Schedule {
 public:
  Schedule() = default;

  Schedule(const TensorSpace& space, std::vector<std::vector<Operator>> steps, const Tolerances& tol = {})
      : space_(space), steps_(std::move(steps)) {
    for (std::size_t s = 0; s < steps_.size(); ++s) {
      for (std::size_t g = 0; g < steps_[s].size(); ++g) check_gate(steps_[s][g], s, tol);
    }
  }

  const TensorSpace& space() const { return space_; }
  std::size_t duration() const { return steps_.size(); }
  const std::vector<std::vector<Operator>>& steps() const { return steps_; }
  const std::vector<Operator>& step(std::size_t s) const { return steps_.at(s); }

  void append_step(std::vector<Operator> gates, const Tolerances& tol = {}) {
    for (const auto& g : gates) check_gate(g, steps_.size(), tol);
    steps_.push_back(std::move(gates));
  }

  /// U(to <- from) applied to the columns of cols.
  Matrix evolve(Matrix cols, std::size_t from, std::size_t to) const {
    check_range(from, to);
    for (std::size_t s = from; s < to; ++s) {
      for (const auto& g : steps_[s]) cols = g.apply(cols);
    }
    return cols;
  }

  /// U(to <- from)^dagger applied to the columns of cols.
  Matrix evolve_adjoint(Matrix cols, std::size_t from, std::size_t to) const {
    check_range(from, to);
    for (std::size_t s = to; s-- > from;) {
      const auto& gates = steps_[s];
      for (auto g = gates.rbegin(); g != gates.rend(); ++g) cols = g->apply_adjoint(cols);
    }
    return cols;
  }

  Matrix unitary(std::size_t from, std::size_t to) const {
    const auto n = static_cast<Eigen::Index>(space_.total_dim());
    return evolve(Matrix::Identity(n, n), from, to);
  }

 private:
  void check_gate(const Operator& g, std::size_t s, const Tolerances& tol) const {
    if (!(g.space() == space_)) throw InvariantError("gate in step " + std::to_string(s) + " uses another space");
    if (!is_unitary(g.local(), tol.ortho)) {
      throw InvariantError("gate in step " + std::to_string(s) + " on {" + join(g.target_labels()) +
                           "} is not unitary");
    }
  }

  void check_range(std::size_t from, std::size_t to) const {
    if (from > to || to > steps_.size()) {
      throw PreconditionError("evolution interval [" + std::to_string(from) + ", " + std::to_string(to) +
                              "] outside schedule of duration " + std::to_string(steps_.size()));
    }
  }

  static std::string join(const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + xs[i];
    return out;
  }

  TensorSpace space_;
  std::vector<std::vector<Operator>> steps_;
};

}  // namespace qhist
