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
#include <string>
#include <vector>

#include "qhist/core/errors.hpp"
#include "qhist/hilbert/operator.hpp"
#include "qhist/hilbert/state.hpp"
#include "qhist/histories/history_set.hpp"
#include "qhist/models/gates.hpp"

namespace qhist {

/// mixed: S in |+>, E maximally mixed, one CNOT.  purified: the same with
/// E purified by an untouched X.  ghz: E and X both copy S from |00>.
/// ghz_scrambled: ghz followed by an E-X interaction that hides the record
/// in their correlations.
enum class NoRecordVariant { mixed, purified, ghz, ghz_scrambled };

inline NoRecordVariant parse_no_record_variant(const std::string& s) {
  if (s == "mixed") return NoRecordVariant::mixed;
  if (s == "purified") return NoRecordVariant::purified;
  if (s == "ghz") return NoRecordVariant::ghz;
  if (s == "ghz_scrambled") return NoRecordVariant::ghz_scrambled;
  throw InvariantError("unknown no-record variant '" + s + "'");
}

/// |00> -> (|00>+|11>)/sqrt2, |11> -> (|10>+|01>)/sqrt2, completed unitarily.
inline Matrix scrambling_unitary() {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix v = Matrix::Zero(4, 4);
  // columns are images of |00>, |01>, |10>, |11>
  v(0, 0) = r, v(3, 0) = r;
  v(0, 1) = r, v(3, 1) = -r;
  v(2, 2) = r, v(1, 2) = -r;
  v(2, 3) = r, v(1, 3) = r;
  return v;
}

inline HistorySet build_mixed_record_counterexample(NoRecordVariant variant = NoRecordVariant::mixed) {
  const double r = 1.0 / std::sqrt(2.0);
  Vector plus(2);
  plus << r, r;
  HistorySetOptions opt;
  opt.system_labels = {"S"};

  if (variant == NoRecordVariant::mixed) {
    const TensorSpace space = TensorSpace::qubits({"S", "E"});
    Schedule schedule(space, {{Operator(space, {"S", "E"}, gates::cnot())}});
    const Matrix k = kron(Matrix(plus), Matrix(Matrix::Identity(2, 2) * r));
    return HistorySet(std::move(schedule), {ProjectorFamily::basis(space, "S", 1)}, QState::from_factor(space, k),
                      std::move(opt));
  }

  const TensorSpace space = TensorSpace::qubits({"S", "E", "X"});
  std::vector<std::vector<Operator>> steps;
  Vector psi;
  if (variant == NoRecordVariant::purified) {
    Vector ex = Vector::Zero(4);
    ex(0) = r;
    ex(3) = r;
    psi = kron(plus, ex);
    steps.push_back({Operator(space, {"S", "E"}, gates::cnot())});
    opt.auxiliary_labels = {"X"};
  } else {
    psi = kron(plus, gates::basis_vector(4, 0));
    steps.push_back({Operator(space, {"S", "E"}, gates::cnot()), Operator(space, {"S", "X"}, gates::cnot())});
    if (variant == NoRecordVariant::ghz_scrambled) steps.push_back({Operator(space, {"E", "X"}, scrambling_unitary())});
  }
  const std::size_t t = steps.size();
  Schedule schedule(space, std::move(steps));
  return HistorySet(std::move(schedule), {ProjectorFamily::basis(space, "S", t)}, QState::pure(space, psi),
                    std::move(opt));
}

}  // namespace qhist
