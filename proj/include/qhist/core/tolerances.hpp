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

namespace qhist {

/// Numerical tolerances shared by all modules. Every report records the
/// values in force so numerical claims can be audited.
struct Tolerances {
  double norm = 1e-10;              // state normalisation, probability sums
  double psd = 1e-9;                // eigenvalues >= -psd are clipped to 0
  double ortho = 1e-9;              // hermiticity, unitarity, idempotence, subspace overlap
  double rank = 1e-9;               // eigenvalue cutoff for support projectors
  double recon = 1e-10;             // Schmidt / branch-sum reconstruction
  double identity = 1e-10;          // fidelity identity gap
  double zero_probability = 1e-14;  // histories below this are skipped

  std::vector<std::pair<std::string, double>> entries() const {
    return {{"tol_norm", norm},   {"tol_psd", psd},           {"tol_ortho", ortho},
            {"rank_tol", rank},   {"tol_recon", recon},       {"tol_identity", identity},
            {"tol_zero_probability", zero_probability}};
  }

  /// Sets one tolerance by its report key. Throws InvariantError on an
  /// unknown key or a negative value.
  void set(const std::string& key, double value) {
    if (!(value >= 0.0)) throw InvariantError("tolerance '" + key + "' must be non-negative");
    if (key == "tol_norm") norm = value;
    else if (key == "tol_psd") psd = value;
    else if (key == "tol_ortho") ortho = value;
    else if (key == "rank_tol") rank = value;
    else if (key == "tol_recon") recon = value;
    else if (key == "tol_identity") identity = value;
    else if (key == "tol_zero_probability") zero_probability = value;
    else throw InvariantError("unknown tolerance key '" + key + "'");
  }
};

}  // namespace qhist
