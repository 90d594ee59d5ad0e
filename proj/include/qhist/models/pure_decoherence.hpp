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
#include <vector>

#include "qhist/core/errors.hpp"
#include "qhist/hilbert/linalg.hpp"
#include "qhist/hilbert/operator.hpp"
#include "qhist/hilbert/state.hpp"
#include "qhist/histories/history_set.hpp"
#include "qhist/models/gates.hpp"

namespace qhist {

/// S with pointer basis |s>, environment components E1..En. One step applies
/// sum_s |s><s| x U_s^k to every (S, E_k) pair.
struct PureDecoherenceConfig {
  std::size_t pointer_dim = 2;
  std::vector<Complex> amplitudes;             // c_s, default uniform
  std::vector<std::vector<Matrix>> unitaries;  // [s][k]
  std::vector<Matrix> env_init;                // rho^{k,0}, default |0><0|
  std::vector<std::size_t> event_times{1};     // pointer projections, each 0 or 1
};

class PureDecoherenceModel {
 public:
  explicit PureDecoherenceModel(PureDecoherenceConfig cfg) : cfg_(std::move(cfg)), hs_(build(cfg_)) {}

  const PureDecoherenceConfig& config() const { return cfg_; }
  const HistorySet& history_set() const { return hs_; }
  std::size_t components() const { return cfg_.unitaries.front().size(); }

  static std::string env_label(std::size_t k) { return "E" + std::to_string(k + 1); }

  /// Gamma_{s s'} = prod_k Tr[U_s^k rho^{k,0} U_{s'}^{k dagger}].
  Complex decoherence_factor(std::size_t s, std::size_t sp) const {
    std::vector<std::size_t> all(components());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
    return factor_over(all, s, sp);
  }

  /// Gamma^F_{s s'} over the components named in fragment.
  Complex fragment_decoherence_factor(const std::vector<std::string>& fragment, std::size_t s, std::size_t sp) const {
    std::vector<std::size_t> ks;
    for (const auto& l : fragment) {
      bool found = false;
      for (std::size_t k = 0; k < components(); ++k) {
        if (env_label(k) == l) {
          ks.push_back(k);
          found = true;
        }
      }
      if (!found) throw InvariantError("'" + l + "' is not an environment component");
    }
    return factor_over(ks, s, sp);
  }

 private:
  Complex factor_over(const std::vector<std::size_t>& ks, std::size_t s, std::size_t sp) const {
    if (s >= cfg_.pointer_dim || sp >= cfg_.pointer_dim) throw PreconditionError("pointer index out of range");
    Complex g = 1.0;
    for (std::size_t k : ks) {
      g *= (cfg_.unitaries[s][k] * env_state(cfg_, k) * cfg_.unitaries[sp][k].adjoint()).trace();
    }
    return g;
  }

  static Matrix env_state(const PureDecoherenceConfig& cfg, std::size_t k) {
    if (!cfg.env_init.empty()) return cfg.env_init[k];
    const Eigen::Index e = cfg.unitaries.front()[k].rows();
    Matrix r = Matrix::Zero(e, e);
    r(0, 0) = 1.0;
    return r;
  }

  static HistorySet build(PureDecoherenceConfig& cfg) {
    const Tolerances tol;
    if (cfg.pointer_dim < 1) throw InvariantError("pointer dimension must be positive");
    if (cfg.unitaries.size() != cfg.pointer_dim) {
      throw InvariantError("need one unitary list per pointer state, got " + std::to_string(cfg.unitaries.size()));
    }
    const std::size_t n = cfg.unitaries.front().size();
    if (n < 1) throw InvariantError("need at least one environment component");
    for (std::size_t s = 0; s < cfg.pointer_dim; ++s) {
      if (cfg.unitaries[s].size() != n) throw InvariantError("unitary lists differ in length");
      for (std::size_t k = 0; k < n; ++k) {
        const Matrix& u = cfg.unitaries[s][k];
        if (u.rows() != cfg.unitaries[0][k].rows() || !is_unitary(u, tol.ortho)) {
          throw InvariantError("U_" + std::to_string(s) + " on component " + std::to_string(k + 1) + " is not unitary");
        }
      }
    }
    if (cfg.amplitudes.empty()) cfg.amplitudes.assign(cfg.pointer_dim, 1.0 / std::sqrt(double(cfg.pointer_dim)));
    if (cfg.amplitudes.size() != cfg.pointer_dim) throw InvariantError("amplitude count differs from pointer dimension");
    if (!cfg.env_init.empty() && cfg.env_init.size() != n) throw InvariantError("need one initial state per component");

    std::vector<Factor> factors{{"S", cfg.pointer_dim}};
    for (std::size_t k = 0; k < n; ++k) {
      factors.push_back({env_label(k), static_cast<std::size_t>(cfg.unitaries[0][k].rows())});
    }
    const TensorSpace space(factors);

    std::vector<Operator> step;
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<Matrix> us;
      for (std::size_t s = 0; s < cfg.pointer_dim; ++s) us.push_back(cfg.unitaries[s][k]);
      step.emplace_back(space, std::vector<std::string>{"S", env_label(k)}, gates::controlled(us));
    }
    Schedule schedule(space, {std::move(step)});

    std::vector<ProjectorFamily> families;
    for (std::size_t t : cfg.event_times) {
      if (t > 1) throw InvariantError("pure decoherence events must sit at t = 0 or t = 1");
      families.push_back(ProjectorFamily::basis(space, "S", t));
    }

    Vector c(static_cast<Eigen::Index>(cfg.pointer_dim));
    for (std::size_t s = 0; s < cfg.pointer_dim; ++s) c(static_cast<Eigen::Index>(s)) = cfg.amplitudes[s];
    if (std::abs(c.norm() - 1.0) > tol.norm) throw InvariantError("system amplitudes are not normalized");
    Matrix k = c;
    for (std::size_t j = 0; j < n; ++j) {
      const Matrix rho = env_state(cfg, j);
      if (std::abs(rho.trace().real() - 1.0) > tol.norm || hermiticity_error(rho) > tol.ortho) {
        throw InvariantError("initial state of component " + std::to_string(j + 1) + " is not a density matrix");
      }
      k = kron(k, psd_factor(rho, tol.psd));
    }
    QState initial = k.cols() == 1 ? QState::pure(space, k.col(0)) : QState::from_factor(space, k);

    HistorySetOptions opt;
    opt.system_labels = {"S"};
    return HistorySet(std::move(schedule), std::move(families), std::move(initial), std::move(opt));
  }

  PureDecoherenceConfig cfg_;
  HistorySet hs_;
};

inline PureDecoherenceModel build_pure_decoherence_model(PureDecoherenceConfig cfg) {
  return PureDecoherenceModel(std::move(cfg));
}

}  // namespace qhist
