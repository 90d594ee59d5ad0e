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

enum class EnvInit { pure, mixed };

/// Where each event sits relative to its branching round: right after the
/// sub-environment CNOTs (t_m = 2m) or right after the Hadamard (t_m = 2m - 1).
enum class EventPlacement { after_recording, after_branching };

struct CnotModelConfig {
  std::size_t events = 3;
  std::vector<std::size_t> spins_per_subenv{1};  // one entry per event, or one entry for all
  EnvInit env_init = EnvInit::pure;
  double p0 = 1.0;     // per-spin diag(p0, 1 - p0) when mixed
  bool purify = false;  // mixed environment as pure state with X partners
  EventPlacement placement = EventPlacement::after_recording;

  std::size_t spins(std::size_t m) const {
    return spins_per_subenv.size() == 1 ? spins_per_subenv[0] : spins_per_subenv.at(m);
  }

  void validate() const {
    if (events < 1) throw InvariantError("cnot model needs at least one branching event");
    if (spins_per_subenv.size() != 1 && spins_per_subenv.size() != events) {
      throw InvariantError("spins_per_subenv must have one entry or one per event");
    }
    for (std::size_t n : spins_per_subenv) {
      if (n < 1) throw InvariantError("each sub-environment needs at least one spin");
    }
    if (!(p0 >= 0.0 && p0 <= 1.0)) throw InvariantError("p0 must lie in [0, 1]");
    if (purify && env_init != EnvInit::mixed) throw InvariantError("purify requires a mixed environment");
  }
};

inline std::string cnot_env_label(std::size_t m, std::size_t k) {
  return "E" + std::to_string(m + 1) + "_" + std::to_string(k + 1);
}

inline std::string cnot_aux_label(std::size_t m, std::size_t k) {
  return "X" + std::to_string(m + 1) + "_" + std::to_string(k + 1);
}

/// Labels of sub-environment E_{m+1}.
inline std::vector<std::string> cnot_subenv_labels(const CnotModelConfig& cfg, std::size_t m) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < cfg.spins(m); ++k) out.push_back(cnot_env_label(m, k));
  return out;
}

inline std::vector<std::string> cnot_env_labels(const CnotModelConfig& cfg) {
  std::vector<std::string> out;
  for (std::size_t m = 0; m < cfg.events; ++m) {
    for (const auto& l : cnot_subenv_labels(cfg, m)) out.push_back(l);
  }
  return out;
}

inline std::size_t cnot_event_time(const CnotModelConfig& cfg, std::size_t m) {
  return cfg.placement == EventPlacement::after_recording ? 2 * (m + 1) : 2 * (m + 1) - 1;
}

/// S branches by a Hadamard, then every spin of E_m copies it by a CNOT, for
/// m = 1..M. Events are pointer projections of S.
inline HistorySet build_cnot_model(const CnotModelConfig& cfg) {
  cfg.validate();
  const auto env = cnot_env_labels(cfg);
  std::vector<std::string> aux;
  std::vector<std::string> labels{"S"};
  labels.insert(labels.end(), env.begin(), env.end());
  if (cfg.purify) {
    for (std::size_t m = 0; m < cfg.events; ++m) {
      for (std::size_t k = 0; k < cfg.spins(m); ++k) aux.push_back(cnot_aux_label(m, k));
    }
    labels.insert(labels.end(), aux.begin(), aux.end());
  }
  const TensorSpace space = TensorSpace::qubits(labels);
  const auto n = static_cast<Eigen::Index>(space.total_dim());
  const std::size_t ne = env.size();

  std::vector<std::vector<Operator>> steps;
  for (std::size_t m = 0; m < cfg.events; ++m) {
    steps.push_back({Operator(space, {"S"}, gates::hadamard())});
    std::vector<Operator> copies;
    for (const auto& l : cnot_subenv_labels(cfg, m)) copies.emplace_back(space, std::vector<std::string>{"S", l}, gates::cnot());
    steps.push_back(std::move(copies));
  }
  Schedule schedule(space, std::move(steps));

  std::vector<ProjectorFamily> families;
  for (std::size_t m = 0; m < cfg.events; ++m) {
    families.push_back(ProjectorFamily::basis(space, "S", cnot_event_time(cfg, m)));
  }

  const double p1 = 1.0 - cfg.p0;
  QState initial;
  if (cfg.env_init == EnvInit::pure) {
    initial = QState::pure(space, gates::basis_vector(n, 0));
  } else if (cfg.purify) {
    // S = 0; each (E, X) pair in sqrt(p0)|00> + sqrt(p1)|11>.
    Vector psi = Vector::Zero(n);
    for (std::size_t e = 0; e < (std::size_t{1} << ne); ++e) {
      double amp = 1.0;
      for (std::size_t k = 0; k < ne; ++k) amp *= ((e >> (ne - 1 - k)) & 1) ? std::sqrt(p1) : std::sqrt(cfg.p0);
      psi((e << ne) | e) = amp;
    }
    initial = QState::pure(space, psi);
  } else {
    // Column e of the factor is |0>_S |e>_E sqrt(prod p_{e_k}).
    std::vector<Eigen::Index> cols;
    std::vector<double> amps;
    for (std::size_t e = 0; e < (std::size_t{1} << ne); ++e) {
      double amp = 1.0;
      for (std::size_t k = 0; k < ne; ++k) amp *= ((e >> (ne - 1 - k)) & 1) ? std::sqrt(p1) : std::sqrt(cfg.p0);
      if (amp > 0.0) {
        cols.push_back(static_cast<Eigen::Index>(e));
        amps.push_back(amp);
      }
    }
    Matrix k = Matrix::Zero(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) k(cols[c], static_cast<Eigen::Index>(c)) = amps[c];
    initial = cols.size() == 1 ? QState::pure(space, k.col(0)) : QState::from_factor(space, k);
  }

  HistorySetOptions opt;
  opt.system_labels = {"S"};
  opt.auxiliary_labels = aux;
  return HistorySet(std::move(schedule), std::move(families), std::move(initial), std::move(opt));
}

}  // namespace qhist
