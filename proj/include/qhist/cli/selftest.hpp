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
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "qhist/cli/run.hpp"
#include "qhist/qhist.hpp"

namespace qhist::cli {

namespace detail {

inline const char* kSelftestScenario = R"(name: selftest-inline
model:
  inline:
    space:
      - {label: S, dim: 2}
      - {label: E, dim: 2}
    steps:
      - - targets: [S]
          matrix: [["0.7071067811865476", "0.7071067811865476"], ["0.7071067811865476", "-0.7071067811865476"]]
      - - targets: [S, E]
          matrix: [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]
    families:
      - time: 2
        projectors:
          - {label: "0", targets: [S], matrix: [[1, 0], [0, 0]]}
          - {label: "1", targets: [S], matrix: [[0, 0], [0, 1]]}
    initial_state: {kind: pure, vector: [1, 0, 0, 0]}
    system: [S]
analyses:
  - op: check_consistency
  - op: detect_records
    fragment: [E]
)";

}  // namespace detail

/// Runs the invariant suite on the built-in models. Returns kExitOk or
/// kExitTolerance.
inline int run_selftest(std::ostream& out) {
  struct Check {
    const char* name;
    std::function<bool()> run;
  };
  const std::vector<Check> checks = {
      {"cnot probabilities",
       [] {
         CnotModelConfig cfg;
         cfg.spins_per_subenv = {3};
         const auto d = decoherence_functional(build_cnot_model(cfg));
         bool ok = d.size() == 8 && d.max_offdiagonal() < 1e-12;
         for (double p : d.probabilities()) ok = ok && std::abs(p - 0.125) < 1e-12;
         return ok;
       }},
      {"cnot redundancy",
       [] {
         CnotModelConfig cfg;
         cfg.spins_per_subenv = {3};
         const auto hs = build_cnot_model(cfg);
         return redundancy_count(hs, std::nullopt, 1e-9, SearchMode::exhaustive, 3).count == 3 &&
                is_redundantly_consistent(hs, std::nullopt, 1e-9).redundant;
       }},
      {"mixed environment fidelity",
       [] {
         CnotModelConfig cfg;
         cfg.events = 1;
         cfg.spins_per_subenv = {2};
         cfg.env_init = EnvInit::mixed;
         cfg.p0 = 0.7;
         const auto hs = build_cnot_model(cfg);
         const auto c = detect_records(hs, Fragment(hs.space(), cnot_subenv_labels(cfg, 0)), std::nullopt, 1e-9);
         return std::abs(c.worst_fidelity - std::pow(2.0 * std::sqrt(0.7 * 0.3), 2)) < 1e-10;
       }},
      {"fidelity identity",
       [] {
         CnotModelConfig cfg;
         cfg.events = 2;
         cfg.spins_per_subenv = {2};
         const auto hs = build_cnot_model(cfg);
         for (const auto& cut : {std::vector<std::string>{"E1_1"}, {"S", "E2_1"}, {"E1_1", "E1_2", "E2_2"}}) {
           for (const auto& f : fidelity_identity_table(*hs.branches(), Fragment(hs.space(), cut))) {
             if (f.gap > 1e-10) return false;
           }
         }
         return true;
       }},
      {"partial-trace functional",
       [] {
         CnotModelConfig cfg;
         cfg.events = 2;
         const auto hs = build_cnot_model(cfg);
         const auto b = hs.branches();
         const PTDecoherenceFunctional d(*b, Fragment(hs.space(), {"E2_1"}));
         Matrix total = Matrix::Zero(d.reduced_factor(0).rows(), d.reduced_factor(0).rows());
         for (std::size_t a = 0; a < d.size(); ++a) {
           for (std::size_t c = 0; c < d.size(); ++c) {
             total += d.entry(a, c);
             if (std::abs(d.entry(a, c).trace() - b->overlap(a, c)) > 1e-10) return false;
           }
         }
         const Matrix rho = partial_trace(QState::unchecked_mixed(hs.space(), b->state * b->state.adjoint(), true),
                                          d.kept()).density();
         return (total - rho).cwiseAbs().maxCoeff() < 1e-10;
       }},
      {"appendix sets",
       [] {
         const auto abw = build_appendix_alternate_set(AppendixKind::abwxyz);
         const auto th = build_appendix_alternate_set(AppendixKind::theta_phi, 0.4, 0.4);
         return check_consistency(abw, 1e-9).consistent && check_consistency(th, 1e-9).consistent &&
                !is_redundantly_consistent(th, std::nullopt, 1e-9).redundant;
       }},
      {"no record in mixed environment",
       [] {
         const auto hs = build_mixed_record_counterexample();
         const Fragment e(hs.space(), {"E"});
         return check_pt_consistency(hs, e, std::nullopt, 1e-9).consistent &&
                std::abs(detect_records(hs, e, std::nullopt, 1e-9).worst_fidelity - 1.0) < 1e-10;
       }},
      {"scenario round trip",
       [] {
         const Scenario a = parse_scenario(detail::kSelftestScenario);
         const Scenario b = parse_scenario(serialize_scenario(a));
         RunOptions opt;
         opt.write = false;
         const RunResult r = run_scenario(b, opt);
         return a == b && r.exit_code == kExitOk && r.reports.size() == 2;
       }},
  };
  bool all = true;
  for (const auto& c : checks) {
    bool ok = false;
    std::string why;
    try {
      ok = c.run();
    } catch (const std::exception& e) {
      why = e.what();
    }
    all = all && ok;
    out << (ok ? "ok   " : "FAIL ") << c.name;
    if (!why.empty()) out << " (" << why << ")";
    out << '\n';
  }
  return all ? kExitOk : kExitTolerance;
}

}  // namespace qhist::cli
