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
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qhist/core/errors.hpp"
#include "qhist/hilbert/linalg.hpp"
#include "qhist/hilbert/operator.hpp"
#include "qhist/histories/functional.hpp"
#include "qhist/histories/history_set.hpp"
#include "qhist/ptrace/pt_functional.hpp"

namespace qhist {

struct RecordConditions {
  bool orthogonal_supports = false;  // max ||Pi_a Pi_b||_1 <= tol_ortho
  bool fidelity_bound = false;       // worst F(rho_a, rho_b) <= delta
  bool record_projectors = false;    // max ||(I x R_a) rho - C_a rho||_1 <= delta'
};

struct RecordCertificate {
  std::vector<std::string> fragment;
  std::vector<std::string> labels;
  double delta = 0.0;
  double delta_prime = 0.0;
  std::size_t eval_time = 0;
  std::vector<Matrix> record_projectors;  // on the fragment, zero for skipped histories
  Matrix completion;                      // I - sum_a R_a
  double worst_fidelity = 0.0;
  std::string worst_pair_alpha;
  std::string worst_pair_beta;
  double max_support_overlap = 0.0;
  double max_record_residual = 0.0;
  RecordConditions conditions;
  std::vector<std::string> skipped;
  bool passed = false;
};

namespace detail {

// Orthonormal basis of the support of R R^dagger / p, eigenvalues above rank_tol.
inline Matrix factor_support(const Matrix& r, double p, const Tolerances& tol) {
  if (r.rows() <= r.cols()) return support_basis((r * r.adjoint()) / p, tol.rank, tol.psd);
  Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeThinU);
  const RealVector& s = svd.singularValues();
  Eigen::Index k = 0;
  while (k < s.size() && s(k) * s(k) / p > tol.rank) ++k;
  return svd.matrixU().leftCols(k);
}

struct RecordInputs {
  std::vector<std::size_t> live;
  std::vector<Matrix> reduced;   // R_a: fragment x rest
  std::vector<Matrix> supports;  // V_a with Pi_a = V_a V_a^dagger
};

inline RecordInputs record_inputs(const BranchSet& b, const IndexSplit& split) {
  RecordInputs in;
  in.reduced.resize(b.size());
  in.supports.resize(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) {
    const double p = b.probability(j);
    if (p < b.tol.zero_probability) continue;
    in.live.push_back(j);
    in.reduced[j] = split.reshape(b.factors[j]);
    in.supports[j] = factor_support(in.reduced[j], p, b.tol);
  }
  return in;
}

inline double fidelity_of_factors(const Matrix& ra, double pa, const Matrix& rb, double pb) {
  return trace_norm_product(ra.adjoint(), rb.adjoint()) / std::sqrt(pa * pb);
}

inline double support_overlap(const Matrix& va, const Matrix& vb) {
  if (va.cols() == 0 || vb.cols() == 0) return 0.0;
  return trace_norm(va.adjoint() * vb);
}

}  // namespace detail

/// Checks the three record conditions for fragment B. Conditional states are
/// rho^B_a = R_a R_a^dagger / p_a; their fidelity is ||R_a^dagger R_b||_1 /
/// sqrt(p_a p_b), and the record projector R_a is the support projector of
/// rho^B_a.
inline RecordCertificate detect_records(const BranchSet& b, const Fragment& fragment, double delta,
                                        std::optional<double> delta_prime = std::nullopt) {
  if (!(fragment.space() == b.space)) throw InvariantError("record fragment belongs to another space");
  if (delta < 0.0 || delta >= 1.0) throw PreconditionError("record tolerance delta must lie in [0, 1)");
  const Tolerances& tol = b.tol;
  RecordCertificate c;
  c.fragment = fragment.labels();
  c.labels = b.labels;
  c.delta = delta;
  c.delta_prime = delta_prime.value_or(std::max(delta, tol.ortho));
  c.eval_time = b.eval_time;

  const IndexSplit split(fragment);
  const auto in = detail::record_inputs(b, split);
  const auto d = static_cast<Eigen::Index>(split.inner_dim());
  c.record_projectors.assign(b.size(), Matrix::Zero(d, d));
  c.completion = Matrix::Identity(d, d);
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (b.probability(j) < tol.zero_probability) c.skipped.push_back(b.labels[j]);
  }
  for (std::size_t j : in.live) {
    c.record_projectors[j] = in.supports[j] * in.supports[j].adjoint();
    c.completion -= c.record_projectors[j];
  }
  c.worst_pair_alpha.clear();
  for (std::size_t i = 0; i < in.live.size(); ++i) {
    for (std::size_t k = i + 1; k < in.live.size(); ++k) {
      const std::size_t x = in.live[i], y = in.live[k];
      c.max_support_overlap = std::max(c.max_support_overlap, detail::support_overlap(in.supports[x], in.supports[y]));
      const double f = detail::fidelity_of_factors(in.reduced[x], b.probability(x), in.reduced[y], b.probability(y));
      if (c.worst_pair_alpha.empty() || f > c.worst_fidelity) {
        c.worst_fidelity = f;
        c.worst_pair_alpha = b.labels[x];
        c.worst_pair_beta = b.labels[y];
      }
    }
  }
  for (std::size_t j : in.live) {
    const Matrix projected = apply_local(split, c.record_projectors[j], b.state);
    c.max_record_residual = std::max(c.max_record_residual, trace_norm_product(projected - b.factors[j], b.state));
  }
  c.conditions.orthogonal_supports = c.max_support_overlap <= tol.ortho;
  c.conditions.fidelity_bound = c.worst_fidelity <= delta;
  c.conditions.record_projectors = c.max_record_residual <= c.delta_prime;
  c.passed = c.conditions.orthogonal_supports && c.conditions.fidelity_bound && c.conditions.record_projectors;
  return c;
}

inline RecordCertificate detect_records(const HistorySet& hs, const Fragment& fragment,
                                        std::optional<std::size_t> eval_time, double delta,
                                        std::optional<double> delta_prime = std::nullopt) {
  return detect_records(*hs.branches(eval_time), fragment, delta, delta_prime);
}

/// Same verdict as detect_records(...).passed, returning at the first failed check.
inline bool has_records(const BranchSet& b, const Fragment& fragment, double delta) {
  const Tolerances& tol = b.tol;
  const IndexSplit split(fragment);
  const auto in = detail::record_inputs(b, split);
  for (std::size_t i = 0; i < in.live.size(); ++i) {
    for (std::size_t k = i + 1; k < in.live.size(); ++k) {
      if (detail::support_overlap(in.supports[in.live[i]], in.supports[in.live[k]]) > tol.ortho) return false;
    }
  }
  for (std::size_t i = 0; i < in.live.size(); ++i) {
    for (std::size_t k = i + 1; k < in.live.size(); ++k) {
      const std::size_t x = in.live[i], y = in.live[k];
      if (detail::fidelity_of_factors(in.reduced[x], b.probability(x), in.reduced[y], b.probability(y)) > delta) {
        return false;
      }
    }
  }
  const double delta_prime = std::max(delta, tol.ortho);
  for (std::size_t j : in.live) {
    const Matrix projected = apply_local(split, in.supports[j] * in.supports[j].adjoint(), b.state);
    if (trace_norm_product(projected - b.factors[j], b.state) > delta_prime) return false;
  }
  return true;
}

struct RecordLevel {
  std::size_t level = 0;  // number of leading events resolved
  std::vector<std::string> prefixes;
  std::vector<std::size_t> support_ranks;
  double max_overlap = 0.0;               // between distinct prefixes at this level
  double max_containment_residual = 0.0;  // coarse conditional state outside its nested subspace
  bool orthogonal = false;
  bool nested = false;
};

struct RecordsInTimeReport {
  std::vector<std::string> fragment;
  std::size_t eval_time = 0;
  std::vector<RecordLevel> levels;
  bool passed = false;
};

/// For each level m, coarse-grains over the later events and checks that the
/// coarse branches' fragment states live in mutually orthogonal subspaces
/// F_(a_1..a_m), each the direct sum of the subspaces of its descendants.
inline RecordsInTimeReport records_in_time(const HistorySet& hs, const Fragment& fragment,
                                           std::optional<std::size_t> eval_time = std::nullopt,
                                           std::optional<double> epsilon = std::nullopt) {
  if (!hs.is_pure()) throw PreconditionError("records_in_time needs a pure global state");
  const auto b = hs.branches(eval_time);
  const Tolerances& tol = hs.tolerances();
  const double eps = epsilon.value_or(tol.ortho);
  const auto pt = check_pt_consistency(*b, fragment, eps);
  if (!pt.consistent) {
    throw PreconditionError("histories are not consistent with respect to the fragment (max ||CF|| = " +
                            std::to_string(pt.max_trace_norm) + ")");
  }
  const IndexSplit split(fragment);
  const auto finest = detail::record_inputs(*b, split);

  RecordsInTimeReport rep;
  rep.fragment = fragment.labels();
  rep.eval_time = b->eval_time;
  rep.passed = true;
  for (std::size_t level = 1; level <= hs.num_events(); ++level) {
    const auto groups = prefix_coarse_graining(hs, level);
    const BranchSet coarse = coarse_branches(*b, groups);
    RecordLevel lv;
    lv.level = level;
    std::vector<Matrix> spans;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const double p = coarse.probability(g);
      if (p < tol.zero_probability) continue;
      Matrix stacked(static_cast<Eigen::Index>(split.inner_dim()), 0);
      for (std::size_t j : groups[g].members) {
        if (finest.supports[j].cols() == 0) continue;
        Matrix next(stacked.rows(), stacked.cols() + finest.supports[j].cols());
        next << stacked, finest.supports[j];
        stacked = std::move(next);
      }
      Matrix span = column_span(stacked, std::sqrt(tol.ortho));
      const Matrix r = split.reshape(coarse.factors[g]);
      const double outside = (r - span * (span.adjoint() * r)).norm() / r.norm();
      lv.max_containment_residual = std::max(lv.max_containment_residual, outside);
      lv.prefixes.push_back(groups[g].label);
      lv.support_ranks.push_back(static_cast<std::size_t>(span.cols()));
      spans.push_back(std::move(span));
    }
    for (std::size_t i = 0; i < spans.size(); ++i) {
      for (std::size_t k = i + 1; k < spans.size(); ++k) {
        lv.max_overlap = std::max(lv.max_overlap, detail::support_overlap(spans[i], spans[k]));
      }
    }
    lv.orthogonal = lv.max_overlap <= tol.ortho;
    lv.nested = lv.max_containment_residual <= tol.ortho;
    rep.passed = rep.passed && lv.orthogonal && lv.nested;
    rep.levels.push_back(std::move(lv));
  }
  return rep;
}

}  // namespace qhist
