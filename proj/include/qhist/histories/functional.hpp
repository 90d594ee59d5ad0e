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
#include <set>
#include <string>
#include <vector>

#include "qhist/core/errors.hpp"
#include "qhist/hilbert/state.hpp"
#include "qhist/histories/history_set.hpp"

namespace qhist {

/// D(alpha, beta) over all histories of a set, rows and columns in
/// lexicographic history order.
struct DecoherenceMatrix {
  std::vector<std::string> labels;
  Matrix entries;
  std::size_t eval_time = 0;

  std::size_t size() const { return labels.size(); }
  Complex operator()(std::size_t a, std::size_t b) const { return entries(a, b); }

  std::vector<double> probabilities() const {
    std::vector<double> p;
    for (Eigen::Index i = 0; i < entries.rows(); ++i) p.push_back(entries(i, i).real());
    return p;
  }

  double max_offdiagonal() const {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < entries.rows(); ++i) {
      for (Eigen::Index j = 0; j < entries.cols(); ++j) {
        if (i != j) worst = std::max(worst, std::abs(entries(i, j)));
      }
    }
    return worst;
  }
};

inline Matrix class_operator(const HistorySet& hs, const History& alpha,
                             std::optional<std::size_t> eval_time = std::nullopt, bool truncate = false) {
  if (truncate && eval_time && *eval_time < hs.final_time()) {
    const HistorySet cut = hs.truncated(*eval_time);
    History prefix(alpha.begin(), alpha.begin() + std::min(alpha.size(), cut.num_events()));
    return *cut.class_operator(prefix, eval_time);
  }
  return *hs.class_operator(alpha, eval_time);
}

/// C_alpha |psi(t)>, flagged unnormalized.
inline QState branch_state(const HistorySet& hs, const History& alpha,
                           std::optional<std::size_t> eval_time = std::nullopt) {
  if (!hs.is_pure()) throw PreconditionError("branch_state needs a pure initial state; use conditional_state");
  const auto b = hs.branches(eval_time);
  return QState::unnormalized(hs.space(), b->factors[hs.encode(alpha)].col(0));
}

inline DecoherenceMatrix decoherence_functional(const BranchSet& b) {
  DecoherenceMatrix d;
  d.labels = b.labels;
  d.eval_time = b.eval_time;
  const auto n = static_cast<Eigen::Index>(b.size());
  d.entries.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.entries(i, i) = b.probability(i);
    for (Eigen::Index j = 0; j < i; ++j) {
      d.entries(i, j) = b.overlap(i, j);
      d.entries(j, i) = std::conj(d.entries(i, j));
    }
  }
  return d;
}

inline DecoherenceMatrix decoherence_functional(const HistorySet& hs,
                                                std::optional<std::size_t> eval_time = std::nullopt) {
  return decoherence_functional(*hs.branches(eval_time));
}

inline double probability(const HistorySet& hs, const History& alpha,
                          std::optional<std::size_t> eval_time = std::nullopt) {
  return hs.branches(eval_time)->probability(hs.encode(alpha));
}

namespace detail {

inline void require_probability(const BranchSet& b, std::size_t j) {
  if (b.probability(j) < b.tol.zero_probability) {
    throw PreconditionError("history '" + b.labels.at(j) + "' has zero probability; consistency factor undefined");
  }
}

}  // namespace detail

inline Complex consistency_factor(const BranchSet& b, std::size_t a, std::size_t c) {
  detail::require_probability(b, a);
  detail::require_probability(b, c);
  return b.overlap(a, c) / std::sqrt(b.probability(a) * b.probability(c));
}

inline Complex consistency_factor(const HistorySet& hs, const History& alpha, const History& beta,
                                  std::optional<std::size_t> eval_time = std::nullopt) {
  return consistency_factor(*hs.branches(eval_time), hs.encode(alpha), hs.encode(beta));
}

/// A disjunction of mutually exclusive histories alpha_1 v alpha_2 v ...
struct CoarseHistory {
  std::vector<std::size_t> members;  // flat indices, sorted
  std::string label;
};

inline CoarseHistory coarse_grain(const HistorySet& hs, const std::vector<History>& alphas) {
  CoarseHistory c;
  for (const auto& a : alphas) c.members.push_back(hs.encode(a));
  std::sort(c.members.begin(), c.members.end());
  if (std::adjacent_find(c.members.begin(), c.members.end()) != c.members.end()) {
    throw PreconditionError("coarse_grain: history listed twice");
  }
  for (std::size_t i = 0; i < c.members.size(); ++i) c.label += (i ? "|" : "") + hs.label(c.members[i]);
  return c;
}

/// Groups histories by their first level entries (level = M - 1 sums over the
/// final event). Labels are the shared prefixes.
inline std::vector<CoarseHistory> prefix_coarse_graining(const HistorySet& hs, std::size_t level) {
  if (level > hs.num_events()) throw PreconditionError("prefix level exceeds the number of events");
  std::size_t tail = 1;
  for (std::size_t m = level; m < hs.num_events(); ++m) tail *= hs.family(m).size();
  std::vector<CoarseHistory> out(hs.num_histories() / tail);
  for (std::size_t flat = 0; flat < hs.num_histories(); ++flat) out[flat / tail].members.push_back(flat);
  for (auto& c : out) {
    History a = hs.decode(c.members.front());
    a.resize(level);
    std::string lbl;
    bool compact = true;
    for (std::size_t m = 0; m < level; ++m) compact = compact && hs.family(m).labels[a[m]].size() == 1;
    for (std::size_t m = 0; m < level; ++m) lbl += (m && !compact ? "." : "") + hs.family(m).labels[a[m]];
    c.label = lbl.empty() ? "*" : lbl;
  }
  return out;
}

inline BranchSet coarse_branches(const BranchSet& b, const std::vector<CoarseHistory>& groups) {
  BranchSet out;
  out.space = b.space;
  out.state = b.state;
  out.pure = b.pure;
  out.eval_time = b.eval_time;
  out.tol = b.tol;
  for (const auto& g : groups) {
    Matrix sum = Matrix::Zero(b.state.rows(), b.state.cols());
    for (std::size_t j : g.members) sum += b.factors.at(j);
    out.factors.push_back(std::move(sum));
    out.labels.push_back(g.label);
  }
  return out;
}

inline Matrix coarse_class_operator(const HistorySet& hs, const CoarseHistory& c,
                                    std::optional<std::size_t> eval_time = std::nullopt) {
  const auto n = static_cast<Eigen::Index>(hs.space().total_dim());
  Matrix sum = Matrix::Zero(n, n);
  for (std::size_t j : c.members) sum += *hs.class_operator(hs.decode(j), eval_time);
  return sum;
}

inline double coarse_probability(const HistorySet& hs, const CoarseHistory& c,
                                 std::optional<std::size_t> eval_time = std::nullopt) {
  return coarse_branches(*hs.branches(eval_time), {c}).probability(0);
}

struct PairValue {
  std::size_t alpha = 0;
  std::size_t beta = 0;
  std::string alpha_label;
  std::string beta_label;
  Complex value;
};

struct ConsistencyReport {
  double epsilon = 0.0;
  bool consistent = true;
  double max_offdiag_cf = 0.0;
  std::vector<PairValue> violations;  // (alpha, beta) lexicographic, alpha < beta
  std::vector<std::string> skipped;   // zero-probability histories
};

inline ConsistencyReport check_consistency(const BranchSet& b, double epsilon) {
  ConsistencyReport r;
  r.epsilon = epsilon;
  std::vector<char> live(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) {
    live[j] = b.probability(j) >= b.tol.zero_probability;
    if (!live[j]) r.skipped.push_back(b.labels[j]);
  }
  for (std::size_t a = 0; a < b.size(); ++a) {
    if (!live[a]) continue;
    for (std::size_t c = a + 1; c < b.size(); ++c) {
      if (!live[c]) continue;
      const Complex cf = consistency_factor(b, a, c);
      r.max_offdiag_cf = std::max(r.max_offdiag_cf, std::abs(cf));
      if (std::abs(cf) >= epsilon) r.violations.push_back({a, c, b.labels[a], b.labels[c], cf});
    }
  }
  r.consistent = r.violations.empty();
  return r;
}

inline ConsistencyReport check_consistency(const HistorySet& hs, double epsilon,
                                           std::optional<std::size_t> eval_time = std::nullopt) {
  return check_consistency(*hs.branches(eval_time), epsilon);
}

/// Tr_B[B_j B_j^dagger] / p_j on the kept factors.
inline QState conditional_state(const BranchSet& b, std::size_t j, const Fragment& keep) {
  const double p = b.probability(j);
  if (p < b.tol.zero_probability) {
    throw PreconditionError("history '" + b.labels.at(j) + "' has zero probability; conditional state undefined");
  }
  if (!(keep.space() == b.space)) throw InvariantError("conditional_state: fragment belongs to another space");
  const Matrix r = IndexSplit(keep).reshape(b.factors[j]);
  return QState::unchecked_mixed(keep.subspace(), (r * r.adjoint()) / p, true);
}

inline QState conditional_state(const HistorySet& hs, const History& alpha, const Fragment& keep,
                                std::optional<std::size_t> eval_time = std::nullopt) {
  return conditional_state(*hs.branches(eval_time), hs.encode(alpha), keep);
}

}  // namespace qhist
