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
#include "qhist/hilbert/schmidt.hpp"
#include "qhist/hilbert/state.hpp"
#include "qhist/histories/functional.hpp"
#include "qhist/histories/history_set.hpp"

namespace qhist {

/// D_B(alpha, beta) = Tr_B[C_alpha rho C_beta^dagger] as operators on the
/// kept part A. Each branch is held reshaped as R_alpha (dim A x rest), so an
/// entry is R_alpha R_beta^dagger and is only formed on request.
class PTDecoherenceFunctional {
 public:
  PTDecoherenceFunctional(const BranchSet& b, const Fragment& traced) : traced_(traced), kept_(traced.complement()) {
    if (!(traced.space() == b.space)) throw InvariantError("traced fragment belongs to another space");
    if (traced.is_full()) throw PreconditionError("tracing over the whole space; use decoherence_functional");
    const IndexSplit split(kept_);
    labels_ = b.labels;
    eval_time_ = b.eval_time;
    for (const auto& f : b.factors) {
      reduced_.push_back(split.reshape(f));
      probabilities_.push_back(f.squaredNorm());
    }
    tol_ = b.tol;
  }

  const Fragment& traced() const { return traced_; }
  const Fragment& kept() const { return kept_; }
  std::size_t eval_time() const { return eval_time_; }
  std::size_t size() const { return reduced_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  double probability(std::size_t j) const { return probabilities_.at(j); }
  const Matrix& reduced_factor(std::size_t j) const { return reduced_.at(j); }
  const Tolerances& tolerances() const { return tol_; }

  Matrix entry(std::size_t a, std::size_t b) const { return reduced_.at(a) * reduced_.at(b).adjoint(); }

  /// Sum over all (alpha, beta), i.e. rho^A.
  Matrix total() const {
    Matrix r = Matrix::Zero(reduced_.front().rows(), reduced_.front().cols());
    for (const auto& x : reduced_) r += x;
    return r * r.adjoint();
  }

 private:
  Fragment traced_;
  Fragment kept_;
  std::vector<std::string> labels_;
  std::vector<Matrix> reduced_;
  std::vector<double> probabilities_;
  std::size_t eval_time_ = 0;
  Tolerances tol_;
};

inline PTDecoherenceFunctional pt_decoherence_functional(const HistorySet& hs, const Fragment& traced,
                                                         std::optional<std::size_t> eval_time = std::nullopt) {
  return PTDecoherenceFunctional(*hs.branches(eval_time), traced);
}

struct PTConsistencyFactor {
  Matrix op;  // on the kept factors
  double trace_norm = 0.0;
  double spectral_norm = 0.0;
};

inline PTConsistencyFactor pt_consistency_factor(const PTDecoherenceFunctional& d, std::size_t a, std::size_t b) {
  for (std::size_t j : {a, b}) {
    if (d.probability(j) < d.tolerances().zero_probability) {
      throw PreconditionError("history '" + d.labels().at(j) + "' has zero probability; consistency factor undefined");
    }
  }
  const double norm = std::sqrt(d.probability(a) * d.probability(b));
  PTConsistencyFactor cf;
  cf.op = d.entry(a, b) / norm;
  const RealVector s = product_singular_values(d.reduced_factor(a), d.reduced_factor(b)) / norm;
  cf.trace_norm = s.sum();
  cf.spectral_norm = s.size() ? s(0) : 0.0;
  return cf;
}

inline PTConsistencyFactor pt_consistency_factor(const HistorySet& hs, const Fragment& traced, const History& alpha,
                                                 const History& beta,
                                                 std::optional<std::size_t> eval_time = std::nullopt) {
  return pt_consistency_factor(pt_decoherence_functional(hs, traced, eval_time), hs.encode(alpha), hs.encode(beta));
}

struct PTPairNorm {
  std::size_t alpha = 0;
  std::size_t beta = 0;
  std::string alpha_label;
  std::string beta_label;
  double trace_norm = 0.0;
  double spectral_norm = 0.0;
};

struct PTConsistencyReport {
  std::vector<std::string> traced;
  double epsilon = 0.0;
  bool consistent = true;
  double max_trace_norm = 0.0;
  std::vector<PTPairNorm> pairs;  // every live pair alpha < beta
  std::vector<std::string> skipped;
};

/// Norms only, never forms the operators.
inline PTConsistencyReport check_pt_consistency(const PTDecoherenceFunctional& d, double epsilon) {
  PTConsistencyReport r;
  r.traced = d.traced().labels();
  r.epsilon = epsilon;
  std::vector<char> live(d.size());
  for (std::size_t j = 0; j < d.size(); ++j) {
    live[j] = d.probability(j) >= d.tolerances().zero_probability;
    if (!live[j]) r.skipped.push_back(d.labels()[j]);
  }
  for (std::size_t a = 0; a < d.size(); ++a) {
    if (!live[a]) continue;
    for (std::size_t b = a + 1; b < d.size(); ++b) {
      if (!live[b]) continue;
      const double norm = std::sqrt(d.probability(a) * d.probability(b));
      const RealVector s = product_singular_values(d.reduced_factor(a), d.reduced_factor(b)) / norm;
      PTPairNorm p{a, b, d.labels()[a], d.labels()[b], s.sum(), s.size() ? s(0) : 0.0};
      r.max_trace_norm = std::max(r.max_trace_norm, p.trace_norm);
      if (p.trace_norm >= epsilon) r.consistent = false;
      r.pairs.push_back(std::move(p));
    }
  }
  return r;
}

inline PTConsistencyReport check_pt_consistency(const BranchSet& b, const Fragment& traced, double epsilon) {
  return check_pt_consistency(PTDecoherenceFunctional(b, traced), epsilon);
}

inline PTConsistencyReport check_pt_consistency(const HistorySet& hs, const Fragment& traced,
                                                std::optional<std::size_t> eval_time, double epsilon) {
  return check_pt_consistency(*hs.branches(eval_time), traced, epsilon);
}

struct FidelityIdentity {
  std::size_t alpha = 0;
  std::size_t beta = 0;
  double lhs = 0.0;  // F(rho^A_alpha, rho^A_beta)
  double rhs = 0.0;  // ||CF^A_{alpha beta}||_1, traced over A
  double gap = 0.0;
};

namespace detail {

// sqrt(rho^A) = sum_i sqrt(d_i / p) |A_i><A_i| from the Schmidt form of a branch.
struct SchmidtRoot {
  Matrix vectors;
  RealVector roots;
};

inline SchmidtRoot schmidt_root(const TensorSpace& space, const Vector& branch, const Fragment& cut) {
  const SchmidtDecomposition sd = schmidt(QState::unnormalized(space, branch), cut);
  return {sd.left_vectors, (sd.coefficients / branch.squaredNorm()).cwiseSqrt()};
}

inline double fidelity_from_roots(const SchmidtRoot& x, const SchmidtRoot& y) {
  const Matrix m = x.roots.asDiagonal() * (x.vectors.adjoint() * y.vectors) * y.roots.asDiagonal();
  return trace_norm(m);
}

}  // namespace detail

/// Fidelity identity for every live pair alpha < beta with cut A. The
/// left side goes through Schmidt decompositions of the branches, the right
/// side through the trace norm of the functional traced over A.
inline std::vector<FidelityIdentity> fidelity_identity_table(const BranchSet& b, const Fragment& cut) {
  if (!b.pure) throw PreconditionError("fidelity identity holds for pure global states only");
  std::vector<std::size_t> live;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (b.probability(j) >= b.tol.zero_probability) live.push_back(j);
  }
  std::vector<detail::SchmidtRoot> roots(b.size());
  for (std::size_t j : live) roots[j] = detail::schmidt_root(b.space, b.factors[j].col(0), cut);
  const IndexSplit rest(cut.complement());
  std::vector<Matrix> reduced(b.size());
  for (std::size_t j : live) reduced[j] = rest.reshape(b.factors[j]);
  std::vector<FidelityIdentity> out;
  for (std::size_t i = 0; i < live.size(); ++i) {
    for (std::size_t k = i; k < live.size(); ++k) {
      const std::size_t a = live[i], c = live[k];
      FidelityIdentity f{a, c};
      f.lhs = detail::fidelity_from_roots(roots[a], roots[c]);
      f.rhs = trace_norm_product(reduced[a], reduced[c]) / std::sqrt(b.probability(a) * b.probability(c));
      f.gap = std::abs(f.lhs - f.rhs);
      out.push_back(f);
    }
  }
  return out;
}

inline FidelityIdentity fidelity_identity_check(const HistorySet& hs, const Fragment& cut, const History& alpha,
                                                const History& beta,
                                                std::optional<std::size_t> eval_time = std::nullopt) {
  if (!hs.is_pure()) throw PreconditionError("fidelity identity holds for pure global states only");
  const auto b = hs.branches(eval_time);
  const std::size_t a = hs.encode(alpha), c = hs.encode(beta);
  for (std::size_t j : {a, c}) detail::require_probability(*b, j);
  FidelityIdentity f{a, c};
  f.lhs = detail::fidelity_from_roots(detail::schmidt_root(b->space, b->factors[a].col(0), cut),
                                      detail::schmidt_root(b->space, b->factors[c].col(0), cut));
  const IndexSplit rest(cut.complement());
  f.rhs = trace_norm_product(rest.reshape(b->factors[a]), rest.reshape(b->factors[c])) /
          std::sqrt(b->probability(a) * b->probability(c));
  f.gap = std::abs(f.lhs - f.rhs);
  return f;
}

}  // namespace qhist
