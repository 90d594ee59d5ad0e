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
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qhist/core/errors.hpp"
#include "qhist/hilbert/random.hpp"
#include "qhist/histories/functional.hpp"
#include "qhist/histories/history_set.hpp"
#include "qhist/ptrace/records.hpp"

namespace qhist {

enum class SearchMode { exhaustive, greedy };

inline const char* to_string(SearchMode m) { return m == SearchMode::exhaustive ? "exhaustive" : "greedy"; }

inline constexpr std::size_t kExhaustiveCandidateCap = 12;

struct RedundancyOptions {
  std::size_t max_fragment_size = 3;
  bool include_system = false;
  std::vector<std::string> excluded_labels;
};

struct RedundancyReport {
  double delta = 0.0;
  SearchMode mode = SearchMode::exhaustive;
  std::size_t max_fragment_size = 0;
  std::size_t eval_time = 0;
  std::vector<std::string> candidates;
  std::vector<std::vector<std::string>> fragments;  // pairwise disjoint, sorted
  std::vector<RecordCertificate> certificates;
  std::size_t count = 0;
};

/// Labels that may appear in environment fragments: everything except the
/// system (unless opted in), auxiliary purifications and explicit exclusions.
inline std::vector<std::string> fragment_candidates(const HistorySet& hs, const RedundancyOptions& opt = {}) {
  auto listed = [](const std::vector<std::string>& xs, const std::string& l) {
    return std::find(xs.begin(), xs.end(), l) != xs.end();
  };
  std::vector<std::string> out;
  for (const auto& l : hs.space().labels()) {
    if (!opt.include_system && listed(hs.system_labels(), l)) continue;
    if (listed(hs.auxiliary_labels(), l) || listed(opt.excluded_labels, l)) continue;
    out.push_back(l);
  }
  return out;
}

namespace detail {

inline Fragment fragment_of_mask(const TensorSpace& space, const std::vector<std::size_t>& cand, std::uint32_t mask) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (mask & (1u << i)) idx.push_back(cand[i]);
  }
  return Fragment::from_indices(space, std::move(idx));
}

// Masks over n positions with exactly k bits, in lexicographic order of the
// selected positions.
inline std::vector<std::uint32_t> masks_of_size(std::size_t n, std::size_t k) {
  std::vector<std::uint32_t> out;
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  if (k == 0 || k > n) return out;
  while (true) {
    std::uint32_t m = 0;
    for (std::size_t p : pick) m |= 1u << p;
    out.push_back(m);
    std::size_t i = k;
    while (i-- > 0 && pick[i] == n - k + i) {
    }
    if (i == static_cast<std::size_t>(-1)) break;
    ++pick[i];
    for (std::size_t j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

struct Packing {
  std::vector<std::uint32_t> best;
  std::vector<std::uint32_t> current;
  std::size_t min_bits = 1;
};

inline void pack(const std::vector<std::uint32_t>& sets, std::size_t from, std::uint32_t used, std::uint32_t all,
                 Packing& st) {
  if (st.current.size() > st.best.size()) st.best = st.current;
  const auto free_bits = static_cast<std::size_t>(std::popcount(all & ~used));
  if (st.current.size() + free_bits / st.min_bits <= st.best.size()) return;
  for (std::size_t i = from; i < sets.size(); ++i) {
    if (sets[i] & used) continue;
    st.current.push_back(sets[i]);
    pack(sets, i + 1, used | sets[i], all, st);
    st.current.pop_back();
  }
}

}  // namespace detail

/// Core search over a branch decomposition. Exhaustive mode finds a maximum
/// family of pairwise-disjoint certifying fragments (by packing the minimal
/// certifying fragments); greedy mode repeatedly takes the smallest,
/// lexicographically first certifying fragment among the unused labels.
inline RedundancyReport redundancy_count(const BranchSet& b, const std::vector<std::string>& candidate_labels,
                                         double delta, SearchMode mode, std::size_t max_fragment_size,
                                         bool with_certificates = true) {
  if (max_fragment_size == 0) throw PreconditionError("max_fragment_size must be at least 1");
  if (mode == SearchMode::exhaustive && candidate_labels.size() > kExhaustiveCandidateCap) {
    throw PreconditionError("exhaustive redundancy search is limited to " + std::to_string(kExhaustiveCandidateCap) +
                            " candidate subsystems, got " + std::to_string(candidate_labels.size()));
  }
  if (candidate_labels.size() > 31) throw PreconditionError("too many candidate subsystems");
  std::vector<std::size_t> cand;
  for (const auto& l : candidate_labels) cand.push_back(b.space.index_of(l));
  std::sort(cand.begin(), cand.end());
  const std::size_t n = cand.size();
  const std::size_t kmax = std::min(max_fragment_size, n);
  auto certifies = [&](std::uint32_t m) { return has_records(b, detail::fragment_of_mask(b.space, cand, m), delta); };

  std::vector<std::uint32_t> chosen;
  if (mode == SearchMode::exhaustive) {
    std::vector<std::uint32_t> minimal;
    for (std::size_t k = 1; k <= kmax; ++k) {
      for (std::uint32_t m : detail::masks_of_size(n, k)) {
        const bool covers = std::any_of(minimal.begin(), minimal.end(), [&](std::uint32_t x) { return (x & m) == x; });
        if (!covers && certifies(m)) minimal.push_back(m);
      }
    }
    detail::Packing st;
    if (!minimal.empty()) {
      st.min_bits = static_cast<std::size_t>(std::popcount(minimal.front()));
      const std::uint32_t all = n == 32 ? ~0u : ((1u << n) - 1u);
      detail::pack(minimal, 0, 0, all, st);
    }
    chosen = st.best;
  } else {
    std::uint32_t used = 0;
    bool found = true;
    while (found) {
      found = false;
      for (std::size_t k = 1; k <= kmax && !found; ++k) {
        for (std::uint32_t m : detail::masks_of_size(n, k)) {
          if ((m & used) == 0 && certifies(m)) {
            chosen.push_back(m);
            used |= m;
            found = true;
            break;
          }
        }
      }
    }
  }

  RedundancyReport r;
  r.delta = delta;
  r.mode = mode;
  r.max_fragment_size = max_fragment_size;
  r.eval_time = b.eval_time;
  for (std::size_t i : cand) r.candidates.push_back(b.space.factor(i).label);
  std::vector<Fragment> frags;
  for (std::uint32_t m : chosen) frags.push_back(detail::fragment_of_mask(b.space, cand, m));
  std::sort(frags.begin(), frags.end(), [](const Fragment& x, const Fragment& y) { return x.labels() < y.labels(); });
  for (const auto& f : frags) {
    r.fragments.push_back(f.labels());
    if (with_certificates) r.certificates.push_back(detect_records(b, f, delta));
  }
  r.count = r.fragments.size();
  return r;
}

inline SearchMode default_search_mode(std::size_t candidates) {
  return candidates <= kExhaustiveCandidateCap ? SearchMode::exhaustive : SearchMode::greedy;
}

inline RedundancyReport redundancy_count(const HistorySet& hs, std::optional<std::size_t> eval_time, double delta,
                                         SearchMode mode, std::size_t max_fragment_size,
                                         const RedundancyOptions& opt = {}) {
  RedundancyOptions o = opt;
  o.max_fragment_size = max_fragment_size;
  return redundancy_count(*hs.branches(eval_time), fragment_candidates(hs, o), delta, mode, max_fragment_size);
}

struct RedundancyVerdict {
  bool redundant = false;
  std::size_t threshold = 3;
  RedundancyReport report;
};

inline RedundancyVerdict is_redundantly_consistent(const HistorySet& hs, std::optional<std::size_t> eval_time,
                                                   double delta, std::size_t threshold = 3,
                                                   const RedundancyOptions& opt = {}) {
  const auto cand = fragment_candidates(hs, opt);
  RedundancyVerdict v;
  v.threshold = threshold;
  v.report = redundancy_count(*hs.branches(eval_time), cand, delta, default_search_mode(cand.size()),
                              opt.max_fragment_size);
  v.redundant = v.report.count >= threshold;
  return v;
}

struct ProbeOptions {
  std::uint64_t seed = 20130601;
  double delta = 1e-9;
  std::size_t threshold = 3;
  double theta = std::numbers::pi / 5;
  RedundancyOptions redundancy;
};

struct ProbeTrial {
  std::string kind;  // identity | theta | haar
  std::size_t count = 0;
  bool redundant = false;
  bool canonical = false;  // every alternative branch is a sum of canonical branches
};

struct ProbeReport {
  std::size_t trials = 0;
  std::size_t branches = 0;
  std::vector<ProbeTrial> results;
  std::size_t redundant_alternatives = 0;  // among the Haar trials
  std::size_t redundant_noncanonical = 0;  // over every trial
  bool passed = false;
};

namespace detail {

// Residual of writing c as a 0/1 sum of the canonical branches.
inline double canonical_sum_residual(const std::vector<Vector>& canon, const Vector& c) {
  Vector sum = Vector::Zero(c.size());
  for (const auto& v : canon) {
    const Complex x = v.dot(c) / v.squaredNorm();
    if (std::abs(x - 1.0) < 0.5) sum += v;
  }
  return (c - sum).norm();
}

}  // namespace detail

/// Tries alternative orthogonal decompositions of the global state (the
/// identity, one Givens rotation by theta and Haar-random rotations of the
/// canonical branch directions) and counts those that are redundantly
/// recorded without being sums of canonical branches.
inline ProbeReport branch_uniqueness_probe(const HistorySet& hs, std::optional<std::size_t> eval_time,
                                           std::size_t trials, const ProbeOptions& opt = {}) {
  if (!hs.is_pure()) throw PreconditionError("branch_uniqueness_probe needs a pure global state");
  const auto b = hs.branches(eval_time);
  const auto cand = fragment_candidates(hs, opt.redundancy);
  const SearchMode mode = default_search_mode(cand.size());
  const Vector psi = b->state.col(0);
  std::vector<std::size_t> live;
  std::vector<Vector> canon, dirs;
  for (std::size_t j = 0; j < b->size(); ++j) {
    if (b->probability(j) < b->tol.zero_probability) continue;
    live.push_back(j);
    canon.push_back(b->factors[j].col(0));
    dirs.push_back(canon.back() / canon.back().norm());
  }
  const auto n = static_cast<Eigen::Index>(dirs.size());
  ProbeReport rep;
  rep.trials = trials;
  rep.branches = dirs.size();

  auto evaluate = [&](const Matrix& w, const char* kind) {
    BranchSet alt;
    alt.space = b->space;
    alt.state = b->state;
    alt.pure = true;
    alt.eval_time = b->eval_time;
    alt.tol = b->tol;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      Vector g = Vector::Zero(psi.size());
      for (Eigen::Index a = 0; a < n; ++a) g += w(a, j) * dirs[a];
      const Vector c = g * g.dot(psi);
      worst = std::max(worst, detail::canonical_sum_residual(canon, c));
      alt.factors.push_back(c);
      alt.labels.push_back("c" + std::to_string(j));
    }
    ProbeTrial t;
    t.kind = kind;
    t.count = redundancy_count(alt, cand, opt.delta, mode, opt.redundancy.max_fragment_size, false).count;
    t.redundant = t.count >= opt.threshold;
    t.canonical = worst <= b->tol.recon;
    if (t.redundant && !t.canonical) ++rep.redundant_noncanonical;
    rep.results.push_back(t);
    return t;
  };

  evaluate(Matrix::Identity(n, n), "identity");

  // Givens rotation between the first branch and the next one sharing its final outcome.
  if (n >= 2) {
    const std::size_t last = hs.num_events() - 1;
    const std::size_t a0 = hs.decode(live[0])[last];
    Eigen::Index partner = 1;
    for (Eigen::Index k = 1; k < n; ++k) {
      if (hs.decode(live[k])[last] == a0) {
        partner = k;
        break;
      }
    }
    Matrix w = Matrix::Identity(n, n);
    const double c = std::cos(opt.theta), s = std::sin(opt.theta);
    w(0, 0) = c;
    w(0, partner) = -s;
    w(partner, 0) = s;
    w(partner, partner) = c;
    evaluate(w, "theta");
  }

  Rng rng(opt.seed);
  for (std::size_t i = 0; i < trials; ++i) {
    if (evaluate(haar_unitary(n, rng), "haar").redundant) ++rep.redundant_alternatives;
  }
  rep.passed = rep.redundant_noncanonical == 0;
  return rep;
}

}  // namespace qhist
