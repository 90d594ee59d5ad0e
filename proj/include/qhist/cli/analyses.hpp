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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qhist/cli/report.hpp"
#include "qhist/cli/value.hpp"
#include "qhist/qhist.hpp"

namespace qhist::cli {

/// A resolved analysis: parameters are parsed and references checked
/// against the model before anything runs.
using Analysis = std::function<void(Report&)>;

struct OpInfo {
  const char* name;
  const char* params;
};

inline const std::vector<OpInfo>& op_catalog() {
  static const std::vector<OpInfo> ops = {
      {"decoherence_functional", "eval_time"},
      {"probabilities", "eval_time"},
      {"consistency_factor", "alpha, beta, eval_time"},
      {"check_consistency", "epsilon=1e-9, eval_time"},
      {"class_operator", "history, eval_time"},
      {"branch_state", "history, eval_time"},
      {"coarse_grain", "histories | level, eval_time"},
      {"conditional_state", "history, keep, eval_time"},
      {"partial_trace", "keep, eval_time (any time up to the duration)"},
      {"schmidt", "cut, eval_time"},
      {"pt_decoherence_functional", "traced, eval_time"},
      {"check_pt_consistency", "traced, epsilon=1e-9, eval_time"},
      {"pt_consistency_factor", "traced, alpha, beta, eval_time"},
      {"fidelity_identity_check", "cut, alpha, beta (all pairs if omitted), eval_time"},
      {"detect_records", "fragment, delta=1e-9, delta_prime, eval_time"},
      {"records_in_time", "fragment, epsilon, eval_time"},
      {"redundancy_count", "delta=1e-9, mode=auto|exhaustive|greedy, max_fragment_size=3, include_system, exclude, eval_time"},
      {"is_redundantly_consistent", "delta=1e-9, threshold=3, epsilon=1e-9, max_fragment_size=3, include_system, exclude, eval_time"},
      {"branch_uniqueness_probe", "trials=100, seed, delta=1e-9, threshold=3, theta, eval_time"},
  };
  return ops;
}

namespace detail {

struct Params {
  const Value& v;
  std::string where;

  const Value* get(std::string_view k) const { return v.find(k); }

  std::optional<std::size_t> time() const {
    const Value* x = get("eval_time");
    if (!x) return std::nullopt;
    return as_size(*x, where + ".eval_time");
  }
  double real(std::string_view k, double fallback) const {
    const Value* x = get(k);
    return x ? as_double(*x, where + "." + std::string(k)) : fallback;
  }
  std::size_t size(std::string_view k, std::size_t fallback) const {
    const Value* x = get(k);
    return x ? as_size(*x, where + "." + std::string(k)) : fallback;
  }
  bool flag(std::string_view k, bool fallback) const {
    const Value* x = get(k);
    return x ? as_bool(*x, where + "." + std::string(k)) : fallback;
  }
  const Value& need(std::string_view k) const { return require(v, k, where); }
};

// A history is given by its label or as a list of outcome indices.
inline History resolve_history(const HistorySet& hs, const Value& v, const std::string& where) {
  if (v.is_scalar()) {
    const auto flat = hs.find(v.scalar);
    if (!flat) throw InvariantError(where + ": no history labelled '" + v.scalar + "'");
    return hs.decode(*flat);
  }
  if (!v.is_list()) throw ParseError(where + ": expected a history label or index list");
  History h;
  for (std::size_t i = 0; i < v.items.size(); ++i) h.push_back(as_size(v.items[i], where + "[" + std::to_string(i) + "]"));
  try {
    hs.check_history(h);
  } catch (const PreconditionError& e) {
    throw InvariantError(where + ": " + e.what());
  }
  return h;
}

inline Fragment resolve_fragment(const HistorySet& hs, const Value& v, const std::string& where) {
  const auto labels = as_strings(v, where);
  for (const auto& l : labels) {
    if (!hs.space().contains(l)) throw InvariantError(where + ": unknown subsystem '" + l + "'");
  }
  return Fragment(hs.space(), labels);
}

inline std::string joined(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : " ") + x;
  return out;
}

inline double scale(const Matrix& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

inline void breach_if(bool bad, const std::string& what) {
  if (bad) throw ToleranceBreach("self-check failed: " + what);
}

inline void check_functional(const DecoherenceMatrix& d, double trace, const Tolerances& tol) {
  breach_if((d.entries - d.entries.adjoint()).cwiseAbs().maxCoeff() > tol.ortho * scale(d.entries),
            "decoherence functional is not Hermitian");
  breach_if(std::abs(d.entries.sum() - trace) > tol.norm, "decoherence functional does not sum to Tr rho");
  for (double p : d.probabilities()) breach_if(p < -tol.psd, "negative history probability");
}

inline void summary_flags(Summary& s, const HistorySet& hs, std::size_t t) {
  s.put("eval_time", t).put("histories", hs.num_histories());
}

inline Analysis prepare_redundancy(const HistorySet& hs, const Params& p, bool verdict) {
  const std::optional<std::size_t> t = p.time();
  const double delta = p.real("delta", 1e-9);
  RedundancyOptions opt;
  opt.max_fragment_size = p.size("max_fragment_size", 3);
  opt.include_system = p.flag("include_system", false);
  if (const Value* x = p.get("exclude")) {
    opt.excluded_labels = as_strings(*x, p.where + ".exclude");
    for (const auto& l : opt.excluded_labels) {
      if (!hs.space().contains(l)) throw InvariantError(p.where + ".exclude: unknown subsystem '" + l + "'");
    }
  }
  const std::size_t threshold = p.size("threshold", 3);
  const double epsilon = p.real("epsilon", 1e-9);
  std::optional<SearchMode> mode;
  if (const Value* x = p.get("mode")) {
    const std::string m = as_scalar(*x, p.where + ".mode");
    if (m == "exhaustive") mode = SearchMode::exhaustive;
    else if (m == "greedy") mode = SearchMode::greedy;
    else if (m != "auto") throw ParseError(p.where + ".mode: expected auto, exhaustive or greedy");
  }
  if (verdict && mode) throw ParseError(p.where + ".mode: not used by is_redundantly_consistent");
  return [&hs, t, delta, opt, threshold, epsilon, mode, verdict](Report& r) {
    RedundancyReport rep;
    Summary s;
    if (verdict) {
      const ConsistencyReport c = check_consistency(hs, epsilon, t);
      const RedundancyVerdict v = is_redundantly_consistent(hs, t, delta, threshold, opt);
      rep = v.report;
      s.put("consistent", c.consistent).put("epsilon", epsilon).put("redundant", v.redundant).put("threshold", threshold);
    } else {
      const SearchMode m = mode.value_or(default_search_mode(fragment_candidates(hs, opt).size()));
      rep = redundancy_count(hs, t, delta, m, opt.max_fragment_size, opt);
    }
    s.put("count", rep.count).put("mode", to_string(rep.mode)).put("delta", rep.delta);
    s.put("max_fragment_size", rep.max_fragment_size).put("eval_time", rep.eval_time);
    s.put("candidates", joined(rep.candidates));
    Table& f = r.table("fragment", {"index", "labels", "size", "worst_fidelity", "max_support_overlap"});
    for (std::size_t i = 0; i < rep.fragments.size(); ++i) {
      const bool cert = i < rep.certificates.size();
      f.add({cell(i), cell(joined(rep.fragments[i])), cell(rep.fragments[i].size()),
             cert ? cell(rep.certificates[i].worst_fidelity) : Cell{},
             cert ? cell(rep.certificates[i].max_support_overlap) : Cell{}});
    }
    s.into(r);
  };
}

}  // namespace detail

/// Parses one analysis entry against hs. ParseError for malformed
/// parameters, InvariantError for references that do not resolve.
inline Analysis prepare_analysis(const HistorySet& hs, const std::string& op, const Value& params,
                                 const std::string& where) {
  const detail::Params p{params, where};
  auto keys = [&](std::initializer_list<std::string_view> ks) { allow_keys(params, ks, where); };
  using detail::resolve_fragment;
  using detail::resolve_history;
  const Tolerances& tol = hs.tolerances();

  if (op == "decoherence_functional" || op == "probabilities") {
    keys({"eval_time"});
    const auto t = p.time();
    const bool full = op == "decoherence_functional";
    return [&hs, t, full, &tol](Report& r) {
      const auto b = hs.branches(t);
      const DecoherenceMatrix d = decoherence_functional(*b);
      detail::check_functional(d, b->state.squaredNorm(), tol);
      Summary s;
      detail::summary_flags(s, hs, d.eval_time);
      if (full) {
        s.put("max_offdiagonal", d.max_offdiagonal());
        Table& e = r.table("entry", {"alpha", "beta", "re", "im"});
        for (std::size_t a = 0; a < d.size(); ++a) {
          for (std::size_t c = 0; c < d.size(); ++c) e.add({cell(d.labels[a]), cell(d.labels[c]), cell(d(a, c).real()), cell(d(a, c).imag())});
        }
      } else {
        double sum = 0.0;
        Table& e = r.table("probability", {"history", "p"});
        const auto ps = d.probabilities();
        for (std::size_t a = 0; a < d.size(); ++a) {
          e.add({cell(d.labels[a]), cell(ps[a])});
          sum += ps[a];
        }
        s.put("sum", sum);
      }
      s.into(r);
    };
  }

  if (op == "consistency_factor") {
    keys({"alpha", "beta", "eval_time"});
    const History a = resolve_history(hs, p.need("alpha"), where + ".alpha");
    const History b = resolve_history(hs, p.need("beta"), where + ".beta");
    const auto t = p.time();
    return [&hs, a, b, t](Report& r) {
      const Complex cf = consistency_factor(hs, a, b, t);
      Summary s;
      s.put("alpha", hs.label(a)).put("beta", hs.label(b)).put("eval_time", hs.resolve_time(t));
      s.complex("cf", cf).put("abs", std::abs(cf));
      s.into(r);
    };
  }

  if (op == "check_consistency") {
    keys({"epsilon", "eval_time"});
    const double eps = p.real("epsilon", 1e-9);
    const auto t = p.time();
    return [&hs, eps, t](Report& r) {
      const ConsistencyReport c = check_consistency(hs, eps, t);
      Summary s;
      detail::summary_flags(s, hs, hs.resolve_time(t));
      s.put("epsilon", c.epsilon).put("consistent", c.consistent).put("max_offdiag_cf", c.max_offdiag_cf);
      s.put("violations", c.violations.size()).put("skipped", c.skipped.size());
      Table& v = r.table("violation", {"alpha", "beta", "re", "im", "abs"});
      for (const auto& x : c.violations) {
        v.add({cell(x.alpha_label), cell(x.beta_label), cell(x.value.real()), cell(x.value.imag()), cell(std::abs(x.value))});
      }
      Table& k = r.table("skipped", {"history"});
      for (const auto& x : c.skipped) k.add({cell(x)});
      s.into(r);
    };
  }

  if (op == "class_operator" || op == "branch_state") {
    keys({"history", "eval_time"});
    const History a = resolve_history(hs, p.need("history"), where + ".history");
    const auto t = p.time();
    const bool is_op = op == "class_operator";
    return [&hs, a, t, is_op](Report& r) {
      Summary s;
      s.put("history", hs.label(a)).put("eval_time", hs.resolve_time(t));
      if (is_op) {
        const Matrix c = class_operator(hs, a, t);
        s.put("rows", static_cast<std::size_t>(c.rows())).put("cols", static_cast<std::size_t>(c.cols()));
        matrix_table(r, "entry", c);
      } else {
        const QState b = branch_state(hs, a, t);
        s.put("norm_squared", b.vector().squaredNorm());
        Table& e = r.table("amplitude", {"index", "re", "im"});
        for (Eigen::Index i = 0; i < b.vector().size(); ++i) {
          e.add({cell(static_cast<std::size_t>(i)), cell(b.vector()(i).real()), cell(b.vector()(i).imag())});
        }
      }
      s.into(r);
    };
  }

  if (op == "coarse_grain") {
    keys({"histories", "level", "eval_time"});
    const auto t = p.time();
    std::vector<CoarseHistory> groups;
    if (p.get("histories") && p.get("level")) throw ParseError(where + ": give 'histories' or 'level', not both");
    if (const Value* x = p.get("histories")) {
      if (!x->is_list()) throw ParseError(where + ".histories: expected a list");
      std::vector<History> hs_list;
      for (std::size_t i = 0; i < x->items.size(); ++i) {
        hs_list.push_back(resolve_history(hs, x->items[i], where + ".histories[" + std::to_string(i) + "]"));
      }
      try {
        groups.push_back(coarse_grain(hs, hs_list));
      } catch (const PreconditionError& e) {
        throw InvariantError(where + ".histories: " + e.what());
      }
    } else {
      const std::size_t level = p.size("level", 0);
      if (!p.get("level")) throw ParseError(where + ": missing 'histories' or 'level'");
      if (level > hs.num_events()) throw InvariantError(where + ".level: exceeds the number of events");
      groups = prefix_coarse_graining(hs, level);
    }
    return [&hs, groups, t](Report& r) {
      Summary s;
      s.put("eval_time", hs.resolve_time(t)).put("groups", groups.size());
      Table& g = r.table("group", {"label", "members", "probability"});
      double sum = 0.0;
      for (const auto& c : groups) {
        std::vector<std::string> names;
        for (std::size_t m : c.members) names.push_back(hs.label(m));
        const double pr = coarse_probability(hs, c, t);
        sum += pr;
        g.add({cell(c.label), cell(detail::joined(names)), cell(pr)});
      }
      s.put("probability_sum", sum);
      s.into(r);
    };
  }

  if (op == "conditional_state") {
    keys({"history", "keep", "eval_time"});
    const History a = resolve_history(hs, p.need("history"), where + ".history");
    const Fragment keep = resolve_fragment(hs, p.need("keep"), where + ".keep");
    const auto t = p.time();
    return [&hs, a, keep, t, &tol](Report& r) {
      const QState c = conditional_state(hs, a, keep, t);
      detail::breach_if(std::abs(c.trace() - 1.0) > tol.norm, "conditional state is not normalised");
      Summary s;
      s.put("history", hs.label(a)).put("keep", detail::joined(keep.labels())).put("eval_time", hs.resolve_time(t));
      s.put("trace", c.trace());
      matrix_table(r, "density", c.density());
      s.into(r);
    };
  }

  if (op == "partial_trace" || op == "schmidt") {
    const bool pt = op == "partial_trace";
    if (pt) keys({"keep", "eval_time"});
    else keys({"cut", "eval_time"});
    const Fragment f = resolve_fragment(hs, p.need(pt ? "keep" : "cut"), where + (pt ? ".keep" : ".cut"));
    const std::size_t t = p.time().value_or(hs.final_time());
    if (t > hs.duration()) throw InvariantError(where + ".eval_time: beyond schedule duration");
    return [&hs, f, t, pt, &tol](Report& r) {
      const Matrix k = hs.state_factor(t);
      Summary s;
      s.put(pt ? "keep" : "cut", detail::joined(f.labels())).put("eval_time", t);
      if (pt) {
        const QState rho = partial_trace(QState::unchecked_mixed(hs.space(), k * k.adjoint(), true), f);
        detail::breach_if(std::abs(rho.trace() - k.squaredNorm()) > tol.norm, "partial trace changed the trace");
        s.put("trace", rho.trace());
        matrix_table(r, "density", rho.density());
      } else {
        if (!hs.is_pure()) throw PreconditionError("schmidt needs a pure global state");
        const Vector psi = k.col(0);
        const SchmidtDecomposition sd = schmidt(QState::unnormalized(hs.space(), psi), f);
        const double err = (sd.reconstruct(f) - psi).norm();
        detail::breach_if(err > tol.recon, "Schmidt reconstruction error " + format_double(err));
        s.put("rank", sd.rank()).put("reconstruction_error", err);
        Table& c = r.table("coefficient", {"index", "d"});
        for (Eigen::Index i = 0; i < sd.coefficients.size(); ++i) c.add({cell(static_cast<std::size_t>(i)), cell(sd.coefficients(i))});
      }
      s.into(r);
    };
  }

  if (op == "pt_decoherence_functional") {
    keys({"traced", "eval_time"});
    const Fragment traced = resolve_fragment(hs, p.need("traced"), where + ".traced");
    const auto t = p.time();
    return [&hs, traced, t, &tol](Report& r) {
      const auto b = hs.branches(t);
      const PTDecoherenceFunctional d(*b, traced);
      double sum_gap = 0.0, herm_gap = 0.0, trace_gap = 0.0;
      Matrix total = Matrix::Zero(d.reduced_factor(0).rows(), d.reduced_factor(0).rows());
      Table& e = r.table("entry", {"alpha", "beta", "row", "col", "re", "im"});
      for (std::size_t a = 0; a < d.size(); ++a) {
        for (std::size_t c = 0; c < d.size(); ++c) {
          const Matrix m = d.entry(a, c);
          total += m;
          trace_gap = std::max(trace_gap, std::abs(m.trace() - b->overlap(a, c)));
          herm_gap = std::max(herm_gap, (m.adjoint() - d.entry(c, a)).cwiseAbs().maxCoeff());
          for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
              e.add({cell(d.labels()[a]), cell(d.labels()[c]), cell(static_cast<std::size_t>(i)),
                     cell(static_cast<std::size_t>(j)), cell(m(i, j).real()), cell(m(i, j).imag())});
            }
          }
        }
      }
      const Matrix rho = partial_trace(QState::unchecked_mixed(hs.space(), b->state * b->state.adjoint(), true), d.kept()).density();
      sum_gap = (total - rho).cwiseAbs().maxCoeff();
      detail::breach_if(trace_gap > tol.norm, "Tr D_B differs from D by " + format_double(trace_gap));
      detail::breach_if(herm_gap > tol.norm, "D_B is not Hermitian-conjugate symmetric");
      detail::breach_if(sum_gap > tol.norm, "sum of D_B differs from the reduced state by " + format_double(sum_gap));
      Summary s;
      s.put("traced", detail::joined(traced.labels())).put("kept", detail::joined(d.kept().labels()));
      s.put("eval_time", d.eval_time()).put("histories", d.size());
      s.put("trace_gap", trace_gap).put("hermitian_gap", herm_gap).put("sum_gap", sum_gap);
      s.into(r);
    };
  }

  if (op == "check_pt_consistency") {
    keys({"traced", "epsilon", "eval_time"});
    const Fragment traced = resolve_fragment(hs, p.need("traced"), where + ".traced");
    const double eps = p.real("epsilon", 1e-9);
    const auto t = p.time();
    return [&hs, traced, eps, t](Report& r) {
      const PTConsistencyReport c = check_pt_consistency(hs, traced, t, eps);
      Summary s;
      s.put("traced", detail::joined(c.traced)).put("eval_time", hs.resolve_time(t)).put("epsilon", c.epsilon);
      s.put("consistent", c.consistent).put("max_trace_norm", c.max_trace_norm);
      s.put("pairs", c.pairs.size()).put("skipped", c.skipped.size());
      Table& pr = r.table("pair", {"alpha", "beta", "trace_norm", "spectral_norm"});
      for (const auto& x : c.pairs) pr.add({cell(x.alpha_label), cell(x.beta_label), cell(x.trace_norm), cell(x.spectral_norm)});
      Table& k = r.table("skipped", {"history"});
      for (const auto& x : c.skipped) k.add({cell(x)});
      s.into(r);
    };
  }

  if (op == "pt_consistency_factor") {
    keys({"traced", "alpha", "beta", "eval_time"});
    const Fragment traced = resolve_fragment(hs, p.need("traced"), where + ".traced");
    const History a = resolve_history(hs, p.need("alpha"), where + ".alpha");
    const History b = resolve_history(hs, p.need("beta"), where + ".beta");
    const auto t = p.time();
    return [&hs, traced, a, b, t](Report& r) {
      const PTConsistencyFactor cf = pt_consistency_factor(hs, traced, a, b, t);
      Summary s;
      s.put("traced", detail::joined(traced.labels())).put("alpha", hs.label(a)).put("beta", hs.label(b));
      s.put("eval_time", hs.resolve_time(t)).put("trace_norm", cf.trace_norm).put("spectral_norm", cf.spectral_norm);
      matrix_table(r, "entry", cf.op);
      s.into(r);
    };
  }

  if (op == "fidelity_identity_check") {
    keys({"cut", "alpha", "beta", "eval_time"});
    const Fragment cut = resolve_fragment(hs, p.need("cut"), where + ".cut");
    if (static_cast<bool>(p.get("alpha")) != static_cast<bool>(p.get("beta"))) {
      throw ParseError(where + ": give both 'alpha' and 'beta' or neither");
    }
    std::optional<std::pair<History, History>> pair;
    if (p.get("alpha")) {
      pair.emplace(resolve_history(hs, p.need("alpha"), where + ".alpha"), resolve_history(hs, p.need("beta"), where + ".beta"));
    }
    const auto t = p.time();
    return [&hs, cut, pair, t, &tol](Report& r) {
      std::vector<FidelityIdentity> rows;
      if (pair) {
        rows.push_back(fidelity_identity_check(hs, cut, pair->first, pair->second, t));
      } else {
        if (!hs.is_pure()) throw PreconditionError("fidelity identity holds for pure global states only");
        rows = fidelity_identity_table(*hs.branches(t), cut);
      }
      double worst = 0.0;
      Table& f = r.table("pair", {"alpha", "beta", "lhs", "rhs", "gap"});
      for (const auto& x : rows) {
        f.add({cell(hs.label(x.alpha)), cell(hs.label(x.beta)), cell(x.lhs), cell(x.rhs), cell(x.gap)});
        worst = std::max(worst, x.gap);
      }
      detail::breach_if(worst > tol.identity, "fidelity identity gap " + format_double(worst));
      Summary s;
      s.put("cut", detail::joined(cut.labels())).put("eval_time", hs.resolve_time(t));
      s.put("pairs", rows.size()).put("max_gap", worst);
      s.into(r);
    };
  }

  if (op == "detect_records") {
    keys({"fragment", "delta", "delta_prime", "eval_time"});
    const Fragment f = resolve_fragment(hs, p.need("fragment"), where + ".fragment");
    const double delta = p.real("delta", 1e-9);
    std::optional<double> dp;
    if (p.get("delta_prime")) dp = p.real("delta_prime", 0.0);
    const auto t = p.time();
    return [&hs, f, delta, dp, t](Report& r) {
      const RecordCertificate c = detect_records(hs, f, t, delta, dp);
      Summary s;
      s.put("fragment", detail::joined(c.fragment)).put("eval_time", c.eval_time);
      s.put("delta", c.delta).put("delta_prime", c.delta_prime).put("passed", c.passed);
      s.put("orthogonal_supports", c.conditions.orthogonal_supports).put("fidelity_bound", c.conditions.fidelity_bound);
      s.put("record_projectors", c.conditions.record_projectors);
      s.put("worst_fidelity", c.worst_fidelity).put("worst_pair_alpha", c.worst_pair_alpha).put("worst_pair_beta", c.worst_pair_beta);
      s.put("max_support_overlap", c.max_support_overlap).put("max_record_residual", c.max_record_residual);
      s.put("skipped", c.skipped.size());
      Table& k = r.table("record_support", {"history", "rank"});
      for (std::size_t j = 0; j < c.record_projectors.size(); ++j) {
        const Complex tr = c.record_projectors[j].trace();
        k.add({cell(c.labels[j]), cell(static_cast<std::size_t>(std::llround(tr.real())))});
      }
      s.into(r);
    };
  }

  if (op == "records_in_time") {
    keys({"fragment", "epsilon", "eval_time"});
    const Fragment f = resolve_fragment(hs, p.need("fragment"), where + ".fragment");
    std::optional<double> eps;
    if (p.get("epsilon")) eps = p.real("epsilon", 0.0);
    const auto t = p.time();
    return [&hs, f, eps, t](Report& r) {
      const RecordsInTimeReport rep = records_in_time(hs, f, t, eps);
      Summary s;
      s.put("fragment", detail::joined(rep.fragment)).put("eval_time", rep.eval_time).put("passed", rep.passed);
      s.put("levels", rep.levels.size());
      Table& l = r.table("level", {"level", "prefixes", "max_overlap", "max_containment_residual", "orthogonal", "nested"});
      for (const auto& x : rep.levels) {
        l.add({cell(x.level), cell(detail::joined(x.prefixes)), cell(x.max_overlap), cell(x.max_containment_residual),
               cell(x.orthogonal), cell(x.nested)});
      }
      s.into(r);
    };
  }

  if (op == "redundancy_count") {
    keys({"delta", "mode", "max_fragment_size", "include_system", "exclude", "eval_time"});
    return detail::prepare_redundancy(hs, p, false);
  }

  if (op == "is_redundantly_consistent") {
    keys({"delta", "threshold", "epsilon", "max_fragment_size", "include_system", "exclude", "eval_time"});
    return detail::prepare_redundancy(hs, p, true);
  }

  if (op == "branch_uniqueness_probe") {
    keys({"trials", "seed", "delta", "threshold", "theta", "max_fragment_size", "eval_time"});
    ProbeOptions opt;
    const std::size_t trials = p.size("trials", 100);
    if (const Value* x = p.get("seed")) opt.seed = static_cast<std::uint64_t>(as_size(*x, where + ".seed"));
    opt.delta = p.real("delta", opt.delta);
    opt.threshold = p.size("threshold", opt.threshold);
    opt.theta = p.real("theta", opt.theta);
    opt.redundancy.max_fragment_size = p.size("max_fragment_size", opt.redundancy.max_fragment_size);
    const auto t = p.time();
    return [&hs, trials, opt, t](Report& r) {
      const ProbeReport rep = branch_uniqueness_probe(hs, t, trials, opt);
      Summary s;
      s.put("eval_time", hs.resolve_time(t)).put("seed", static_cast<std::size_t>(opt.seed)).put("trials", rep.trials);
      s.put("branches", rep.branches).put("redundant_alternatives", rep.redundant_alternatives);
      s.put("redundant_noncanonical", rep.redundant_noncanonical).put("passed", rep.passed);
      Table& k = r.table("trial", {"index", "kind", "count", "redundant", "canonical"});
      for (std::size_t i = 0; i < rep.results.size(); ++i) {
        const auto& x = rep.results[i];
        k.add({cell(i), cell(x.kind), cell(x.count), cell(x.redundant), cell(x.canonical)});
      }
      s.into(r);
    };
  }

  throw ParseError(where + ": unknown analysis op '" + op + "'");
}

}  // namespace qhist::cli
