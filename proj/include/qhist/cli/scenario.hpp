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

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "qhist/cli/value.hpp"
#include "qhist/core/errors.hpp"
#include "qhist/core/tolerances.hpp"
#include "qhist/histories/history_set.hpp"
#include "qhist/models/appendix.hpp"
#include "qhist/models/cnot.hpp"
#include "qhist/models/no_record.hpp"
#include "qhist/models/pure_decoherence.hpp"

namespace qhist::cli {

inline constexpr const char* kScenarioSchema = "qhist-scenario/1";

struct GateSpec {
  std::vector<std::string> targets;
  Matrix matrix;
};

struct ProjectorSpec {
  std::string label;
  std::vector<std::string> targets;
  Matrix matrix;
};

struct FamilySpec {
  std::size_t time = 0;
  std::vector<ProjectorSpec> projectors;
};

struct InitialSpec {
  std::string kind;  // pure | mixed | factor
  Vector vector;
  Matrix matrix;
};

struct InlineModel {
  std::vector<Factor> space;
  std::vector<std::vector<GateSpec>> steps;
  std::vector<FamilySpec> families;
  InitialSpec initial;
  std::vector<std::string> system;
  std::vector<std::string> auxiliary;
};

struct ModelSpec {
  std::string builder;  // empty for inline models
  Value params = Value::map();
  std::optional<InlineModel> inline_model;
};

struct AnalysisSpec {
  std::string op;
  Value params = Value::map();
};

struct Scenario {
  std::string name;
  ModelSpec model;
  std::vector<std::pair<std::string, double>> tolerances;
  std::vector<AnalysisSpec> analyses;
  std::string output_dir;
  std::string format;
};

namespace detail {

inline bool same(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

}  // namespace detail

inline bool operator==(const GateSpec& a, const GateSpec& b) {
  return a.targets == b.targets && detail::same(a.matrix, b.matrix);
}
inline bool operator==(const ProjectorSpec& a, const ProjectorSpec& b) {
  return a.label == b.label && a.targets == b.targets && detail::same(a.matrix, b.matrix);
}
inline bool operator==(const FamilySpec& a, const FamilySpec& b) {
  return a.time == b.time && a.projectors == b.projectors;
}
inline bool operator==(const InitialSpec& a, const InitialSpec& b) {
  return a.kind == b.kind && detail::same(a.vector, b.vector) && detail::same(a.matrix, b.matrix);
}
inline bool operator==(const InlineModel& a, const InlineModel& b) {
  return a.space == b.space && a.steps == b.steps && a.families == b.families && a.initial == b.initial &&
         a.system == b.system && a.auxiliary == b.auxiliary;
}
inline bool operator==(const ModelSpec& a, const ModelSpec& b) {
  return a.builder == b.builder && a.params == b.params && a.inline_model == b.inline_model;
}
inline bool operator==(const AnalysisSpec& a, const AnalysisSpec& b) { return a.op == b.op && a.params == b.params; }
inline bool operator==(const Scenario& a, const Scenario& b) {
  return a.name == b.name && a.model == b.model && a.tolerances == b.tolerances && a.analyses == b.analyses &&
         a.output_dir == b.output_dir && a.format == b.format;
}

// ---- parsing -----------------------------------------------------------

namespace detail {

inline InlineModel parse_inline(const Value& v) {
  const std::string w = "model.inline";
  allow_keys(v, {"space", "steps", "families", "initial_state", "system", "auxiliary"}, w);
  InlineModel m;
  const Value& space = require(v, "space", w);
  if (!space.is_list()) throw ParseError(w + ".space: expected a list");
  for (std::size_t i = 0; i < space.items.size(); ++i) {
    const std::string wi = w + ".space[" + std::to_string(i) + "]";
    allow_keys(space.items[i], {"label", "dim"}, wi);
    m.space.push_back({as_scalar(require(space.items[i], "label", wi), wi), as_size(require(space.items[i], "dim", wi), wi)});
  }
  if (const Value* steps = v.find("steps")) {
    if (!steps->is_list()) throw ParseError(w + ".steps: expected a list of steps");
    for (std::size_t s = 0; s < steps->items.size(); ++s) {
      const Value& step = steps->items[s];
      const std::string ws = w + ".steps[" + std::to_string(s) + "]";
      if (step.kind == Value::Kind::null) {
        m.steps.emplace_back();
        continue;
      }
      if (!step.is_list()) throw ParseError(ws + ": expected a list of gates");
      std::vector<GateSpec> gates;
      for (std::size_t g = 0; g < step.items.size(); ++g) {
        const std::string wg = ws + "[" + std::to_string(g) + "]";
        allow_keys(step.items[g], {"targets", "matrix"}, wg);
        gates.push_back({as_strings(require(step.items[g], "targets", wg), wg),
                         as_matrix(require(step.items[g], "matrix", wg), wg + ".matrix")});
      }
      m.steps.push_back(std::move(gates));
    }
  }
  const Value& fams = require(v, "families", w);
  if (!fams.is_list()) throw ParseError(w + ".families: expected a list");
  for (std::size_t f = 0; f < fams.items.size(); ++f) {
    const std::string wf = w + ".families[" + std::to_string(f) + "]";
    allow_keys(fams.items[f], {"time", "projectors"}, wf);
    FamilySpec fs;
    fs.time = as_size(require(fams.items[f], "time", wf), wf + ".time");
    const Value& ps = require(fams.items[f], "projectors", wf);
    if (!ps.is_list()) throw ParseError(wf + ".projectors: expected a list");
    for (std::size_t p = 0; p < ps.items.size(); ++p) {
      const std::string wp = wf + ".projectors[" + std::to_string(p) + "]";
      allow_keys(ps.items[p], {"label", "targets", "matrix"}, wp);
      fs.projectors.push_back({as_scalar(require(ps.items[p], "label", wp), wp),
                               as_strings(require(ps.items[p], "targets", wp), wp),
                               as_matrix(require(ps.items[p], "matrix", wp), wp + ".matrix")});
    }
    m.families.push_back(std::move(fs));
  }
  const Value& init = require(v, "initial_state", w);
  const std::string wi = w + ".initial_state";
  allow_keys(init, {"kind", "vector", "matrix"}, wi);
  m.initial.kind = as_scalar(require(init, "kind", wi), wi + ".kind");
  if (m.initial.kind == "pure") {
    m.initial.vector = as_vector(require(init, "vector", wi), wi + ".vector");
  } else if (m.initial.kind == "mixed" || m.initial.kind == "factor") {
    m.initial.matrix = as_matrix(require(init, "matrix", wi), wi + ".matrix");
  } else {
    throw ParseError(wi + ".kind: expected pure, mixed or factor");
  }
  if (const Value* s = v.find("system")) m.system = as_strings(*s, w + ".system");
  if (const Value* a = v.find("auxiliary")) m.auxiliary = as_strings(*a, w + ".auxiliary");
  return m;
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ParseError(std::string("scenario is not valid YAML: ") + e.what());
  }
  const Value v = from_yaml(root, "scenario");
  const std::string w = "scenario";
  allow_keys(v, {"schema", "name", "model", "tolerances", "analyses", "output"}, w);
  if (const Value* s = v.find("schema"); s && as_scalar(*s, w + ".schema") != kScenarioSchema) {
    throw ParseError("unsupported scenario schema '" + s->scalar + "'");
  }
  Scenario sc;
  if (const Value* n = v.find("name")) sc.name = as_scalar(*n, w + ".name");
  const Value& model = require(v, "model", w);
  allow_keys(model, {"builder", "params", "inline"}, w + ".model");
  const Value* builder = model.find("builder");
  const Value* inl = model.find("inline");
  if ((builder != nullptr) == (inl != nullptr)) throw ParseError("model: give exactly one of 'builder' or 'inline'");
  if (builder) {
    sc.model.builder = as_scalar(*builder, w + ".model.builder");
    if (const Value* p = model.find("params")) {
      if (!p->is_map() && p->kind != Value::Kind::null) throw ParseError("model.params: expected a mapping");
      if (p->is_map()) sc.model.params = *p;
    }
  } else {
    if (model.find("params")) throw ParseError("model.params: not used with inline models");
    sc.model.inline_model = detail::parse_inline(*inl);
  }
  if (const Value* t = v.find("tolerances"); t && t->kind != Value::Kind::null) {
    if (!t->is_map()) throw ParseError("tolerances: expected a mapping");
    const auto known = Tolerances{}.entries();
    for (const auto& [k, x] : t->entries) {
      bool ok = false;
      for (const auto& e : known) ok = ok || e.first == k;
      if (!ok) throw ParseError("tolerances: unknown key '" + k + "'");
      sc.tolerances.emplace_back(k, as_double(x, "tolerances." + k));
    }
  }
  if (const Value* a = v.find("analyses"); a && a->kind != Value::Kind::null) {
    if (!a->is_list()) throw ParseError("analyses: expected a list");
    for (std::size_t i = 0; i < a->items.size(); ++i) {
      const std::string wa = "analyses[" + std::to_string(i) + "]";
      const Value& item = a->items[i];
      if (!item.is_map()) throw ParseError(wa + ": expected a mapping");
      AnalysisSpec spec;
      spec.op = as_scalar(require(item, "op", wa), wa + ".op");
      for (const auto& [k, x] : item.entries) {
        if (k != "op") spec.params.entries.emplace_back(k, x);
      }
      sc.analyses.push_back(std::move(spec));
    }
  }
  if (const Value* o = v.find("output"); o && o->kind != Value::Kind::null) {
    allow_keys(*o, {"dir", "format"}, "output");
    if (const Value* d = o->find("dir")) sc.output_dir = as_scalar(*d, "output.dir");
    if (const Value* f = o->find("format")) sc.format = as_scalar(*f, "output.format");
  }
  return sc;
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

// ---- serialization -----------------------------------------------------

inline std::string serialize_scenario(const Scenario& sc) {
  Value root = Value::map();
  root.set("schema", Value::of(kScenarioSchema));
  if (!sc.name.empty()) root.set("name", Value::of(sc.name));
  Value model = Value::map();
  if (sc.model.inline_model) {
    const InlineModel& m = *sc.model.inline_model;
    Value inl = Value::map();
    Value space;
    space.kind = Value::Kind::list;
    for (const auto& f : m.space) {
      Value e = Value::map();
      e.set("label", Value::of(f.label));
      e.set("dim", Value::of(std::to_string(f.dim)));
      space.items.push_back(std::move(e));
    }
    inl.set("space", std::move(space));
    Value steps;
    steps.kind = Value::Kind::list;
    for (const auto& step : m.steps) {
      Value gs;
      gs.kind = Value::Kind::list;
      for (const auto& g : step) {
        Value e = Value::map();
        e.set("targets", strings_value(g.targets));
        e.set("matrix", matrix_value(g.matrix));
        gs.items.push_back(std::move(e));
      }
      steps.items.push_back(std::move(gs));
    }
    inl.set("steps", std::move(steps));
    Value fams;
    fams.kind = Value::Kind::list;
    for (const auto& f : m.families) {
      Value e = Value::map();
      e.set("time", Value::of(std::to_string(f.time)));
      Value ps;
      ps.kind = Value::Kind::list;
      for (const auto& p : f.projectors) {
        Value pe = Value::map();
        pe.set("label", Value::of(p.label));
        pe.set("targets", strings_value(p.targets));
        pe.set("matrix", matrix_value(p.matrix));
        ps.items.push_back(std::move(pe));
      }
      e.set("projectors", std::move(ps));
      fams.items.push_back(std::move(e));
    }
    inl.set("families", std::move(fams));
    Value init = Value::map();
    init.set("kind", Value::of(m.initial.kind));
    if (m.initial.kind == "pure") init.set("vector", vector_value(m.initial.vector));
    else init.set("matrix", matrix_value(m.initial.matrix));
    inl.set("initial_state", std::move(init));
    if (!m.system.empty()) inl.set("system", strings_value(m.system));
    if (!m.auxiliary.empty()) inl.set("auxiliary", strings_value(m.auxiliary));
    model.set("inline", std::move(inl));
  } else {
    model.set("builder", Value::of(sc.model.builder));
    if (!sc.model.params.entries.empty()) model.set("params", sc.model.params);
  }
  root.set("model", std::move(model));
  if (!sc.tolerances.empty()) {
    Value t = Value::map();
    for (const auto& [k, x] : sc.tolerances) t.set(k, Value::of(format_double(x)));
    root.set("tolerances", std::move(t));
  }
  Value analyses;
  analyses.kind = Value::Kind::list;
  for (const auto& a : sc.analyses) {
    Value e = Value::map();
    e.set("op", Value::of(a.op));
    for (const auto& [k, x] : a.params.entries) e.set(k, x);
    analyses.items.push_back(std::move(e));
  }
  root.set("analyses", std::move(analyses));
  if (!sc.output_dir.empty() || !sc.format.empty()) {
    Value o = Value::map();
    if (!sc.output_dir.empty()) o.set("dir", Value::of(sc.output_dir));
    if (!sc.format.empty()) o.set("format", Value::of(sc.format));
    root.set("output", std::move(o));
  }
  YAML::Emitter out;
  to_yaml(out, root);
  return std::string(out.c_str()) + "\n";
}

// ---- model construction --------------------------------------------------

struct ModelInfo {
  const char* name;
  const char* summary;
  const char* params;
};

inline const std::vector<ModelInfo>& model_catalog() {
  static const std::vector<ModelInfo> models = {
      {"cnot", "system qubit branched by Hadamards and copied into sub-environments by CNOTs",
       "events, spins_per_subenv, env_init (pure|mixed), p0, purify, placement (after_recording|after_branching)"},
      {"appendix", "alternate consistent sets on the two-event CNOT model", "kind (abwxyz|theta_phi), theta, phi, spins_per_subenv"},
      {"no_record", "decoherence without records in E", "variant (mixed|purified|ghz|ghz_scrambled)"},
      {"pure_decoherence", "controlled unitaries on independent environment components",
       "pointer_dim, amplitudes, unitaries[s][k], env_init[k], event_times"},
  };
  return models;
}

namespace detail {

inline std::vector<std::size_t> sizes_param(const Value& v, const std::string& w) {
  std::vector<std::size_t> out;
  if (v.is_scalar()) return {as_size(v, w)};
  if (!v.is_list()) throw ParseError(w + ": expected an integer or list of integers");
  for (std::size_t i = 0; i < v.items.size(); ++i) out.push_back(as_size(v.items[i], w + "[" + std::to_string(i) + "]"));
  return out;
}

inline CnotModelConfig cnot_config(const Value& p, const std::string& w) {
  allow_keys(p, {"events", "spins_per_subenv", "env_init", "p0", "purify", "placement"}, w);
  CnotModelConfig cfg;
  if (const Value* x = p.find("events")) cfg.events = as_size(*x, w + ".events");
  if (const Value* x = p.find("spins_per_subenv")) cfg.spins_per_subenv = sizes_param(*x, w + ".spins_per_subenv");
  if (const Value* x = p.find("env_init")) {
    const std::string s = as_scalar(*x, w + ".env_init");
    if (s == "pure") cfg.env_init = EnvInit::pure;
    else if (s == "mixed") cfg.env_init = EnvInit::mixed;
    else throw ParseError(w + ".env_init: expected pure or mixed");
  }
  if (const Value* x = p.find("p0")) cfg.p0 = as_double(*x, w + ".p0");
  if (const Value* x = p.find("purify")) cfg.purify = as_bool(*x, w + ".purify");
  if (const Value* x = p.find("placement")) {
    const std::string s = as_scalar(*x, w + ".placement");
    if (s == "after_recording") cfg.placement = EventPlacement::after_recording;
    else if (s == "after_branching") cfg.placement = EventPlacement::after_branching;
    else throw ParseError(w + ".placement: expected after_recording or after_branching");
  }
  return cfg;
}

inline HistorySet build_inline(const InlineModel& m, const Tolerances& tol) {
  const TensorSpace space(m.space);
  std::vector<std::vector<Operator>> steps;
  for (const auto& step : m.steps) {
    std::vector<Operator> gs;
    for (const auto& g : step) gs.emplace_back(space, g.targets, g.matrix);
    steps.push_back(std::move(gs));
  }
  Schedule schedule(space, std::move(steps), tol);
  std::vector<ProjectorFamily> families;
  for (const auto& f : m.families) {
    std::vector<Operator> ps;
    std::vector<std::string> labels;
    for (const auto& p : f.projectors) {
      ps.emplace_back(space, p.targets, p.matrix);
      labels.push_back(p.label);
    }
    families.emplace_back(f.time, std::move(ps), std::move(labels));
  }
  QState init;
  if (m.initial.kind == "pure") init = QState::pure(space, m.initial.vector, tol);
  else if (m.initial.kind == "mixed") init = QState::mixed(space, m.initial.matrix, tol);
  else init = QState::from_factor(space, m.initial.matrix, tol);
  HistorySetOptions opt;
  opt.system_labels = m.system;
  opt.auxiliary_labels = m.auxiliary;
  opt.tolerances = tol;
  return HistorySet(std::move(schedule), std::move(families), std::move(init), std::move(opt));
}

}  // namespace detail

inline Tolerances scenario_tolerances(const Scenario& sc, const std::vector<std::pair<std::string, double>>& overrides = {}) {
  Tolerances tol;
  for (const auto& [k, x] : sc.tolerances) tol.set(k, x);
  for (const auto& [k, x] : overrides) tol.set(k, x);
  return tol;
}

inline HistorySet build_history_set(const ModelSpec& spec, const Tolerances& tol) {
  if (spec.inline_model) return detail::build_inline(*spec.inline_model, tol);
  const Value& p = spec.params;
  const std::string w = "model.params";
  if (spec.builder == "cnot") return build_cnot_model(detail::cnot_config(p, w)).with_tolerances(tol);
  if (spec.builder == "appendix") {
    allow_keys(p, {"kind", "theta", "phi", "spins_per_subenv"}, w);
    const AppendixKind kind = parse_appendix_kind(as_scalar(require(p, "kind", w), w + ".kind"));
    const double theta = p.find("theta") ? as_double(*p.find("theta"), w + ".theta") : 0.0;
    const double phi = p.find("phi") ? as_double(*p.find("phi"), w + ".phi") : 0.0;
    CnotModelConfig base = appendix_base_config();
    if (const Value* x = p.find("spins_per_subenv")) base.spins_per_subenv = detail::sizes_param(*x, w + ".spins_per_subenv");
    return build_appendix_alternate_set(kind, theta, phi, base).with_tolerances(tol);
  }
  if (spec.builder == "no_record") {
    allow_keys(p, {"variant"}, w);
    const std::string variant = p.find("variant") ? as_scalar(*p.find("variant"), w + ".variant") : "mixed";
    return build_mixed_record_counterexample(parse_no_record_variant(variant)).with_tolerances(tol);
  }
  if (spec.builder == "pure_decoherence") {
    allow_keys(p, {"pointer_dim", "amplitudes", "unitaries", "env_init", "event_times"}, w);
    PureDecoherenceConfig cfg;
    if (const Value* x = p.find("pointer_dim")) cfg.pointer_dim = as_size(*x, w + ".pointer_dim");
    if (const Value* x = p.find("amplitudes")) {
      const Vector a = as_vector(*x, w + ".amplitudes");
      cfg.amplitudes.assign(a.data(), a.data() + a.size());
    }
    const Value& us = require(p, "unitaries", w);
    if (!us.is_list()) throw ParseError(w + ".unitaries: expected a list per pointer state");
    for (std::size_t s = 0; s < us.items.size(); ++s) {
      const std::string ws = w + ".unitaries[" + std::to_string(s) + "]";
      if (!us.items[s].is_list()) throw ParseError(ws + ": expected a list of matrices");
      std::vector<Matrix> row;
      for (std::size_t k = 0; k < us.items[s].items.size(); ++k) {
        row.push_back(as_matrix(us.items[s].items[k], ws + "[" + std::to_string(k) + "]"));
      }
      cfg.unitaries.push_back(std::move(row));
    }
    if (const Value* x = p.find("env_init")) {
      if (!x->is_list()) throw ParseError(w + ".env_init: expected a list of matrices");
      for (std::size_t k = 0; k < x->items.size(); ++k) {
        cfg.env_init.push_back(as_matrix(x->items[k], w + ".env_init[" + std::to_string(k) + "]"));
      }
    }
    if (const Value* x = p.find("event_times")) cfg.event_times = detail::sizes_param(*x, w + ".event_times");
    return build_pure_decoherence_model(std::move(cfg)).history_set().with_tolerances(tol);
  }
  throw ParseError("unknown model builder '" + spec.builder + "'");
}

}  // namespace qhist::cli
