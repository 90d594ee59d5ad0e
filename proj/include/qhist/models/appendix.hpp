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
#include <map>
#include <string>
#include <vector>

#include "qhist/core/errors.hpp"
#include "qhist/hilbert/operator.hpp"
#include "qhist/histories/history_set.hpp"
#include "qhist/models/cnot.hpp"

namespace qhist {

enum class AppendixKind { abwxyz, theta_phi };

inline AppendixKind parse_appendix_kind(const std::string& s) {
  if (s == "abwxyz") return AppendixKind::abwxyz;
  if (s == "theta_phi") return AppendixKind::theta_phi;
  throw InvariantError("unknown appendix set '" + s + "'");
}

inline CnotModelConfig appendix_base_config() {
  CnotModelConfig cfg;
  cfg.events = 2;
  cfg.spins_per_subenv = {1};
  return cfg;
}

namespace detail {

inline void require_appendix_base(const CnotModelConfig& base) {
  base.validate();
  if (base.events != 2 || base.env_init != EnvInit::pure || base.placement != EventPlacement::after_recording) {
    throw PreconditionError("appendix sets are built on the two-event pure CNOT model with events after recording");
  }
}

// |a>_S |alpha = e1 e2>_E: every spin of E_1 in e1, every spin of E_2 in e2.
inline Vector cnot2_basis(const CnotModelConfig& base, int a, int e1, int e2) {
  const std::size_t n1 = base.spins(0), n2 = base.spins(1);
  const std::size_t ones1 = e1 ? (std::size_t{1} << n1) - 1 : 0;
  const std::size_t ones2 = e2 ? (std::size_t{1} << n2) - 1 : 0;
  const std::size_t idx = (std::size_t(a) << (n1 + n2)) | (ones1 << n2) | ones2;
  return gates::basis_vector(Eigen::Index{1} << (1 + n1 + n2), static_cast<Eigen::Index>(idx));
}

inline Operator rank_one(const TensorSpace& space, const Vector& v) {
  const Vector u = v / v.norm();
  return Operator::dense(space, u * u.adjoint());
}

inline Operator completion(const TensorSpace& space, const std::vector<Operator>& ps) {
  Operator rest = Operator::dense(space, Matrix::Identity(space.total_dim(), space.total_dim()));
  for (const auto& p : ps) rest = rest - p;
  return rest;
}

}  // namespace detail

/// The fixed vectors A, B (at t1) and W, X, Y, Z (at t2), plus psi(t1), psi(t2).
inline std::map<std::string, Vector> appendix_abwxyz_vectors(const CnotModelConfig& base = appendix_base_config()) {
  detail::require_appendix_base(base);
  auto v = [&](int a, int e1, int e2) { return detail::cnot2_basis(base, a, e1, e2); };
  const double s = 1.0 / (3.0 * std::sqrt(2.0));
  std::map<std::string, Vector> out;
  out["A"] = s * (2.0 * v(0, 0, 0) + v(1, 1, 0) + 2.0 * v(0, 1, 1));
  out["B"] = s * (v(0, 0, 0) + 2.0 * v(1, 1, 0) - 2.0 * v(0, 1, 1));
  out["W"] = (2.0 * v(0, 0, 0) + 2.0 * v(1, 0, 1) + 2.0 * v(1, 1, 0)) / 6.0;
  out["X"] = (v(0, 0, 0) + v(1, 0, 1) - 2.0 * v(1, 1, 0)) / 6.0;
  out["Y"] = (v(0, 1, 0) - v(1, 1, 1) + 2.0 * v(0, 1, 1)) / 6.0;
  out["Z"] = (2.0 * v(0, 1, 0) - 2.0 * v(1, 1, 1) - 2.0 * v(0, 1, 1)) / 6.0;
  out["psi_t1"] = (v(0, 0, 0) + v(1, 1, 0)) / std::sqrt(2.0);
  out["psi_t2"] = (v(0, 0, 0) + v(1, 0, 1) + v(0, 1, 0) - v(1, 1, 1)) / 2.0;
  return out;
}

/// The rotated environment states theta, theta-bar (from alpha = 00, 10) and
/// phi, phi-bar (from alpha = 01, 11), each already multiplied by |0>_S or |1>_S.
inline std::map<std::string, Vector> appendix_theta_vectors(double theta, double phi,
                                                           const CnotModelConfig& base = appendix_base_config()) {
  detail::require_appendix_base(base);
  auto v = [&](int a, int e1, int e2) { return detail::cnot2_basis(base, a, e1, e2); };
  const double ct = std::cos(theta), st = std::sin(theta), cp = std::cos(phi), sp = std::sin(phi);
  std::map<std::string, Vector> out;
  out["0theta"] = (ct + st) * (ct * v(0, 0, 0) + st * v(0, 1, 0));
  out["0thetabar"] = (st - ct) * (st * v(0, 0, 0) - ct * v(0, 1, 0));
  out["1phi"] = (cp - sp) * (cp * v(1, 0, 1) + sp * v(1, 1, 1));
  out["1phibar"] = (sp + cp) * (sp * v(1, 0, 1) - cp * v(1, 1, 1));
  // directions stay defined when a prefactor vanishes
  out["dir_0theta"] = ct * v(0, 0, 0) + st * v(0, 1, 0);
  out["dir_0thetabar"] = st * v(0, 0, 0) - ct * v(0, 1, 0);
  out["dir_1phi"] = cp * v(1, 0, 1) + sp * v(1, 1, 1);
  out["dir_1phibar"] = sp * v(1, 0, 1) - cp * v(1, 1, 1);
  return out;
}

/// Alternate consistent sets on the two-event CNOT model. Event 1 sits at
/// t1 = 2, event 2 at t2 = 4; each family is completed by "-".
inline HistorySet build_appendix_alternate_set(AppendixKind kind, double theta = 0.0, double phi = 0.0,
                                               const CnotModelConfig& base = appendix_base_config()) {
  detail::require_appendix_base(base);
  const HistorySet model = build_cnot_model(base);
  const TensorSpace& space = model.space();
  const std::size_t t1 = cnot_event_time(base, 0), t2 = cnot_event_time(base, 1);

  std::vector<Operator> first, second;
  std::vector<std::string> first_labels, second_labels;
  if (kind == AppendixKind::abwxyz) {
    const auto vec = appendix_abwxyz_vectors(base);
    for (const char* l : {"A", "B"}) {
      first.push_back(detail::rank_one(space, vec.at(l)));
      first_labels.push_back(l);
    }
    for (const char* l : {"W", "X", "Y", "Z"}) {
      second.push_back(detail::rank_one(space, vec.at(l)));
      second_labels.push_back(l);
    }
  } else {
    const auto vec = appendix_theta_vectors(theta, phi, base);
    const Operator q0t = detail::rank_one(space, vec.at("dir_0theta"));
    const Operator q0b = detail::rank_one(space, vec.at("dir_0thetabar"));
    const Operator q1p = detail::rank_one(space, vec.at("dir_1phi"));
    const Operator q1b = detail::rank_one(space, vec.at("dir_1phibar"));
    // event-1 projectors written at t2 and carried back to t1
    const Matrix u = model.schedule().unitary(t1, t2);
    for (const Operator& q : {q0t + q0b, q1p + q1b}) {
      first.push_back(Operator::dense(space, u.adjoint() * q.to_dense() * u));
    }
    first_labels = {"1", "2"};
    second = {q0t, q0b, q1p, q1b};
    second_labels = {"1", "2", "3", "4"};
  }
  first.push_back(detail::completion(space, first));
  first_labels.push_back("-");
  second.push_back(detail::completion(space, second));
  second_labels.push_back("-");

  std::vector<ProjectorFamily> families;
  families.emplace_back(t1, std::move(first), std::move(first_labels));
  families.emplace_back(t2, std::move(second), std::move(second_labels));
  return HistorySet(model.schedule(), std::move(families), model.initial_state(), model.options());
}

}  // namespace qhist
