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

#include <gtest/gtest.h>

#include <cmath>

#include "qhist/qhist.hpp"
#include "support.hpp"

namespace {

using namespace qhist;
using namespace qhist::testing;

constexpr double kTight = 1e-12;

CnotModelConfig cnot(std::size_t events, std::size_t spins = 1) {
  CnotModelConfig cfg;
  cfg.events = events;
  cfg.spins_per_subenv = {spins};
  return cfg;
}

CnotModelConfig mixed_cnot(std::size_t spins, double p0) {
  CnotModelConfig cfg = cnot(1, spins);
  cfg.env_init = EnvInit::mixed;
  cfg.p0 = p0;
  return cfg;
}

std::vector<std::string> env_of(const HistorySet& hs) {
  std::vector<std::string> out;
  for (const auto& l : hs.space().labels()) {
    if (l != "S") out.push_back(l);
  }
  return out;
}

Matrix ket_bra(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
  Matrix m = Matrix::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

// ---- partial-trace decoherence functional -----------------------------------

TEST(PTDecoherenceFunctional, NothingTraced) {
  Rng rng(1);
  const HistorySet hs = random_instance(3, 2, false, rng).history_set();
  const auto d = pt_decoherence_functional(hs, Fragment::none(hs.space()));
  const Matrix rho = hs.state_factor(hs.final_time()) * hs.state_factor(hs.final_time()).adjoint();
  for (std::size_t a = 0; a < d.size(); ++a) {
    for (std::size_t b = 0; b < d.size(); ++b) {
      const Matrix ca = class_operator(hs, hs.decode(a)), cb = class_operator(hs, hs.decode(b));
      ASSERT_LT(max_abs(d.entry(a, b) - ca * rho * cb.adjoint()), 1e-12);
    }
  }
}

TEST(PTDecoherenceFunctional, CnotTracedOverEnvironment) {
  const HistorySet hs = build_cnot_model(cnot(3));
  const auto d = pt_decoherence_functional(hs, Fragment(hs.space(), env_of(hs)));
  for (std::size_t a = 0; a < 8; ++a) {
    const Eigen::Index last = static_cast<Eigen::Index>(hs.decode(a)[2]);
    EXPECT_LT(max_abs(d.entry(a, a) - 0.125 * ket_bra(2, last, last)), kTight);
    for (std::size_t b = 0; b < 8; ++b) {
      if (a != b) EXPECT_LT(max_abs(d.entry(a, b)), kTight);
    }
  }
}

TEST(PTDecoherenceFunctional, DependsOnEvaluationTime) {
  CnotModelConfig cfg = cnot(1);
  cfg.placement = EventPlacement::after_branching;
  const HistorySet hs = build_cnot_model(cfg);
  const Fragment e(hs.space(), {"E1_1"});
  const auto before = pt_decoherence_functional(hs, e, 1);
  const auto after = pt_decoherence_functional(hs, e, 2);
  EXPECT_NEAR(max_abs(before.entry(0, 1)), 0.5, kTight);
  EXPECT_LT(max_abs(after.entry(0, 1)), kTight);
  // the full functional does not care
  EXPECT_LT(max_abs(decoherence_functional(hs, 1).entries - decoherence_functional(hs, 2).entries), kTight);
}

TEST(PTDecoherenceFunctional, RefusesFullTrace) {
  const HistorySet hs = build_cnot_model(cnot(1));
  EXPECT_THROW(pt_decoherence_functional(hs, Fragment::all(hs.space())), PreconditionError);
}

TEST(PTDecoherenceFunctional, OperatorRelationsOnRandomInstances) {
  Rng rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const HistorySet hs = random_instance(2 + trial % 3, 1 + trial % 2, trial % 2 == 0, rng).history_set();
    const Matrix d = decoherence_functional(hs).entries;
    const Fragment traced = fragment_of(hs.space(), random_subset(hs.space().size(), 0, rng));
    if (traced.is_full()) continue;
    const auto db = pt_decoherence_functional(hs, traced);
    Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(traced.complement().dim()),
                              static_cast<Eigen::Index>(traced.complement().dim()));
    for (std::size_t a = 0; a < db.size(); ++a) {
      for (std::size_t b = 0; b < db.size(); ++b) {
        const Matrix e = db.entry(a, b);
        ASSERT_LT(std::abs(e.trace() - d(a, b)), 1e-12);
        ASSERT_LT(max_abs(e - db.entry(b, a).adjoint()), 1e-14);
        sum += e;
      }
    }
    const Matrix rho = hs.state_factor(hs.final_time()) * hs.state_factor(hs.final_time()).adjoint();
    std::vector<std::size_t> dims, keep = traced.complement().indices();
    for (const auto& f : hs.space().factors()) dims.push_back(f.dim);
    ASSERT_LT(max_abs(sum - naive_partial_trace(rho, dims, keep)), 1e-12);
    ASSERT_LT(max_abs(db.total() - sum), 1e-12);
  }
}

TEST(PTDecoherenceFunctional, MatrixElementBoundInRandomBasis) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const HistorySet hs = random_instance(3, 2, trial % 2 == 0, rng).history_set();
    const Fragment traced = fragment_of(hs.space(), {static_cast<std::size_t>(trial % 3)});
    const auto db = pt_decoherence_functional(hs, traced);
    const Matrix u = haar_unitary(4, rng);
    for (std::size_t a = 0; a < db.size(); ++a) {
      const Matrix daa = u.adjoint() * db.entry(a, a) * u;
      for (std::size_t b = 0; b < db.size(); ++b) {
        const Matrix dab = u.adjoint() * db.entry(a, b) * u;
        const Matrix dbb = u.adjoint() * db.entry(b, b) * u;
        for (Eigen::Index i = 0; i < 4; ++i) {
          for (Eigen::Index j = 0; j < 4; ++j) {
            ASSERT_LE(std::norm(dab(i, j)), daa(i, i).real() * dbb(j, j).real() + 1e-10);
          }
        }
      }
    }
  }
}

// ---- partial-trace consistency ----------------------------------------------

TEST(CheckPTConsistency, CnotTracedOverOneSpinPerSubenvironment) {
  const CnotModelConfig cfg = cnot(3, 2);
  const HistorySet hs = build_cnot_model(cfg);
  const auto r = check_pt_consistency(hs, Fragment(hs.space(), {"E1_1", "E2_1", "E3_1"}), std::nullopt, 1e-9);
  EXPECT_TRUE(r.consistent);
  EXPECT_LT(r.max_trace_norm, 1e-9);
  EXPECT_EQ(r.pairs.size(), 28u);
}

TEST(CheckPTConsistency, ThetaFamily) {
  const HistorySet hs = build_appendix_alternate_set(AppendixKind::theta_phi, 0.4, 1.1);
  EXPECT_TRUE(check_pt_consistency(hs, Fragment(hs.space(), env_of(hs)), std::nullopt, 1e-9).consistent);
  for (const char* one : {"E1_1", "E2_1"}) {
    const auto r = check_pt_consistency(hs, Fragment(hs.space(), {one}), std::nullopt, 1e-9);
    EXPECT_FALSE(r.consistent) << one;
    EXPECT_GT(r.max_trace_norm, 1e-3) << one;
  }
}

TEST(CheckPTConsistency, InheritedBySupersetsAndImpliesConsistency) {
  const HistorySet hs = build_cnot_model(cnot(2, 2));
  const std::size_t n = hs.space().size();
  std::size_t found = 0;
  for (const auto& cut : all_cuts(n)) {
    const Fragment f = fragment_of(hs.space(), cut);
    if (!check_pt_consistency(hs, f, std::nullopt, 1e-9).consistent) continue;
    ++found;
    ASSERT_TRUE(check_consistency(hs, 1e-9).consistent);
    for (const auto& super : all_cuts(n)) {
      if (!std::includes(super.begin(), super.end(), cut.begin(), cut.end())) continue;
      ASSERT_TRUE(check_pt_consistency(hs, fragment_of(hs.space(), super), std::nullopt, 1e-9).consistent);
    }
  }
  EXPECT_GT(found, 3u);
}

TEST(CheckPTConsistency, EnvironmentConsistencyDiagonalisesSystem) {
  for (const HistorySet& hs : {build_cnot_model(cnot(3, 2)), build_appendix_alternate_set(AppendixKind::theta_phi, 0.7, 0.2)}) {
    const Fragment e(hs.space(), env_of(hs));
    ASSERT_TRUE(check_pt_consistency(hs, e, std::nullopt, 1e-9).consistent);
    if (hs.family(hs.num_events() - 1).projectors.front().targets() != std::vector<std::size_t>{0}) continue;
    const Matrix rho_s = partial_trace(QState::from_factor(hs.space(), hs.state_factor(hs.final_time())),
                                       Fragment(hs.space(), {"S"}))
                             .density();
    const Matrix p0 = ket_bra(2, 0, 0), p1 = ket_bra(2, 1, 1);
    EXPECT_LT(trace_norm(p0 * rho_s * p1), 1e-9);
  }
}

TEST(CheckPTConsistency, GeneralisedSumRule) {
  const HistorySet hs = build_cnot_model(cnot(2, 2));
  const auto b = hs.branches();
  const Fragment s(hs.space(), {"S"});
  for (std::size_t x = 0; x < b->size(); ++x) {
    for (std::size_t y = x + 1; y < b->size(); ++y) {
      const BranchSet joined = coarse_branches(*b, {CoarseHistory{{x, y}, "j"}});
      const Matrix lhs = joined.probability(0) * conditional_state(joined, 0, s).density();
      const Matrix rhs = b->probability(x) * conditional_state(*b, x, s).density() +
                         b->probability(y) * conditional_state(*b, y, s).density();
      ASSERT_LT(max_abs(lhs - rhs), 1e-9);
    }
  }
}

// ---- partial-trace consistency factor -----------------------------------------

TEST(PTConsistencyFactor, PureDecoherenceEqualsDecoherenceFactor) {
  Rng rng(4);
  PureDecoherenceConfig cfg;
  cfg.pointer_dim = 3;
  cfg.unitaries.resize(3);
  for (auto& us : cfg.unitaries) {
    for (int k = 0; k < 2; ++k) us.push_back(haar_unitary(2, rng));
  }
  const PureDecoherenceModel model = build_pure_decoherence_model(cfg);
  const HistorySet& hs = model.history_set();
  const Fragment e(hs.space(), {"E1", "E2"});
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      const auto cf = pt_consistency_factor(hs, e, {a}, {b});
      const Matrix expect = model.decoherence_factor(a, b) *
                            ket_bra(3, static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      EXPECT_LT(max_abs(cf.op - expect), kTight);
      EXPECT_NEAR(cf.trace_norm, std::abs(model.decoherence_factor(a, b)), kTight);
    }
  }
}

TEST(PTConsistencyFactor, DiagonalIsADensityMatrix) {
  const HistorySet hs = build_cnot_model(cnot(2, 2));
  const auto cf = pt_consistency_factor(hs, Fragment(hs.space(), {"E1_2", "E2_2"}), {1, 0}, {1, 0});
  EXPECT_NEAR(cf.op.trace().real(), 1.0, kTight);
  EXPECT_NEAR(cf.trace_norm, 1.0, kTight);
  EXPECT_TRUE(is_hermitian(cf.op, 1e-12));
}

TEST(PTConsistencyFactor, MixedSpinConsistentWithoutRecord) {
  for (double p0 : {0.5, 0.7, 0.9}) {
    const HistorySet hs = build_cnot_model(mixed_cnot(1, p0));
    const Fragment e(hs.space(), {"E1_1"});
    const auto cf = pt_consistency_factor(hs, e, {0}, {1});
    EXPECT_LT(cf.trace_norm, 1e-12);
    EXPECT_LE(cf.spectral_norm, cf.trace_norm + 1e-15);
    const double f = fidelity(conditional_state(hs, {0}, e).density(), conditional_state(hs, {1}, e).density());
    EXPECT_NEAR(f, 2.0 * std::sqrt(p0 * (1 - p0)), 1e-10);
  }
}

TEST(PTConsistencyFactor, ZeroProbabilityIsAnError) {
  const HistorySet hs = build_cnot_model(mixed_cnot(1, 1.0));
  CnotModelConfig cfg = cnot(1);
  cfg.placement = EventPlacement::after_branching;
  const HistorySet one = build_cnot_model(cfg);
  const HistorySet two(one.schedule(), {one.family(0), ProjectorFamily::basis(one.space(), "E1_1", one.duration())},
                       one.initial_state());
  EXPECT_THROW(pt_consistency_factor(two, Fragment(two.space(), {"S"}), {0, 1}, {0, 0}), PreconditionError);
  EXPECT_NO_THROW(pt_consistency_factor(hs, Fragment(hs.space(), {"S"}), {0}, {1}));
}

// ---- fidelity identity ------------------------------------------------------

TEST(FidelityIdentity, EqualHistoriesGiveOne) {
  const HistorySet hs = build_cnot_model(cnot(2, 2));
  const auto f = fidelity_identity_check(hs, Fragment(hs.space(), {"E1_1"}), {0, 1}, {0, 1});
  EXPECT_NEAR(f.lhs, 1.0, 1e-10);
  EXPECT_NEAR(f.rhs, 1.0, 1e-10);
}

TEST(FidelityIdentity, FullRecordGivesZero) {
  const HistorySet hs = build_cnot_model(cnot(3, 2));
  const Fragment f(hs.space(), {"E1_2", "E2_1", "E3_2"});
  const auto r = fidelity_identity_check(hs, f, {0, 1, 1}, {1, 1, 0});
  EXPECT_NEAR(r.lhs, 0.0, 1e-10);
  EXPECT_NEAR(r.rhs, 0.0, 1e-10);
}

TEST(FidelityIdentity, RandomThreeQubitStates) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const HistorySet hs = random_instance(3, 1, true, rng).history_set();
    if (hs.num_histories() < 2) continue;
    const Fragment a = fragment_of(hs.space(), {static_cast<std::size_t>(trial % 3)});
    const History x{0}, y{1};
    if (probability(hs, x) < 1e-6 || probability(hs, y) < 1e-6) continue;
    const auto f = fidelity_identity_check(hs, a, x, y);
    ASSERT_LT(f.gap, 1e-10);
    const double lhs = fidelity(conditional_state(hs, x, a).density(), conditional_state(hs, y, a).density());
    ASSERT_NEAR(f.lhs, lhs, 1e-9);
    ASSERT_NEAR(f.rhs, pt_consistency_factor(hs, a, x, y).trace_norm, 1e-12);
  }
}

TEST(FidelityIdentity, RefusesMixedState) {
  const HistorySet hs = build_cnot_model(mixed_cnot(1, 0.7));
  EXPECT_THROW(fidelity_identity_check(hs, Fragment(hs.space(), {"E1_1"}), {0}, {1}), PreconditionError);
}

// ---- records -------------------------------------------------------------------

TEST(DetectRecords, CnotOneSpinPerSubenvironment) {
  const HistorySet hs = build_cnot_model(cnot(3, 3));
  const RecordCertificate c = detect_records(hs, Fragment(hs.space(), {"E1_2", "E2_2", "E3_2"}), std::nullopt, 1e-10);
  EXPECT_TRUE(c.passed);
  EXPECT_TRUE(c.conditions.orthogonal_supports);
  EXPECT_TRUE(c.conditions.fidelity_bound);
  EXPECT_TRUE(c.conditions.record_projectors);
  EXPECT_LT(c.worst_fidelity, 1e-10);
  ASSERT_EQ(c.record_projectors.size(), 8u);
  Matrix sum = Matrix::Zero(8, 8);
  for (const auto& r : c.record_projectors) {
    EXPECT_TRUE(is_projector(r, 1e-9));
    sum += r;
  }
  EXPECT_LT(max_abs(sum + c.completion - Matrix::Identity(8, 8)), 1e-10);
  EXPECT_TRUE(has_records(*hs.branches(), Fragment(hs.space(), {"E1_2", "E2_2", "E3_2"}), 1e-10));
}

TEST(DetectRecords, NothingFromE2MeansNoFullRecord) {
  const CnotModelConfig cfg = cnot(3, 3);
  const HistorySet hs = build_cnot_model(cfg);
  std::vector<std::string> without;
  for (std::size_t m : {0u, 2u}) {
    for (const auto& l : cnot_subenv_labels(cfg, m)) without.push_back(l);
  }
  const RecordCertificate c = detect_records(hs, Fragment(hs.space(), without), std::nullopt, 1e-10);
  EXPECT_FALSE(c.passed);
  EXPECT_NEAR(c.worst_fidelity, 1.0, 1e-10);
  EXPECT_FALSE(has_records(*hs.branches(), Fragment(hs.space(), without), 1e-10));
}

TEST(DetectRecords, MixedEnvironmentFidelityPower) {
  for (double p0 : {0.6, 0.9}) {
    for (std::size_t n : {1u, 2u, 3u}) {
      const CnotModelConfig cfg = mixed_cnot(n, p0);
      const HistorySet hs = build_cnot_model(cfg);
      const RecordCertificate c = detect_records(hs, Fragment(hs.space(), cnot_subenv_labels(cfg, 0)), std::nullopt, 0.5);
      EXPECT_NEAR(c.worst_fidelity, std::pow(2.0 * std::sqrt(p0 * (1 - p0)), double(n)), 1e-10);
    }
  }
}

TEST(DetectRecords, NoRecordCounterexample) {
  const HistorySet hs = build_mixed_record_counterexample();
  const Fragment e(hs.space(), {"E"});
  EXPECT_TRUE(check_pt_consistency(hs, e, std::nullopt, 1e-9).consistent);
  const RecordCertificate c = detect_records(hs, e, std::nullopt, 1e-10);
  EXPECT_FALSE(c.passed);
  EXPECT_NEAR(c.worst_fidelity, 1.0, 1e-10);
}

TEST(DetectRecords, DeltaRange) {
  const HistorySet hs = build_cnot_model(cnot(1));
  EXPECT_THROW(detect_records(hs, Fragment(hs.space(), {"E1_1"}), std::nullopt, 1.0), PreconditionError);
  EXPECT_THROW(detect_records(hs, Fragment(hs.space(), {"E1_1"}), std::nullopt, -0.1), PreconditionError);
}

TEST(DetectRecords, AgreesWithPTConsistencyOnPureStates) {
  Rng rng(6);
  std::size_t records = 0, consistent = 0;
  for (int trial = 0; trial < 30; ++trial) {
    CnotModelConfig cfg = cnot(1 + trial % 2, 2);
    const HistorySet hs = trial % 3 == 0 ? random_instance(3, 2, true, rng).history_set() : build_cnot_model(cfg);
    for (const auto& cut : all_cuts(hs.space().size())) {
      if (cut.empty() || cut.size() == hs.space().size()) continue;
      const Fragment f = fragment_of(hs.space(), cut);
      const bool rec = detect_records(hs, f, std::nullopt, 1e-10).passed;
      const bool pt = check_pt_consistency(hs, f, std::nullopt, 1e-8).consistent;
      if (rec) {
        ++records;
        ASSERT_TRUE(pt);
      }
      if (check_pt_consistency(hs, f, std::nullopt, 1e-10).consistent) {
        ++consistent;
        ASSERT_TRUE(detect_records(hs, f, std::nullopt, 1e-8).passed);
      }
    }
  }
  EXPECT_GT(records, 0u);
  EXPECT_GT(consistent, 0u);
}

TEST(RecordsInTime, CnotLevels) {
  const HistorySet hs = build_cnot_model(cnot(3, 2));
  const auto r = records_in_time(hs, Fragment(hs.space(), {"E1_1", "E2_2", "E3_1"}));
  EXPECT_TRUE(r.passed);
  ASSERT_EQ(r.levels.size(), 3u);
  for (std::size_t m = 0; m < 3; ++m) {
    EXPECT_TRUE(r.levels[m].orthogonal);
    EXPECT_TRUE(r.levels[m].nested);
    EXPECT_EQ(r.levels[m].prefixes.size(), std::size_t{2} << m);
  }
}

TEST(RecordsInTime, FirstLevelFromE1Alone) {
  const HistorySet hs = build_cnot_model(cnot(3, 2));
  const RecordCertificate c =
      detect_records(hs.truncated(cnot_event_time(cnot(3, 2), 0)), Fragment(hs.space(), {"E1_1"}), hs.final_time(), 1e-10);
  EXPECT_TRUE(c.passed);
}

TEST(RecordsInTime, SingleEventReducesToDetectRecords) {
  const HistorySet hs = build_cnot_model(cnot(1, 2));
  const Fragment f(hs.space(), {"E1_2"});
  const auto r = records_in_time(hs, f);
  ASSERT_EQ(r.levels.size(), 1u);
  EXPECT_EQ(r.passed, detect_records(hs, f, std::nullopt, 1e-9).passed);
  EXPECT_TRUE(r.passed);
}

TEST(RecordsInTime, ThetaFamilyNeedsTheWholeEnvironment) {
  const HistorySet hs = build_appendix_alternate_set(AppendixKind::theta_phi, 0.4, 0.9);
  EXPECT_TRUE(records_in_time(hs, Fragment(hs.space(), env_of(hs))).passed);
  for (const char* one : {"E1_1", "E2_1"}) {
    EXPECT_THROW(records_in_time(hs, Fragment(hs.space(), {one})), PreconditionError) << one;
  }
}

}  // namespace
