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

#include <numbers>
#include <set>

#include "qhist/qhist.hpp"
#include "support.hpp"

namespace {

using namespace qhist;
using namespace qhist::testing;

CnotModelConfig cnot(std::size_t events, std::size_t spins) {
  CnotModelConfig cfg;
  cfg.events = events;
  cfg.spins_per_subenv = {spins};
  return cfg;
}

void expect_disjoint(const RedundancyReport& r, const std::vector<std::string>& forbidden = {"S"}) {
  std::set<std::string> seen;
  for (const auto& f : r.fragments) {
    for (const auto& l : f) {
      EXPECT_TRUE(seen.insert(l).second) << l << " used twice";
      for (const auto& x : forbidden) EXPECT_NE(l, x);
    }
  }
  EXPECT_EQ(r.count, r.fragments.size());
}

TEST(RedundancyCount, CnotThreeSpinsPerSubenvironment) {
  const CnotModelConfig cfg = cnot(3, 3);
  const HistorySet hs = build_cnot_model(cfg);
  const RedundancyReport r = redundancy_count(hs, std::nullopt, 0.0, SearchMode::exhaustive, 3);
  EXPECT_EQ(r.count, 3u);
  EXPECT_EQ(r.mode, SearchMode::exhaustive);
  expect_disjoint(r);
  ASSERT_EQ(r.certificates.size(), r.count);
  for (std::size_t i = 0; i < r.count; ++i) {
    ASSERT_EQ(r.fragments[i].size(), 3u);
    std::set<char> subenvs;
    for (const auto& l : r.fragments[i]) subenvs.insert(l[1]);
    EXPECT_EQ(subenvs.size(), 3u);
    EXPECT_TRUE(r.certificates[i].passed);
    EXPECT_TRUE(check_pt_consistency(hs, Fragment(hs.space(), r.fragments[i]), std::nullopt, 1e-8).consistent);
  }
}

TEST(RedundancyCount, SingleCopyRecord) {
  const HistorySet hs = build_cnot_model(cnot(3, 1));
  EXPECT_EQ(redundancy_count(hs, std::nullopt, 1e-9, SearchMode::exhaustive, 3).count, 1u);
}

TEST(RedundancyCount, ThetaFamilyHasOneRecord) {
  const HistorySet hs = build_appendix_alternate_set(AppendixKind::theta_phi, 0.4, 0.4);
  const RedundancyReport r = redundancy_count(hs, std::nullopt, 1e-9, SearchMode::exhaustive, 3);
  EXPECT_EQ(r.count, 1u);
  ASSERT_EQ(r.fragments.size(), 1u);
  EXPECT_EQ(r.fragments[0], (std::vector<std::string>{"E1_1", "E2_1"}));
}

TEST(RedundancyCount, ExcludingASubenvironmentRemovesAllRecords) {
  const CnotModelConfig cfg = cnot(3, 3);
  const HistorySet hs = build_cnot_model(cfg);
  RedundancyOptions opt;
  opt.excluded_labels = cnot_subenv_labels(cfg, 1);
  EXPECT_EQ(redundancy_count(hs, std::nullopt, 1e-9, SearchMode::exhaustive, 6, opt).count, 0u);
}

TEST(RedundancyCount, SystemOnlyWhenOptedIn) {
  const HistorySet hs = build_cnot_model(cnot(1, 2));
  EXPECT_EQ(redundancy_count(hs, std::nullopt, 1e-9, SearchMode::exhaustive, 1).count, 2u);
  RedundancyOptions opt;
  opt.include_system = true;
  const RedundancyReport r = redundancy_count(hs, std::nullopt, 1e-9, SearchMode::exhaustive, 1, opt);
  EXPECT_EQ(r.count, 3u);
  expect_disjoint(r, {});
}

TEST(RedundancyCount, ExhaustiveCapAndGreedyFallback) {
  const HistorySet hs = build_cnot_model(cnot(1, 13));
  EXPECT_THROW(redundancy_count(hs, std::nullopt, 1e-9, SearchMode::exhaustive, 1), PreconditionError);
  const RedundancyReport g = redundancy_count(hs, std::nullopt, 1e-9, SearchMode::greedy, 1);
  EXPECT_EQ(g.mode, SearchMode::greedy);
  EXPECT_EQ(g.count, 13u);
  EXPECT_EQ(default_search_mode(13), SearchMode::greedy);
  EXPECT_EQ(default_search_mode(12), SearchMode::exhaustive);
  EXPECT_THROW(redundancy_count(hs, std::nullopt, 1e-9, SearchMode::greedy, 0), PreconditionError);
}

TEST(RedundancyCount, MonotoneInFragmentSizeAndGreedyIsALowerBound) {
  std::vector<HistorySet> pool = {build_cnot_model(cnot(2, 3)), build_cnot_model(cnot(3, 2)),
                                  build_appendix_alternate_set(AppendixKind::abwxyz)};
  CnotModelConfig mixed = cnot(1, 4);
  mixed.env_init = EnvInit::mixed;
  mixed.p0 = 0.95;
  pool.push_back(build_cnot_model(mixed));
  for (const HistorySet& hs : pool) {
    std::size_t previous = 0;
    for (std::size_t k = 1; k <= 4; ++k) {
      const double delta = hs.is_pure() ? 1e-9 : 0.5;
      const RedundancyReport ex = redundancy_count(hs, std::nullopt, delta, SearchMode::exhaustive, k);
      const RedundancyReport gr = redundancy_count(hs, std::nullopt, delta, SearchMode::greedy, k);
      EXPECT_GE(ex.count, previous);
      EXPECT_LE(gr.count, ex.count);
      expect_disjoint(ex);
      expect_disjoint(gr);
      previous = ex.count;
    }
  }
}

TEST(RedundancyCount, CertificatesImplyPTConsistency) {
  const HistorySet hs = build_cnot_model(cnot(2, 3));
  const RedundancyReport r = redundancy_count(hs, std::nullopt, 1e-10, SearchMode::exhaustive, 3);
  ASSERT_GT(r.count, 0u);
  for (const auto& f : r.fragments) {
    EXPECT_TRUE(check_pt_consistency(hs, Fragment(hs.space(), f), std::nullopt, 1e-8).consistent);
  }
}

TEST(IsRedundantlyConsistent, Verdicts) {
  EXPECT_TRUE(is_redundantly_consistent(build_cnot_model(cnot(3, 3)), std::nullopt, 1e-9).redundant);
  EXPECT_FALSE(
      is_redundantly_consistent(build_appendix_alternate_set(AppendixKind::theta_phi, 0.4, 0.4), std::nullopt, 1e-9)
          .redundant);
  const RedundancyVerdict loose = is_redundantly_consistent(build_cnot_model(cnot(3, 3)), std::nullopt, 1e-9, 4);
  EXPECT_FALSE(loose.redundant);
  EXPECT_EQ(loose.threshold, 4u);
}

TEST(IsRedundantlyConsistent, MaximallyMixedEnvironmentHasNoRecords) {
  CnotModelConfig cfg = cnot(1, 3);
  cfg.env_init = EnvInit::mixed;
  cfg.p0 = 0.5;
  const HistorySet hs = build_cnot_model(cfg);
  for (double delta : {1e-9, 0.5, 0.99}) {
    const RedundancyVerdict v = is_redundantly_consistent(hs, std::nullopt, delta, 1);
    EXPECT_FALSE(v.redundant) << delta;
    EXPECT_EQ(v.report.count, 0u);
  }
}

TEST(BranchUniquenessProbe, CnotModel) {
  const HistorySet hs = build_cnot_model(cnot(3, 3));
  ProbeOptions opt;
  opt.theta = std::numbers::pi / 5;
  const ProbeReport r = branch_uniqueness_probe(hs, std::nullopt, 20, opt);
  ASSERT_EQ(r.results.size(), 22u);
  EXPECT_EQ(r.results[0].kind, "identity");
  EXPECT_TRUE(r.results[0].redundant);
  EXPECT_TRUE(r.results[0].canonical);
  EXPECT_EQ(r.results[1].kind, "theta");
  EXPECT_FALSE(r.results[1].redundant);
  EXPECT_EQ(r.redundant_alternatives, 0u);
  EXPECT_TRUE(r.passed);
}

TEST(BranchUniquenessProbe, DeterministicForASeed) {
  const HistorySet hs = build_cnot_model(cnot(2, 2));
  const ProbeReport a = branch_uniqueness_probe(hs, std::nullopt, 5);
  const ProbeReport b = branch_uniqueness_probe(hs, std::nullopt, 5);
  ASSERT_EQ(a.results.size(), b.results.size());
  for (std::size_t i = 0; i < a.results.size(); ++i) EXPECT_EQ(a.results[i].count, b.results[i].count);
}

TEST(BranchUniquenessProbe, RefusesMixedState) {
  CnotModelConfig cfg = cnot(1, 1);
  cfg.env_init = EnvInit::mixed;
  cfg.p0 = 0.7;
  EXPECT_THROW(branch_uniqueness_probe(build_cnot_model(cfg), std::nullopt, 1), PreconditionError);
}

}  // namespace
