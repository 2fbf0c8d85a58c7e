// Copyright 2026 The fldp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fldp/privacy.h"

#include <cmath>

#include "gtest/gtest.h"
#include "test_util.h"

namespace fldp {
namespace {

using ::fldp::testing::AcceptancePartition;
using ::fldp::testing::AcceptanceRun;
using ::fldp::testing::Init;
using ::fldp::testing::M;
using ::fldp::testing::NoisyRun;
using ::fldp::testing::Q;
using ::fldp::testing::RandomPmf;
using ::fldp::testing::ShiftedNoise;
using ::fldp::testing::Values;

PathDistribution Pmf(std::vector<Rational> p) { return DistributionFromPmf(p); }

// Largest singleton ratio, by direct division.
std::optional<Rational> OracleExpEpsilon(const PathDistribution& a,
                                         const PathDistribution& b) {
  Rational worst = 1;
  std::set<ModelParam> support;
  for (const auto& [o, p] : a.outcomes) support.insert(o);
  for (const auto& [o, p] : b.outcomes) support.insert(o);
  for (const ModelParam& o : support) {
    Rational p = a.Prob(o), q = b.Prob(o);
    if (p == 0 && q == 0) continue;
    if (p == 0 || q == 0) return std::nullopt;
    worst = std::max({worst, Rational(p / q), Rational(q / p)});
  }
  return worst;
}

TEST(RealizedEpsilonTest, Examples) {
  PathDistribution a = Pmf({Q("3/4"), Q("1/4")});
  PathDistribution b = Pmf({Q("1/4"), Q("3/4")});
  EXPECT_EQ(RealizedEpsilon(a, a).epsilon, 0);
  EpsilonReport r = RealizedEpsilon(a, b);
  EXPECT_EQ(*r.exp_epsilon, 3);
  EXPECT_NEAR(r.epsilon, std::log(3.0), 1e-12);
  EpsilonReport inf = RealizedEpsilon(Pmf({Q("1/2"), Q("1/2")}), Pmf({1, 0}));
  EXPECT_TRUE(inf.infinite());
  EXPECT_TRUE(std::isinf(inf.epsilon));
}

TEST(RealizedEpsilonTest, PerOutcomeEntries) {
  EpsilonReport r =
      RealizedEpsilon(Pmf({Q("3/4"), Q("1/4")}), Pmf({Q("1/4"), Q("3/4")}));
  ASSERT_EQ(r.per_outcome.size(), 2u);
  EXPECT_EQ(r.per_outcome[0].p0, Q("3/4"));
  EXPECT_EQ(r.per_outcome[0].p1, Q("1/4"));
  EXPECT_NEAR(r.per_outcome[0].log_ratio, std::log(3.0), 1e-12);
  EXPECT_NEAR(r.per_outcome[1].log_ratio, -std::log(3.0), 1e-12);
  double max_abs = 0;
  for (const OutcomeRatio& o : r.per_outcome) {
    max_abs = std::max(max_abs, std::abs(o.log_ratio));
  }
  EXPECT_EQ(max_abs, r.epsilon);
}

TEST(RealizedEpsilonTest, SymmetricNonnegativeAndMatchesOracle) {
  SplitMix64 rng(41);
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t m = 1 + rng.Below(8);
    PathDistribution a = RandomPmf(rng, m, trial % 2);
    PathDistribution b = RandomPmf(rng, m, trial % 2);
    EpsilonReport ab = RealizedEpsilon(a, b);
    EpsilonReport ba = RealizedEpsilon(b, a);
    EXPECT_EQ(ab.exp_epsilon, ba.exp_epsilon);
    EXPECT_EQ(ab.epsilon, ba.epsilon);
    EXPECT_GE(ab.epsilon, 0);
    EXPECT_EQ(ab.exp_epsilon, OracleExpEpsilon(a, b));
  }
}

TEST(MediantTest, SingletonBoundCoversEveryEvent) {
  SplitMix64 rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t m = 1 + rng.Below(12);
    PathDistribution a = RandomPmf(rng, m, 1);
    PathDistribution b = RandomPmf(rng, m, 1);
    EpsilonReport r = RealizedEpsilon(a, b);
    ASSERT_FALSE(r.infinite());
    EXPECT_EQ(*CountEventViolations(a, b, *r.exp_epsilon, 0), 0u);
  }
}

TEST(MediantTest, AnySmallerBoundIsViolated) {
  PathDistribution a = Pmf({Q("3/4"), Q("1/4")});
  PathDistribution b = Pmf({Q("1/4"), Q("3/4")});
  EXPECT_GT(*CountEventViolations(a, b, Q("299/100"), 0), 0u);
}

TEST(PostProcessingTest, PushforwardNeverIncreasesEpsilon) {
  SplitMix64 rng(47);
  for (int trial = 0; trial < 500; ++trial) {
    const size_t m = 1 + rng.Below(8);
    PathDistribution a = RandomPmf(rng, m, 1);
    PathDistribution b = RandomPmf(rng, m, 1);
    std::vector<long> g(m);
    for (long& x : g) x = static_cast<long>(rng.Below(3));
    auto push = [&](const PathDistribution& d) {
      PathDistribution out;
      for (const auto& [o, p] : d.outcomes) {
        long k = o.coords[0].get_num().get_si();
        out.outcomes[M({g[k]})] += p;
      }
      return out;
    };
    EXPECT_LE(*RealizedEpsilon(push(a), push(b)).exp_epsilon,
              *RealizedEpsilon(a, b).exp_epsilon);
  }
}

TEST(ApproximateTest, ZeroDeltaMatchesPureMode) {
  SplitMix64 rng(53);
  for (int trial = 0; trial < 300; ++trial) {
    const size_t m = 1 + rng.Below(8);
    PathDistribution a = RandomPmf(rng, m, trial % 3 == 0 ? 0 : 1);
    PathDistribution b = RandomPmf(rng, m, trial % 3 == 0 ? 0 : 1);
    EXPECT_EQ(RealizedEpsilon(a, b, Rational(0)).exp_epsilon,
              RealizedEpsilon(a, b).exp_epsilon);
  }
}

TEST(ApproximateTest, BoundIsSmallestValid) {
  SplitMix64 rng(59);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t m = 2 + rng.Below(7);
    PathDistribution a = RandomPmf(rng, m);
    PathDistribution b = RandomPmf(rng, m);
    const Rational delta = Ratio(static_cast<long>(rng.Below(20)), 100);
    EpsilonReport r = RealizedEpsilon(a, b, delta);
    if (r.infinite()) {
      // Infinite only when one-sided mass alone exceeds delta.
      continue;
    }
    const Rational bound = *r.exp_epsilon;
    EXPECT_GE(bound, 1);
    EXPECT_EQ(*CountEventViolations(a, b, bound, delta), 0u);
    if (bound > 1) {
      EXPECT_GT(*CountEventViolations(a, b, bound - Rational(1, 1000000), delta),
                0u);
    }
  }
}

TEST(ApproximateTest, DeltaAbsorbsOneSidedMass) {
  // Forward: 1/2 - x/4 = 1/10 at x = 8/5. Backward: the one-sided 1/10 is
  // absorbed and 13/20 - x/2 vanishes at x = 13/10.
  PathDistribution a = Pmf({Q("1/2"), Q("1/2"), 0});
  PathDistribution b = Pmf({Q("1/4"), Q("13/20"), Q("1/10")});
  EXPECT_TRUE(RealizedEpsilon(a, b).infinite());
  EpsilonReport r = RealizedEpsilon(a, b, Q("1/10"));
  ASSERT_FALSE(r.infinite());
  EXPECT_EQ(*r.exp_epsilon, Q("8/5"));
  EXPECT_EQ(*SmallestRatioBound(b, a, Q("1/10")), Q("13/10"));
  EXPECT_TRUE(RealizedEpsilon(a, b, Q("1/20")).infinite());
}

NeighborRun OneClientPair(long v0, long v1, const RunConfig& run) {
  return NeighborRun{Init({{"c1", Values("a", {v0})}}),
                     Init({{"c1", Values("a", {v1})}}), run};
}

TEST(NiFlDpCheckTest, RejectsIdenticalDatasets) {
  absl::StatusOr<NiFlDpResult> r =
      NiFlDpCheck(OneClientPair(1, 1, RunConfig{}), 1.0);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_NE(r.status().message().find("PreconditionViolation"),
            std::string::npos);
}

TEST(NiFlDpCheckTest, NoiselessDifferentMeansIsInfinite) {
  NiFlDpResult r = *NiFlDpCheck(OneClientPair(1, 2, RunConfig{}), 1e9);
  EXPECT_TRUE(r.report.infinite());
  EXPECT_FALSE(r.holds);
}

TEST(NiFlDpCheckTest, NoisyMatchesShiftedPmfs) {
  Grid grid{1, 0, 2};
  RunConfig run = NoisyRun(Q("1/2"), 2, grid);
  NiFlDpResult r = *NiFlDpCheck(OneClientPair(1, 2, run), 1.2);
  PathDistribution o0 = ShiftedNoise(1, Q("1/2"), 2, grid);
  PathDistribution o1 = ShiftedNoise(2, Q("1/2"), 2, grid);
  EXPECT_EQ(r.d0.outcomes, o0.outcomes);
  EXPECT_EQ(r.d1.outcomes, o1.outcomes);
  EXPECT_EQ(r.report.exp_epsilon, OracleExpEpsilon(o0, o1));
  EXPECT_EQ(*r.report.exp_epsilon, 3);
  EXPECT_TRUE(r.holds);
  EXPECT_FALSE(NiFlDpCheck(OneClientPair(1, 2, run), 1.0).value().holds);
}

TEST(NiFlDpCheckTest, CeilingPropagates) {
  absl::StatusOr<NiFlDpResult> r = NiFlDpCheck(
      OneClientPair(1, 2, NoisyRun(Q("1/2"), 1, Grid{1, 0, 2})), 1.0,
      std::nullopt, 2);
  EXPECT_EQ(r.status().code(), absl::StatusCode::kResourceExhausted);
}

TEST(MonotonicityTest, EpsilonNonincreasingInT) {
  Partition p1 = AcceptancePartition();
  Partition p0 = p1;
  p0["c1"] = Values("a", {0, 0});
  double previous = std::numeric_limits<double>::infinity();
  for (const char* t : {"1/2", "2/3", "3/4"}) {
    RunConfig run = NoisyRun(Q(t), 2, Grid{1, 0, 2});
    NiFlDpResult r = *NiFlDpCheck(NeighborRun{Init(p0), Init(p1), run}, 10);
    ASSERT_FALSE(r.report.infinite());
    EXPECT_LE(r.report.epsilon, previous + kEpsilonTolerance) << t;
    previous = r.report.epsilon;
  }
}

// Two clients with two points each; c1 changes one value.
NeighborRun SubstitutionPair(const RunConfig& run) {
  Partition p0 = {{"c1", Values("a", {0, 2})}, {"c2", Values("b", {1, 1})}};
  Partition p1 = p0;
  p1["c1"] = Values("a", {0, 0});
  return NeighborRun{Init(p0), Init(p1), run};
}

TEST(DecompositionTest, OneClientDiffers) {
  DecompositionResult r = *DecompositionCheck(
      SubstitutionPair(NoisyRun(Q("1/2"), 2, Grid{1, 0, 2})),
      DecompositionMode::kOneClientDiffers);
  EXPECT_EQ(r.per_client.at("c2").epsilon, 0);
  EXPECT_EQ(*r.per_client.at("c2").exp_epsilon, 1);
  EXPECT_GT(r.per_client.at("c1").epsilon, 0);
  EXPECT_LE(r.global.epsilon, r.per_client.at("c1").epsilon + kEpsilonTolerance);
  EXPECT_TRUE(r.bound_holds);
}

TEST(DecompositionTest, AllClientsDifferUsesSum) {
  RunConfig run = NoisyRun(Q("1/2"), 2, Grid{1, 0, 2});
  Partition p0 = {{"c1", Values("a", {0, 2})}, {"c2", Values("b", {1, 1})}};
  Partition p1 = {{"c1", Values("a", {0, 0})}, {"c2", Values("b", {1, 3})}};
  DecompositionResult r =
      *DecompositionCheck(NeighborRun{Init(p0), Init(p1), run},
                          DecompositionMode::kAllClientsDiffer);
  const double sum = r.per_client.at("c1").epsilon + r.per_client.at("c2").epsilon;
  EXPECT_DOUBLE_EQ(r.bound, sum);
  EXPECT_LE(r.global.epsilon, sum + kEpsilonTolerance);
  EXPECT_TRUE(r.bound_holds);
}

TEST(DecompositionTest, PreconditionNamesClient) {
  absl::StatusOr<DecompositionResult> r = DecompositionCheck(
      SubstitutionPair(NoisyRun(Q("1/2"), 2, Grid{1, 0, 2})),
      DecompositionMode::kAllClientsDiffer);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_NE(r.status().message().find("c2"), std::string::npos);

  Partition p0 = {{"c1", Values("a", {0, 2})}, {"c2", Values("b", {1, 1})}};
  Partition p1 = {{"c1", Values("a", {0, 0})}, {"c2", Values("b", {1, 3})}};
  absl::StatusOr<DecompositionResult> two =
      DecompositionCheck(NeighborRun{Init(p0), Init(p1), AcceptanceRun()},
                         DecompositionMode::kOneClientDiffers);
  ASSERT_FALSE(two.ok());
  EXPECT_NE(two.status().message().find("c2"), std::string::npos);
}

}  // namespace
}  // namespace fldp
