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

#include "fldp/adversary.h"

#include <cmath>

#include "gtest/gtest.h"
#include "test_util.h"

namespace fldp {
namespace {

using ::fldp::testing::AcceptancePartition;
using ::fldp::testing::AcceptanceRun;
using ::fldp::testing::Init;
using ::fldp::testing::M;
using ::fldp::testing::OutcomeRange;
using ::fldp::testing::Q;
using ::fldp::testing::RandomPmf;
using ::fldp::testing::Values;

PathDistribution Pmf(std::vector<Rational> p) { return DistributionFromPmf(p); }

const PathDistribution kP = Pmf({Q("3/4"), Q("1/4")});
const PathDistribution kQ = Pmf({Q("1/4"), Q("3/4")});

Adversary FromMask(const std::vector<ModelParam>& outcomes, uint64_t mask) {
  std::set<ModelParam> ones;
  for (size_t k = 0; k < outcomes.size(); ++k) {
    if (mask >> k & 1) ones.insert(outcomes[k]);
  }
  return GuessOneOn(std::move(ones), "mask");
}

// Direct sum over outcomes, independent of Advantage().
Rational OracleAdvantage(const Adversary& a, const PathDistribution& d0,
                         const PathDistribution& d1) {
  Rational adv = 0;
  for (const auto& [o, p] : d1.outcomes) adv += a.decide(o) * p;
  for (const auto& [o, p] : d0.outcomes) adv -= a.decide(o) * p;
  return adv;
}

TEST(AdvantageTest, Examples) {
  EXPECT_EQ(Advantage(ConstantAdversary(1), kP, kQ).advantage, 0);
  AdvantageReport r = Advantage(GuessOneOn({M({1})}, "second"), kP, kQ);
  EXPECT_EQ(r.advantage, Q("1/2"));
  EXPECT_EQ(r.success_prob, Q("3/4"));
  EXPECT_TRUE(r.identity_holds);
  Adversary a = GuessOneOn({M({0})}, "first");
  EXPECT_EQ(Advantage(Complement(a), kP, kQ).advantage,
            -Advantage(a, kP, kQ).advantage);
}

TEST(AdvantageTest, IdentityExactOnRandomPairs) {
  SplitMix64 rng(61);
  for (int trial = 0; trial < 300; ++trial) {
    const size_t m = 1 + rng.Below(8);
    PathDistribution d0 = RandomPmf(rng, m);
    PathDistribution d1 = RandomPmf(rng, m);
    for (int k = 0; k < 10; ++k) {
      Adversary a = FromMask(OutcomeRange(m), rng.Next());
      AdvantageReport r = Advantage(a, d0, d1);
      EXPECT_EQ(r.advantage, 2 * r.success_prob - 1);
      EXPECT_EQ(r.advantage, OracleAdvantage(a, d0, d1));
      EXPECT_TRUE(r.identity_holds);
      EXPECT_GE(r.tv, 0);
      EXPECT_LE(r.tv, 1);
    }
  }
}

TEST(BayesOptimalTest, Examples) {
  EXPECT_EQ(Advantage(BayesOptimal(kP, kP), kP, kP).advantage, 0);
  EXPECT_EQ(Advantage(BayesOptimal(kP, kQ), kP, kQ).advantage, Q("1/2"));
  PathDistribution left = Pmf({Q("1/2"), Q("1/2"), 0});
  PathDistribution right = Pmf({0, 0, 1});
  EXPECT_EQ(Advantage(BayesOptimal(left, right), left, right).advantage, 1);
}

TEST(BayesOptimalTest, BeatsEveryDeterministicAdversary) {
  SplitMix64 rng(67);
  for (int trial = 0; trial < 60; ++trial) {
    const size_t m = 1 + rng.Below(12);
    PathDistribution d0 = RandomPmf(rng, m);
    PathDistribution d1 = RandomPmf(rng, m);
    const std::vector<ModelParam> outcomes = OutcomeRange(m);
    Rational best = -1;
    for (uint64_t mask = 0; mask < (uint64_t{1} << m); ++mask) {
      best = std::max(best, OracleAdvantage(FromMask(outcomes, mask), d0, d1));
    }
    Rational bayes = Advantage(BayesOptimal(d0, d1), d0, d1).advantage;
    EXPECT_EQ(bayes, best);
    EXPECT_EQ(bayes, TotalVariation(d0, d1));
  }
}

TEST(BayesOptimalTest, TiesDoNotMatter) {
  PathDistribution d0 = Pmf({Q("1/4"), Q("1/2"), Q("1/4")});
  PathDistribution d1 = Pmf({Q("1/4"), Q("1/4"), Q("1/2")});
  Adversary bayes = BayesOptimal(d0, d1);
  EXPECT_EQ(bayes.decide(M({0})), 0);
  Adversary flipped = GuessOneOn({M({0}), M({2})}, "tie to one");
  EXPECT_EQ(Advantage(bayes, d0, d1).advantage,
            Advantage(flipped, d0, d1).advantage);
}

TEST(BayesOptimalTest, RandomizedMixturesNeverWin) {
  SplitMix64 rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t m = 1 + rng.Below(6);
    PathDistribution d0 = RandomPmf(rng, m);
    PathDistribution d1 = RandomPmf(rng, m);
    const std::vector<ModelParam> outcomes = OutcomeRange(m);
    // A randomized adversary is a convex combination of deterministic ones;
    // its advantage is the same combination of advantages.
    Rational total_weight = 0, mixed = 0;
    for (int k = 0; k < 4; ++k) {
      Rational w = 1 + static_cast<long>(rng.Below(5));
      total_weight += w;
      mixed += w * OracleAdvantage(FromMask(outcomes, rng.Next()), d0, d1);
    }
    EXPECT_LE(mixed / total_weight, TotalVariation(d0, d1));
  }
}

TEST(BoundChainTest, Examples) {
  AdvantageReport zero = *BoundChain(kP, kP);
  EXPECT_EQ(zero.tv, 0);
  EXPECT_EQ(*zero.tight_bound, 0);
  EXPECT_EQ(*zero.loose_bound, 0);

  AdvantageReport tight = *BoundChain(kP, kQ);
  EXPECT_NEAR(tight.eps_star->epsilon, std::log(3.0), 1e-12);
  EXPECT_EQ(*tight.tight_bound, Q("1/2"));
  EXPECT_EQ(tight.tv, Q("1/2"));
  EXPECT_EQ(*tight.loose_bound, Q("2/3"));
  EXPECT_TRUE(tight.chain_holds);
}

TEST(BoundChainTest, InfiniteEpsilon) {
  absl::StatusOr<AdvantageReport> r = BoundChain(Pmf({1, 0}), Pmf({Q("1/2"), Q("1/2")}));
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.status().code(), absl::StatusCode::kOutOfRange);
  EXPECT_NE(r.status().message().find("InfiniteEpsilon"), std::string::npos);
}

TEST(BoundChainTest, RejectionSampledPureDpPairs) {
  SplitMix64 rng(73);
  const Rational budget = 2;  // e^eps
  int accepted = 0;
  while (accepted < 1000) {
    const size_t m = 2 + rng.Below(5);
    PathDistribution d0 = RandomPmf(rng, m, 1);
    PathDistribution d1 = RandomPmf(rng, m, 1);
    EpsilonReport eps = RealizedEpsilon(d0, d1);
    if (*eps.exp_epsilon > budget) continue;
    ++accepted;
    AdvantageReport r = *BoundChain(d0, d1);
    const Rational& e = *eps.exp_epsilon;
    EXPECT_LE(r.tv, (e - 1) / (e + 1));
    EXPECT_LE(r.tv, (budget - 1) / (budget + 1));
    EXPECT_LE(*r.tight_bound, *r.loose_bound);
    EXPECT_TRUE(r.chain_holds);
  }
}

TEST(TightPairTest, Examples) {
  auto [p, q] = *TightPair(3);
  EXPECT_EQ(p.outcomes, kP.outcomes);
  EXPECT_EQ(q.outcomes, kQ.outcomes);
  auto [p2, q2] = *TightPair(2);
  EXPECT_EQ(Advantage(BayesOptimal(p2, q2), p2, q2).advantage, Q("1/3"));
  Rational best = -1;
  for (uint64_t mask = 0; mask < 4; ++mask) {
    best = std::max(best, OracleAdvantage(FromMask(OutcomeRange(2), mask), p2, q2));
  }
  EXPECT_EQ(best, Q("1/3"));
  auto [pn, qn] = *TightPair(Q("1000001/1000000"));
  EXPECT_LT(ToDouble(TotalVariation(pn, qn)), 1e-6);
  EXPECT_FALSE(TightPair(1).ok());
  EXPECT_FALSE(TightPair(Q("1/2")).ok());
}

TEST(TightPairTest, ChainIsTightInFirstInequality) {
  for (const char* r : {"3/2", "2", "3", "10"}) {
    auto [p, q] = *TightPair(Q(r));
    AdvantageReport rep = *BoundChain(p, q);
    EXPECT_EQ(*rep.eps_star->exp_epsilon, Q(r));
    EXPECT_EQ(rep.tv, *rep.tight_bound);
    EXPECT_NEAR(rep.eps_star->epsilon, std::log(ToDouble(Q(r))), 1e-12);
  }
}

TEST(SymmetryAssumptionTest, HoldsForSomeAdversariesOnly) {
  EXPECT_TRUE(SymmetricFor(BayesOptimal(kP, kQ), kP, kQ));
  EXPECT_FALSE(SymmetricFor(ConstantAdversary(1), kP, kQ));
}

TEST(ChallengeTest, DisjointOutputsGiveAdvantageOne) {
  NeighborRun run{Init({{"c1", Values("a", {1})}}),
                  Init({{"c1", Values("a", {2})}}), RunConfig{}};
  Adversary bayes = GuessOneOn({M({2})}, "two");
  ChallengeResult r = *ChallengeExperiment(run, bayes, 500, 3);
  EXPECT_EQ(r.advantage, 1);
  EXPECT_EQ(r.successes, 500u);
}

TEST(ChallengeTest, SameDatasetNearZero) {
  const uint64_t trials = 20000;
  ChallengeResult r = *ChallengeExperiment(kP, kP, BayesOptimal(kP, kQ),
                                           trials, 5);
  EXPECT_LE(std::abs(r.advantage), 3 / std::sqrt(static_cast<double>(trials)));
}

TEST(ChallengeTest, DeterministicBlocks) {
  Adversary a = BayesOptimal(kP, kQ);
  ChallengeResult x = *ChallengeExperiment(kP, kQ, a, 4500, 9, 1000);
  ChallengeResult y = *ChallengeExperiment(kP, kQ, a, 4500, 9, 1000, 3);
  ASSERT_EQ(x.blocks.size(), 5u);
  EXPECT_EQ(x.blocks.back().trials, 500u);
  EXPECT_EQ(x.successes, y.successes);
  for (size_t k = 0; k < x.blocks.size(); ++k) {
    EXPECT_EQ(x.blocks[k].successes, y.blocks[k].successes);
  }
}

TEST(ChallengeTest, AcceptanceScenarioMatchesExactAdvantage) {
  Partition p1 = AcceptancePartition();
  Partition p0 = p1;
  p0["c2"] = Values("b", {1, 1});
  NeighborRun run{Init(p0), Init(p1), AcceptanceRun()};
  PathDistribution d0 =
      TerminalDistribution(*BuildModel(run.i0, run.run), CurModPar());
  PathDistribution d1 =
      TerminalDistribution(*BuildModel(run.i1, run.run), CurModPar());
  Adversary bayes = BayesOptimal(d0, d1);
  const double exact = ToDouble(TotalVariation(d0, d1));
  ChallengeResult r = *ChallengeExperiment(run, bayes, 100'000, 2024);
  EXPECT_LE(std::abs(r.advantage - exact), 0.01);
}

}  // namespace
}  // namespace fldp
