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

// Distinguishing advantage of adversaries that see one released model
// parameter and guess which of two neighboring datasets produced it.
//
//   Adv(A)    = P_{D1}(A = 1) - P_{D0}(A = 1)
//   success   = (P_{D0}(A = 0) + P_{D1}(A = 1)) / 2      (uniform prior)
//   Adv(A)    = 2 * success - 1                           (always, exactly)
//
// For a pair whose realized factor is e^eps = R the optimal advantage is
// bounded by
//
//   TV <= (R - 1) / (R + 1) <= 1 - 1/R <= 1,
//
// and tight_pair(R) attains the first bound with equality.

#ifndef FLDP_ADVERSARY_H_
#define FLDP_ADVERSARY_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "fldp/kripke.h"
#include "fldp/privacy.h"
#include "fldp/rational.h"

namespace fldp {

struct Adversary {
  // Guess bit in {0, 1}. Deterministic and total.
  std::function<int(const ModelParam&)> decide;
  std::string description;
};

// Guesses 1 exactly on `ones`.
Adversary GuessOneOn(std::set<ModelParam> ones, std::string description);
Adversary ConstantAdversary(int bit);
Adversary Complement(const Adversary& a);

struct AdvantageReport {
  Rational advantage;
  Rational success_prob;
  Rational tv;
  // advantage == 2 * success_prob - 1, checked exactly.
  bool identity_holds = false;
  std::optional<EpsilonReport> eps_star;
  // (R - 1) / (R + 1) and 1 - 1/R for R = e^eps*, when eps* is finite.
  std::optional<Rational> tight_bound;
  std::optional<Rational> loose_bound;
  // TV <= tight_bound <= loose_bound <= 1.
  bool chain_holds = false;
};

AdvantageReport Advantage(const Adversary& a, const PathDistribution& d0,
                          const PathDistribution& d1);

// Guesses 1 iff d1(o) > d0(o). Its advantage is TV(d0, d1).
Adversary BayesOptimal(const PathDistribution& d0, const PathDistribution& d1);

// Fails with OutOfRange ("InfiniteEpsilon") when eps* is infinite.
absl::StatusOr<AdvantageReport> BoundChain(const PathDistribution& d0,
                                           const PathDistribution& d1);

// Two-outcome pair with probability ratio exactly R in both outcomes.
// Requires R > 1.
absl::StatusOr<std::pair<PathDistribution, PathDistribution>> TightPair(
    const Rational& ratio);

// P_{D0}(A = 0) == P_{D1}(A = 1).
bool SymmetricFor(const Adversary& a, const PathDistribution& d0,
                  const PathDistribution& d1);

struct ChallengeBlock {
  uint64_t block = 0;
  uint64_t successes = 0;
  uint64_t trials = 0;
  double advantage_estimate = 0;
};

struct ChallengeResult {
  uint64_t successes = 0;
  uint64_t trials = 0;
  double success_prob = 0;
  // 2 * success_prob - 1.
  double advantage = 0;
  std::vector<ChallengeBlock> blocks;
};

// Draws one terminal observation of world b using the given stream.
using WorldSampler =
    std::function<absl::StatusOr<ModelParam>(int b, SplitMix64& rng)>;

// Trial k: stream StreamSeed(seed, k), b = first draw & 1, then one
// observation of world b is shown to the adversary.
absl::StatusOr<ChallengeResult> ChallengeExperiment(
    const WorldSampler& sample, const Adversary& a, uint64_t trials,
    uint64_t seed, uint64_t block_size = 1000, int workers = 1);

// Worlds are the FL runs on the two neighboring datasets.
absl::StatusOr<ChallengeResult> ChallengeExperiment(
    const NeighborRun& run, const Adversary& a, uint64_t trials,
    uint64_t seed, uint64_t block_size = 1000, int workers = 1);

// Worlds are given directly as distributions.
absl::StatusOr<ChallengeResult> ChallengeExperiment(
    const PathDistribution& d0, const PathDistribution& d1,
    const Adversary& a, uint64_t trials, uint64_t seed,
    uint64_t block_size = 1000, int workers = 1);

}  // namespace fldp

#endif  // FLDP_ADVERSARY_H_
