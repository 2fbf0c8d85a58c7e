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

// Reachable-state semantics of the transition relation.
//
// BuildModel unfolds every state reachable from an initial infrastructure.
// Identical states are merged, so the model is a DAG whose edges carry exact
// branch probabilities. Paths are always taken from the initial state to a
// terminal (round budget exhausted) state; a target predicate selects
// among those terminals.
//
// When a state offers several rule choices (FullNondeterminism) each choice
// is weighted uniformly, which keeps every distribution normalized.

#ifndef FLDP_KRIPKE_H_
#define FLDP_KRIPKE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "absl/status/statusor.h"
#include "fldp/core_model.h"
#include "fldp/rational.h"
#include "fldp/rng.h"
#include "fldp/transition.h"

namespace fldp {

inline constexpr size_t kDefaultStateCeiling = 1'000'000;

struct PathDistribution {
  std::map<ModelParam, Rational> outcomes;
  // Number of maximal paths (or samples) behind the distribution.
  mpz_class trace_count = 0;

  Rational Total() const;
  Rational Prob(const ModelParam& outcome) const;
};

// Outcome k of `probs` becomes the one-dimensional parameter (k).
PathDistribution DistributionFromPmf(const std::vector<Rational>& probs);

struct KripkeEdge {
  size_t target = 0;
  // Branch probability times the uniform weight of its choice.
  Rational prob;
};

struct KripkeModel {
  RunConfig run;
  size_t init = 0;
  std::vector<Infrastructure> states;
  std::vector<std::vector<KripkeEdge>> edges;
  // Indices of states without successors.
  std::vector<size_t> terminals;
  // Length in transitions of the longest path.
  size_t max_depth = 0;

  // Probability of reaching each state from init. States are stored in
  // topological order, so this is a single forward pass.
  std::vector<Rational> ReachProbabilities() const;
  // Number of distinct paths from init to each state.
  std::vector<mpz_class> PathCounts() const;
  mpz_class MaximalPathCount() const;
};

absl::StatusOr<KripkeModel> BuildModel(
    const Infrastructure& init, const RunConfig& run,
    size_t state_ceiling = kDefaultStateCeiling);

using StatePredicate = std::function<bool(const Infrastructure&)>;
using Observable = std::function<ModelParam(const Infrastructure&)>;

Observable CurModPar();
Observable GradientOf(const ActorId& client);

struct KripkePath {
  std::vector<size_t> states;
  Rational prob;
};

// Maximal paths from init whose terminal state satisfies `target`.
std::vector<KripkePath> PathsInto(const KripkeModel& m,
                                  const StatePredicate& target);

// Probability mass of the maximal paths ending in `target`.
Rational ProbInto(const KripkeModel& m, const StatePredicate& target);

// Pushforward of the terminal-state distribution through `observable`.
PathDistribution TerminalDistribution(const KripkeModel& m,
                                      const Observable& observable);

// Draws one maximal run. Choices are picked uniformly, noise branches by
// their exact probabilities.
absl::StatusOr<Infrastructure> SampleRun(const Infrastructure& init,
                                         const RunConfig& run,
                                         SplitMix64& rng);

// Empirical terminal distribution from `samples` runs. Run k uses stream
// StreamSeed(seed, k), so the result is independent of `workers`.
absl::StatusOr<PathDistribution> MonteCarloTerminalDistribution(
    const Infrastructure& init, const RunConfig& run, uint64_t samples,
    uint64_t seed, const Observable& observable = CurModPar(),
    int workers = 1);

// Half the L1 distance, exact.
Rational TotalVariation(const PathDistribution& a, const PathDistribution& b);

}  // namespace fldp

#endif  // FLDP_KRIPKE_H_
