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

// Measures the realized DP factor between the output distributions of two
// runs on neighboring datasets, and checks the decomposition of the global
// factor into per-client factors.
//
// Both runs start from their own initial infrastructure. The transition
// rules never change the dataset, so the two neighboring datasets cannot be
// reached from one shared initial state.

#ifndef FLDP_PRIVACY_H_
#define FLDP_PRIVACY_H_

#include <map>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "fldp/core_model.h"
#include "fldp/kripke.h"
#include "fldp/rational.h"
#include "fldp/transition.h"

namespace fldp {

// Slack for floating comparisons of epsilons.
inline constexpr double kEpsilonTolerance = 1e-9;

struct OutcomeRatio {
  ModelParam outcome;
  Rational p0;
  Rational p1;
  // ln(p0 / p1); +-infinity when exactly one side is zero.
  double log_ratio = 0;
};

struct EpsilonReport {
  // Nonnegative, +infinity when no finite factor exists.
  double epsilon = 0;
  // e^epsilon as an exact rational when finite. In pure mode it is the
  // largest singleton probability ratio in either direction.
  std::optional<Rational> exp_epsilon;
  std::vector<OutcomeRatio> per_outcome;
  // Set in (epsilon, delta) mode.
  std::optional<Rational> delta;

  bool infinite() const { return !exp_epsilon.has_value(); }
};

// Pure mode when `delta` is unset: max over the union support of
// |ln(p0/p1)|. Otherwise the smallest epsilon with
// p0(E) <= e^epsilon p1(E) + delta for every event E, in both directions.
EpsilonReport RealizedEpsilon(const PathDistribution& d0,
                              const PathDistribution& d1,
                              const std::optional<Rational>& delta =
                                  std::nullopt);

// Smallest x >= 1 with sum_o max(0, p(o) - x q(o)) <= delta, or nullopt if
// none exists. Exact.
std::optional<Rational> SmallestRatioBound(const PathDistribution& p,
                                           const PathDistribution& q,
                                           const Rational& delta);

// Brute force over every event E of the union support (at most 20
// outcomes): p0(E) <= bound * p1(E) + delta and the mirrored inequality.
// Returns the number of violating events.
absl::StatusOr<size_t> CountEventViolations(const PathDistribution& d0,
                                            const PathDistribution& d1,
                                            const Rational& bound,
                                            const Rational& delta = 0);

// Two runs that differ only in their datasets.
struct NeighborRun {
  Infrastructure i0;
  Infrastructure i1;
  RunConfig run;
};

// Datasets neighbor and the client sets agree.
absl::Status ValidateNeighborRun(const NeighborRun& run);

struct NiFlDpResult {
  bool holds = false;
  EpsilonReport report;
  PathDistribution d0;
  PathDistribution d1;
};

absl::StatusOr<NiFlDpResult> NiFlDpCheck(
    const NeighborRun& run, double epsilon_budget,
    const std::optional<Rational>& delta = std::nullopt,
    size_t state_ceiling = kDefaultStateCeiling);

enum class DecompositionMode { kOneClientDiffers, kAllClientsDiffer };

struct DecompositionResult {
  std::map<ActorId, EpsilonReport> per_client;
  EpsilonReport global;
  // One differing client: global <= max per-client. All differ: global <=
  // sum of per-client. Both with kEpsilonTolerance.
  double bound = 0;
  bool bound_holds = false;
};

absl::StatusOr<DecompositionResult> DecompositionCheck(
    const NeighborRun& run, DecompositionMode mode,
    size_t state_ceiling = kDefaultStateCeiling);

}  // namespace fldp

#endif  // FLDP_PRIVACY_H_
