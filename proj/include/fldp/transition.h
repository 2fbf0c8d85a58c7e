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

// The FL state-transition relation. Three rules: Put deploys the partitions,
// Get releases one client's (possibly noised) local update, Eval aggregates
// once every client is ready. Noise is the only probabilistic split.

#ifndef FLDP_TRANSITION_H_
#define FLDP_TRANSITION_H_

#include <optional>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fldp/core_model.h"
#include "fldp/learning.h"

namespace fldp {

struct Scheduler {
  enum class Policy {
    // One choice per state: the lowest unready client id.
    kRoundRobin,
    // One choice per state: the first unready client in `order`.
    kFixedOrder,
    // Every enabled rule is a separate choice.
    kFullNondeterminism,
  };
  Policy policy = Policy::kRoundRobin;
  std::vector<ActorId> order;

  static Scheduler RoundRobin() { return {}; }
  static Scheduler FixedOrder(std::vector<ActorId> order) {
    return {Policy::kFixedOrder, std::move(order)};
  }
  static Scheduler FullNondeterminism() {
    return {Policy::kFullNondeterminism, {}};
  }
};

// Everything a run shares besides its initial infrastructure.
struct RunConfig {
  Scheduler scheduler;
  LossModel model = LossModel::kMeanEstimation;
  LearningConfig learning;
  DefenseTransform defense = IdentityDefense{};
  NoiseMechanism mechanism = NoNoise{};

  absl::Status Validate() const;
};

struct ProbStep {
  Infrastructure next;
  Rational prob;
  Event event;
  // Index of the rule-and-client choice this step belongs to. Steps with the
  // same choice carry probabilities summing to one.
  int choice = 0;
};

// Requires that no Put has happened and that `parts` partitions the dataset.
absl::StatusOr<Infrastructure> StepPutPart(const Infrastructure& i,
                                           const Partition& parts);

// One step per noise vector, each with the product of per-coordinate pmf
// values. Requires a Put, c a client that is not ready and a nonempty
// partition for c.
absl::StatusOr<std::vector<ProbStep>> StepGetGrad(const Infrastructure& i,
                                                  const ActorId& c,
                                                  const RunConfig& run);

// Requires ready == clients.
absl::StatusOr<Infrastructure> StepEvalServer(const Infrastructure& i,
                                              const std::optional<Grid>& grid);

// Enabled rule applications under the scheduler. Empty iff terminal: the
// round budget is spent.
absl::StatusOr<std::vector<ProbStep>> Successors(const Infrastructure& i,
                                                 const RunConfig& run);

bool IsTerminal(const Infrastructure& i, const RunConfig& run);

}  // namespace fldp

#endif  // FLDP_TRANSITION_H_
