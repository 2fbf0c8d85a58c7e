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

#include "fldp/transition.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace fldp {
namespace {

absl::Status NotEnabled(const std::string& why) {
  return absl::FailedPreconditionError(absl::StrCat("NotEnabled: ", why));
}

// Cartesian product of per-coordinate noise offsets.
std::vector<std::pair<std::vector<int>, Rational>> NoiseVectors(
    const std::map<int, Rational>& pmf, size_t dim) {
  std::vector<std::pair<std::vector<int>, Rational>> out = {{{}, Rational(1)}};
  for (size_t j = 0; j < dim; ++j) {
    std::vector<std::pair<std::vector<int>, Rational>> next;
    next.reserve(out.size() * pmf.size());
    for (const auto& [prefix, prob] : out) {
      for (const auto& [k, pk] : pmf) {
        std::vector<int> v = prefix;
        v.push_back(k);
        next.emplace_back(std::move(v), prob * pk);
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

absl::Status RunConfig::Validate() const {
  if (absl::Status s = learning.Validate(); !s.ok()) return s;
  if (absl::Status s = ValidateNoise(mechanism); !s.ok()) return s;
  if (absl::Status s = ValidateDefense(defense); !s.ok()) return s;
  if (std::holds_alternative<DiscreteLaplace>(mechanism) &&
      !learning.grid.has_value()) {
    return absl::InvalidArgumentError(
        "a noise mechanism needs a grid: exact mode has no noise step");
  }
  return absl::OkStatus();
}

absl::StatusOr<Infrastructure> StepPutPart(const Infrastructure& i,
                                           const Partition& parts) {
  if (!i.prot.Contains(Trace()) || i.prot.Current().HasPut()) {
    return absl::FailedPreconditionError(
        "NotInitial: partitions were already deployed");
  }
  const IGraph& g = i.igra;
  for (const auto& [client, data] : parts) {
    if (!g.clients.contains(client)) {
      return absl::InvalidArgumentError(
          absl::StrCat("BadPartition: ", client, " is not a client"));
    }
  }
  if (parts.size() != g.clients.size()) {
    return absl::InvalidArgumentError(
        "BadPartition: every client needs a partition");
  }
  absl::StatusOr<Dataset> joined = UnionOf(parts);
  if (!joined.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat("BadPartition: partitions overlap (",
                     joined.status().message(), ")"));
  }
  if (!(*joined == g.dataset)) {
    return absl::InvalidArgumentError(
        "BadPartition: union of partitions differs from the dataset");
  }

  Infrastructure next = i;
  next.igra.partition = parts;
  next.igra.ready.clear();
  next.prot = i.prot.Insert(Trace().Prepend(PutEvent{parts}));
  return next;
}

absl::StatusOr<std::vector<ProbStep>> StepGetGrad(const Infrastructure& i,
                                                  const ActorId& c,
                                                  const RunConfig& run) {
  const IGraph& g = i.igra;
  const Trace& current = i.prot.Current();
  if (!current.HasPut()) return NotEnabled("no Put has occurred");
  if (!g.clients.contains(c)) {
    return NotEnabled(absl::StrCat(c, " is not a client"));
  }
  if (g.ready.contains(c)) {
    return NotEnabled(absl::StrCat(c, " already released this round"));
  }
  const Dataset& part = g.partition.at(c);
  if (part.empty()) {
    return NotEnabled(absl::StrCat(c, " has an empty partition"));
  }

  absl::StatusOr<ModelParam> base = ClientUpdate(
      run.model, run.learning, g.curmodpar, part, run.defense);
  if (!base.ok()) return base.status();

  std::vector<std::pair<std::vector<int>, Rational>> noise;
  if (const auto* lap = std::get_if<DiscreteLaplace>(&run.mechanism)) {
    if (!run.learning.grid.has_value()) {
      return absl::InvalidArgumentError("noise requires a grid");
    }
    noise = NoiseVectors(NoisePmf(*lap), base->dim());
  } else {
    noise = {{std::vector<int>(base->dim(), 0), Rational(1)}};
  }

  std::vector<ProbStep> steps;
  steps.reserve(noise.size());
  for (const auto& [offsets, prob] : noise) {
    ModelParam grad = *base;
    if (run.learning.grid.has_value()) {
      const Grid& grid = *run.learning.grid;
      for (size_t j = 0; j < grad.dim(); ++j) {
        grad.coords[j] += Rational(offsets[j]) * grid.step;
      }
      grad = Clamp(grad, grid);
    }
    GetEvent event{c, grad};
    Infrastructure next = i;
    next.igra.ready.insert(c);
    next.igra.gradient[c] = grad;
    next.prot = i.prot.Insert(current.Prepend(event));
    steps.push_back(ProbStep{std::move(next), prob, std::move(event), 0});
  }
  return steps;
}

absl::StatusOr<Infrastructure> StepEvalServer(const Infrastructure& i,
                                              const std::optional<Grid>& grid) {
  const IGraph& g = i.igra;
  if (g.clients.empty()) return NotEnabled("no clients");
  if (g.ready != g.clients) return NotEnabled("not every client is ready");

  absl::StatusOr<ModelParam> model =
      ServerEval(g.gradient, g.partition,
                 static_cast<long>(g.dataset.size()), grid);
  if (!model.ok()) return model.status();

  Infrastructure next = i;
  next.igra.curmodpar = *model;
  next.igra.ready.clear();
  next.prot = i.prot.Insert(i.prot.Current().Prepend(EvalEvent{*model}));
  return next;
}

bool IsTerminal(const Infrastructure& i, const RunConfig& run) {
  const Trace& current = i.prot.Current();
  return current.HasPut() &&
         current.CountEval() >= static_cast<size_t>(run.learning.rounds);
}

absl::StatusOr<std::vector<ProbStep>> Successors(const Infrastructure& i,
                                                 const RunConfig& run) {
  std::vector<ProbStep> out;
  const IGraph& g = i.igra;
  if (!i.prot.Current().HasPut()) {
    absl::StatusOr<Infrastructure> next = StepPutPart(i, g.partition);
    if (!next.ok()) return next.status();
    Event event = next->prot.Current().newest();
    out.push_back(ProbStep{*std::move(next), Rational(1), std::move(event), 0});
    return out;
  }
  if (IsTerminal(i, run)) return out;

  if (g.ready == g.clients) {
    absl::StatusOr<Infrastructure> next = StepEvalServer(i, run.learning.grid);
    if (!next.ok()) return next.status();
    Event event = next->prot.Current().newest();
    out.push_back(ProbStep{*std::move(next), Rational(1), std::move(event), 0});
    return out;
  }

  std::vector<ActorId> candidates;
  switch (run.scheduler.policy) {
    case Scheduler::Policy::kRoundRobin:
      for (const ActorId& c : g.clients) {
        if (!g.ready.contains(c)) {
          candidates.push_back(c);
          break;
        }
      }
      break;
    case Scheduler::Policy::kFixedOrder:
      for (const ActorId& c : run.scheduler.order) {
        if (g.clients.contains(c) && !g.ready.contains(c)) {
          candidates.push_back(c);
          break;
        }
      }
      if (candidates.empty()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "fixed order [", absl::StrJoin(run.scheduler.order, ","),
            "] does not cover the unready clients"));
      }
      break;
    case Scheduler::Policy::kFullNondeterminism:
      for (const ActorId& c : g.clients) {
        if (!g.ready.contains(c)) candidates.push_back(c);
      }
      break;
  }

  for (size_t choice = 0; choice < candidates.size(); ++choice) {
    absl::StatusOr<std::vector<ProbStep>> steps =
        StepGetGrad(i, candidates[choice], run);
    if (!steps.ok()) return steps.status();
    for (ProbStep& step : *steps) {
      step.choice = static_cast<int>(choice);
      out.push_back(std::move(step));
    }
  }
  return out;
}

}  // namespace fldp
