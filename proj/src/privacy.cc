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

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "absl/strings/str_cat.h"

namespace fldp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::set<ModelParam> UnionSupport(const PathDistribution& a,
                                  const PathDistribution& b) {
  std::set<ModelParam> support;
  for (const auto& [o, p] : a.outcomes) {
    if (p != 0) support.insert(o);
  }
  for (const auto& [o, p] : b.outcomes) {
    if (p != 0) support.insert(o);
  }
  return support;
}

std::vector<OutcomeRatio> Ratios(const PathDistribution& d0,
                                 const PathDistribution& d1) {
  std::vector<OutcomeRatio> out;
  for (const ModelParam& o : UnionSupport(d0, d1)) {
    OutcomeRatio r{o, d0.Prob(o), d1.Prob(o), 0};
    if (r.p1 == 0) {
      r.log_ratio = kInf;
    } else if (r.p0 == 0) {
      r.log_ratio = -kInf;
    } else {
      r.log_ratio = Log(r.p0 / r.p1);
    }
    out.push_back(std::move(r));
  }
  return out;
}

absl::Status PreconditionViolation(const std::string& why) {
  return absl::FailedPreconditionError(
      absl::StrCat("PreconditionViolation: ", why));
}

}  // namespace

std::optional<Rational> SmallestRatioBound(const PathDistribution& p,
                                           const PathDistribution& q,
                                           const Rational& delta) {
  // f(x) = sum_o max(0, p_o - x q_o) is nonincreasing and piecewise linear
  // in x with breakpoints at the ratios p_o / q_o. Walk the breakpoints
  // downward until f drops to delta.
  Rational mass = 0;    // sum of p over the active outcomes
  Rational weight = 0;  // sum of q over the active outcomes
  std::vector<std::pair<Rational, Rational>> finite;  // (ratio, q)
  for (const auto& [o, po] : p.outcomes) {
    if (po == 0) continue;
    Rational qo = q.Prob(o);
    if (qo == 0) {
      mass += po;
    } else {
      finite.emplace_back(po / qo, qo);
    }
  }
  if (mass > delta) return std::nullopt;

  std::sort(finite.begin(), finite.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [ratio, qo] : finite) {
    Rational floor = std::max(ratio, Rational(1));
    if (mass - floor * weight > delta) {
      return std::max(Rational(1), Rational((mass - delta) / weight));
    }
    if (ratio <= 1) return Rational(1);
    mass += ratio * qo;
    weight += qo;
  }
  if (mass - weight > delta) return Rational((mass - delta) / weight);
  return Rational(1);
}

EpsilonReport RealizedEpsilon(const PathDistribution& d0,
                              const PathDistribution& d1,
                              const std::optional<Rational>& delta) {
  EpsilonReport report;
  report.per_outcome = Ratios(d0, d1);
  report.delta = delta;

  if (delta.has_value()) {
    std::optional<Rational> forward = SmallestRatioBound(d0, d1, *delta);
    std::optional<Rational> backward = SmallestRatioBound(d1, d0, *delta);
    if (forward && backward) report.exp_epsilon = std::max(*forward, *backward);
  } else {
    Rational worst = 1;
    bool infinite = false;
    for (const OutcomeRatio& r : report.per_outcome) {
      if (r.p0 == 0 || r.p1 == 0) {
        infinite = true;
        break;
      }
      Rational ratio = r.p0 > r.p1 ? r.p0 / r.p1 : r.p1 / r.p0;
      worst = std::max(worst, ratio);
    }
    if (!infinite) report.exp_epsilon = worst;
  }
  report.epsilon = report.exp_epsilon ? Log(*report.exp_epsilon) : kInf;
  return report;
}

absl::StatusOr<size_t> CountEventViolations(const PathDistribution& d0,
                                            const PathDistribution& d1,
                                            const Rational& bound,
                                            const Rational& delta) {
  std::vector<ModelParam> support;
  for (const ModelParam& o : UnionSupport(d0, d1)) support.push_back(o);
  if (support.size() > 20) {
    return absl::InvalidArgumentError(
        absl::StrCat("event enumeration limited to 20 outcomes, got ",
                     support.size()));
  }
  std::vector<Rational> p0, p1;
  for (const ModelParam& o : support) {
    p0.push_back(d0.Prob(o));
    p1.push_back(d1.Prob(o));
  }
  size_t violations = 0;
  const uint64_t events = uint64_t{1} << support.size();
  for (uint64_t mask = 0; mask < events; ++mask) {
    Rational e0 = 0, e1 = 0;
    for (size_t k = 0; k < support.size(); ++k) {
      if (mask >> k & 1) {
        e0 += p0[k];
        e1 += p1[k];
      }
    }
    if (e0 > bound * e1 + delta || e1 > bound * e0 + delta) ++violations;
  }
  return violations;
}

absl::Status ValidateNeighborRun(const NeighborRun& run) {
  if (run.i0.igra.clients != run.i1.igra.clients ||
      run.i0.igra.server != run.i1.igra.server) {
    return PreconditionViolation("the two runs have different actors");
  }
  if (!NeighborsOne(run.i0.igra.dataset, run.i1.igra.dataset)) {
    return PreconditionViolation(
        "datasets do not differ in exactly one point");
  }
  return absl::OkStatus();
}

absl::StatusOr<NiFlDpResult> NiFlDpCheck(const NeighborRun& run,
                                         double epsilon_budget,
                                         const std::optional<Rational>& delta,
                                         size_t state_ceiling) {
  if (absl::Status s = ValidateNeighborRun(run); !s.ok()) return s;
  absl::StatusOr<KripkeModel> m0 = BuildModel(run.i0, run.run, state_ceiling);
  if (!m0.ok()) return m0.status();
  absl::StatusOr<KripkeModel> m1 = BuildModel(run.i1, run.run, state_ceiling);
  if (!m1.ok()) return m1.status();

  NiFlDpResult result;
  result.d0 = TerminalDistribution(*m0, CurModPar());
  result.d1 = TerminalDistribution(*m1, CurModPar());
  result.report = RealizedEpsilon(result.d0, result.d1, delta);
  result.holds = !result.report.infinite() &&
                 result.report.epsilon <= epsilon_budget + kEpsilonTolerance;
  return result;
}

absl::StatusOr<DecompositionResult> DecompositionCheck(
    const NeighborRun& run, DecompositionMode mode, size_t state_ceiling) {
  const IGraph& g0 = run.i0.igra;
  const IGraph& g1 = run.i1.igra;
  if (g0.clients != g1.clients) {
    return PreconditionViolation("the two runs have different clients");
  }
  std::vector<ActorId> differing;
  for (const ActorId& c : g0.clients) {
    const Dataset& p0 = g0.partition.at(c);
    const Dataset& p1 = g1.partition.at(c);
    bool same = p0 == p1;
    bool neighbors = NeighborsOne(p0, p1);
    if (mode == DecompositionMode::kAllClientsDiffer && !neighbors) {
      return PreconditionViolation(absl::StrCat(
          "client ", c, " partitions do not differ in exactly one point"));
    }
    if (mode == DecompositionMode::kOneClientDiffers && !same) {
      if (!neighbors) {
        return PreconditionViolation(absl::StrCat(
            "client ", c, " partitions differ in more than one point"));
      }
      differing.push_back(c);
    }
  }
  if (mode == DecompositionMode::kOneClientDiffers && differing.size() != 1) {
    return PreconditionViolation(absl::StrCat(
        "expected exactly one differing client, found ", differing.size(),
        differing.empty() ? "" : absl::StrCat(" (second: ", differing[1], ")")));
  }

  absl::StatusOr<KripkeModel> m0 = BuildModel(run.i0, run.run, state_ceiling);
  if (!m0.ok()) return m0.status();
  absl::StatusOr<KripkeModel> m1 = BuildModel(run.i1, run.run, state_ceiling);
  if (!m1.ok()) return m1.status();

  DecompositionResult result;
  double max_local = 0;
  double sum_local = 0;
  for (const ActorId& c : g0.clients) {
    EpsilonReport local =
        RealizedEpsilon(TerminalDistribution(*m0, GradientOf(c)),
                        TerminalDistribution(*m1, GradientOf(c)));
    max_local = std::max(max_local, local.epsilon);
    sum_local += local.epsilon;
    result.per_client.emplace(c, std::move(local));
  }
  result.global = RealizedEpsilon(TerminalDistribution(*m0, CurModPar()),
                                  TerminalDistribution(*m1, CurModPar()));
  result.bound =
      mode == DecompositionMode::kOneClientDiffers ? max_local : sum_local;
  result.bound_holds =
      result.global.epsilon <= result.bound + kEpsilonTolerance;
  return result;
}

}  // namespace fldp
