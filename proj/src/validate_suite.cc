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

// The oracle suite behind the validate command. Every property compares the
// library against an independent computation on seeded inputs.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "fldp/adversary.h"
#include "fldp/experiment.h"
#include "fldp/kripke.h"
#include "fldp/rng.h"

namespace fldp {
namespace {

constexpr uint64_t kSuiteSeed = 20260101;

struct Check {
  bool pass = true;
  std::string detail;
};

PathDistribution RandomPmf(SplitMix64& rng, size_t outcomes, bool full_support) {
  std::vector<Rational> weights(outcomes);
  Rational total = 0;
  for (Rational& w : weights) {
    w = static_cast<long>(rng.Below(10)) + (full_support ? 1 : 0);
    total += w;
  }
  if (total == 0) {
    weights[0] = 1;
    total = 1;
  }
  for (Rational& w : weights) w /= total;
  return DistributionFromPmf(weights);
}

std::vector<ModelParam> Outcomes(size_t m) {
  std::vector<ModelParam> out;
  for (size_t k = 0; k < m; ++k) out.push_back(ModelParam({Rational(static_cast<long>(k))}));
  return out;
}

Adversary FromMask(const std::vector<ModelParam>& outcomes, uint64_t mask) {
  std::set<ModelParam> ones;
  for (size_t k = 0; k < outcomes.size(); ++k) {
    if (mask >> k & 1) ones.insert(outcomes[k]);
  }
  return GuessOneOn(std::move(ones), "mask");
}

Check IdentitySweep() {
  SplitMix64 rng(kSuiteSeed);
  for (int pair = 0; pair < 200; ++pair) {
    const size_t m = 1 + rng.Below(8);
    PathDistribution d0 = RandomPmf(rng, m, false);
    PathDistribution d1 = RandomPmf(rng, m, false);
    const std::vector<ModelParam> outcomes = Outcomes(m);
    for (int k = 0; k < 20; ++k) {
      AdvantageReport r =
          Advantage(FromMask(outcomes, rng.Next()), d0, d1);
      if (r.advantage != 2 * r.success_prob - 1 || !r.identity_holds) {
        return {false, absl::StrCat("pair ", pair, " adversary ", k)};
      }
    }
  }
  return {true, "200 pairs x 20 adversaries"};
}

Check AdversaryOptimality() {
  SplitMix64 rng(kSuiteSeed + 1);
  for (int pair = 0; pair < 40; ++pair) {
    const size_t m = 1 + rng.Below(10);
    PathDistribution d0 = RandomPmf(rng, m, false);
    PathDistribution d1 = RandomPmf(rng, m, false);
    const std::vector<ModelParam> outcomes = Outcomes(m);
    Rational best = -1;
    for (uint64_t mask = 0; mask < (uint64_t{1} << m); ++mask) {
      Rational adv = Advantage(FromMask(outcomes, mask), d0, d1).advantage;
      if (adv > best) best = adv;
    }
    AdvantageReport bayes = Advantage(BayesOptimal(d0, d1), d0, d1);
    if (best != bayes.advantage || best != TotalVariation(d0, d1)) {
      return {false, absl::StrCat("pair ", pair, ": brute force ",
                                  FormatFraction(best), " vs bayes ",
                                  FormatFraction(bayes.advantage))};
    }
  }
  return {true, "40 pairs, all 2^m adversaries"};
}

Check TightChain() {
  for (const Rational& r : {Rational(3, 2), Rational(2), Rational(3), Rational(10)}) {
    auto pair = TightPair(r);
    if (!pair.ok()) return {false, std::string(pair.status().message())};
    absl::StatusOr<AdvantageReport> chain = BoundChain(pair->first, pair->second);
    if (!chain.ok() || !chain->chain_holds || chain->tv != *chain->tight_bound ||
        *chain->eps_star->exp_epsilon != r) {
      return {false, "tight pair R = " + FormatFraction(r)};
    }
  }
  SplitMix64 rng(kSuiteSeed + 2);
  for (int pair = 0; pair < 100; ++pair) {
    const size_t m = 1 + rng.Below(8);
    absl::StatusOr<AdvantageReport> chain =
        BoundChain(RandomPmf(rng, m, true), RandomPmf(rng, m, true));
    if (!chain.ok() || !chain->chain_holds) {
      return {false, absl::StrCat("random pair ", pair)};
    }
  }
  return {true, "R in {3/2, 2, 3, 10}, 100 random pairs"};
}

// One client, one point, mean estimation: the released model is the point
// value plus clamped noise.
absl::StatusOr<std::pair<PathDistribution, PathDistribution>> NoisyPair() {
  RunConfig run;
  run.learning.grid = Grid{Rational(1), Rational(0), Rational(2)};
  run.mechanism = DiscreteLaplace{Rational(1, 2), 2};
  std::vector<PathDistribution> out;
  for (long value : {1L, 2L}) {
    absl::StatusOr<Dataset> data =
        Dataset::Create({DataPoint{"x", {}, Rational(value), true}});
    if (!data.ok()) return data.status();
    absl::StatusOr<Infrastructure> init =
        MakeInfrastructure("server", {{"c1", *data}}, ModelParam::Zero(1));
    if (!init.ok()) return init.status();
    absl::StatusOr<KripkeModel> m = BuildModel(*init, run);
    if (!m.ok()) return m.status();
    out.push_back(TerminalDistribution(*m, CurModPar()));
  }
  return std::make_pair(out[0], out[1]);
}

Check MediantEventCheck(ValidateFault fault) {
  auto pair = NoisyPair();
  if (!pair.ok()) return {false, std::string(pair.status().message())};
  PathDistribution d0 = pair->first;
  const PathDistribution& d1 = pair->second;
  EpsilonReport eps = RealizedEpsilon(d0, d1);
  if (eps.infinite()) return {false, "noisy pair has infinite epsilon"};
  const Rational bound = *eps.exp_epsilon;

  if (fault == ValidateFault::kPerturbNoisePmf) {
    // Move half the mass of the least likely-under-d0 outcome onto the
    // outcome that attains the bound.
    const OutcomeRatio* low = &eps.per_outcome.front();
    const OutcomeRatio* high = &eps.per_outcome.front();
    for (const OutcomeRatio& r : eps.per_outcome) {
      if (r.p0 * low->p1 < low->p0 * r.p1) low = &r;
      if (r.p0 * high->p1 > high->p0 * r.p1) high = &r;
    }
    Rational moved = d0.Prob(low->outcome) / 2;
    d0.outcomes[low->outcome] -= moved;
    d0.outcomes[high->outcome] += moved;
  }
  absl::StatusOr<size_t> violations =
      CountEventViolations(d0, d1, bound, Rational(0));
  if (!violations.ok()) return {false, std::string(violations.status().message())};
  if (*violations != 0) {
    return {false, absl::StrCat(*violations, " events exceed the singleton bound ",
                                FormatFraction(bound))};
  }
  EpsilonReport swapped = RealizedEpsilon(d1, d0);
  if (swapped.exp_epsilon != eps.exp_epsilon) return {false, "not symmetric"};
  return {true, absl::StrCat("all ", 1 << eps.per_outcome.size(),
                             " events within e^eps = ", FormatFraction(bound))};
}

Check MonteCarloVsExact() {
  RunConfig run;
  run.learning.grid = Grid{Rational(1), Rational(-4), Rational(8)};
  run.mechanism = DiscreteLaplace{Rational(1, 2), 1};
  Partition parts;
  parts["c1"] = *Dataset::Create({DataPoint{"a", {}, 0, false},
                                  DataPoint{"b", {}, 2, false}});
  parts["c2"] = *Dataset::Create({DataPoint{"c", {}, 1, false},
                                  DataPoint{"d", {}, 3, true}});
  absl::StatusOr<Infrastructure> init =
      MakeInfrastructure("server", parts, ModelParam::Zero(1));
  if (!init.ok()) return {false, std::string(init.status().message())};
  absl::StatusOr<KripkeModel> m = BuildModel(*init, run);
  if (!m.ok()) return {false, std::string(m.status().message())};
  PathDistribution exact = TerminalDistribution(*m, CurModPar());
  absl::StatusOr<PathDistribution> sampled =
      MonteCarloTerminalDistribution(*init, run, 100'000, kSuiteSeed);
  if (!sampled.ok()) return {false, std::string(sampled.status().message())};
  const double tv = ToDouble(TotalVariation(exact, *sampled));
  char detail[64];
  std::snprintf(detail, sizeof(detail), "TV = %.5f over 100000 samples", tv);
  return {tv <= 0.012, detail};
}

}  // namespace

CommandResult CmdValidate(ValidateFault fault, std::ostream& out) {
  struct Row {
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Row> rows = {
      {"identity_sweep", IdentitySweep},
      {"adversary_optimality", AdversaryOptimality},
      {"bound_chain", TightChain},
      {"mediant_event_check", [fault] { return MediantEventCheck(fault); }},
      {"montecarlo_vs_exact", MonteCarloVsExact},
  };
  std::vector<std::string> failed;
  for (const Row& row : rows) {
    Check c = row.run();
    char line[160];
    std::snprintf(line, sizeof(line), "%-4s  %-22s %s\n", c.pass ? "PASS" : "FAIL",
                  row.name, c.detail.c_str());
    out << line;
    if (!c.pass) failed.push_back(row.name);
  }
  if (failed.empty()) return {kExitOk, "validate: all properties hold"};
  std::string names;
  for (const std::string& n : failed) names += (names.empty() ? "" : ", ") + n;
  return {kExitViolated, "validate: failed " + names};
}

}  // namespace fldp
