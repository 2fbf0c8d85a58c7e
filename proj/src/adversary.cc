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

#include <algorithm>
#include <map>
#include <thread>

#include "absl/strings/str_cat.h"

namespace fldp {
namespace {

Rational GuessOneMass(const Adversary& a, const PathDistribution& d) {
  Rational mass = 0;
  for (const auto& [o, p] : d.outcomes) {
    if (a.decide(o) == 1) mass += p;
  }
  return mass;
}

}  // namespace

Adversary GuessOneOn(std::set<ModelParam> ones, std::string description) {
  auto shared = std::make_shared<const std::set<ModelParam>>(std::move(ones));
  return {[shared](const ModelParam& o) { return shared->contains(o) ? 1 : 0; },
          std::move(description)};
}

Adversary ConstantAdversary(int bit) {
  return {[bit](const ModelParam&) { return bit; },
          absl::StrCat("constant ", bit)};
}

Adversary Complement(const Adversary& a) {
  auto decide = a.decide;
  return {[decide](const ModelParam& o) { return 1 - decide(o); },
          absl::StrCat("not(", a.description, ")")};
}

AdvantageReport Advantage(const Adversary& a, const PathDistribution& d0,
                          const PathDistribution& d1) {
  AdvantageReport r;
  Rational one_given_0 = GuessOneMass(a, d0);
  Rational one_given_1 = GuessOneMass(a, d1);
  r.advantage = one_given_1 - one_given_0;
  Rational zero_given_0 = d0.Total() - one_given_0;
  r.success_prob = (zero_given_0 + one_given_1) / 2;
  r.tv = TotalVariation(d0, d1);
  r.identity_holds = r.advantage == 2 * r.success_prob - 1;
  return r;
}

Adversary BayesOptimal(const PathDistribution& d0,
                       const PathDistribution& d1) {
  std::set<ModelParam> ones;
  for (const auto& [o, p1] : d1.outcomes) {
    if (p1 > d0.Prob(o)) ones.insert(o);
  }
  return GuessOneOn(std::move(ones), "bayes-optimal");
}

absl::StatusOr<AdvantageReport> BoundChain(const PathDistribution& d0,
                                           const PathDistribution& d1) {
  EpsilonReport eps = RealizedEpsilon(d0, d1);
  if (eps.infinite()) {
    return absl::OutOfRangeError(
        "InfiniteEpsilon: the supports differ, every bound is vacuous");
  }
  AdvantageReport r = Advantage(BayesOptimal(d0, d1), d0, d1);
  const Rational& ratio = *eps.exp_epsilon;
  r.tight_bound = (ratio - 1) / (ratio + 1);
  r.loose_bound = 1 - 1 / ratio;
  r.chain_holds = r.tv <= *r.tight_bound && *r.tight_bound <= *r.loose_bound &&
                  *r.loose_bound <= 1;
  r.eps_star = std::move(eps);
  return r;
}

absl::StatusOr<std::pair<PathDistribution, PathDistribution>> TightPair(
    const Rational& ratio) {
  if (ratio <= 1) {
    return absl::InvalidArgumentError("tight pair needs a ratio above 1");
  }
  Rational high = ratio / (1 + ratio);
  Rational low = 1 / (1 + ratio);
  return std::make_pair(DistributionFromPmf({high, low}),
                        DistributionFromPmf({low, high}));
}

bool SymmetricFor(const Adversary& a, const PathDistribution& d0,
                  const PathDistribution& d1) {
  return d0.Total() - GuessOneMass(a, d0) == GuessOneMass(a, d1);
}

absl::StatusOr<ChallengeResult> ChallengeExperiment(
    const WorldSampler& sample, const Adversary& a, uint64_t trials,
    uint64_t seed, uint64_t block_size, int workers) {
  if (trials == 0) return absl::InvalidArgumentError("trials must be >= 1");
  if (block_size == 0) block_size = trials;
  workers = std::max(1, workers);

  std::vector<uint8_t> hit(trials, 0);
  std::vector<absl::Status> status(workers);
  auto work = [&](int w) {
    uint64_t begin = trials * w / workers;
    uint64_t end = trials * (w + 1) / workers;
    for (uint64_t k = begin; k < end; ++k) {
      SplitMix64 rng(StreamSeed(seed, k));
      int b = static_cast<int>(rng.Next() & 1);
      absl::StatusOr<ModelParam> seen = sample(b, rng);
      if (!seen.ok()) {
        status[w] = seen.status();
        return;
      }
      hit[k] = a.decide(*seen) == b ? 1 : 0;
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  for (const absl::Status& s : status) {
    if (!s.ok()) return s;
  }

  ChallengeResult result;
  result.trials = trials;
  for (uint64_t start = 0; start < trials; start += block_size) {
    ChallengeBlock block;
    block.block = start / block_size;
    for (uint64_t k = start; k < std::min(trials, start + block_size); ++k) {
      block.successes += hit[k];
      ++block.trials;
    }
    block.advantage_estimate =
        2.0 * static_cast<double>(block.successes) / block.trials - 1.0;
    result.successes += block.successes;
    result.blocks.push_back(block);
  }
  result.success_prob = static_cast<double>(result.successes) / trials;
  result.advantage = 2.0 * result.success_prob - 1.0;
  return result;
}

absl::StatusOr<ChallengeResult> ChallengeExperiment(
    const NeighborRun& run, const Adversary& a, uint64_t trials,
    uint64_t seed, uint64_t block_size, int workers) {
  if (absl::Status s = run.run.Validate(); !s.ok()) return s;
  WorldSampler sample = [&run](int b,
                               SplitMix64& rng) -> absl::StatusOr<ModelParam> {
    absl::StatusOr<Infrastructure> last =
        SampleRun(b == 0 ? run.i0 : run.i1, run.run, rng);
    if (!last.ok()) return last.status();
    return last->igra.curmodpar;
  };
  return ChallengeExperiment(sample, a, trials, seed, block_size, workers);
}

absl::StatusOr<ChallengeResult> ChallengeExperiment(
    const PathDistribution& d0, const PathDistribution& d1,
    const Adversary& a, uint64_t trials, uint64_t seed, uint64_t block_size,
    int workers) {
  struct World {
    std::vector<ModelParam> outcomes;
    std::vector<Rational> probs;
  };
  auto flatten = [](const PathDistribution& d) {
    World w;
    for (const auto& [o, p] : d.outcomes) {
      w.outcomes.push_back(o);
      w.probs.push_back(p);
    }
    return w;
  };
  World w0 = flatten(d0);
  World w1 = flatten(d1);
  if (w0.outcomes.empty() || w1.outcomes.empty()) {
    return absl::InvalidArgumentError("distributions must be nonempty");
  }
  DiscreteSampler s0(w0.probs);
  DiscreteSampler s1(w1.probs);
  WorldSampler sample = [&](int b,
                            SplitMix64& rng) -> absl::StatusOr<ModelParam> {
    return b == 0 ? w0.outcomes[s0.Sample(rng)] : w1.outcomes[s1.Sample(rng)];
  };
  return ChallengeExperiment(sample, a, trials, seed, block_size, workers);
}

}  // namespace fldp
