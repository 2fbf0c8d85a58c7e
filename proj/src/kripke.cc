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

#include "fldp/kripke.h"

#include <algorithm>
#include <deque>
#include <thread>
#include <unordered_map>

#include "absl/strings/str_cat.h"

namespace fldp {
namespace {

void AppendParam(std::string& out, const ModelParam& p) {
  for (const Rational& c : p.coords) {
    out += c.get_str();
    out += ',';
  }
}

// Within one model the initial state is fixed, so the current trace
// determines the whole state.
std::string StateKey(const Infrastructure& s) {
  std::string key;
  for (const Event& e : s.prot.Current().NewestFirst()) {
    if (const auto* put = std::get_if<PutEvent>(&e)) {
      key += "P[";
      for (const auto& [client, data] : put->parts) {
        key += client;
        key += ':';
        for (const auto& [id, p] : data) {
          key += id;
          key += ',';
        }
        key += ';';
      }
      key += ']';
    } else if (const auto* get = std::get_if<GetEvent>(&e)) {
      key += "G[" + get->client + ":";
      AppendParam(key, get->grad);
      key += ']';
    } else {
      key += "E[";
      AppendParam(key, std::get<EvalEvent>(e).newmodel);
      key += ']';
    }
  }
  return key;
}

}  // namespace

Rational PathDistribution::Total() const {
  Rational total = 0;
  for (const auto& [o, p] : outcomes) total += p;
  return total;
}

Rational PathDistribution::Prob(const ModelParam& outcome) const {
  auto it = outcomes.find(outcome);
  return it == outcomes.end() ? Rational(0) : it->second;
}

PathDistribution DistributionFromPmf(const std::vector<Rational>& probs) {
  PathDistribution d;
  for (size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] != 0) {
      d.outcomes[ModelParam({Rational(static_cast<long>(k))})] = probs[k];
    }
  }
  d.trace_count = static_cast<unsigned long>(probs.size());
  return d;
}

std::vector<Rational> KripkeModel::ReachProbabilities() const {
  std::vector<Rational> reach(states.size());
  if (states.empty()) return reach;
  reach[init] = 1;
  for (size_t s = 0; s < states.size(); ++s) {
    if (reach[s] == 0) continue;
    for (const KripkeEdge& e : edges[s]) reach[e.target] += reach[s] * e.prob;
  }
  return reach;
}

std::vector<mpz_class> KripkeModel::PathCounts() const {
  std::vector<mpz_class> count(states.size());
  if (states.empty()) return count;
  count[init] = 1;
  for (size_t s = 0; s < states.size(); ++s) {
    for (const KripkeEdge& e : edges[s]) count[e.target] += count[s];
  }
  return count;
}

mpz_class KripkeModel::MaximalPathCount() const {
  std::vector<mpz_class> count = PathCounts();
  mpz_class total = 0;
  for (size_t t : terminals) total += count[t];
  return total;
}

absl::StatusOr<KripkeModel> BuildModel(const Infrastructure& init,
                                       const RunConfig& run,
                                       size_t state_ceiling) {
  if (absl::Status s = run.Validate(); !s.ok()) return s;
  if (std::vector<std::string> v = ValidateIGraph(init.igra); !v.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("initial igraph invalid: ", v.front()));
  }

  KripkeModel m;
  m.run = run;
  m.init = 0;
  std::unordered_map<std::string, size_t> index;
  std::vector<size_t> depth;

  m.states.push_back(init);
  m.edges.emplace_back();
  depth.push_back(0);
  index.emplace(StateKey(init), 0);

  // BFS discovers states in nondecreasing trace length, and every edge
  // lengthens the trace by one, so discovery order is topological.
  for (size_t s = 0; s < m.states.size(); ++s) {
    absl::StatusOr<std::vector<ProbStep>> steps = Successors(m.states[s], run);
    if (!steps.ok()) return steps.status();
    if (steps->empty()) {
      m.terminals.push_back(s);
      m.max_depth = std::max(m.max_depth, depth[s]);
      continue;
    }
    int choices = 0;
    for (const ProbStep& step : *steps) choices = std::max(choices, step.choice + 1);
    Rational choice_weight(1, choices);

    std::map<size_t, Rational> merged;
    for (ProbStep& step : *steps) {
      std::string key = StateKey(step.next);
      auto [it, inserted] = index.emplace(std::move(key), m.states.size());
      if (inserted) {
        if (m.states.size() >= state_ceiling) {
          return absl::ResourceExhaustedError(absl::StrCat(
              "StateExplosion: more than ", state_ceiling, " states"));
        }
        m.states.push_back(std::move(step.next));
        m.edges.emplace_back();
        depth.push_back(depth[s] + 1);
      }
      merged[it->second] += step.prob * choice_weight;
    }
    for (auto& [target, prob] : merged) {
      m.edges[s].push_back(KripkeEdge{target, std::move(prob)});
    }
  }
  return m;
}

Observable CurModPar() {
  return [](const Infrastructure& s) { return s.igra.curmodpar; };
}

Observable GradientOf(const ActorId& client) {
  return [client](const Infrastructure& s) {
    return s.igra.gradient.at(client);
  };
}

std::vector<KripkePath> PathsInto(const KripkeModel& m,
                                  const StatePredicate& target) {
  std::vector<KripkePath> out;
  if (m.states.empty()) return out;

  struct Frame {
    size_t state;
    size_t next_edge;
    Rational prob;
  };
  std::vector<Frame> stack = {{m.init, 0, Rational(1)}};
  std::vector<size_t> path = {m.init};
  while (!stack.empty()) {
    Frame& top = stack.back();
    const auto& edges = m.edges[top.state];
    if (edges.empty() && top.next_edge == 0) {
      if (target(m.states[top.state])) out.push_back({path, top.prob});
      top.next_edge = 1;
    }
    if (top.next_edge >= edges.size() || edges.empty()) {
      stack.pop_back();
      path.pop_back();
      continue;
    }
    const KripkeEdge& e = edges[top.next_edge++];
    Rational prob = top.prob * e.prob;
    stack.push_back({e.target, 0, std::move(prob)});
    path.push_back(e.target);
  }
  return out;
}

Rational ProbInto(const KripkeModel& m, const StatePredicate& target) {
  std::vector<Rational> reach = m.ReachProbabilities();
  Rational total = 0;
  for (size_t t : m.terminals) {
    if (target(m.states[t])) total += reach[t];
  }
  return total;
}

PathDistribution TerminalDistribution(const KripkeModel& m,
                                      const Observable& observable) {
  std::vector<Rational> reach = m.ReachProbabilities();
  PathDistribution d;
  for (size_t t : m.terminals) {
    if (reach[t] == 0) continue;
    d.outcomes[observable(m.states[t])] += reach[t];
  }
  d.trace_count = m.MaximalPathCount();
  return d;
}

absl::StatusOr<Infrastructure> SampleRun(const Infrastructure& init,
                                         const RunConfig& run,
                                         SplitMix64& rng) {
  Infrastructure state = init;
  while (true) {
    absl::StatusOr<std::vector<ProbStep>> steps = Successors(state, run);
    if (!steps.ok()) return steps.status();
    if (steps->empty()) return state;

    int choices = 0;
    for (const ProbStep& step : *steps) choices = std::max(choices, step.choice + 1);
    int choice = choices > 1 ? static_cast<int>(rng.Below(choices)) : 0;

    std::vector<size_t> members;
    std::vector<Rational> probs;
    for (size_t k = 0; k < steps->size(); ++k) {
      if ((*steps)[k].choice == choice) {
        members.push_back(k);
        probs.push_back((*steps)[k].prob);
      }
    }
    size_t pick = members.size() == 1
                      ? members.front()
                      : members[DiscreteSampler(probs).Sample(rng)];
    state = std::move((*steps)[pick].next);
  }
}

absl::StatusOr<PathDistribution> MonteCarloTerminalDistribution(
    const Infrastructure& init, const RunConfig& run, uint64_t samples,
    uint64_t seed, const Observable& observable, int workers) {
  if (samples == 0) {
    return absl::InvalidArgumentError("samples must be at least 1");
  }
  if (absl::Status s = run.Validate(); !s.ok()) return s;
  workers = std::max(1, workers);

  // Each worker takes a contiguous block of run indices; the counts are
  // summed afterwards, which is order-insensitive.
  std::vector<std::map<ModelParam, uint64_t>> counts(workers);
  std::vector<absl::Status> status(workers);
  auto work = [&](int w) {
    uint64_t begin = samples * w / workers;
    uint64_t end = samples * (w + 1) / workers;
    for (uint64_t k = begin; k < end; ++k) {
      SplitMix64 rng(StreamSeed(seed, k));
      absl::StatusOr<Infrastructure> last = SampleRun(init, run, rng);
      if (!last.ok()) {
        status[w] = last.status();
        return;
      }
      ++counts[w][observable(*last)];
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }

  std::map<ModelParam, uint64_t> total;
  for (int w = 0; w < workers; ++w) {
    if (!status[w].ok()) return status[w];
    for (const auto& [o, c] : counts[w]) total[o] += c;
  }
  PathDistribution d;
  for (const auto& [o, c] : total) {
    d.outcomes[o] = Ratio(mpz_class(static_cast<unsigned long>(c)),
                             mpz_class(static_cast<unsigned long>(samples)));
  }
  d.trace_count = static_cast<unsigned long>(samples);
  return d;
}

Rational TotalVariation(const PathDistribution& a, const PathDistribution& b) {
  Rational sum = 0;
  for (const auto& [o, p] : a.outcomes) sum += abs(p - b.Prob(o));
  for (const auto& [o, q] : b.outcomes) {
    if (!a.outcomes.contains(o)) sum += abs(q);
  }
  return sum / 2;
}

}  // namespace fldp
