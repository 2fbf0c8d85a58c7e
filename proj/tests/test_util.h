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

// Builders and independent reference computations shared by the tests.

#ifndef FLDP_TESTS_TEST_UTIL_H_
#define FLDP_TESTS_TEST_UTIL_H_

#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fldp/core_model.h"
#include "fldp/kripke.h"
#include "fldp/learning.h"
#include "fldp/rational.h"
#include "fldp/rng.h"
#include "fldp/transition.h"

namespace fldp::testing {

inline Rational Q(const char* text) { return *ParseRational(text); }

inline DataPoint Pt(std::string id, Rational value,
                    std::vector<Rational> features = {}, bool secret = false) {
  return DataPoint{std::move(id), std::move(features), std::move(value), secret};
}

inline Dataset Data(std::vector<DataPoint> points) {
  return *Dataset::Create(std::move(points));
}

// Mean-estimation dataset from plain values; ids are prefix0, prefix1, ...
inline Dataset Values(const std::string& prefix,
                      std::initializer_list<long> values) {
  std::vector<DataPoint> points;
  int k = 0;
  for (long v : values) points.push_back(Pt(prefix + std::to_string(k++), v));
  return Data(std::move(points));
}

inline ModelParam M(std::initializer_list<Rational> coords) {
  return ModelParam(std::vector<Rational>(coords));
}

inline Infrastructure Init(const Partition& parts, size_t dim = 1,
                           const ActorId& server = "server") {
  return *MakeInfrastructure(server, parts, ModelParam::Zero(dim));
}

inline RunConfig NoisyRun(const Rational& t, int clamp, Grid grid) {
  RunConfig run;
  run.learning.grid = grid;
  run.mechanism = DiscreteLaplace{t, clamp};
  return run;
}

// Pr[k] = t^|k| (1 - t) / (1 + t - 2 t^(S+1)) on {-S..S}.
inline std::map<int, Rational> ClosedFormNoise(const Rational& t, int s) {
  std::map<int, Rational> pmf;
  Rational tk = 1;
  std::vector<Rational> powers;
  for (int k = 0; k <= s + 1; ++k) {
    powers.push_back(tk);
    tk *= t;
  }
  const Rational norm = (1 - t) / (1 + t - 2 * powers[s + 1]);
  for (int k = -s; k <= s; ++k) pmf[k] = powers[k < 0 ? -k : k] * norm;
  return pmf;
}

// Distribution of clamp(center + k * step) under the closed-form noise.
inline PathDistribution ShiftedNoise(const Rational& center, const Rational& t,
                                     int s, const Grid& grid) {
  PathDistribution d;
  for (const auto& [k, p] : ClosedFormNoise(t, s)) {
    Rational x = center + k * grid.step;
    if (x < grid.lo) x = grid.lo;
    if (x > grid.hi) x = grid.hi;
    d.outcomes[M({x})] += p;
  }
  d.trace_count = static_cast<unsigned long>(2 * s + 1);
  return d;
}

// Random pmf on outcomes 0..m-1 with weights drawn from [lo, lo + 9].
inline PathDistribution RandomPmf(SplitMix64& rng, size_t m, long lo = 0) {
  std::vector<Rational> w(m);
  Rational total = 0;
  for (Rational& x : w) {
    x = static_cast<long>(rng.Below(10)) + lo;
    total += x;
  }
  if (total == 0) {
    w[0] = 1;
    total = 1;
  }
  for (Rational& x : w) x /= total;
  return DistributionFromPmf(w);
}

inline std::vector<ModelParam> OutcomeRange(size_t m) {
  std::vector<ModelParam> out;
  for (size_t k = 0; k < m; ++k) out.push_back(M({Rational(static_cast<long>(k))}));
  return out;
}

// The two-client, two-point, one-dimensional scenario used for the
// Monte Carlo cross-check: client means 1 and 2 on a wide grid.
inline Partition AcceptancePartition() {
  return {{"c1", Values("a", {0, 2})}, {"c2", Values("b", {1, 3})}};
}

inline RunConfig AcceptanceRun() {
  return NoisyRun(Rational(1, 2), 1, Grid{1, -4, 8});
}

}  // namespace fldp::testing

#endif  // FLDP_TESTS_TEST_UTIL_H_
