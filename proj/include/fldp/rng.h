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

// Seeded, splittable randomness with platform-independent output.
//
// The generator is SplitMix64. Every sampled unit of work (one Monte Carlo
// run, one challenge trial) draws from its own stream, seeded with
// StreamSeed(seed, index). Results therefore depend only on (seed, index)
// and never on how work is divided between threads.
//
// Sampling from a rational pmf compares the raw 64-bit draw against the
// exact thresholds floor(cdf * 2^64), so no floating point is involved.

#ifndef FLDP_RNG_H_
#define FLDP_RNG_H_

#include <cstdint>
#include <vector>

#include "fldp/rational.h"

namespace fldp {

class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t Next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). Modulo bias is below n / 2^64.
  uint64_t Below(uint64_t n) { return Next() % n; }

 private:
  uint64_t state_;
};

// Seed of stream `index` under master seed `seed`.
inline uint64_t StreamSeed(uint64_t seed, uint64_t index) {
  SplitMix64 mixer(seed ^ (0xd1b54a32d192ed03ULL * (index + 1)));
  mixer.Next();
  return mixer.Next();
}

// Precomputed inverse-cdf table for a finite rational pmf.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const std::vector<Rational>& probs);

  size_t Sample(SplitMix64& rng) const;

 private:
  // thresholds_[k] = floor(P[X <= k] * 2^64), saturated; the last entry is
  // treated as unbounded.
  std::vector<uint64_t> thresholds_;
};

}  // namespace fldp

#endif  // FLDP_RNG_H_
