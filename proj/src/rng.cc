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

#include "fldp/rng.h"

#include <limits>

namespace fldp {

DiscreteSampler::DiscreteSampler(const std::vector<Rational>& probs) {
  mpz_class two64 = mpz_class(1) << 64;
  mpz_class max64 = two64 - 1;
  Rational cumulative = 0;
  thresholds_.reserve(probs.size());
  for (const Rational& p : probs) {
    cumulative += p;
    Rational scaled = cumulative * Rational(two64);
    mpz_class floored;
    mpz_fdiv_q(floored.get_mpz_t(), scaled.get_num_mpz_t(),
               scaled.get_den_mpz_t());
    if (floored > max64) floored = max64;
    uint64_t t = 0;
    mpz_export(&t, nullptr, -1, sizeof(t), 0, 0, floored.get_mpz_t());
    thresholds_.push_back(t);
  }
}

size_t DiscreteSampler::Sample(SplitMix64& rng) const {
  uint64_t u = rng.Next();
  for (size_t k = 0; k + 1 < thresholds_.size(); ++k) {
    if (u < thresholds_[k]) return k;
  }
  return thresholds_.empty() ? 0 : thresholds_.size() - 1;
}

}  // namespace fldp
