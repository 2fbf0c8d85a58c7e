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

// Satellite-swarm temperature mapping. Each satellite holds (lat, lon)
// readings of a linear temperature field; some readings sit at secret
// locations. A satellite that omits one secret reading from training should
// not change what an observer of the aggregated model can tell.

#ifndef FLDP_MONITEO_H_
#define FLDP_MONITEO_H_

#include <cstdint>
#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "fldp/adversary.h"
#include "fldp/core_model.h"
#include "fldp/learning.h"
#include "fldp/privacy.h"

namespace fldp {

struct MoniteoConfig {
  int n_satellites = 2;
  int points_per_satellite = 3;

  // Temperature field in degrees C: base + a * lat + b * lon.
  Rational field_base = 10;
  Rational field_lat = Rational(1, 2);
  Rational field_lon = Rational(-1, 2);
  // Readings are perturbed uniformly within +-noise_amp.
  Rational noise_amp = Rational(1, 10);
  // Extra heat at secret locations.
  Rational secret_anomaly = 10;
  // Fraction of all readings that are secret, rounded to the nearest count.
  Rational secret_fraction = Rational(1, 3);

  // Sampling box for the locations.
  Rational lat_min = 0;
  Rational lat_max = 1;
  Rational lon_min = 0;
  Rational lon_max = 1;

  uint64_t seed = 2024;

  LearningConfig learning;
  NoiseMechanism mechanism = NoNoise{};
  DefenseTransform defense = IdentityDefense{};
  double epsilon_budget = 1.0;

  // Satellite whose secret reading is omitted; the first satellite holding
  // a secret when unset.
  std::optional<ActorId> target;

  size_t state_ceiling = kDefaultStateCeiling;
  // Monte Carlo fallback when exact enumeration exceeds the ceiling.
  bool montecarlo_fallback = true;
  uint64_t fallback_samples = 100'000;
  uint64_t fallback_seed = 7;

  absl::Status Validate() const;
};

// The default desk-scale mission: 2 satellites x 3 readings, linear
// regression on (lat, lon), one round, grid step 1/4, clamp 2.
MoniteoConfig DefaultMoniteoConfig();

std::string SatelliteId(int index);

// Deterministic in cfg.seed.
absl::StatusOr<Partition> GenerateWorld(const MoniteoConfig& cfg);

struct OmitSecretPair {
  NeighborRun run;
  ActorId target;
  std::string omitted_id;
};

// i1 holds the whole world, i0 lacks the target's lowest-id secret point.
absl::StatusOr<OmitSecretPair> NeighborPairOmitSecret(
    const Partition& world, const ActorId& target, const MoniteoConfig& cfg);

// Checks that every noiseless client update and aggregate, for both
// datasets, lies inside the grid before clamping.
absl::Status ValidateGridCoverage(const NeighborRun& run);

struct MoniteoReport {
  EpsilonReport epsilon;
  AdvantageReport advantage;
  bool budget_ok = false;
  int64_t runtime_ms = 0;
  bool exact = true;
  ActorId target;
  std::string omitted_id;
  // Per-satellite factors of the released gradients (exact mode only).
  std::map<ActorId, EpsilonReport> per_satellite;
};

absl::StatusOr<MoniteoReport> RunMoniteo(const MoniteoConfig& cfg);

}  // namespace fldp

#endif  // FLDP_MONITEO_H_
