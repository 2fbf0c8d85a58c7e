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

#include "fldp/moniteo.h"

#include <chrono>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "fldp/rng.h"

namespace fldp {
namespace {

// Fisher-Yates driven by SplitMix64.
template <typename T>
void Shuffle(std::vector<T>& items, SplitMix64& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = rng.Below(i);
    std::swap(items[i - 1], items[j]);
  }
}

absl::Status CheckInside(const ModelParam& w, const Grid& grid,
                         const std::string& what) {
  for (const Rational& c : w.coords) {
    if (c < grid.lo || c > grid.hi) {
      return absl::InvalidArgumentError(absl::StrCat(
          "grid [", FormatDecimal(grid.lo), ", ", FormatDecimal(grid.hi),
          "] does not contain ", what, " ", ToString(w)));
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status MoniteoConfig::Validate() const {
  if (n_satellites < 1) {
    return absl::InvalidArgumentError("n_satellites must be >= 1");
  }
  if (points_per_satellite < 1) {
    return absl::InvalidArgumentError("points_per_satellite must be >= 1");
  }
  if (noise_amp < 0) return absl::InvalidArgumentError("noise_amp < 0");
  if (secret_fraction < 0 || secret_fraction >= 1) {
    return absl::InvalidArgumentError("secret_fraction must lie in [0, 1)");
  }
  if (!(lat_min < lat_max) || !(lon_min < lon_max)) {
    return absl::InvalidArgumentError("empty location box");
  }
  if (epsilon_budget < 0) {
    return absl::InvalidArgumentError("epsilon_budget must be >= 0");
  }
  RunConfig run{Scheduler::RoundRobin(), LossModel::kLinearRegression,
                learning, defense, mechanism};
  return run.Validate();
}

MoniteoConfig DefaultMoniteoConfig() {
  MoniteoConfig cfg;
  cfg.learning.eta = Rational(3, 128);
  cfg.learning.rounds = 1;
  cfg.learning.grid = Grid{Rational(1, 4), Rational(0), Rational(1, 2)};
  cfg.mechanism = DiscreteLaplace{Rational(3, 4), 2};
  return cfg;
}

std::string SatelliteId(int index) { return absl::StrCat("sat", index); }

absl::StatusOr<Partition> GenerateWorld(const MoniteoConfig& cfg) {
  if (absl::Status s = cfg.Validate(); !s.ok()) return s;
  SplitMix64 rng(cfg.seed);

  const int total = cfg.n_satellites * cfg.points_per_satellite;
  int side = 1;
  while (side * side < total) ++side;
  std::vector<int> cells(side * side);
  std::iota(cells.begin(), cells.end(), 0);
  Shuffle(cells, rng);

  std::vector<int> order(total);
  std::iota(order.begin(), order.end(), 0);
  Shuffle(order, rng);
  mpz_class secrets_z;
  {
    Rational scaled = cfg.secret_fraction * total + Rational(1, 2);
    mpz_fdiv_q(secrets_z.get_mpz_t(), scaled.get_num_mpz_t(),
               scaled.get_den_mpz_t());
  }
  std::vector<bool> secret(total, false);
  for (long k = 0; k < secrets_z.get_si(); ++k) secret[order[k]] = true;

  const Rational lat_cell = (cfg.lat_max - cfg.lat_min) / side;
  const Rational lon_cell = (cfg.lon_max - cfg.lon_min) / side;
  Partition world;
  for (int s = 0; s < cfg.n_satellites; ++s) {
    std::vector<DataPoint> points;
    for (int k = 0; k < cfg.points_per_satellite; ++k) {
      int n = s * cfg.points_per_satellite + k;
      int cell = cells[n];
      DataPoint p;
      p.id = absl::StrCat(SatelliteId(s + 1), "-p", k);
      Rational lat = cfg.lat_min + (Rational(cell / side) + Rational(1, 2)) *
                                       lat_cell;
      Rational lon = cfg.lon_min + (Rational(cell % side) + Rational(1, 2)) *
                                       lon_cell;
      // Perturbation in [-amp, amp] on a 1/1000 lattice of the amplitude.
      Rational u = Ratio(static_cast<long>(rng.Below(2001)) - 1000, 1000);
      p.value = cfg.field_base + cfg.field_lat * lat + cfg.field_lon * lon +
                cfg.noise_amp * u;
      p.secret = secret[n];
      if (p.secret) p.value += cfg.secret_anomaly;
      p.features = {lat, lon};
      points.push_back(std::move(p));
    }
    absl::StatusOr<Dataset> data = Dataset::Create(std::move(points));
    if (!data.ok()) return data.status();
    world.emplace(SatelliteId(s + 1), *std::move(data));
  }
  return world;
}

absl::StatusOr<OmitSecretPair> NeighborPairOmitSecret(
    const Partition& world, const ActorId& target, const MoniteoConfig& cfg) {
  auto it = world.find(target);
  if (it == world.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown satellite ", target));
  }
  const DataPoint* omitted = nullptr;
  for (const auto& [id, p] : it->second) {
    if (p.secret) {
      omitted = &p;
      break;
    }
  }
  if (omitted == nullptr) {
    return absl::NotFoundError(
        absl::StrCat("NoSecretPoint: ", target, " holds no secret reading"));
  }

  Partition reduced = world;
  reduced[target] = it->second.Without(omitted->id);
  ModelParam w0 = ModelParam::Zero(ModelDim(LossModel::kLinearRegression, 2));

  absl::StatusOr<Infrastructure> i0 = MakeInfrastructure("ground", reduced, w0);
  if (!i0.ok()) return i0.status();
  absl::StatusOr<Infrastructure> i1 = MakeInfrastructure("ground", world, w0);
  if (!i1.ok()) return i1.status();

  OmitSecretPair pair;
  pair.run.i0 = *std::move(i0);
  pair.run.i1 = *std::move(i1);
  pair.run.run = RunConfig{Scheduler::RoundRobin(),
                           LossModel::kLinearRegression, cfg.learning,
                           cfg.defense, cfg.mechanism};
  pair.target = target;
  pair.omitted_id = omitted->id;
  return pair;
}

absl::Status ValidateGridCoverage(const NeighborRun& run) {
  const std::optional<Grid>& grid = run.run.learning.grid;
  if (!grid.has_value()) return absl::OkStatus();
  LearningConfig exact = run.run.learning;
  exact.grid.reset();
  for (const Infrastructure* i : {&run.i0, &run.i1}) {
    const IGraph& g = i->igra;
    std::map<ActorId, ModelParam> updates;
    for (const auto& [client, part] : g.partition) {
      absl::StatusOr<ModelParam> w =
          ClientUpdate(run.run.model, exact, g.curmodpar, part,
                       run.run.defense);
      if (!w.ok()) return w.status();
      if (absl::Status s = CheckInside(*w, *grid, "update of " + client);
          !s.ok()) {
        return s;
      }
      updates[client] = Quantize(*w, *grid);
    }
    absl::StatusOr<ModelParam> agg = ServerEval(
        updates, g.partition, static_cast<long>(g.dataset.size()), std::nullopt);
    if (!agg.ok()) return agg.status();
    if (absl::Status s = CheckInside(*agg, *grid, "aggregate"); !s.ok()) {
      return s;
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<MoniteoReport> RunMoniteo(const MoniteoConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  absl::StatusOr<Partition> world = GenerateWorld(cfg);
  if (!world.ok()) return world.status();

  ActorId target;
  if (cfg.target.has_value()) {
    target = *cfg.target;
  } else {
    for (const auto& [sat, data] : *world) {
      for (const auto& [id, p] : data) {
        if (p.secret && target.empty()) target = sat;
      }
    }
    if (target.empty()) {
      return absl::NotFoundError("NoSecretPoint: no satellite holds a secret");
    }
  }
  absl::StatusOr<OmitSecretPair> pair =
      NeighborPairOmitSecret(*world, target, cfg);
  if (!pair.ok()) return pair.status();
  if (absl::Status s = ValidateGridCoverage(pair->run); !s.ok()) return s;

  MoniteoReport report;
  report.target = pair->target;
  report.omitted_id = pair->omitted_id;

  PathDistribution d0, d1;
  absl::StatusOr<KripkeModel> m0 =
      BuildModel(pair->run.i0, pair->run.run, cfg.state_ceiling);
  absl::StatusOr<KripkeModel> m1 =
      m0.ok() ? BuildModel(pair->run.i1, pair->run.run, cfg.state_ceiling)
              : absl::StatusOr<KripkeModel>(m0.status());
  if (m0.ok() && m1.ok()) {
    d0 = TerminalDistribution(*m0, CurModPar());
    d1 = TerminalDistribution(*m1, CurModPar());
    for (const ActorId& sat : m0->states[m0->init].igra.clients) {
      report.per_satellite.emplace(
          sat, RealizedEpsilon(TerminalDistribution(*m0, GradientOf(sat)),
                               TerminalDistribution(*m1, GradientOf(sat))));
    }
  } else {
    const absl::Status& failure = m0.ok() ? m1.status() : m0.status();
    if (failure.code() != absl::StatusCode::kResourceExhausted ||
        !cfg.montecarlo_fallback) {
      return failure;
    }
    report.exact = false;
    absl::StatusOr<PathDistribution> e0 = MonteCarloTerminalDistribution(
        pair->run.i0, pair->run.run, cfg.fallback_samples, cfg.fallback_seed);
    if (!e0.ok()) return e0.status();
    absl::StatusOr<PathDistribution> e1 = MonteCarloTerminalDistribution(
        pair->run.i1, pair->run.run, cfg.fallback_samples,
        cfg.fallback_seed + 1);
    if (!e1.ok()) return e1.status();
    d0 = *std::move(e0);
    d1 = *std::move(e1);
  }

  report.epsilon = RealizedEpsilon(d0, d1);
  report.budget_ok = !report.epsilon.infinite() &&
                     report.epsilon.epsilon <=
                         cfg.epsilon_budget + kEpsilonTolerance;
  absl::StatusOr<AdvantageReport> chain = BoundChain(d0, d1);
  if (chain.ok()) {
    report.advantage = *std::move(chain);
  } else {
    report.advantage = Advantage(BayesOptimal(d0, d1), d0, d1);
  }
  report.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return report;
}

}  // namespace fldp
