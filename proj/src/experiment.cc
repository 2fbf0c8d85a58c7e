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

#include "fldp/experiment.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "fldp/adversary.h"
#include "fldp/kripke.h"

namespace fldp {
namespace {

absl::Status Bad(const std::string& where, const std::string& what) {
  return absl::InvalidArgumentError(absl::StrCat(where, ": ", what));
}

absl::Status CheckKeys(const Json& j, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  if (!j.is_object()) return Bad(where, "expected an object");
  std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) return Bad(where, "unknown key \"" + key + "\"");
  }
  return absl::OkStatus();
}

absl::StatusOr<int64_t> GetInt(const Json& j, const char* key,
                               const std::string& where, int64_t fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j[key];
  if (!v.is_number_integer()) return Bad(where, absl::StrCat(key, " must be an integer"));
  return v.get<int64_t>();
}

absl::StatusOr<uint64_t> GetCount(const Json& j, const char* key,
                                  const std::string& where, uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j[key];
  if (!v.is_number_unsigned()) {
    return Bad(where, absl::StrCat(key, " must be a nonnegative integer"));
  }
  return v.get<uint64_t>();
}

absl::StatusOr<Rational> GetRational(const Json& j, const char* key,
                                     const std::string& where,
                                     const Rational& fallback) {
  if (!j.contains(key)) return fallback;
  absl::StatusOr<Rational> r = RationalFromJson(j[key]);
  if (!r.ok()) return Bad(absl::StrCat(where, ".", key), std::string(r.status().message()));
  return *r;
}

absl::StatusOr<std::string> GetKind(const Json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    return Bad(where, "expected an object with a string \"kind\"");
  }
  return j["kind"].get<std::string>();
}

absl::StatusOr<LearningConfig> ParseLearning(const Json& j,
                                             LearningConfig cfg) {
  const std::string where = "learning";
  if (absl::Status s =
          CheckKeys(j, where, {"eta", "rounds", "local_epochs", "grid"});
      !s.ok()) {
    return s;
  }
  absl::StatusOr<Rational> eta = GetRational(j, "eta", where, cfg.eta);
  if (!eta.ok()) return eta.status();
  cfg.eta = *eta;
  absl::StatusOr<int64_t> rounds = GetInt(j, "rounds", where, cfg.rounds);
  if (!rounds.ok()) return rounds.status();
  cfg.rounds = static_cast<int>(*rounds);
  absl::StatusOr<int64_t> epochs =
      GetInt(j, "local_epochs", where, cfg.local_epochs);
  if (!epochs.ok()) return epochs.status();
  cfg.local_epochs = static_cast<int>(*epochs);
  if (j.contains("grid")) {
    const Json& g = j["grid"];
    if (g.is_null()) {
      cfg.grid.reset();
    } else {
      if (absl::Status s = CheckKeys(g, "learning.grid", {"step", "lo", "hi"});
          !s.ok()) {
        return s;
      }
      for (const char* key : {"step", "lo", "hi"}) {
        if (!g.contains(key)) return Bad("learning.grid", absl::StrCat("missing ", key));
      }
      Grid grid;
      absl::StatusOr<Rational> step = GetRational(g, "step", "learning.grid", 0);
      absl::StatusOr<Rational> lo = GetRational(g, "lo", "learning.grid", 0);
      absl::StatusOr<Rational> hi = GetRational(g, "hi", "learning.grid", 0);
      for (const auto* r : {&step, &lo, &hi}) {
        if (!r->ok()) return r->status();
      }
      grid.step = *step;
      grid.lo = *lo;
      grid.hi = *hi;
      cfg.grid = grid;
    }
  }
  return cfg;
}

absl::StatusOr<NoiseMechanism> ParseMechanism(const Json& j) {
  absl::StatusOr<std::string> kind = GetKind(j, "mechanism");
  if (!kind.ok()) return kind.status();
  if (*kind == "none") {
    if (absl::Status s = CheckKeys(j, "mechanism", {"kind"}); !s.ok()) return s;
    return NoNoise{};
  }
  if (*kind == "discrete_laplace") {
    if (absl::Status s =
            CheckKeys(j, "mechanism", {"kind", "t", "clamp_steps"});
        !s.ok()) {
      return s;
    }
    if (!j.contains("t")) return Bad("mechanism", "discrete_laplace needs t");
    absl::StatusOr<Rational> t = GetRational(j, "t", "mechanism", 0);
    if (!t.ok()) return t.status();
    absl::StatusOr<int64_t> clamp = GetInt(j, "clamp_steps", "mechanism", 1);
    if (!clamp.ok()) return clamp.status();
    return DiscreteLaplace{*t, static_cast<int>(*clamp)};
  }
  return Bad("mechanism", "unknown kind \"" + *kind + "\"");
}

absl::StatusOr<DefenseTransform> ParseDefense(const Json& j) {
  absl::StatusOr<std::string> kind = GetKind(j, "defense");
  if (!kind.ok()) return kind.status();
  if (*kind == "identity") {
    if (absl::Status s = CheckKeys(j, "defense", {"kind"}); !s.ok()) return s;
    return IdentityDefense{};
  }
  if (*kind == "sparsify_top_k") {
    if (absl::Status s = CheckKeys(j, "defense", {"kind", "k"}); !s.ok()) return s;
    absl::StatusOr<int64_t> k = GetInt(j, "k", "defense", 1);
    if (!k.ok()) return k.status();
    return SparsifyTopK{static_cast<int>(*k)};
  }
  if (*kind == "pseudo_gradient") {
    if (absl::Status s = CheckKeys(j, "defense", {"kind", "epochs"}); !s.ok()) {
      return s;
    }
    absl::StatusOr<int64_t> e = GetInt(j, "epochs", "defense", 1);
    if (!e.ok()) return e.status();
    return PseudoGradient{static_cast<int>(*e)};
  }
  return Bad("defense", "unknown kind \"" + *kind + "\"");
}

absl::StatusOr<Scheduler> ParseScheduler(const Json& j) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "round_robin") return Scheduler::RoundRobin();
    if (name == "full_nondeterminism") return Scheduler::FullNondeterminism();
    return Bad("scheduler", "unknown policy \"" + name + "\"");
  }
  if (j.is_object() && j.contains("fixed_order") && j.size() == 1 &&
      j["fixed_order"].is_array()) {
    std::vector<ActorId> order;
    for (const Json& c : j["fixed_order"]) {
      if (!c.is_string()) return Bad("scheduler", "fixed_order holds client ids");
      order.push_back(c.get<std::string>());
    }
    return Scheduler::FixedOrder(std::move(order));
  }
  return Bad("scheduler",
             "expected \"round_robin\", \"full_nondeterminism\" or "
             "{\"fixed_order\": [...]}");
}

absl::StatusOr<RunMode> ParseMode(const Json& j) {
  absl::StatusOr<std::string> kind = GetKind(j, "mode");
  if (!kind.ok()) return kind.status();
  if (*kind == "exact") {
    if (absl::Status s = CheckKeys(j, "mode", {"kind", "state_ceiling"});
        !s.ok()) {
      return s;
    }
    absl::StatusOr<uint64_t> ceiling =
        GetCount(j, "state_ceiling", "mode", kDefaultStateCeiling);
    if (!ceiling.ok()) return ceiling.status();
    return ExactMode{static_cast<size_t>(*ceiling)};
  }
  if (*kind == "montecarlo") {
    if (absl::Status s = CheckKeys(j, "mode", {"kind", "samples", "seed"});
        !s.ok()) {
      return s;
    }
    absl::StatusOr<uint64_t> samples = GetCount(j, "samples", "mode", 100'000);
    if (!samples.ok()) return samples.status();
    absl::StatusOr<uint64_t> seed = GetCount(j, "seed", "mode", 1);
    if (!seed.ok()) return seed.status();
    return MonteCarloMode{*samples, *seed};
  }
  return Bad("mode", "unknown kind \"" + *kind + "\"");
}

absl::StatusOr<LossModel> ParseLoss(const Json& j) {
  if (j.is_string()) {
    if (j == "mean_estimation") return LossModel::kMeanEstimation;
    if (j == "linear_regression") return LossModel::kLinearRegression;
  }
  return Bad("scenario.loss",
             "expected \"mean_estimation\" or \"linear_regression\"");
}

absl::StatusOr<ModelParam> ParseModel(const Json& j, const std::string& where) {
  if (!j.is_array()) return Bad(where, "expected an array of coordinates");
  ModelParam w;
  for (const Json& c : j) {
    absl::StatusOr<Rational> r = RationalFromJson(c);
    if (!r.ok()) return Bad(where, std::string(r.status().message()));
    w.coords.push_back(*r);
  }
  return w;
}

absl::StatusOr<CustomScenario> ParseCustom(const Json& j) {
  if (absl::Status s = CheckKeys(j, "scenario",
                                 {"kind", "server", "loss", "initial_model",
                                  "partitions", "neighbor_partitions"});
      !s.ok()) {
    return s;
  }
  CustomScenario sc;
  if (j.contains("server")) {
    if (!j["server"].is_string()) return Bad("scenario.server", "expected a string");
    sc.server = j["server"].get<std::string>();
  }
  if (j.contains("loss")) {
    absl::StatusOr<LossModel> loss = ParseLoss(j["loss"]);
    if (!loss.ok()) return loss.status();
    sc.loss = *loss;
  }
  if (j.contains("initial_model")) {
    absl::StatusOr<ModelParam> w =
        ParseModel(j["initial_model"], "scenario.initial_model");
    if (!w.ok()) return w.status();
    sc.initial_model = *std::move(w);
  }
  if (!j.contains("partitions")) return Bad("scenario", "custom needs partitions");
  absl::StatusOr<Partition> parts = PartitionFromJson(j["partitions"]);
  if (!parts.ok()) return Bad("scenario.partitions", std::string(parts.status().message()));
  sc.partitions = *std::move(parts);
  if (j.contains("neighbor_partitions")) {
    absl::StatusOr<Partition> other = PartitionFromJson(j["neighbor_partitions"]);
    if (!other.ok()) {
      return Bad("scenario.neighbor_partitions",
                 std::string(other.status().message()));
    }
    sc.neighbor_partitions = *std::move(other);
  }
  return sc;
}

absl::StatusOr<MoniteoScenario> ParseMoniteo(const Json& j) {
  if (absl::Status s = CheckKeys(
          j, "scenario",
          {"kind", "n_satellites", "points_per_satellite", "field_base",
           "field_lat", "field_lon", "noise_amp", "secret_anomaly",
           "secret_fraction", "seed", "target", "montecarlo_fallback",
           "fallback_samples", "fallback_seed"});
      !s.ok()) {
    return s;
  }
  MoniteoConfig cfg = DefaultMoniteoConfig();
  const std::string where = "scenario";
  absl::StatusOr<int64_t> n = GetInt(j, "n_satellites", where, cfg.n_satellites);
  if (!n.ok()) return n.status();
  cfg.n_satellites = static_cast<int>(*n);
  absl::StatusOr<int64_t> per =
      GetInt(j, "points_per_satellite", where, cfg.points_per_satellite);
  if (!per.ok()) return per.status();
  cfg.points_per_satellite = static_cast<int>(*per);
  struct Field {
    const char* key;
    Rational* slot;
  };
  for (const Field& f : {Field{"field_base", &cfg.field_base},
                         Field{"field_lat", &cfg.field_lat},
                         Field{"field_lon", &cfg.field_lon},
                         Field{"noise_amp", &cfg.noise_amp},
                         Field{"secret_anomaly", &cfg.secret_anomaly},
                         Field{"secret_fraction", &cfg.secret_fraction}}) {
    absl::StatusOr<Rational> r = GetRational(j, f.key, where, *f.slot);
    if (!r.ok()) return r.status();
    *f.slot = *r;
  }
  absl::StatusOr<uint64_t> seed = GetCount(j, "seed", where, cfg.seed);
  if (!seed.ok()) return seed.status();
  cfg.seed = *seed;
  if (j.contains("target")) {
    if (!j["target"].is_string()) return Bad("scenario.target", "expected a string");
    cfg.target = j["target"].get<std::string>();
  }
  if (j.contains("montecarlo_fallback")) {
    if (!j["montecarlo_fallback"].is_boolean()) {
      return Bad("scenario.montecarlo_fallback", "expected a boolean");
    }
    cfg.montecarlo_fallback = j["montecarlo_fallback"].get<bool>();
  }
  absl::StatusOr<uint64_t> fs =
      GetCount(j, "fallback_samples", where, cfg.fallback_samples);
  if (!fs.ok()) return fs.status();
  cfg.fallback_samples = *fs;
  absl::StatusOr<uint64_t> fseed =
      GetCount(j, "fallback_seed", where, cfg.fallback_seed);
  if (!fseed.ok()) return fseed.status();
  cfg.fallback_seed = *fseed;
  return MoniteoScenario{cfg};
}

absl::StatusOr<PairScenario> ParsePair(const Json& j) {
  if (absl::Status s = CheckKeys(j, "scenario", {"kind", "tight_ratio", "d0", "d1"});
      !s.ok()) {
    return s;
  }
  if (j.contains("tight_ratio")) {
    if (j.contains("d0") || j.contains("d1")) {
      return Bad("scenario", "give either tight_ratio or d0 and d1");
    }
    absl::StatusOr<Rational> r = GetRational(j, "tight_ratio", "scenario", 0);
    if (!r.ok()) return r.status();
    auto pair = TightPair(*r);
    if (!pair.ok()) return Bad("scenario.tight_ratio", std::string(pair.status().message()));
    return PairScenario{pair->first, pair->second};
  }
  if (!j.contains("d0") || !j.contains("d1")) {
    return Bad("scenario", "pair needs tight_ratio or both d0 and d1");
  }
  absl::StatusOr<PathDistribution> d0 = DistributionFromJson(j["d0"]);
  if (!d0.ok()) return Bad("scenario.d0", std::string(d0.status().message()));
  absl::StatusOr<PathDistribution> d1 = DistributionFromJson(j["d1"]);
  if (!d1.ok()) return Bad("scenario.d1", std::string(d1.status().message()));
  return PairScenario{*std::move(d0), *std::move(d1)};
}

absl::StatusOr<Scenario> ParseScenario(const Json& j) {
  absl::StatusOr<std::string> kind = GetKind(j, "scenario");
  if (!kind.ok()) return kind.status();
  if (*kind == "custom") {
    absl::StatusOr<CustomScenario> s = ParseCustom(j);
    if (!s.ok()) return s.status();
    return Scenario(*std::move(s));
  }
  if (*kind == "moniteo") {
    absl::StatusOr<MoniteoScenario> s = ParseMoniteo(j);
    if (!s.ok()) return s.status();
    return Scenario(*std::move(s));
  }
  if (*kind == "pair") {
    absl::StatusOr<PairScenario> s = ParsePair(j);
    if (!s.ok()) return s.status();
    return Scenario(*std::move(s));
  }
  return Bad("scenario", "unknown kind \"" + *kind + "\"");
}

struct Pair {
  PathDistribution d0;
  PathDistribution d1;
  bool exact = true;
};

uint64_t CeilingOf(const RunMode& mode) {
  return std::get<ExactMode>(mode).state_ceiling;
}

absl::StatusOr<NeighborRun> MakeNeighborRun(const ExperimentConfig& cfg) {
  if (const auto* custom = std::get_if<CustomScenario>(&cfg.scenario)) {
    if (!custom->neighbor_partitions.has_value()) {
      return Bad("scenario", "this command needs neighbor_partitions");
    }
    absl::StatusOr<Infrastructure> i0 = MakeInfrastructure(
        custom->server, custom->partitions, *custom->initial_model);
    if (!i0.ok()) return Bad("scenario.partitions", std::string(i0.status().message()));
    absl::StatusOr<Infrastructure> i1 = MakeInfrastructure(
        custom->server, *custom->neighbor_partitions, *custom->initial_model);
    if (!i1.ok()) {
      return Bad("scenario.neighbor_partitions",
                 std::string(i1.status().message()));
    }
    return NeighborRun{*std::move(i0), *std::move(i1), cfg.run};
  }
  const auto& moniteo = std::get<MoniteoScenario>(cfg.scenario).config;
  absl::StatusOr<Partition> world = GenerateWorld(moniteo);
  if (!world.ok()) return world.status();
  ActorId target;
  if (moniteo.target.has_value()) {
    target = *moniteo.target;
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
      NeighborPairOmitSecret(*world, target, moniteo);
  if (!pair.ok()) return pair.status();
  pair->run.run = cfg.run;
  if (absl::Status s = ValidateGridCoverage(pair->run); !s.ok()) return s;
  return pair->run;
}

absl::StatusOr<Pair> Sample(const NeighborRun& run, uint64_t samples,
                            uint64_t seed) {
  const int workers = WorkersFromEnv();
  absl::StatusOr<PathDistribution> d0 = MonteCarloTerminalDistribution(
      run.i0, run.run, samples, seed, CurModPar(), workers);
  if (!d0.ok()) return d0.status();
  absl::StatusOr<PathDistribution> d1 = MonteCarloTerminalDistribution(
      run.i1, run.run, samples, seed + 1, CurModPar(), workers);
  if (!d1.ok()) return d1.status();
  return Pair{*std::move(d0), *std::move(d1), false};
}

absl::StatusOr<Pair> ComputePair(const ExperimentConfig& cfg) {
  if (const auto* pair = std::get_if<PairScenario>(&cfg.scenario)) {
    return Pair{pair->d0, pair->d1, true};
  }
  absl::StatusOr<NeighborRun> run = MakeNeighborRun(cfg);
  if (!run.ok()) return run.status();
  if (absl::Status s = ValidateNeighborRun(*run); !s.ok()) return s;
  if (const auto* mc = std::get_if<MonteCarloMode>(&cfg.mode)) {
    return Sample(*run, mc->samples, mc->seed);
  }
  const size_t ceiling = CeilingOf(cfg.mode);
  absl::StatusOr<KripkeModel> m0 = BuildModel(run->i0, run->run, ceiling);
  absl::StatusOr<KripkeModel> m1 =
      m0.ok() ? BuildModel(run->i1, run->run, ceiling)
              : absl::StatusOr<KripkeModel>(m0.status());
  if (!m1.ok()) {
    const auto* moniteo = std::get_if<MoniteoScenario>(&cfg.scenario);
    if (m1.status().code() == absl::StatusCode::kResourceExhausted &&
        moniteo != nullptr && moniteo->config.montecarlo_fallback) {
      return Sample(*run, moniteo->config.fallback_samples,
                    moniteo->config.fallback_seed);
    }
    return m1.status();
  }
  return Pair{TerminalDistribution(*m0, CurModPar()),
              TerminalDistribution(*m1, CurModPar()), true};
}

absl::Status WriteFile(const std::string& dir, const std::string& name,
                       const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot create ", dir, ": ", ec.message()));
  }
  const std::filesystem::path path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot write ", path.string()));
  }
  return absl::OkStatus();
}

absl::Status WriteJson(const std::string& dir, const std::string& name,
                       const Json& j) {
  return WriteFile(dir, name, j.dump(2) + "\n");
}

CommandResult Failure(const absl::Status& status) {
  return {ExitCodeFor(status), std::string(status.message())};
}

std::string EpsilonText(const EpsilonReport& r) {
  if (r.infinite()) return "inf";
  std::ostringstream out;
  out.precision(12);
  out << r.epsilon;
  return out.str();
}

bool WithinBudget(const EpsilonReport& r, double budget) {
  return !r.infinite() && r.epsilon <= budget + kEpsilonTolerance;
}

}  // namespace

absl::Status ExperimentConfig::Validate() const {
  if (const auto* mc = std::get_if<MonteCarloMode>(&mode)) {
    if (mc->samples < 1) return Bad("mode", "montecarlo requires samples >= 1");
  } else if (std::get<ExactMode>(mode).state_ceiling < 1) {
    return Bad("mode", "exact requires a state ceiling >= 1");
  }
  if (!(epsilon_budget >= 0)) return Bad("epsilon_budget", "must be >= 0");
  if (delta.has_value() && (*delta < 0 || *delta >= 1)) {
    return Bad("delta", "must lie in [0, 1)");
  }
  if (challenge.trials < 1 || challenge.block_size < 1) {
    return Bad("challenge", "trials and block_size must be >= 1");
  }
  if (const auto* m = std::get_if<MoniteoScenario>(&scenario)) {
    if (absl::Status s = m->config.Validate(); !s.ok()) {
      return Bad("scenario", std::string(s.message()));
    }
  }
  if (absl::Status s = run.Validate(); !s.ok()) {
    return Bad("run", std::string(s.message()));
  }
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(const Json& j) {
  if (absl::Status s = CheckKeys(
          j, "config",
          {"schema_version", "scenario", "learning", "mechanism", "defense",
           "scheduler", "epsilon_budget", "delta", "mode",
           "decomposition_mode", "challenge", "output_dir"});
      !s.ok()) {
    return s;
  }
  if (!j.contains("schema_version") || j["schema_version"] != kSchemaVersion) {
    return Bad("config", absl::StrCat("schema_version must be ", kSchemaVersion));
  }
  if (!j.contains("scenario")) return Bad("config", "missing scenario");

  ExperimentConfig cfg;
  absl::StatusOr<Scenario> scenario = ParseScenario(j["scenario"]);
  if (!scenario.ok()) return scenario.status();
  cfg.scenario = *std::move(scenario);

  // The mission defaults seed the learning setup of a moniteo scenario.
  auto* moniteo = std::get_if<MoniteoScenario>(&cfg.scenario);
  if (moniteo != nullptr) {
    cfg.run.model = LossModel::kLinearRegression;
    cfg.run.learning = moniteo->config.learning;
    cfg.run.mechanism = moniteo->config.mechanism;
    cfg.run.defense = moniteo->config.defense;
    cfg.epsilon_budget = moniteo->config.epsilon_budget;
  }
  if (j.contains("learning")) {
    absl::StatusOr<LearningConfig> l = ParseLearning(j["learning"], cfg.run.learning);
    if (!l.ok()) return l.status();
    cfg.run.learning = *l;
  }
  if (j.contains("mechanism")) {
    absl::StatusOr<NoiseMechanism> m = ParseMechanism(j["mechanism"]);
    if (!m.ok()) return m.status();
    cfg.run.mechanism = *m;
  }
  if (j.contains("defense")) {
    absl::StatusOr<DefenseTransform> d = ParseDefense(j["defense"]);
    if (!d.ok()) return d.status();
    cfg.run.defense = *d;
  }
  if (j.contains("scheduler")) {
    absl::StatusOr<Scheduler> s = ParseScheduler(j["scheduler"]);
    if (!s.ok()) return s.status();
    cfg.run.scheduler = *std::move(s);
  }
  if (j.contains("epsilon_budget")) {
    if (!j["epsilon_budget"].is_number()) {
      return Bad("epsilon_budget", "expected a number");
    }
    cfg.epsilon_budget = j["epsilon_budget"].get<double>();
  }
  if (j.contains("delta") && !j["delta"].is_null()) {
    absl::StatusOr<Rational> d = RationalFromJson(j["delta"]);
    if (!d.ok()) return Bad("delta", std::string(d.status().message()));
    cfg.delta = *d;
  }
  if (j.contains("mode")) {
    absl::StatusOr<RunMode> mode = ParseMode(j["mode"]);
    if (!mode.ok()) return mode.status();
    cfg.mode = *mode;
  }
  if (j.contains("decomposition_mode")) {
    const Json& m = j["decomposition_mode"];
    if (m == "one_client_differs") {
      cfg.decomposition = DecompositionMode::kOneClientDiffers;
    } else if (m == "all_clients_differ") {
      cfg.decomposition = DecompositionMode::kAllClientsDiffer;
    } else {
      return Bad("decomposition_mode",
                 "expected \"one_client_differs\" or \"all_clients_differ\"");
    }
  }
  if (j.contains("challenge")) {
    const Json& c = j["challenge"];
    if (absl::Status s =
            CheckKeys(c, "challenge", {"trials", "seed", "block_size"});
        !s.ok()) {
      return s;
    }
    absl::StatusOr<uint64_t> trials =
        GetCount(c, "trials", "challenge", cfg.challenge.trials);
    absl::StatusOr<uint64_t> seed = GetCount(c, "seed", "challenge", cfg.challenge.seed);
    absl::StatusOr<uint64_t> block =
        GetCount(c, "block_size", "challenge", cfg.challenge.block_size);
    for (const auto* r : {&trials, &seed, &block}) {
      if (!r->ok()) return r->status();
    }
    cfg.challenge = {*trials, *seed, *block};
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) return Bad("output_dir", "expected a string");
    cfg.output_dir = j["output_dir"].get<std::string>();
  }

  if (moniteo != nullptr) {
    moniteo->config.learning = cfg.run.learning;
    moniteo->config.mechanism = cfg.run.mechanism;
    moniteo->config.defense = cfg.run.defense;
    moniteo->config.epsilon_budget = cfg.epsilon_budget;
  }
  if (auto* custom = std::get_if<CustomScenario>(&cfg.scenario)) {
    if (!custom->initial_model.has_value()) {
      absl::StatusOr<Dataset> all = UnionOf(custom->partitions);
      if (!all.ok()) return Bad("scenario.partitions", std::string(all.status().message()));
      custom->initial_model = ModelParam::Zero(
          ModelDim(custom->loss, all->feature_dim().value_or(0)));
    }
    cfg.run.model = custom->loss;
  }
  if (absl::Status s = cfg.Validate(); !s.ok()) return s;
  return cfg;
}

absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::InvalidArgumentError("cannot open config " + path);
  Json j = Json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError("config " + path + " is not valid JSON");
  }
  return ParseExperimentConfig(j);
}

int WorkersFromEnv() {
  const char* value = std::getenv(kWorkersEnv);
  if (value == nullptr) return 1;
  char* end = nullptr;
  long n = std::strtol(value, &end, 10);
  if (end == value || *end != '\0' || n < 1) return 1;
  return static_cast<int>(std::min(n, 256L));
}

int ExitCodeFor(const absl::Status& status) {
  if (status.ok()) return kExitOk;
  if (status.code() == absl::StatusCode::kResourceExhausted) return kExitCeiling;
  return kExitBadInput;
}

CommandResult CmdEnumerate(const ExperimentConfig& cfg) {
  Infrastructure init;
  RunConfig run = cfg.run;
  if (const auto* custom = std::get_if<CustomScenario>(&cfg.scenario)) {
    absl::StatusOr<Infrastructure> i = MakeInfrastructure(
        custom->server, custom->partitions, *custom->initial_model);
    if (!i.ok()) return Failure(i.status());
    init = *std::move(i);
  } else if (std::holds_alternative<MoniteoScenario>(cfg.scenario)) {
    // The full mission, secret readings included.
    absl::StatusOr<NeighborRun> pair = MakeNeighborRun(cfg);
    if (!pair.ok()) return Failure(pair.status());
    init = pair->i1;
  } else {
    return Failure(Bad("scenario", "enumerate needs a custom or moniteo scenario"));
  }

  PathDistribution dist;
  Json stats;
  if (const auto* mc = std::get_if<MonteCarloMode>(&cfg.mode)) {
    absl::StatusOr<PathDistribution> d = MonteCarloTerminalDistribution(
        init, run, mc->samples, mc->seed, CurModPar(), WorkersFromEnv());
    if (!d.ok()) return Failure(d.status());
    dist = *std::move(d);
    stats = Json{{"mode", "montecarlo"},
                 {"samples", mc->samples},
                 {"seed", mc->seed},
                 {"outcomes", dist.outcomes.size()}};
  } else {
    absl::StatusOr<KripkeModel> m = BuildModel(init, run, CeilingOf(cfg.mode));
    if (!m.ok()) return Failure(m.status());
    dist = TerminalDistribution(*m, CurModPar());
    size_t edges = 0;
    for (const auto& out : m->edges) edges += out.size();
    stats = Json{{"mode", "exact"},
                 {"states", m->states.size()},
                 {"edges", edges},
                 {"terminal_states", m->terminals.size()},
                 {"trace_count", m->MaximalPathCount().get_str()},
                 {"max_depth", m->max_depth},
                 {"outcomes", dist.outcomes.size()}};
  }
  if (absl::Status s =
          WriteJson(cfg.output_dir, "distribution.json", DistributionToJson(dist));
      !s.ok()) {
    return Failure(s);
  }
  if (absl::Status s = WriteJson(cfg.output_dir, "model_stats.json", stats);
      !s.ok()) {
    return Failure(s);
  }
  return {kExitOk, absl::StrCat("enumerate: ", dist.outcomes.size(),
                                " outcomes, ", stats.dump())};
}

CommandResult CmdEpsilon(const ExperimentConfig& cfg) {
  absl::StatusOr<Pair> pair = ComputePair(cfg);
  if (!pair.ok()) return Failure(pair.status());
  EpsilonReport report = RealizedEpsilon(pair->d0, pair->d1, cfg.delta);
  const bool holds = WithinBudget(report, cfg.epsilon_budget);
  Json out{{"exact", pair->exact},
           {"epsilon_budget", cfg.epsilon_budget},
           {"budget_holds", holds},
           {"report", EpsilonReportToJson(report)},
           {"d0", DistributionToJson(pair->d0)},
           {"d1", DistributionToJson(pair->d1)}};
  if (absl::Status s = WriteJson(cfg.output_dir, "epsilon_report.json", out);
      !s.ok()) {
    return Failure(s);
  }
  return {holds ? kExitOk : kExitViolated,
          absl::StrCat("epsilon = ", EpsilonText(report), ", budget ",
                       cfg.epsilon_budget, holds ? " holds" : " exceeded")};
}

CommandResult CmdAdvantage(const ExperimentConfig& cfg) {
  absl::StatusOr<Pair> pair = ComputePair(cfg);
  if (!pair.ok()) return Failure(pair.status());
  const Adversary bayes = BayesOptimal(pair->d0, pair->d1);
  absl::StatusOr<AdvantageReport> chain = BoundChain(pair->d0, pair->d1);
  AdvantageReport report = chain.ok() ? *std::move(chain)
                                      : Advantage(bayes, pair->d0, pair->d1);
  if (!chain.ok()) report.eps_star = RealizedEpsilon(pair->d0, pair->d1);
  absl::StatusOr<ChallengeResult> challenge = ChallengeExperiment(
      pair->d0, pair->d1, bayes, cfg.challenge.trials, cfg.challenge.seed,
      cfg.challenge.block_size, WorkersFromEnv());
  if (!challenge.ok()) return Failure(challenge.status());
  Json out{{"exact", pair->exact},
           {"adversary", bayes.description},
           {"report", AdvantageReportToJson(report)},
           {"challenge",
            Json{{"trials", challenge->trials},
                 {"successes", challenge->successes},
                 {"seed", cfg.challenge.seed},
                 {"advantage_estimate", challenge->advantage}}}};
  if (absl::Status s = WriteJson(cfg.output_dir, "advantage_report.json", out);
      !s.ok()) {
    return Failure(s);
  }
  if (absl::Status s =
          WriteFile(cfg.output_dir, "challenge.csv", ChallengeCsv(*challenge));
      !s.ok()) {
    return Failure(s);
  }
  return {kExitOk, absl::StrCat("advantage = ", FormatFraction(report.advantage),
                                ", tv = ", FormatFraction(report.tv))};
}

CommandResult CmdDecompose(const ExperimentConfig& cfg) {
  if (std::holds_alternative<PairScenario>(cfg.scenario)) {
    return Failure(Bad("scenario", "decompose needs a custom or moniteo scenario"));
  }
  if (!std::holds_alternative<ExactMode>(cfg.mode)) {
    return Failure(Bad("mode", "decompose runs in exact mode only"));
  }
  absl::StatusOr<NeighborRun> run = MakeNeighborRun(cfg);
  if (!run.ok()) return Failure(run.status());
  absl::StatusOr<DecompositionResult> result =
      DecompositionCheck(*run, cfg.decomposition, CeilingOf(cfg.mode));
  if (!result.ok()) return Failure(result.status());
  Json out = DecompositionToJson(*result);
  out["mode"] = cfg.decomposition == DecompositionMode::kOneClientDiffers
                    ? "one_client_differs"
                    : "all_clients_differ";
  if (absl::Status s =
          WriteJson(cfg.output_dir, "decomposition_report.json", out);
      !s.ok()) {
    return Failure(s);
  }
  return {result->bound_holds ? kExitOk : kExitViolated,
          absl::StrCat("global epsilon = ", EpsilonText(result->global),
                       ", bound = ", result->bound,
                       result->bound_holds ? " holds" : " fails")};
}

CommandResult CmdMoniteo(const ExperimentConfig& cfg) {
  const auto* scenario = std::get_if<MoniteoScenario>(&cfg.scenario);
  if (scenario == nullptr) {
    return Failure(Bad("scenario", "moniteo needs a moniteo scenario"));
  }
  MoniteoConfig mcfg = scenario->config;
  if (const auto* mc = std::get_if<MonteCarloMode>(&cfg.mode)) {
    // A zero ceiling sends the run straight to sampling.
    mcfg.state_ceiling = 0;
    mcfg.montecarlo_fallback = true;
    mcfg.fallback_samples = mc->samples;
    mcfg.fallback_seed = mc->seed;
  } else {
    mcfg.state_ceiling = CeilingOf(cfg.mode);
  }
  absl::StatusOr<MoniteoReport> report = RunMoniteo(mcfg);
  if (!report.ok()) return Failure(report.status());
  if (absl::Status s = WriteJson(cfg.output_dir, "moniteo_report.json",
                                 MoniteoReportToJson(*report));
      !s.ok()) {
    return Failure(s);
  }
  char advantage[32];
  std::snprintf(advantage, sizeof(advantage), "%.6f",
                ToDouble(report->advantage.advantage));
  return {report->budget_ok ? kExitOk : kExitViolated,
          absl::StrCat("moniteo: target ", report->target, " omits ",
                       report->omitted_id, ", epsilon = ",
                       EpsilonText(report->epsilon), " (budget ",
                       mcfg.epsilon_budget,
                       report->budget_ok ? " holds" : " exceeded",
                       "), advantage = ", advantage, ", ",
                       report->exact ? "exact" : "sampled", ", ",
                       report->runtime_ms, " ms")};
}

}  // namespace fldp
