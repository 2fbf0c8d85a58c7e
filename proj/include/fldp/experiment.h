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

// Experiment orchestration behind the command line tool: configuration
// parsing, one function per subcommand and the built-in oracle suite.
//
// Exit codes are a stable contract: 0 success or property holds, 1 property
// violated, 2 bad input, 3 state ceiling exceeded.

#ifndef FLDP_EXPERIMENT_H_
#define FLDP_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <variant>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fldp/json_io.h"
#include "fldp/moniteo.h"
#include "fldp/privacy.h"
#include "fldp/transition.h"

namespace fldp {

inline constexpr int kSchemaVersion = 1;

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolated = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitCeiling = 3;

// Environment variable selecting the worker count; sequential when unset.
inline constexpr char kWorkersEnv[] = "FLDP_WORKERS";

struct CustomScenario {
  ActorId server = "server";
  LossModel loss = LossModel::kMeanEstimation;
  // Zero vector of the model dimension when unset.
  std::optional<ModelParam> initial_model;
  Partition partitions;
  // The neighbor run's partitions, needed by the neighbor commands.
  std::optional<Partition> neighbor_partitions;
};

struct MoniteoScenario {
  MoniteoConfig config;
};

// Two distributions given directly, bypassing the transition system.
struct PairScenario {
  PathDistribution d0;
  PathDistribution d1;
};

using Scenario = std::variant<CustomScenario, MoniteoScenario, PairScenario>;

struct ExactMode {
  size_t state_ceiling = kDefaultStateCeiling;
};
struct MonteCarloMode {
  uint64_t samples = 100'000;
  uint64_t seed = 1;
};
using RunMode = std::variant<ExactMode, MonteCarloMode>;

struct ChallengeSettings {
  uint64_t trials = 10'000;
  uint64_t seed = 1;
  uint64_t block_size = 1000;
};

struct ExperimentConfig {
  Scenario scenario;
  RunConfig run;
  double epsilon_budget = 1.0;
  std::optional<Rational> delta;
  RunMode mode;
  DecompositionMode decomposition = DecompositionMode::kOneClientDiffers;
  ChallengeSettings challenge;
  std::string output_dir = ".";

  absl::Status Validate() const;
};

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(const Json& j);
absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path);

// Reads kWorkersEnv; 1 when unset or malformed.
int WorkersFromEnv();

struct CommandResult {
  int exit_code = kExitOk;
  // One line for standard output on success, the error otherwise.
  std::string message;
};

// Maps a failed status onto the exit code contract.
int ExitCodeFor(const absl::Status& status);

// distribution.json and model_stats.json for the first run.
CommandResult CmdEnumerate(const ExperimentConfig& cfg);
// epsilon_report.json; exit 1 when the budget is exceeded.
CommandResult CmdEpsilon(const ExperimentConfig& cfg);
// advantage_report.json and challenge.csv.
CommandResult CmdAdvantage(const ExperimentConfig& cfg);
// decomposition_report.json; exit 1 when the bound fails.
CommandResult CmdDecompose(const ExperimentConfig& cfg);
// moniteo_report.json; exit 1 when the budget is exceeded.
CommandResult CmdMoniteo(const ExperimentConfig& cfg);

enum class ValidateFault {
  kNone,
  // Moves probability mass in the noise distribution handed to the event
  // check, after the singleton bound was taken.
  kPerturbNoisePmf,
};

// Runs the oracle suite and prints one PASS/FAIL row per property.
CommandResult CmdValidate(ValidateFault fault, std::ostream& out);

}  // namespace fldp

#endif  // FLDP_EXPERIMENT_H_
