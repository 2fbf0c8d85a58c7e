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

// Command line front end. See docs/config_schema.md for the config file.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fldp/experiment.h"

namespace {

int Finish(const fldp::CommandResult& result) {
  if (result.exit_code == fldp::kExitOk || result.exit_code == fldp::kExitViolated) {
    std::cout << result.message << "\n";
  } else {
    std::cerr << "error: " << result.message << "\n";
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated learning differential privacy laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> output_dir;
  using Command = fldp::CommandResult (*)(const fldp::ExperimentConfig&);
  struct Entry {
    const char* name;
    const char* help;
    Command run;
  };
  const Entry entries[] = {
      {"enumerate", "Write the model distribution and state statistics",
       fldp::CmdEnumerate},
      {"epsilon", "Measure the realized epsilon of the neighbor pair",
       fldp::CmdEpsilon},
      {"advantage", "Compute the adversary advantage and run the challenge game",
       fldp::CmdAdvantage},
      {"decompose", "Compare global epsilon with the per-client factors",
       fldp::CmdDecompose},
      {"moniteo", "Run the satellite temperature mission end to end",
       fldp::CmdMoniteo},
  };
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("-c,--config", config_path, "Experiment config (JSON)")
        ->required();
    sub->add_option("-o,--output-dir", output_dir,
                    "Overrides output_dir of the config");
  }
  CLI::App* validate = app.add_subcommand("validate", "Run the oracle suite");
  std::string fault = "none";
  validate
      ->add_option("--inject-fault", fault,
                   "Test hook: perturb-noise-pmf breaks the event check")
      ->check(CLI::IsMember({"none", "perturb-noise-pmf"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? fldp::kExitOk : fldp::kExitBadInput;
  }

  if (validate->parsed()) {
    return Finish(fldp::CmdValidate(fault == "none"
                                        ? fldp::ValidateFault::kNone
                                        : fldp::ValidateFault::kPerturbNoisePmf,
                                    std::cout));
  }
  absl::StatusOr<fldp::ExperimentConfig> cfg =
      fldp::LoadExperimentConfig(config_path);
  if (!cfg.ok()) {
    std::cerr << "error: " << cfg.status().message() << "\n";
    return fldp::kExitBadInput;
  }
  if (output_dir.has_value()) cfg->output_dir = *output_dir;
  for (const Entry& e : entries) {
    if (app.got_subcommand(e.name)) return Finish(e.run(*cfg));
  }
  return fldp::kExitBadInput;
}
