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

// JSON forms of datasets, distributions and reports.
//
// Exact values are strings: coordinates and point values use the canonical
// decimal form of FormatDecimal, probabilities the "p/q" form. Doubles are
// written alongside for convenience only; infinities are the string "inf".

#ifndef FLDP_JSON_IO_H_
#define FLDP_JSON_IO_H_

#include <string>

#include "absl/status/statusor.h"
#include "fldp/adversary.h"
#include "fldp/core_model.h"
#include "fldp/kripke.h"
#include "fldp/moniteo.h"
#include "fldp/privacy.h"
#include "json.hpp"

namespace fldp {

using Json = nlohmann::ordered_json;

// Accepts a string ("1/4", "0.25") or a JSON number (via its shortest
// decimal text, so 0.1 means exactly 1/10).
absl::StatusOr<Rational> RationalFromJson(const Json& j);

Json DataPointToJson(const DataPoint& p);
absl::StatusOr<DataPoint> DataPointFromJson(const Json& j);

// [{id, features: [...], value, secret}, ...] ordered by id.
Json DatasetToJson(const Dataset& d);
absl::StatusOr<Dataset> DatasetFromJson(const Json& j);

Json PartitionToJson(const Partition& p);
absl::StatusOr<Partition> PartitionFromJson(const Json& j);

// Outcome key: comma-joined decimal coordinates, e.g. "0.25,-1".
std::string OutcomeKey(const ModelParam& outcome);
absl::StatusOr<ModelParam> OutcomeFromKey(const std::string& key);

// {"outcomes": {"<key>": "p/q", ...}, "trace_count": "<integer>"}
Json DistributionToJson(const PathDistribution& d);
absl::StatusOr<PathDistribution> DistributionFromJson(const Json& j);

Json EpsilonReportToJson(const EpsilonReport& r);
Json AdvantageReportToJson(const AdvantageReport& r);
Json DecompositionToJson(const DecompositionResult& r);
Json MoniteoReportToJson(const MoniteoReport& r);

// Header plus one row per block:
// trial_block,successes,trials,advantage_estimate
std::string ChallengeCsv(const ChallengeResult& r);

}  // namespace fldp

#endif  // FLDP_JSON_IO_H_
