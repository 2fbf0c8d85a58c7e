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

#include "fldp/json_io.h"

#include <cmath>
#include <cstdio>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"

namespace fldp {
namespace {

Json FloatOrInf(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

Json OptionalFraction(const std::optional<Rational>& r) {
  return r.has_value() ? Json(FormatFraction(*r)) : Json(nullptr);
}

Json OptionalFloat(const std::optional<Rational>& r) {
  return r.has_value() ? Json(ToDouble(*r)) : Json(nullptr);
}

absl::Status TypeError(const std::string& what) {
  return absl::InvalidArgumentError(absl::StrCat("expected ", what));
}

}  // namespace

absl::StatusOr<Rational> RationalFromJson(const Json& j) {
  if (j.is_string()) return ParseRational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.dump());
  if (j.is_number_float()) {
    if (!std::isfinite(j.get<double>())) return TypeError("a finite number");
    return ParseRational(j.dump());
  }
  return TypeError("a rational (string or number)");
}

Json DataPointToJson(const DataPoint& p) {
  Json features = Json::array();
  for (const Rational& f : p.features) features.push_back(FormatDecimal(f));
  return Json{{"id", p.id},
              {"features", std::move(features)},
              {"value", FormatDecimal(p.value)},
              {"secret", p.secret}};
}

absl::StatusOr<DataPoint> DataPointFromJson(const Json& j) {
  if (!j.is_object()) return TypeError("a data point object");
  DataPoint p;
  if (!j.contains("id") || !j["id"].is_string()) {
    return TypeError("a string \"id\" in every data point");
  }
  p.id = j["id"].get<std::string>();
  if (j.contains("features")) {
    if (!j["features"].is_array()) return TypeError("\"features\" array");
    for (const Json& f : j["features"]) {
      absl::StatusOr<Rational> r = RationalFromJson(f);
      if (!r.ok()) return r.status();
      p.features.push_back(*r);
    }
  }
  if (!j.contains("value")) return TypeError("\"value\" in data point " + p.id);
  absl::StatusOr<Rational> value = RationalFromJson(j["value"]);
  if (!value.ok()) return value.status();
  p.value = *value;
  if (j.contains("secret")) {
    if (!j["secret"].is_boolean()) return TypeError("boolean \"secret\"");
    p.secret = j["secret"].get<bool>();
  }
  return p;
}

Json DatasetToJson(const Dataset& d) {
  Json out = Json::array();
  for (const auto& [id, p] : d) out.push_back(DataPointToJson(p));
  return out;
}

absl::StatusOr<Dataset> DatasetFromJson(const Json& j) {
  if (!j.is_array()) return TypeError("a dataset array");
  std::vector<DataPoint> points;
  for (const Json& item : j) {
    absl::StatusOr<DataPoint> p = DataPointFromJson(item);
    if (!p.ok()) return p.status();
    points.push_back(*std::move(p));
  }
  return Dataset::Create(std::move(points));
}

Json PartitionToJson(const Partition& p) {
  Json out = Json::object();
  for (const auto& [client, data] : p) out[client] = DatasetToJson(data);
  return out;
}

absl::StatusOr<Partition> PartitionFromJson(const Json& j) {
  if (!j.is_object() || j.empty()) {
    return TypeError("a nonempty object of client partitions");
  }
  Partition out;
  for (const auto& [client, data] : j.items()) {
    absl::StatusOr<Dataset> d = DatasetFromJson(data);
    if (!d.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("partition ", client, ": ", d.status().message()));
    }
    out.emplace(client, *std::move(d));
  }
  return out;
}

std::string OutcomeKey(const ModelParam& outcome) {
  return absl::StrJoin(outcome.coords, ",",
                       [](std::string* out, const Rational& r) {
                         out->append(FormatDecimal(r));
                       });
}

absl::StatusOr<ModelParam> OutcomeFromKey(const std::string& key) {
  ModelParam out;
  for (absl::string_view part : absl::StrSplit(key, ',')) {
    absl::StatusOr<Rational> r = ParseRational(std::string(part));
    if (!r.ok()) return r.status();
    out.coords.push_back(*r);
  }
  return out;
}

Json DistributionToJson(const PathDistribution& d) {
  Json outcomes = Json::object();
  for (const auto& [o, p] : d.outcomes) outcomes[OutcomeKey(o)] = FormatFraction(p);
  return Json{{"outcomes", std::move(outcomes)},
              {"trace_count", d.trace_count.get_str()}};
}

absl::StatusOr<PathDistribution> DistributionFromJson(const Json& j) {
  if (!j.is_object() || !j.contains("outcomes") ||
      !j["outcomes"].is_object()) {
    return TypeError("a distribution with an \"outcomes\" object");
  }
  PathDistribution d;
  for (const auto& [key, prob] : j["outcomes"].items()) {
    absl::StatusOr<ModelParam> o = OutcomeFromKey(key);
    if (!o.ok()) return o.status();
    absl::StatusOr<Rational> p = RationalFromJson(prob);
    if (!p.ok()) return p.status();
    if (*p < 0) return TypeError("nonnegative probabilities");
    d.outcomes[*o] += *p;
  }
  if (d.Total() != 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "distribution sums to ", FormatFraction(d.Total()), ", not 1"));
  }
  if (j.contains("trace_count")) {
    const Json& tc = j["trace_count"];
    d.trace_count = tc.is_string() ? mpz_class(tc.get<std::string>())
                                   : mpz_class(tc.dump());
  } else {
    d.trace_count = static_cast<unsigned long>(d.outcomes.size());
  }
  return d;
}

Json EpsilonReportToJson(const EpsilonReport& r) {
  Json per = Json::array();
  for (const OutcomeRatio& o : r.per_outcome) {
    per.push_back(Json{{"outcome", OutcomeKey(o.outcome)},
                       {"p0", FormatFraction(o.p0)},
                       {"p1", FormatFraction(o.p1)},
                       {"log_ratio", FloatOrInf(o.log_ratio)}});
  }
  return Json{{"epsilon", FloatOrInf(r.epsilon)},
              {"infinite", r.infinite()},
              {"exp_epsilon", OptionalFraction(r.exp_epsilon)},
              {"delta", OptionalFraction(r.delta)},
              {"per_outcome", std::move(per)}};
}

Json AdvantageReportToJson(const AdvantageReport& r) {
  Json out{{"advantage", FormatFraction(r.advantage)},
           {"advantage_float", ToDouble(r.advantage)},
           {"success_prob", FormatFraction(r.success_prob)},
           {"success_prob_float", ToDouble(r.success_prob)},
           {"tv", FormatFraction(r.tv)},
           {"tv_float", ToDouble(r.tv)},
           {"identity_holds", r.identity_holds},
           {"tight_bound", OptionalFraction(r.tight_bound)},
           {"tight_bound_float", OptionalFloat(r.tight_bound)},
           {"loose_bound", OptionalFraction(r.loose_bound)},
           {"loose_bound_float", OptionalFloat(r.loose_bound)},
           {"chain_holds", r.chain_holds}};
  out["eps_star"] =
      r.eps_star.has_value() ? EpsilonReportToJson(*r.eps_star) : Json(nullptr);
  return out;
}

Json DecompositionToJson(const DecompositionResult& r) {
  Json per = Json::object();
  for (const auto& [client, report] : r.per_client) {
    per[client] = EpsilonReportToJson(report);
  }
  return Json{{"per_client", std::move(per)},
              {"global", EpsilonReportToJson(r.global)},
              {"bound", FloatOrInf(r.bound)},
              {"bound_holds", r.bound_holds}};
}

Json MoniteoReportToJson(const MoniteoReport& r) {
  Json per = Json::object();
  for (const auto& [sat, report] : r.per_satellite) {
    per[sat] = EpsilonReportToJson(report);
  }
  return Json{{"target", r.target},
              {"omitted_point", r.omitted_id},
              {"exact", r.exact},
              {"epsilon", EpsilonReportToJson(r.epsilon)},
              {"advantage", AdvantageReportToJson(r.advantage)},
              {"budget_ok", r.budget_ok},
              {"per_satellite", std::move(per)},
              {"runtime_ms", r.runtime_ms}};
}

std::string ChallengeCsv(const ChallengeResult& r) {
  std::string out = "trial_block,successes,trials,advantage_estimate\n";
  for (const ChallengeBlock& b : r.blocks) {
    char estimate[32];
    std::snprintf(estimate, sizeof(estimate), "%.6f", b.advantage_estimate);
    absl::StrAppend(&out, b.block, ",", b.successes, ",", b.trials, ",",
                    estimate, "\n");
  }
  return out;
}

}  // namespace fldp
