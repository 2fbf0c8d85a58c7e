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

#include "fldp/learning.h"

#include <algorithm>
#include <numeric>
#include <vector>

#include "absl/strings/str_cat.h"

namespace fldp {
namespace {

absl::Status EmptyPartition() {
  return absl::FailedPreconditionError(
      "EmptyPartition: cannot average over an empty partition");
}

// Augmented input: (1, x) for linear regression, (1) for mean estimation.
std::vector<Rational> Augmented(LossModel model, const DataPoint& p) {
  if (model == LossModel::kMeanEstimation) return {Rational(1)};
  std::vector<Rational> aug;
  aug.reserve(p.features.size() + 1);
  aug.emplace_back(1);
  aug.insert(aug.end(), p.features.begin(), p.features.end());
  return aug;
}

absl::Status CheckDim(LossModel model, const ModelParam& w,
                      const Dataset& data) {
  size_t features = data.feature_dim().value_or(0);
  size_t want = ModelDim(model, features);
  if (w.dim() != want) {
    return absl::InvalidArgumentError(
        absl::StrCat(LossModelName(model), " expects dimension ", want,
                     ", got ", w.dim()));
  }
  return absl::OkStatus();
}

Rational Residual(const std::vector<Rational>& aug, const ModelParam& w,
                  const Rational& target) {
  Rational dot = 0;
  for (size_t j = 0; j < aug.size(); ++j) dot += w.coords[j] * aug[j];
  return dot - target;
}

ModelParam LocalStep(const Rational& eta, const ModelParam& w,
                     const ModelParam& grad) {
  ModelParam out = w;
  for (size_t j = 0; j < out.dim(); ++j) out.coords[j] -= eta * grad.coords[j];
  return out;
}

}  // namespace

std::string LossModelName(LossModel model) {
  return model == LossModel::kMeanEstimation ? "mean_estimation"
                                             : "linear_regression";
}

size_t ModelDim(LossModel model, size_t feature_dim) {
  return model == LossModel::kMeanEstimation ? 1 : feature_dim + 1;
}

absl::Status LearningConfig::Validate() const {
  if (eta <= 0) return absl::InvalidArgumentError("eta must be positive");
  if (rounds < 0) return absl::InvalidArgumentError("rounds must be >= 0");
  if (local_epochs < 1) {
    return absl::InvalidArgumentError("local_epochs must be positive");
  }
  if (grid.has_value()) {
    if (grid->step <= 0) {
      return absl::InvalidArgumentError("grid step must be positive");
    }
    if (!(grid->lo < grid->hi)) {
      return absl::InvalidArgumentError("grid requires lo < hi");
    }
    Rational lo_steps = grid->lo / grid->step;
    Rational hi_steps = grid->hi / grid->step;
    if (lo_steps.get_den() != 1 || hi_steps.get_den() != 1) {
      return absl::InvalidArgumentError(
          "grid bounds must be multiples of the step");
    }
  }
  return absl::OkStatus();
}

absl::Status ValidateNoise(const NoiseMechanism& mech) {
  if (const auto* lap = std::get_if<DiscreteLaplace>(&mech)) {
    if (lap->t <= 0 || lap->t >= 1) {
      return absl::InvalidArgumentError("noise t must lie in (0, 1)");
    }
    if (lap->clamp_steps < 0) {
      return absl::InvalidArgumentError("clamp_steps must be >= 0");
    }
  }
  return absl::OkStatus();
}

absl::Status ValidateDefense(const DefenseTransform& defense) {
  if (const auto* top = std::get_if<SparsifyTopK>(&defense);
      top != nullptr && top->k < 1) {
    return absl::InvalidArgumentError("sparsification k must be positive");
  }
  if (const auto* pseudo = std::get_if<PseudoGradient>(&defense);
      pseudo != nullptr && pseudo->epochs < 1) {
    return absl::InvalidArgumentError("pseudo-gradient epochs must be >= 1");
  }
  return absl::OkStatus();
}

absl::StatusOr<ModelParam> AvgLossGradient(LossModel model,
                                           const ModelParam& w,
                                           const Dataset& part) {
  if (part.empty()) return EmptyPartition();
  if (absl::Status s = CheckDim(model, w, part); !s.ok()) return s;

  ModelParam sum = ModelParam::Zero(w.dim());
  for (const auto& [id, p] : part) {
    std::vector<Rational> aug = Augmented(model, p);
    Rational r = Residual(aug, w, p.value);
    for (size_t j = 0; j < aug.size(); ++j) sum.coords[j] += r * aug[j];
  }
  Rational size(static_cast<long>(part.size()));
  for (auto& c : sum.coords) c /= size;
  return sum;
}

absl::StatusOr<ModelParam> ClientUpdate(LossModel model,
                                        const LearningConfig& cfg,
                                        const ModelParam& w,
                                        const Dataset& part,
                                        const DefenseTransform& defense) {
  int steps = 1;
  if (const auto* pseudo = std::get_if<PseudoGradient>(&defense)) {
    steps = pseudo->epochs;
  }
  ModelParam current = w;
  for (int i = 0; i < steps; ++i) {
    absl::StatusOr<ModelParam> grad = AvgLossGradient(model, current, part);
    if (!grad.ok()) return grad.status();
    current = LocalStep(cfg.eta, current, *grad);
  }
  if (const auto* top = std::get_if<SparsifyTopK>(&defense)) {
    current = SparsifyTop(current, top->k);
  }
  if (cfg.grid.has_value()) current = Quantize(current, *cfg.grid);
  return current;
}

absl::StatusOr<ModelParam> ServerEval(
    const std::map<ActorId, ModelParam>& gradients, const Partition& partitions,
    long n, const std::optional<Grid>& grid) {
  if (gradients.empty()) {
    return absl::InvalidArgumentError("server_eval needs at least one client");
  }
  if (gradients.size() != partitions.size()) {
    return absl::InvalidArgumentError(
        "gradient and partition domains differ");
  }
  long total = 0;
  for (const auto& [client, grad] : gradients) {
    auto it = partitions.find(client);
    if (it == partitions.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("no partition for client ", client));
    }
    total += static_cast<long>(it->second.size());
  }
  if (n != total || n <= 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "WeightMismatch: n = ", n, " but partitions hold ", total, " points"));
  }

  size_t dim = gradients.begin()->second.dim();
  ModelParam out = ModelParam::Zero(dim);
  for (const auto& [client, grad] : gradients) {
    if (grad.dim() != dim) {
      return absl::InvalidArgumentError("gradient dimensions differ");
    }
    Rational weight = Ratio(static_cast<long>(partitions.at(client).size()), n);
    for (size_t j = 0; j < dim; ++j) out.coords[j] += weight * grad.coords[j];
  }
  if (grid.has_value()) out = Quantize(out, *grid);
  return out;
}

absl::StatusOr<Rational> Objective(LossModel model, const ModelParam& w,
                                   const Dataset& dataset) {
  if (dataset.empty()) return EmptyPartition();
  if (absl::Status s = CheckDim(model, w, dataset); !s.ok()) return s;
  Rational sum = 0;
  for (const auto& [id, p] : dataset) {
    Rational r = Residual(Augmented(model, p), w, p.value);
    sum += r * r / 2;
  }
  return sum / Rational(static_cast<long>(dataset.size()));
}

std::map<int, Rational> NoisePmf(const DiscreteLaplace& mech) {
  std::map<int, Rational> weights;
  Rational total = 0;
  Rational power = 1;
  for (int k = 0; k <= mech.clamp_steps; ++k) {
    weights[k] = power;
    weights[-k] = power;
    total += k == 0 ? power : 2 * power;
    power *= mech.t;
  }
  for (auto& [k, w] : weights) w /= total;
  return weights;
}

ModelParam Clamp(const ModelParam& w, const Grid& grid) {
  ModelParam out = w;
  for (auto& c : out.coords) {
    if (c < grid.lo) c = grid.lo;
    if (c > grid.hi) c = grid.hi;
  }
  return out;
}

ModelParam Quantize(const ModelParam& w, const Grid& grid) {
  ModelParam out = w;
  for (auto& c : out.coords) c = RoundToStep(c, grid.step);
  return Clamp(out, grid);
}

ModelParam SparsifyTop(const ModelParam& w, int k) {
  std::vector<size_t> order(w.dim());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return abs(w.coords[a]) > abs(w.coords[b]);
  });
  ModelParam out = ModelParam::Zero(w.dim());
  for (size_t i = 0; i < order.size() && i < static_cast<size_t>(k); ++i) {
    out.coords[order[i]] = w.coords[order[i]];
  }
  return out;
}

size_t NonZeroCount(const ModelParam& w) {
  return static_cast<size_t>(std::count_if(
      w.coords.begin(), w.coords.end(),
      [](const Rational& c) { return c != 0; }));
}

}  // namespace fldp
