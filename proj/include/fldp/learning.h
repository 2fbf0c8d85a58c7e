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

// FedAvg learning mathematics in exact rational arithmetic: per-point loss
// gradients, the local client step, size-weighted server aggregation, the
// finite-sum objective, the gradient-release defenses and the discrete
// Laplace noise pmf.

#ifndef FLDP_LEARNING_H_
#define FLDP_LEARNING_H_

#include <map>
#include <optional>
#include <string>
#include <variant>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fldp/core_model.h"
#include "fldp/rational.h"

namespace fldp {

// mean_estimation: d = 1, f_i(w) = (w - y_i)^2 / 2.
// linear_regression: d = 1 + |features|, f_i(w) = (<w, (1, x_i)> - y_i)^2 / 2.
enum class LossModel { kMeanEstimation, kLinearRegression };

std::string LossModelName(LossModel model);

// Model dimension the loss expects for points with `feature_dim` features.
size_t ModelDim(LossModel model, size_t feature_dim);

// Parameters live on the lattice step * Z intersected with [lo, hi].
struct Grid {
  Rational step;
  Rational lo;
  Rational hi;
};

struct LearningConfig {
  Rational eta = 1;
  int rounds = 1;
  int local_epochs = 1;
  // Exact mode when unset: no quantization anywhere.
  std::optional<Grid> grid;

  absl::Status Validate() const;
};

struct NoNoise {};

// Integer-step noise on each coordinate with Pr[k] proportional to t^|k|,
// truncated to |k| <= clamp_steps.
struct DiscreteLaplace {
  Rational t;
  int clamp_steps = 1;
};

using NoiseMechanism = std::variant<NoNoise, DiscreteLaplace>;

absl::Status ValidateNoise(const NoiseMechanism& mech);

struct IdentityDefense {};
// Keeps the k largest-magnitude coordinates; ties keep the lower index.
struct SparsifyTopK {
  int k = 1;
};
// Releases the parameter after `epochs` sequential local steps.
struct PseudoGradient {
  int epochs = 1;
};

using DefenseTransform =
    std::variant<IdentityDefense, SparsifyTopK, PseudoGradient>;

absl::Status ValidateDefense(const DefenseTransform& defense);

// (1/|part|) * sum of per-point loss gradients at w.
absl::StatusOr<ModelParam> AvgLossGradient(LossModel model,
                                           const ModelParam& w,
                                           const Dataset& part);

// One local update, defense applied, then grid quantization unless exact.
absl::StatusOr<ModelParam> ClientUpdate(LossModel model,
                                        const LearningConfig& cfg,
                                        const ModelParam& w,
                                        const Dataset& part,
                                        const DefenseTransform& defense);

// sum_k (|partition_k| / n) * gradient_k, quantized unless `grid` is unset.
absl::StatusOr<ModelParam> ServerEval(
    const std::map<ActorId, ModelParam>& gradients, const Partition& partitions,
    long n, const std::optional<Grid>& grid);

// f(w) = (1/n) sum_i f_i(w).
absl::StatusOr<Rational> Objective(LossModel model, const ModelParam& w,
                                   const Dataset& dataset);

// Exact pmf over {-S, ..., S}: Pr[k] = t^|k| (1 - t) / (1 + t - 2 t^(S+1)).
std::map<int, Rational> NoisePmf(const DiscreteLaplace& mech);

// Rounds each coordinate half away from zero to the grid and clamps.
ModelParam Quantize(const ModelParam& w, const Grid& grid);

ModelParam Clamp(const ModelParam& w, const Grid& grid);

ModelParam SparsifyTop(const ModelParam& w, int k);

size_t NonZeroCount(const ModelParam& w);

}  // namespace fldp

#endif  // FLDP_LEARNING_H_
