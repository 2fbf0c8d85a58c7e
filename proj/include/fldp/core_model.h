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

// State of a federated-learning deployment: data points, datasets, the
// distributed-system snapshot (IGraph), protocol histories and the
// neighboring-dataset relations used by the privacy definitions.
//
// Every type here is an immutable value. Datasets and traces share their
// storage, so copying a state is cheap and the Kripke builder can keep many
// of them alive at once.

#ifndef FLDP_CORE_MODEL_H_
#define FLDP_CORE_MODEL_H_

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "fldp/rational.h"

namespace fldp {

using ActorId = std::string;
using LocationId = std::string;

struct DataPoint {
  std::string id;
  std::vector<Rational> features;
  Rational value;
  bool secret = false;

  // Content equality used by set operations: (id, features, value). The
  // secret flag is a label and does not take part.
  bool SameContent(const DataPoint& other) const {
    return id == other.id && features == other.features &&
           value == other.value;
  }
};

// A finite set of points keyed by id.
class Dataset {
 public:
  Dataset();

  // Fails on duplicate ids or inconsistent feature lengths.
  static absl::StatusOr<Dataset> Create(std::vector<DataPoint> points);

  size_t size() const { return points_->size(); }
  bool empty() const { return points_->empty(); }
  const DataPoint* Find(const std::string& id) const;
  bool Contains(const std::string& id) const { return Find(id) != nullptr; }

  // Feature length shared by all points; nullopt when empty.
  std::optional<size_t> feature_dim() const;

  absl::StatusOr<Dataset> With(DataPoint point) const;
  Dataset Without(const std::string& id) const;

  std::vector<DataPoint> points() const;
  auto begin() const { return points_->begin(); }
  auto end() const { return points_->end(); }

  // Content equality of the whole set.
  bool operator==(const Dataset& other) const;

 private:
  explicit Dataset(std::map<std::string, DataPoint> points);
  std::shared_ptr<const std::map<std::string, DataPoint>> points_;
};

// Ids whose points are present in only one of the datasets or present in
// both with different content.
std::vector<std::string> DifferingIds(const Dataset& a, const Dataset& b);

// a and b differ in exactly one point (by id and content).
bool NeighborsOne(const Dataset& a, const Dataset& b);

// a and b differ exactly in x.
bool NeighborsX(const Dataset& a, const Dataset& b, const DataPoint& x);

struct ModelParam {
  std::vector<Rational> coords;

  ModelParam() = default;
  explicit ModelParam(std::vector<Rational> c) : coords(std::move(c)) {}
  static ModelParam Zero(size_t dim) {
    return ModelParam(std::vector<Rational>(dim));
  }

  size_t dim() const { return coords.size(); }
  bool operator==(const ModelParam& other) const {
    return coords == other.coords;
  }
  bool operator<(const ModelParam& other) const {
    return coords < other.coords;
  }
};

std::string ToString(const ModelParam& param);

using Partition = std::map<ActorId, Dataset>;

struct IGraph {
  std::set<LocationId> locations;
  std::map<ActorId, LocationId> aloc;
  ActorId server;
  std::set<ActorId> clients;
  std::set<ActorId> ready;
  std::map<ActorId, ModelParam> gradient;
  ModelParam curmodpar;
  Partition partition;
  Dataset dataset;
};

// One violation description per failed invariant; empty when well formed.
std::vector<std::string> ValidateIGraph(const IGraph& g);

struct PutEvent {
  Partition parts;
  bool operator==(const PutEvent& other) const { return parts == other.parts; }
};
struct GetEvent {
  ActorId client;
  ModelParam grad;
  bool operator==(const GetEvent& other) const = default;
};
struct EvalEvent {
  ModelParam newmodel;
  bool operator==(const EvalEvent& other) const = default;
};
using Event = std::variant<PutEvent, GetEvent, EvalEvent>;

// Finite execution trace, newest event first. Prepending shares the tail, so
// a trace and all of its extensions occupy storage proportional to the
// longest one.
class Trace {
 public:
  Trace() = default;

  Trace Prepend(Event event) const;

  bool empty() const { return head_ == nullptr; }
  size_t size() const { return size_; }
  // Most recent event. Requires !empty().
  const Event& newest() const { return head_->event; }

  std::vector<Event> NewestFirst() const;
  std::vector<Event> Chronological() const;

  size_t CountEval() const;
  bool HasPut() const;

  bool operator==(const Trace& other) const;

 private:
  struct Node {
    Event event;
    std::shared_ptr<const Node> next;
  };
  std::shared_ptr<const Node> head_;
  size_t size_ = 0;
};

// Checks that a chronological trace is a prefix of Put (Get^k Eval)^r with
// each round's Get clients pairwise distinct members of `clients`. With
// `complete` the trace must also end on a round boundary.
std::vector<std::string> CheckTraceShape(const Trace& trace,
                                         const std::set<ActorId>& clients,
                                         bool complete);

// Set of traces; insertion keeps the order and drops duplicates. Current()
// is the trace most recently inserted.
class Protocol {
 public:
  Protocol() : traces_{Trace()} {}

  Protocol Insert(Trace trace) const;
  bool Contains(const Trace& trace) const;
  const Trace& Current() const { return traces_.back(); }
  const std::vector<Trace>& traces() const { return traces_; }

 private:
  std::vector<Trace> traces_;
};

// The policy component of an infrastructure. It carries no behavior.
struct Policy {
  bool operator==(const Policy&) const = default;
};

struct Infrastructure {
  IGraph igra;
  Protocol prot;
  Policy poli;
};

// Builds a fresh infrastructure: one location per actor, every client's
// gradient equal to `initial_model`, empty protocol. `planned` becomes the
// partition field and is what the Put step deploys.
absl::StatusOr<Infrastructure> MakeInfrastructure(const ActorId& server,
                                                  const Partition& planned,
                                                  const ModelParam& initial_model);

// Union of the partitions; fails when ids collide.
absl::StatusOr<Dataset> UnionOf(const Partition& parts);

}  // namespace fldp

#endif  // FLDP_CORE_MODEL_H_
