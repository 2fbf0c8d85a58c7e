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

#include "fldp/core_model.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace fldp {

Dataset::Dataset()
    : points_(std::make_shared<const std::map<std::string, DataPoint>>()) {}

Dataset::Dataset(std::map<std::string, DataPoint> points)
    : points_(std::make_shared<const std::map<std::string, DataPoint>>(
          std::move(points))) {}

absl::StatusOr<Dataset> Dataset::Create(std::vector<DataPoint> points) {
  std::map<std::string, DataPoint> by_id;
  std::optional<size_t> dim;
  for (auto& p : points) {
    if (dim.has_value() && *dim != p.features.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "point ", p.id, " has ", p.features.size(), " features, expected ",
          *dim));
    }
    dim = p.features.size();
    std::string id = p.id;
    if (!by_id.emplace(id, std::move(p)).second) {
      return absl::InvalidArgumentError(absl::StrCat("duplicate id ", id));
    }
  }
  return Dataset(std::move(by_id));
}

const DataPoint* Dataset::Find(const std::string& id) const {
  auto it = points_->find(id);
  return it == points_->end() ? nullptr : &it->second;
}

std::optional<size_t> Dataset::feature_dim() const {
  if (points_->empty()) return std::nullopt;
  return points_->begin()->second.features.size();
}

absl::StatusOr<Dataset> Dataset::With(DataPoint point) const {
  if (Contains(point.id)) {
    return absl::InvalidArgumentError(absl::StrCat("duplicate id ", point.id));
  }
  if (auto dim = feature_dim(); dim && *dim != point.features.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("point ", point.id, " has mismatched feature length"));
  }
  std::map<std::string, DataPoint> copy = *points_;
  std::string id = point.id;
  copy.emplace(std::move(id), std::move(point));
  return Dataset(std::move(copy));
}

Dataset Dataset::Without(const std::string& id) const {
  std::map<std::string, DataPoint> copy = *points_;
  copy.erase(id);
  return Dataset(std::move(copy));
}

std::vector<DataPoint> Dataset::points() const {
  std::vector<DataPoint> out;
  out.reserve(points_->size());
  for (const auto& [id, p] : *points_) out.push_back(p);
  return out;
}

bool Dataset::operator==(const Dataset& other) const {
  if (points_ == other.points_) return true;
  return DifferingIds(*this, other).empty();
}

std::vector<std::string> DifferingIds(const Dataset& a, const Dataset& b) {
  std::vector<std::string> out;
  for (const auto& [id, p] : a) {
    const DataPoint* q = b.Find(id);
    if (q == nullptr || !p.SameContent(*q)) out.push_back(id);
  }
  for (const auto& [id, q] : b) {
    if (!a.Contains(id)) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool NeighborsOne(const Dataset& a, const Dataset& b) {
  return DifferingIds(a, b).size() == 1;
}

bool NeighborsX(const Dataset& a, const Dataset& b, const DataPoint& x) {
  std::vector<std::string> diff = DifferingIds(a, b);
  if (diff.size() != 1 || diff.front() != x.id) return false;
  const DataPoint* in_a = a.Find(x.id);
  const DataPoint* in_b = b.Find(x.id);
  return (in_a != nullptr && in_a->SameContent(x)) ||
         (in_b != nullptr && in_b->SameContent(x));
}

std::string ToString(const ModelParam& param) {
  return absl::StrCat(
      "(",
      absl::StrJoin(param.coords, ", ",
                    [](std::string* out, const Rational& r) {
                      out->append(FormatDecimal(r));
                    }),
      ")");
}

absl::StatusOr<Dataset> UnionOf(const Partition& parts) {
  std::vector<DataPoint> all;
  for (const auto& [client, data] : parts) {
    for (const auto& [id, p] : data) all.push_back(p);
  }
  return Dataset::Create(std::move(all));
}

std::vector<std::string> ValidateIGraph(const IGraph& g) {
  std::vector<std::string> violations;
  if (g.clients.contains(g.server)) violations.push_back("server in clients");
  if (!std::includes(g.clients.begin(), g.clients.end(), g.ready.begin(),
                     g.ready.end())) {
    violations.push_back("ready not subset of clients");
  }

  auto same_domain = [&](const auto& map) {
    if (map.size() != g.clients.size()) return false;
    for (const auto& [actor, unused] : map) {
      if (!g.clients.contains(actor)) return false;
    }
    return true;
  };
  if (!same_domain(g.gradient)) {
    violations.push_back("gradient domain differs from clients");
  }
  if (!same_domain(g.partition)) {
    violations.push_back("partition domain differs from clients");
  }
  for (const auto& [actor, loc] : g.aloc) {
    if (!g.locations.contains(loc)) {
      violations.push_back(
          absl::StrCat("actor ", actor, " located outside locations"));
    }
  }
  for (const auto& [actor, grad] : g.gradient) {
    if (grad.dim() != g.curmodpar.dim()) {
      violations.push_back(
          absl::StrCat("gradient of ", actor, " has wrong dimension"));
    }
  }

  // Disjointness by id; coverage by content.
  std::map<std::string, int> owners;
  for (const auto& [client, data] : g.partition) {
    for (const auto& [id, p] : data) ++owners[id];
  }
  bool disjoint = std::all_of(owners.begin(), owners.end(),
                              [](const auto& kv) { return kv.second == 1; });
  if (!disjoint) {
    violations.push_back("partitions not disjoint");
  } else {
    absl::StatusOr<Dataset> joined = UnionOf(g.partition);
    if (!joined.ok() || !(*joined == g.dataset)) {
      violations.push_back("partitions do not cover dataset");
    }
  }
  return violations;
}

Trace Trace::Prepend(Event event) const {
  Trace out;
  out.head_ = std::make_shared<const Node>(Node{std::move(event), head_});
  out.size_ = size_ + 1;
  return out;
}

std::vector<Event> Trace::NewestFirst() const {
  std::vector<Event> out;
  out.reserve(size_);
  for (const Node* n = head_.get(); n != nullptr; n = n->next.get()) {
    out.push_back(n->event);
  }
  return out;
}

std::vector<Event> Trace::Chronological() const {
  std::vector<Event> out = NewestFirst();
  std::reverse(out.begin(), out.end());
  return out;
}

size_t Trace::CountEval() const {
  size_t count = 0;
  for (const Node* n = head_.get(); n != nullptr; n = n->next.get()) {
    if (std::holds_alternative<EvalEvent>(n->event)) ++count;
  }
  return count;
}

bool Trace::HasPut() const {
  for (const Node* n = head_.get(); n != nullptr; n = n->next.get()) {
    if (std::holds_alternative<PutEvent>(n->event)) return true;
  }
  return false;
}

bool Trace::operator==(const Trace& other) const {
  if (size_ != other.size_) return false;
  const Node* a = head_.get();
  const Node* b = other.head_.get();
  while (a != nullptr) {
    if (a == b) return true;
    if (!(a->event == b->event)) return false;
    a = a->next.get();
    b = b->next.get();
  }
  return true;
}

std::vector<std::string> CheckTraceShape(const Trace& trace,
                                         const std::set<ActorId>& clients,
                                         bool complete) {
  std::vector<std::string> problems;
  std::vector<Event> events = trace.Chronological();
  if (events.empty()) {
    if (complete) problems.push_back("trace has no Put");
    return problems;
  }
  if (!std::holds_alternative<PutEvent>(events.front())) {
    problems.push_back("trace does not start with Put");
    return problems;
  }
  std::set<ActorId> round;
  for (size_t i = 1; i < events.size(); ++i) {
    const Event& e = events[i];
    if (std::holds_alternative<PutEvent>(e)) {
      problems.push_back(absl::StrCat("second Put at position ", i));
    } else if (const auto* get = std::get_if<GetEvent>(&e)) {
      if (!clients.contains(get->client)) {
        problems.push_back(absl::StrCat("Get from non-client ", get->client));
      } else if (!round.insert(get->client).second) {
        problems.push_back(
            absl::StrCat("client ", get->client, " fired twice in a round"));
      }
    } else {
      if (round.size() != clients.size()) {
        problems.push_back(
            absl::StrCat("Eval at position ", i, " before all clients"));
      }
      round.clear();
    }
  }
  if (complete && !round.empty()) {
    problems.push_back("trace ends inside a round");
  }
  return problems;
}

Protocol Protocol::Insert(Trace trace) const {
  Protocol out = *this;
  if (!out.Contains(trace)) out.traces_.push_back(std::move(trace));
  return out;
}

bool Protocol::Contains(const Trace& trace) const {
  return std::any_of(traces_.begin(), traces_.end(),
                     [&](const Trace& t) { return t == trace; });
}

absl::StatusOr<Infrastructure> MakeInfrastructure(
    const ActorId& server, const Partition& planned,
    const ModelParam& initial_model) {
  if (planned.empty()) {
    return absl::InvalidArgumentError("at least one client is required");
  }
  if (initial_model.dim() == 0) {
    return absl::InvalidArgumentError("model dimension must be positive");
  }
  absl::StatusOr<Dataset> dataset = UnionOf(planned);
  if (!dataset.ok()) return dataset.status();

  Infrastructure infra;
  IGraph& g = infra.igra;
  g.server = server;
  g.locations.insert("loc:" + server);
  g.aloc[server] = "loc:" + server;
  for (const auto& [client, data] : planned) {
    g.clients.insert(client);
    g.locations.insert("loc:" + client);
    g.aloc[client] = "loc:" + client;
    g.gradient[client] = initial_model;
  }
  g.curmodpar = initial_model;
  g.partition = planned;
  g.dataset = *std::move(dataset);

  std::vector<std::string> violations = ValidateIGraph(g);
  if (!violations.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "invalid infrastructure: ", absl::StrJoin(violations, "; ")));
  }
  return infra;
}

}  // namespace fldp
