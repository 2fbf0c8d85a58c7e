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

#include "fldp/rng.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace fldp {
namespace {

using ::fldp::testing::Data;
using ::fldp::testing::Pt;
using ::fldp::testing::Values;

const DataPoint kP1 = Pt("p1", 1);
const DataPoint kP2 = Pt("p2", 2);
const DataPoint kP3 = Pt("p3", 3);
const DataPoint kX = Pt("x", 9);

TEST(NeighborsOneTest, Examples) {
  EXPECT_FALSE(NeighborsOne(Data({kP1}), Data({kP1})));
  EXPECT_TRUE(NeighborsOne(Data({kP1, kP2}), Data({kP1})));
  EXPECT_FALSE(NeighborsOne(Data({kP1, kP2}), Data({kP1, kP3})));
}

TEST(NeighborsOneTest, SubstitutionOfOneValueIsNeighbor) {
  EXPECT_TRUE(NeighborsOne(Data({kP1, kP2}), Data({kP1, Pt("p2", 5)})));
  EXPECT_EQ(DifferingIds(Data({kP1, kP2}), Data({kP1, Pt("p2", 5)})),
            std::vector<std::string>{"p2"});
}

TEST(NeighborsOneTest, SecretFlagIsNotContent) {
  EXPECT_FALSE(NeighborsOne(Data({Pt("p", 1, {}, true)}), Data({Pt("p", 1)})));
}

TEST(NeighborsXTest, Examples) {
  EXPECT_TRUE(NeighborsX(Data({kP1, kX}), Data({kP1}), kX));
  EXPECT_FALSE(NeighborsX(Data({kP1}), Data({kP1}), kX));
  EXPECT_FALSE(NeighborsX(Data({kP1, kX}), Data({kP2, kX}), kX));
}

Dataset RandomSubset(SplitMix64& rng) {
  std::vector<DataPoint> pts;
  for (int k = 0; k < 5; ++k) {
    if (rng.Below(2)) pts.push_back(Pt("p" + std::to_string(k), rng.Below(2)));
  }
  return Data(pts);
}

TEST(NeighborsPropertyTest, SymmetricAndImpliedByNeighborsX) {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    Dataset a = RandomSubset(rng);
    Dataset b = RandomSubset(rng);
    EXPECT_EQ(NeighborsOne(a, b), NeighborsOne(b, a));
    for (const Dataset* d : {&a, &b}) {
      for (const auto& [id, p] : *d) {
        if (NeighborsX(a, b, p)) EXPECT_TRUE(NeighborsOne(a, b));
      }
    }
  }
}

TEST(DatasetTest, RejectsDuplicateIdsAndRaggedFeatures) {
  EXPECT_FALSE(Dataset::Create({kP1, kP1}).ok());
  EXPECT_FALSE(Dataset::Create({Pt("a", 0, {1}), Pt("b", 0, {1, 2})}).ok());
}

TEST(DatasetTest, WithAndWithoutLeaveOriginalUntouched) {
  Dataset d = Data({kP1});
  Dataset bigger = *d.With(kP2);
  EXPECT_EQ(d.size(), 1u);
  EXPECT_EQ(bigger.size(), 2u);
  EXPECT_EQ(bigger.Without("p2"), d);
  EXPECT_FALSE(bigger.With(kP1).ok());
}

IGraph TwoClientGraph() {
  Infrastructure i = *MakeInfrastructure(
      "s", {{"c1", Data({kP1})}, {"c2", Data({kP2})}}, ModelParam::Zero(1));
  return i.igra;
}

TEST(ValidateIGraphTest, WellFormedGraphHasNoViolations) {
  EXPECT_TRUE(ValidateIGraph(TwoClientGraph()).empty());
}

TEST(ValidateIGraphTest, ServerInClients) {
  IGraph g = TwoClientGraph();
  g.server = "c1";
  EXPECT_EQ(ValidateIGraph(g), std::vector<std::string>{"server in clients"});
}

TEST(ValidateIGraphTest, OverlappingPartitions) {
  IGraph g = TwoClientGraph();
  g.partition["c2"] = Data({kP1, kP2});
  EXPECT_EQ(ValidateIGraph(g),
            std::vector<std::string>{"partitions not disjoint"});
}

TEST(ValidateIGraphTest, OneEntryPerViolation) {
  IGraph g = TwoClientGraph();
  g.ready = {"ghost"};
  g.gradient.erase("c1");
  g.partition["c1"] = Data({});
  std::vector<std::string> v = ValidateIGraph(g);
  EXPECT_EQ(v.size(), 3u);
  EXPECT_NE(std::find(v.begin(), v.end(), "ready not subset of clients"), v.end());
  EXPECT_NE(std::find(v.begin(), v.end(), "partitions do not cover dataset"),
            v.end());
}

TEST(ValidateIGraphTest, PureAndIdempotent) {
  IGraph g = TwoClientGraph();
  g.server = "c1";
  IGraph copy = g;
  EXPECT_EQ(ValidateIGraph(g), ValidateIGraph(g));
  EXPECT_EQ(g.server, copy.server);
  EXPECT_EQ(g.clients, copy.clients);
}

TEST(TraceTest, ChronologicalReversesStorage) {
  Trace t = Trace()
                .Prepend(PutEvent{{}})
                .Prepend(GetEvent{"c1", ModelParam::Zero(1)})
                .Prepend(EvalEvent{ModelParam::Zero(1)});
  std::vector<Event> newest = t.NewestFirst();
  std::vector<Event> chrono = t.Chronological();
  std::reverse(newest.begin(), newest.end());
  EXPECT_EQ(newest, chrono);
  EXPECT_TRUE(std::holds_alternative<EvalEvent>(t.newest()));
  EXPECT_EQ(t.CountEval(), 1u);
  EXPECT_TRUE(t.HasPut());
}

TEST(TraceTest, PrependSharesTail) {
  Trace base = Trace().Prepend(PutEvent{{}});
  Trace a = base.Prepend(GetEvent{"c1", ModelParam::Zero(1)});
  Trace b = base.Prepend(GetEvent{"c2", ModelParam::Zero(1)});
  EXPECT_EQ(base.size(), 1u);
  EXPECT_FALSE(a == b);
  EXPECT_EQ(a.size(), 2u);
}

TEST(TraceShapeTest, RejectsRepeatedClientWithinRound) {
  Trace t = Trace()
                .Prepend(PutEvent{{}})
                .Prepend(GetEvent{"c1", ModelParam::Zero(1)})
                .Prepend(GetEvent{"c1", ModelParam::Zero(1)});
  EXPECT_FALSE(CheckTraceShape(t, {"c1", "c2"}, false).empty());
}

TEST(TraceShapeTest, AcceptsCompleteRound) {
  Trace t = Trace()
                .Prepend(PutEvent{{}})
                .Prepend(GetEvent{"c2", ModelParam::Zero(1)})
                .Prepend(GetEvent{"c1", ModelParam::Zero(1)})
                .Prepend(EvalEvent{ModelParam::Zero(1)});
  EXPECT_TRUE(CheckTraceShape(t, {"c1", "c2"}, true).empty());
  EXPECT_FALSE(CheckTraceShape(t.Prepend(GetEvent{"c1", ModelParam::Zero(1)}),
                               {"c1", "c2"}, true)
                   .empty());
}

TEST(ProtocolTest, StartsWithEmptyTraceAndKeepsSetSemantics) {
  Protocol p;
  EXPECT_TRUE(p.Contains(Trace()));
  Trace t = Trace().Prepend(PutEvent{{}});
  Protocol q = p.Insert(t).Insert(t);
  EXPECT_EQ(q.traces().size(), 2u);
  EXPECT_EQ(q.Current(), t);
  EXPECT_EQ(p.traces().size(), 1u);
}

TEST(MakeInfrastructureTest, InitialState) {
  Infrastructure i = *MakeInfrastructure(
      "s", {{"c1", Values("a", {1})}, {"c2", Values("b", {2, 3})}},
      ModelParam::Zero(1));
  EXPECT_EQ(i.igra.clients, (std::set<ActorId>{"c1", "c2"}));
  EXPECT_TRUE(i.igra.ready.empty());
  EXPECT_EQ(i.igra.dataset.size(), 3u);
  EXPECT_EQ(i.prot.traces().size(), 1u);
  EXPECT_TRUE(ValidateIGraph(i.igra).empty());
}

TEST(MakeInfrastructureTest, RejectsCollidingIds) {
  EXPECT_FALSE(MakeInfrastructure("s",
                                  {{"c1", Values("a", {1})},
                                   {"c2", Values("a", {1})}},
                                  ModelParam::Zero(1))
                   .ok());
}

}  // namespace
}  // namespace fldp
