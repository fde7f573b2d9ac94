/*
 * Copyright (c) 2026, The detrec Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#include <gtest/gtest.h>

#include <set>

#include "detrec/campaign.hpp"
#include "detrec/explore.hpp"
#include "support.hpp"

namespace detrec {
namespace {

using testing::object;

ExploreBounds bounds(int ops, int crashes) {
  ExploreBounds b;
  b.ops_per_process = ops;
  b.max_crashes = crashes;
  return b;
}

// Each process's (op, outcome) sequence; the outcome of a crashed op is its
// recovery response, or "-" if it never resolved.
std::string signature(const History& h) {
  std::map<std::uint64_t, std::pair<Pid, std::string>> ops;
  for (const auto& e : h.events()) {
    if (e.kind == EventKind::kInvoke) ops[e.instance] = {e.pid, e.op.str() + "=-"};
    if (e.kind == EventKind::kRespond || e.kind == EventKind::kRecoverRespond)
      ops[e.instance].second = e.op.str() + "=" + e.value.str();
  }
  std::map<Pid, std::string> per;
  for (const auto& [inst, v] : ops) per[v.first] += v.second + ";";
  std::string s;
  for (const auto& [p, t] : per) s += std::to_string(p) + ":" + t + "|";
  return s;
}

// Unmemoized enumeration of every schedule with one op per process. Records
// each leaf's signature and verdict.
void naive(const Simulation& sim, const std::vector<OpDescriptor>& alphabet, int max_crashes,
           std::set<std::string>& out, std::set<RunVerdict>& verdicts) {
  bool any = false;
  for (Pid p = 0; p < sim.processes(); ++p) {
    const auto& ctx = sim.context(p);
    if (ctx.status == ProcStatus::kIdle && sim.ops_started(p) == 0) {
      any = true;
      for (const auto& op : alphabet) {
        Simulation c = sim;
        c.invoke(p, op);
        naive(c, alphabet, max_crashes, out, verdicts);
      }
    } else if (ctx.status == ProcStatus::kRunning) {
      any = true;
      Simulation c = sim;
      c.step(p);
      naive(c, alphabet, max_crashes, out, verdicts);
    } else if (ctx.status != ProcStatus::kIdle) {
      any = true;
      Simulation c = sim;
      c.recover(p);
      naive(c, alphabet, max_crashes, out, verdicts);
    }
  }
  if (sim.crashes() < max_crashes && sim.any_in_flight()) {
    Simulation c = sim;
    c.crash();
    naive(c, alphabet, max_crashes, out, verdicts);
  }
  if (!any) {
    out.insert(signature(sim.history()));
    verdicts.insert(judge(sim.history(), cas_spec(), {}));
  }
}

TEST(Explorer, SingleProcessSingleOpVisitsEachOp) {
  auto obj = object("reg-detect", 1, {0});
  std::vector<History> leaves;
  auto b = bounds(1, 0);
  b.harness.step_budget = 100;  // the default 10*N*ops is shorter than one Write at N=1
  auto rep = enumerate_schedules(obj, b, [&](const History& h) { leaves.push_back(h); });
  EXPECT_TRUE(rep.clean());
  EXPECT_EQ(rep.budget_exhausted, 0u);
  EXPECT_EQ(rep.leaves, 2u);
  ASSERT_EQ(leaves.size(), 2u);
  EXPECT_EQ(rep.stats.op_max.at(OpKind::kWrite), 11u);
}

// Memoization merges states that differ only in history, so the explorer
// reports a subset of the naive outcomes, and must agree on whether any
// leaf violates a condition.
TEST(Explorer, AgreesWithNaiveEnumeration) {
  for (const char* mutation : {"none", "cas:skip-cp1", "cas:skip-rd-persist"}) {
    for (int crashes : {0, 1}) {
      auto obj = object("cas-detect", 2, {0, 1}, mutation);
      std::set<std::string> expected, got;
      std::set<RunVerdict> verdicts;
      HarnessConfig cfg;
      cfg.step_budget = 20;
      naive(Simulation(obj, cfg), obj->alphabet(), crashes, expected, verdicts);
      auto b = bounds(1, crashes);
      b.harness = cfg;
      b.max_counterexamples = 1000;
      auto rep = enumerate_schedules(obj, b, [&](const History& h) { got.insert(signature(h)); });
      const std::string where = std::string(mutation) + " crashes=" + std::to_string(crashes);
      EXPECT_FALSE(got.empty()) << where;
      for (const auto& s : got) EXPECT_TRUE(expected.count(s)) << where << " " << s;
      for (const auto& cx : rep.counterexamples) EXPECT_TRUE(expected.count(signature(cx.history))) << where;
      const bool naive_bad = verdicts.count(RunVerdict::kDlFail) || verdicts.count(RunVerdict::kDetFail);
      EXPECT_EQ(rep.violations() > 0, naive_bad) << where;
      EXPECT_EQ(rep.inconclusive, 0u) << where;
    }
  }
}

TEST(Explorer, ReductionPreservesOutcomes) {
  auto obj = object("reg-detect", 2, {0, 1});
  std::set<std::string> with, without;
  auto b = bounds(1, 1);
  auto r1 = enumerate_schedules(obj, b, [&](const History& h) { with.insert(signature(h)); });
  b.reduce_invisible = false;
  auto r2 = enumerate_schedules(obj, b, [&](const History& h) { without.insert(signature(h)); });
  EXPECT_TRUE(r1.clean());
  EXPECT_TRUE(r2.clean());
  EXPECT_GT(r1.reduced, 0u);
  EXPECT_LT(r1.states, r2.states);
  EXPECT_EQ(with, without);
}

TEST(Explorer, CleanOnSmallBounds) {
  for (const char* kind : {"reg-detect", "cas-detect", "maxreg"}) {
    auto rep = enumerate_schedules(object(kind, 2), bounds(1, 1));
    EXPECT_TRUE(rep.clean()) << kind;
    EXPECT_EQ(rep.disagreements, 0u) << kind;
    EXPECT_GT(rep.leaves, 0u) << kind;
  }
}

TEST(Explorer, RefusesLargeBounds) {
  auto rep = enumerate_schedules(object("reg-detect", 4), bounds(1, 1));
  EXPECT_TRUE(rep.refused);
  EXPECT_NE(rep.refusal.find("10^"), std::string::npos);
  EXPECT_TRUE(enumerate_schedules(object("reg-detect", 2), bounds(3, 1)).refused);
  EXPECT_TRUE(enumerate_schedules(object("reg-detect", 2), bounds(1, 3)).refused);
  EXPECT_FALSE(enumerate_schedules(object("reg-detect", 2), bounds(1, 3)).clean());
}

TEST(Explorer, StateCapTruncates) {
  auto b = bounds(1, 1);
  b.max_states = 50;
  auto rep = enumerate_schedules(object("reg-detect", 2), b);
  EXPECT_TRUE(rep.truncated);
  EXPECT_FALSE(rep.clean());
}

// Each counterexample must reproduce from its schedule alone.
void expect_replays(const std::shared_ptr<const ObjectModel>& obj, const Counterexample& cx,
                    const ExploreBounds& b) {
  HarnessConfig cfg = b.harness;
  cfg.step_budget = static_cast<std::uint32_t>(10 * obj->processes() * b.ops_per_process);
  auto run = run_schedule(obj, cx.schedule, cfg);
  EXPECT_EQ(run.history, cx.history);
  auto v = judge(run.history, obj->spec(), {});
  EXPECT_EQ(run_verdict_name(v), cx.kind);
}

TEST(Explorer, FindsSkipCheckpointMutation) {
  auto obj = object("cas-detect", 2, {}, "cas:skip-cp1");
  auto b = bounds(1, 1);
  b.stop_at_first_violation = true;
  auto rep = enumerate_schedules(obj, b);
  ASSERT_GT(rep.violations(), 0u);
  ASSERT_EQ(rep.counterexamples.size(), 1u);
  expect_replays(obj, rep.counterexamples[0], b);
}

TEST(Explorer, FindsIdentityCasViolation) {
  ObjectParams p;
  p.kind = "cas-detect";
  p.domain = {0, 1};
  p.identity_cas = true;
  auto obj = make_object(p);
  auto b = bounds(1, 0);
  b.stop_at_first_violation = true;
  auto rep = enumerate_schedules(obj, b);
  EXPECT_GT(rep.dl_violations, 0u);
  ASSERT_FALSE(rep.counterexamples.empty());
  EXPECT_EQ(rep.counterexamples[0].kind, "durable-linearizability");
  expect_replays(obj, rep.counterexamples[0], b);
}

TEST(Explorer, ReportsBudgetExhaustion) {
  auto b = bounds(1, 0);
  b.harness.step_budget = 4;
  auto rep = enumerate_schedules(object("reg-detect", 1, {0}), b);
  EXPECT_GT(rep.budget_exhausted, 0u);
  ASSERT_FALSE(rep.counterexamples.empty());
  EXPECT_EQ(rep.counterexamples[0].kind, "budget-exhausted");
}

TEST(MemoryStates, CasImagesAreValuesTimesBitVectors) {
  for (int n : {1, 2}) {
    auto obj = object("cas-detect", n, {0, 1, 2});
    auto rep = enumerate_memory_states(obj, 40);
    // Step counters keep the full state space open beyond one process.
    if (n == 1) {
      EXPECT_TRUE(rep.complete);
    }
    EXPECT_EQ(rep.images, 3u << n) << n;
  }
  // With two values every successful Cas flips both the value and one bit, so
  // the value is the parity of the bit vector.
  auto rep = enumerate_memory_states(object("cas-detect", 2, {0, 1}), 40);
  EXPECT_EQ(rep.images, 4u);
}

TEST(MemoryStates, MaxregImagesAreEntryTuples) {
  auto obj = object("maxreg", 2, {0, 1});
  auto rep = enumerate_memory_states(obj, 40);
  EXPECT_TRUE(rep.complete);
  EXPECT_EQ(rep.images, 4u);
}

TEST(MemoryStates, DepthBoundsTheSearch) {
  auto obj = object("reg-detect", 1, {0});
  auto shallow = enumerate_memory_states(obj, 1);
  EXPECT_FALSE(shallow.complete);
  EXPECT_EQ(shallow.images, 1u);  // an invoke alone changes only private cells
  auto with_private = enumerate_memory_states(obj, 1, true);
  EXPECT_GT(with_private.images, 1u);
  auto capped = enumerate_memory_states(object("reg-detect", 2), 40, false, 100);
  EXPECT_TRUE(capped.truncated);
  EXPECT_FALSE(capped.complete);
}

}  // namespace
}  // namespace detrec
