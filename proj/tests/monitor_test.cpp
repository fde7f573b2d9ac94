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

#include "detrec/checker.hpp"
#include "detrec/monitor.hpp"

namespace detrec {
namespace {

const auto W = OpDescriptor::write;
const auto R = OpDescriptor::read;

bool admits(const History& h, Condition c, int n = 2) {
  OnlineMonitor m(register_spec(), n, c);
  m.observe_all(h);
  return m.ok();
}

TEST(OnlineMonitor, StartsAdmissible) {
  OnlineMonitor m(register_spec(), 2, Condition::kDetectability);
  EXPECT_TRUE(m.ok());
  EXPECT_EQ(m.frontier_size(), 1u);
}

TEST(OnlineMonitor, RejectsStaleRead) {
  History h;
  h.invoke(0, 1, W(1));
  h.respond(0, 1, W(1), Value::ack());
  h.invoke(1, 2, R());
  h.respond(1, 2, R(), Value::integer(0));
  EXPECT_FALSE(admits(h, Condition::kDurableLinearizability));
}

TEST(OnlineMonitor, BranchesOnPendingOps) {
  OnlineMonitor m(register_spec(), 2, Condition::kDurableLinearizability);
  History h;
  h.invoke(0, 1, W(1));
  m.observe(h[0]);
  EXPECT_EQ(m.frontier_size(), 2u);  // pending or linearized
}

TEST(OnlineMonitor, RecoveredFailOnlyMattersForDetectability) {
  History h;
  h.invoke(0, 1, W(1));
  h.crash();
  h.recover_invoke(0, 1, W(1));
  h.recover_respond(0, 1, W(1), Value::fail());
  h.invoke(1, 2, R());
  h.respond(1, 2, R(), Value::integer(1));
  EXPECT_TRUE(admits(h, Condition::kDurableLinearizability));
  EXPECT_FALSE(admits(h, Condition::kDetectability));
}

TEST(OnlineMonitor, AgreesWithOfflineCheckerOnSamples) {
  std::vector<History> samples;
  {
    History h;
    h.invoke(0, 1, W(1));
    h.invoke(1, 2, R());
    h.respond(1, 2, R(), Value::integer(1));
    h.invoke(1, 3, R());
    h.respond(1, 3, R(), Value::integer(0));
    samples.push_back(h);
  }
  {
    History h;
    h.invoke(0, 1, W(2));
    h.crash();
    h.invoke(1, 2, W(1));
    h.respond(1, 2, W(1), Value::ack());
    h.recover_invoke(0, 1, W(2));
    h.recover_respond(0, 1, W(2), Value::ack());
    h.invoke(1, 3, R());
    h.respond(1, 3, R(), Value::integer(1));
    samples.push_back(h);
  }
  {
    History h;
    h.invoke(0, 1, W(2));
    h.crash();
    h.recover_invoke(0, 1, W(2));
    h.recover_respond(0, 1, W(2), Value::ack());
    h.invoke(1, 2, R());
    h.respond(1, 2, R(), Value::integer(0));
    samples.push_back(h);
  }
  for (const auto& h : samples) {
    for (auto c : {Condition::kDurableLinearizability, Condition::kDetectability}) {
      bool offline = check_condition(c, h, register_spec()).verdict == Verdict::kPass;
      EXPECT_EQ(admits(h, c), offline) << condition_name(c) << "\n" << h.str();
    }
  }
}

TEST(OnlineMonitor, EqualFrontiersFingerprintEqually) {
  // Different orders of two completed writes of the same value.
  History a, b;
  a.invoke(0, 1, W(1));
  a.respond(0, 1, W(1), Value::ack());
  a.invoke(1, 2, W(1));
  a.respond(1, 2, W(1), Value::ack());
  b.invoke(1, 7, W(1));
  b.respond(1, 7, W(1), Value::ack());
  b.invoke(0, 8, W(1));
  b.respond(0, 8, W(1), Value::ack());
  OnlineMonitor ma(register_spec(), 2, Condition::kDetectability);
  OnlineMonitor mb(register_spec(), 2, Condition::kDetectability);
  ma.observe_all(a);
  mb.observe_all(b);
  Fingerprint fa, fb;
  ma.feed(fa);
  mb.feed(fb);
  EXPECT_EQ(fa.digest(), fb.digest());
}

}  // namespace
}  // namespace detrec
