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

#include <memory>

#include "detrec/nvm.hpp"

namespace detrec {
namespace {

std::shared_ptr<MemoryLayout> layout(int n) {
  auto l = std::make_shared<MemoryLayout>(n);
  l->add_shared("R", {}, Value::integer(0), {FieldWidth::kDomainValue});
  l->add_shared("A", {n, 2}, Value::boolean(false), {FieldWidth::kBit});
  l->add_shared("C", {}, Value::integer(0), {FieldWidth::kDomainValue}, true);
  l->add_private("T", Value::integer(0));
  return l;
}

TEST(MemoryLayout, ResolvesRowMajor) {
  auto l = layout(3);
  Slot a = l->resolve({"A", {0, 0}});
  EXPECT_EQ(l->resolve({"A", {1, 0}}), a + 2);
  EXPECT_EQ(l->resolve({"A", {2, 1}}), a + 5);
  EXPECT_THROW(l->resolve({"A", {3, 0}}), ConfigError);
  EXPECT_THROW(l->resolve({"A", {0}}), ConfigError);
  EXPECT_THROW(l->resolve({"Q", {}}), ConfigError);
}

TEST(MemoryLayout, CountsSharedBitsOnly) {
  // R: v bits, A: 3*2 bits, C: v bits; Ann and T are private.
  EXPECT_EQ(layout(3)->shared_bits(4), 4 + 6 + 4);
}

TEST(MemoryLayout, RejectsBadProcessCounts) {
  EXPECT_THROW(MemoryLayout(0), ConfigError);
}

TEST(Memory, PrivateCellsAreOwnerOnly) {
  auto l = layout(2);
  MemoryImage mem(l);
  Slot t1 = l->resolve({"T", {1}});
  EXPECT_NO_THROW(write_cell(mem, 1, t1, Value::integer(1)));
  EXPECT_THROW(read_cell(mem, 0, t1), ModelViolation);
}

TEST(Memory, CasNeedsCapableCell) {
  auto l = layout(2);
  MemoryImage mem(l);
  Slot r = l->resolve({"R", {}});
  Slot c = l->resolve({"C", {}});
  EXPECT_THROW(cas_cell(mem, 0, r, Value::integer(0), Value::integer(1)), ConfigError);
  EXPECT_TRUE(cas_cell(mem, 0, c, Value::integer(0), Value::integer(1)));
  EXPECT_FALSE(cas_cell(mem, 1, c, Value::integer(0), Value::integer(2)));
  EXPECT_EQ(mem.raw(c), Value::integer(1));
}

TEST(Memory, TraceRecordsAccesses) {
  auto l = layout(2);
  MemoryImage mem(l);
  AccessTrace trace;
  mem.set_trace(&trace);
  Slot r = l->resolve({"R", {}});
  read_cell(mem, 0, r);
  write_cell(mem, 1, r, Value::integer(2));
  ASSERT_EQ(trace.accesses.size(), 2u);
  EXPECT_FALSE(trace.accesses[0].write);
  EXPECT_TRUE(trace.accesses[1].write);
  EXPECT_EQ(trace.accesses[1].pid, 1);
}

TEST(System, AnnounceResetsRespAndCp) {
  System sys(layout(2));
  const auto& l = sys.mem.layout();
  write_cell(sys.mem, 0, l.ann_resp(0), Value::ack());
  write_cell(sys.mem, 0, l.ann_cp(0), Value::integer(2));
  announce(sys, 0, OpDescriptor::write(1));
  auto a = announcement(sys.mem, 0);
  EXPECT_EQ(a.op, OpDescriptor::write(1).to_value());
  EXPECT_TRUE(a.resp.is_bottom());
  EXPECT_EQ(a.cp, 0);
}

TEST(System, AnnounceWithoutResetKeepsStaleState) {
  System sys(layout(2));
  const auto& l = sys.mem.layout();
  write_cell(sys.mem, 0, l.ann_cp(0), Value::integer(2));
  announce(sys, 0, OpDescriptor::read(), false);
  EXPECT_EQ(announcement(sys.mem, 0).cp, 2);
}

TEST(System, CrashWipesFramesNotMemory) {
  System sys(layout(2));
  Slot r = sys.mem.layout().resolve({"R", {}});
  write_cell(sys.mem, 0, r, Value::integer(7));
  sys.procs[0].status = ProcStatus::kRunning;
  sys.procs[0].frame.pc = 4;
  sys.procs[0].frame.locals[0] = 9;
  History h;
  crash_all(sys, &h);
  EXPECT_EQ(sys.procs[0].status, ProcStatus::kCrashed);
  EXPECT_EQ(sys.procs[0].frame, Frame{});
  EXPECT_EQ(sys.procs[1].status, ProcStatus::kIdle);
  EXPECT_EQ(sys.mem.raw(r), Value::integer(7));
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h[0].kind, EventKind::kCrash);
}

}  // namespace
}  // namespace detrec
