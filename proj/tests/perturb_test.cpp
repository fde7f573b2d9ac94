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
#include "detrec/perturb.hpp"

namespace detrec {
namespace {

SeqOp on(Pid p, OpDescriptor op) { return {p, op}; }

Witness make(SeqOp op_p, SeqHistory h1, SeqOp op1, SeqHistory ext, SeqOp op2) {
  Witness w;
  w.op_p = op_p;
  w.h1 = std::move(h1);
  w.op_prime1 = op1;
  w.extension = std::move(ext);
  w.h2 = w.h1;
  w.h2.push_back(w.op_p);
  w.h2.push_back(w.op_prime1);
  w.h2.insert(w.h2.end(), w.extension.begin(), w.extension.end());
  w.op_prime2 = op2;
  return w;
}

TEST(Perturbing, WriteChangesLaterRead) {
  auto spec = register_spec(0);
  EXPECT_TRUE(is_perturbing_after(spec, {}, on(0, OpDescriptor::write(1)), on(1, OpDescriptor::read())));
  EXPECT_FALSE(is_perturbing_after(spec, {}, on(0, OpDescriptor::write(0)), on(1, OpDescriptor::read())));
  EXPECT_FALSE(is_perturbing_after(spec, {}, on(0, OpDescriptor::read()), on(1, OpDescriptor::read())));
  EXPECT_THROW(is_perturbing_after(spec, {}, on(0, OpDescriptor::write(1)), on(0, OpDescriptor::read())),
               ConfigError);
}

// The hand constructions for each object kind, checked by replay.
TEST(Perturbing, RegisterConstruction) {
  auto w = make(on(0, OpDescriptor::write(1)), {}, on(1, OpDescriptor::read()),
                {on(1, OpDescriptor::write(0))}, on(1, OpDescriptor::read()));
  EXPECT_TRUE(certify_witness(register_spec(0), w));
}

TEST(Perturbing, CounterConstruction) {
  auto spec = bounded_counter_spec(0, 2);
  auto w = make(on(0, OpDescriptor::increment()), {}, on(1, OpDescriptor::read()), {},
                on(1, OpDescriptor::read()));
  EXPECT_TRUE(certify_witness(spec, w));
  // Saturation: a third increment is invisible.
  SeqHistory two = {on(1, OpDescriptor::increment()), on(1, OpDescriptor::increment())};
  EXPECT_FALSE(is_perturbing_after(spec, two, on(0, OpDescriptor::increment()), on(1, OpDescriptor::read())));
}

TEST(Perturbing, CasConstruction) {
  auto w = make(on(0, OpDescriptor::cas(0, 1)), {}, on(1, OpDescriptor::cas(0, 1)),
                {on(1, OpDescriptor::cas(1, 0))}, on(1, OpDescriptor::cas(0, 1)));
  EXPECT_TRUE(certify_witness(cas_spec(0), w));
}

TEST(Perturbing, FetchAddConstruction) {
  auto w = make(on(0, OpDescriptor::fetch_add(1)), {}, on(1, OpDescriptor::read()), {},
                on(1, OpDescriptor::read()));
  EXPECT_TRUE(certify_witness(fetch_add_spec(0), w));
}

TEST(Perturbing, QueueConstruction) {
  SeqHistory h1 = {on(0, OpDescriptor::enqueue(0)), on(0, OpDescriptor::enqueue(1))};
  auto w = make(on(0, OpDescriptor::dequeue()), h1, on(1, OpDescriptor::dequeue()),
                {on(1, OpDescriptor::enqueue(0)), on(1, OpDescriptor::enqueue(1))},
                on(1, OpDescriptor::dequeue()));
  EXPECT_TRUE(certify_witness(fifo_queue_spec(), w));
}

TEST(Perturbing, MaxRegisterSecondWriteIsInvisible) {
  auto spec = max_register_spec(0);
  auto wm = on(0, OpDescriptor::write_max(2));
  EXPECT_TRUE(is_perturbing_after(spec, {}, wm, on(1, OpDescriptor::read())));
  SeqHistory h2 = {wm, on(1, OpDescriptor::read()), on(1, OpDescriptor::write_max(1))};
  for (auto op : {OpDescriptor::read(), OpDescriptor::write_max(0), OpDescriptor::write_max(2)})
    EXPECT_FALSE(is_perturbing_after(spec, h2, wm, on(1, op)));
}

TEST(Certify, RejectsMalformedWitnesses) {
  auto spec = register_spec(0);
  auto w = make(on(0, OpDescriptor::write(1)), {}, on(1, OpDescriptor::read()),
                {on(1, OpDescriptor::write(0))}, on(1, OpDescriptor::read()));
  auto bad = w;
  bad.extension = {on(0, OpDescriptor::write(0))};  // not p-free
  bad.h2 = {bad.op_p, bad.op_prime1, bad.extension[0]};
  EXPECT_FALSE(certify_witness(spec, bad));
  bad = w;
  bad.h2.pop_back();  // h2 inconsistent with the parts
  EXPECT_FALSE(certify_witness(spec, bad));
  bad = w;
  bad.extension.clear();  // after Write(1) . Read, a second Write(1) is invisible
  bad.h2 = {bad.op_p, bad.op_prime1};
  EXPECT_FALSE(certify_witness(spec, bad));
}

TEST(Search, FindsCertifiedWitnesses) {
  for (const char* name : {"register", "counter", "cas", "faa", "queue"}) {
    auto s = make_perturb_spec(name);
    auto r = search_doubly_perturbing_witness(s);
    ASSERT_TRUE(r.witness.has_value()) << name;
    EXPECT_FALSE(r.exhausted);
    EXPECT_LE(static_cast<int>(r.witness->h2.size()), 6) << name;
    EXPECT_TRUE(certify_witness(s.spec, *r.witness)) << name;
    for (const auto& o : r.witness->extension) EXPECT_NE(o.pid, r.witness->op_p.pid);
  }
}

TEST(Search, ShortestWitnessesFirst) {
  auto r = search_doubly_perturbing_witness(make_perturb_spec("register"));
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->op_p.op, OpDescriptor::write(1));
  EXPECT_EQ(r.witness->op_prime1.op, OpDescriptor::read());
  ASSERT_EQ(r.witness->extension.size(), 1u);
  EXPECT_EQ(r.witness->extension[0].op, OpDescriptor::write(0));

  auto c = search_doubly_perturbing_witness(make_perturb_spec("counter"));
  ASSERT_TRUE(c.witness);
  EXPECT_EQ(c.witness->op_p.op, OpDescriptor::increment());
  EXPECT_TRUE(c.witness->h1.empty());
  EXPECT_TRUE(c.witness->extension.empty());
}

TEST(Search, MaxRegisterExhausts) {
  auto s = make_perturb_spec("maxreg");
  auto r = search_doubly_perturbing_witness(s);
  EXPECT_FALSE(r.witness.has_value());
  EXPECT_TRUE(r.exhausted);
  EXPECT_EQ(r.bound, 6);
  EXPECT_GT(r.candidates, 0u);
}

TEST(Search, WitnessHistoryIsLinearizable) {
  auto s = make_perturb_spec("queue");
  auto r = search_doubly_perturbing_witness(s);
  ASSERT_TRUE(r.witness);
  const History h = witness_history(s.spec, *r.witness);
  EXPECT_EQ(h.size(), 2 * (r.witness->h2.size() + 2));
  EXPECT_EQ(check_durable_linearizability(h, s.spec).verdict, Verdict::kPass);
}

TEST(Search, ValidatesInput) {
  auto s = make_perturb_spec("register");
  s.history_bound = 1;
  EXPECT_THROW(search_doubly_perturbing_witness(s), ConfigError);
  s = make_perturb_spec("register");
  s.alphabet.clear();
  EXPECT_THROW(search_doubly_perturbing_witness(s), ConfigError);
  EXPECT_THROW(make_perturb_spec("stack"), ConfigError);
}

}  // namespace
}  // namespace detrec
