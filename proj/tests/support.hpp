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

#ifndef DETREC_TESTS_SUPPORT_HPP_
#define DETREC_TESTS_SUPPORT_HPP_

#include <memory>
#include <string>
#include <vector>

#include "detrec/harness.hpp"
#include "detrec/registry.hpp"

namespace detrec::testing {

inline std::shared_ptr<const ObjectModel> object(const std::string& kind, int n = 2,
                                                 std::vector<std::int64_t> domain = {},
                                                 const std::string& mutation = "none") {
  ObjectParams p;
  p.kind = kind;
  p.n = n;
  p.domain = std::move(domain);
  return make_object(apply_mutation(p, mutation));
}

/// Directives from "s0 s0 c r0" notation.
inline std::vector<Directive> directives(const std::string& text) {
  std::vector<Directive> out;
  std::string word;
  for (char c : text + " ") {
    if (c == ' ') {
      if (!word.empty()) out.push_back(Directive::parse(word));
      word.clear();
    } else {
      word += c;
    }
  }
  return out;
}

/// Invokes `op` on p and steps it to its response; returns the primitives taken.
inline int run_op(Simulation& sim, Pid p, const OpDescriptor& op) {
  sim.invoke(p, op);
  int steps = 0;
  while (!sim.idle(p)) {
    sim.step(p);
    ++steps;
  }
  return steps;
}

/// Runs p's recovery to its response; returns the primitives taken.
inline int run_recovery(Simulation& sim, Pid p) {
  int steps = 0;
  while (!sim.idle(p)) {
    sim.recover(p);
    ++steps;
  }
  return steps;
}

/// Invokes `op` and performs exactly `k` of its primitives.
inline void partial_op(Simulation& sim, Pid p, const OpDescriptor& op, int k) {
  sim.invoke(p, op);
  for (int i = 0; i < k; ++i) sim.step(p);
}

inline HarnessConfig roomy() {
  HarnessConfig c;
  c.step_budget = 1000;
  return c;
}

inline const HistoryEvent& last_event(const Simulation& sim) { return sim.history().events().back(); }

}  // namespace detrec::testing

#endif  // DETREC_TESTS_SUPPORT_HPP_
