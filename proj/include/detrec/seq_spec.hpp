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

#ifndef DETREC_SEQ_SPEC_HPP_
#define DETREC_SEQ_SPEC_HPP_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "detrec/value.hpp"

namespace detrec {

/// Abstract object state. Small integer vectors cover every shipped object.
using SpecState = std::vector<std::int64_t>;

struct SpecStep {
  SpecState state;
  Value response;
};

/// Deterministic sequential specification.
struct SeqSpec {
  std::string name;
  SpecState initial;
  std::function<SpecStep(const SpecState&, const OpDescriptor&)> apply;
};

namespace spec_detail {
[[noreturn]] inline void unsupported(const std::string& spec, const OpDescriptor& op) {
  throw ConfigError(spec + " does not support " + op.str());
}
}  // namespace spec_detail

inline SeqSpec register_spec(std::int64_t initial = 0) {
  return {"register", {initial}, [](const SpecState& s, const OpDescriptor& op) -> SpecStep {
            switch (op.kind) {
              case OpKind::kRead: return {s, Value::integer(s[0])};
              case OpKind::kWrite: return {{op.arg0}, Value::ack()};
              default: spec_detail::unsupported("register", op);
            }
          }};
}

inline SeqSpec cas_spec(std::int64_t initial = 0) {
  return {"cas", {initial}, [](const SpecState& s, const OpDescriptor& op) -> SpecStep {
            switch (op.kind) {
              case OpKind::kRead: return {s, Value::integer(s[0])};
              case OpKind::kCas:
                if (s[0] == op.arg0) return {{op.arg1}, Value::boolean(true)};
                return {s, Value::boolean(false)};
              default: spec_detail::unsupported("cas", op);
            }
          }};
}

inline SeqSpec max_register_spec(std::int64_t initial = 0) {
  return {"maxreg", {initial}, [](const SpecState& s, const OpDescriptor& op) -> SpecStep {
            switch (op.kind) {
              case OpKind::kRead: return {s, Value::integer(s[0])};
              case OpKind::kWriteMax: return {{std::max(s[0], op.arg0)}, Value::ack()};
              default: spec_detail::unsupported("maxreg", op);
            }
          }};
}

/// Counter saturating at `max`.
inline SeqSpec bounded_counter_spec(std::int64_t initial = 0,
                                    std::int64_t max = std::numeric_limits<std::int64_t>::max()) {
  return {"counter", {initial}, [max](const SpecState& s, const OpDescriptor& op) -> SpecStep {
            switch (op.kind) {
              case OpKind::kRead: return {s, Value::integer(s[0])};
              case OpKind::kIncrement: return {{s[0] < max ? s[0] + 1 : max}, Value::ack()};
              default: spec_detail::unsupported("counter", op);
            }
          }};
}

inline SeqSpec fetch_add_spec(std::int64_t initial = 0) {
  return {"faa", {initial}, [](const SpecState& s, const OpDescriptor& op) -> SpecStep {
            switch (op.kind) {
              case OpKind::kRead: return {s, Value::integer(s[0])};
              case OpKind::kFetchAdd: return {{s[0] + op.arg0}, Value::integer(s[0])};
              default: spec_detail::unsupported("faa", op);
            }
          }};
}

/// FIFO queue; Dequeue on empty responds bottom.
inline SeqSpec fifo_queue_spec() {
  return {"queue", {}, [](const SpecState& s, const OpDescriptor& op) -> SpecStep {
            switch (op.kind) {
              case OpKind::kEnqueue: {
                SpecState next = s;
                next.push_back(op.arg0);
                return {std::move(next), Value::ack()};
              }
              case OpKind::kDequeue: {
                if (s.empty()) return {s, Value::bottom()};
                return {SpecState(s.begin() + 1, s.end()), Value::integer(s.front())};
              }
              default: spec_detail::unsupported("queue", op);
            }
          }};
}

/// Replays a sequential history and returns the response of every op.
inline std::vector<Value> replay_responses(const SeqSpec& spec,
                                           const std::vector<OpDescriptor>& ops,
                                           SpecState* final_state = nullptr) {
  SpecState s = spec.initial;
  std::vector<Value> out;
  out.reserve(ops.size());
  for (const auto& op : ops) {
    auto step = spec.apply(s, op);
    s = std::move(step.state);
    out.push_back(std::move(step.response));
  }
  if (final_state) *final_state = s;
  return out;
}

}  // namespace detrec

#endif  // DETREC_SEQ_SPEC_HPP_
