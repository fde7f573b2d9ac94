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

#ifndef DETREC_MONITOR_HPP_
#define DETREC_MONITOR_HPP_

#include <algorithm>
#include <cstdint>
#include <tuple>
#include <vector>

#include "detrec/history.hpp"
#include "detrec/seq_spec.hpp"

namespace detrec {

enum class Condition : std::uint8_t { kDurableLinearizability, kDetectability };

inline const char* condition_name(Condition c) {
  return c == Condition::kDetectability ? "detectability" : "durable-linearizability";
}

/**
 * Incremental linearizability monitor over a history prefix.
 *
 * The frontier holds every reachable (abstract state, per-process slot)
 * configuration, where a slot is empty, pending, or linearized with a
 * response. After each invoke the frontier is closed under linearizing any
 * pending op. A history is admissible iff the frontier is non-empty. The
 * frontier summarizes the prefix exactly, so two prefixes with equal
 * frontiers have the same admissible continuations.
 */
class OnlineMonitor {
 public:
  OnlineMonitor(SeqSpec spec, int processes, Condition cond)
      : spec_(std::move(spec)), cond_(cond) {
    Config c;
    c.state = spec_.initial;
    c.slots.resize(static_cast<std::size_t>(processes));
    frontier_.push_back(std::move(c));
  }

  Condition condition() const { return cond_; }
  bool ok() const { return !frontier_.empty(); }
  std::size_t frontier_size() const { return frontier_.size(); }

  void observe(const HistoryEvent& e) {
    if (frontier_.empty()) return;
    const auto p = static_cast<std::size_t>(e.pid);
    switch (e.kind) {
      case EventKind::kInvoke:
        for (auto& c : frontier_) c.slots.at(p) = {SlotKind::kPending, e.op, Value()};
        close();
        break;
      case EventKind::kRespond:
        filter(p, [&](const Slot& s) { return s.kind == SlotKind::kLinearized && s.resp == e.value; });
        break;
      case EventKind::kRecoverRespond:
        if (cond_ == Condition::kDurableLinearizability)
          filter(p, [](const Slot&) { return true; });
        else if (e.value.is_fail())
          filter(p, [](const Slot& s) { return s.kind == SlotKind::kPending; });
        else
          filter(p, [&](const Slot& s) { return s.kind == SlotKind::kLinearized && s.resp == e.value; });
        break;
      case EventKind::kCrash:
      case EventKind::kRecoverInvoke:
        break;
    }
  }

  void observe_all(const History& h, std::size_t from = 0) {
    for (std::size_t i = from; i < h.size(); ++i) observe(h[i]);
  }

  template <class Sink>
  void feed(Sink& sink) const {
    sink(frontier_.size());
    for (const auto& c : frontier_) {
      sink(c.state.size());
      for (auto v : c.state) sink(static_cast<std::uint64_t>(v));
      for (const auto& s : c.slots) {
        sink(static_cast<std::uint64_t>(s.kind));
        s.op.to_value().feed(sink);
        s.resp.feed(sink);
      }
    }
  }

 private:
  enum class SlotKind : std::uint8_t { kEmpty, kPending, kLinearized };
  struct Slot {
    SlotKind kind = SlotKind::kEmpty;
    OpDescriptor op;
    Value resp;
    friend bool operator==(const Slot& a, const Slot& b) {
      return a.kind == b.kind && a.op == b.op && a.resp == b.resp;
    }
    friend bool operator<(const Slot& a, const Slot& b) {
      if (a.kind != b.kind) return a.kind < b.kind;
      if (a.op != b.op) return a.op < b.op;
      return a.resp < b.resp;
    }
  };
  struct Config {
    SpecState state;
    std::vector<Slot> slots;
    friend bool operator==(const Config& a, const Config& b) {
      return a.state == b.state && a.slots == b.slots;
    }
    friend bool operator<(const Config& a, const Config& b) {
      return std::tie(a.state, a.slots) < std::tie(b.state, b.slots);
    }
  };

  void normalize() {
    std::sort(frontier_.begin(), frontier_.end());
    frontier_.erase(std::unique(frontier_.begin(), frontier_.end()), frontier_.end());
  }

  void close() {
    std::vector<Config> work = frontier_;
    while (!work.empty()) {
      Config c = std::move(work.back());
      work.pop_back();
      for (std::size_t p = 0; p < c.slots.size(); ++p) {
        if (c.slots[p].kind != SlotKind::kPending) continue;
        auto st = spec_.apply(c.state, c.slots[p].op);
        Config next = c;
        next.state = std::move(st.state);
        next.slots[p].kind = SlotKind::kLinearized;
        next.slots[p].resp = std::move(st.response);
        if (std::find(frontier_.begin(), frontier_.end(), next) == frontier_.end()) {
          frontier_.push_back(next);
          work.push_back(std::move(next));
        }
      }
    }
    normalize();
  }

  template <class Keep>
  void filter(std::size_t p, Keep keep) {
    std::vector<Config> out;
    for (auto& c : frontier_) {
      if (!keep(c.slots.at(p))) continue;
      c.slots[p] = Slot{};
      out.push_back(std::move(c));
    }
    frontier_ = std::move(out);
    normalize();
  }

  SeqSpec spec_;
  Condition cond_;
  std::vector<Config> frontier_;
};

}  // namespace detrec

#endif  // DETREC_MONITOR_HPP_
