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

#ifndef DETREC_HISTORY_HPP_
#define DETREC_HISTORY_HPP_

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "detrec/value.hpp"

namespace detrec {

enum class EventKind : std::uint8_t { kInvoke, kRespond, kCrash, kRecoverInvoke, kRecoverRespond };

inline const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::kInvoke: return "invoke";
    case EventKind::kRespond: return "respond";
    case EventKind::kCrash: return "crash";
    case EventKind::kRecoverInvoke: return "recover-invoke";
    case EventKind::kRecoverRespond: return "recover-respond";
  }
  return "?";
}

struct HistoryEvent {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kInvoke;
  Pid pid = -1;                  // -1 for crash events
  std::uint64_t instance = 0;    // unused for crash events
  OpDescriptor op;
  Value value;                   // response for respond kinds, bottom otherwise

  /// One line: seq kind pid instance descriptor value ('-' for n/a).
  std::string str() const {
    std::ostringstream os;
    os << seq << ' ' << event_kind_name(kind) << ' ';
    if (kind == EventKind::kCrash) {
      os << "- - - -";
    } else {
      os << pid << ' ' << instance << ' ' << op.str() << ' ';
      if (kind == EventKind::kRespond || kind == EventKind::kRecoverRespond)
        os << value.str();
      else
        os << '-';
    }
    return os.str();
  }

  static HistoryEvent parse(const std::string& line) {
    std::istringstream is(line);
    std::string seq, kind, pid, inst, op, val;
    if (!(is >> seq >> kind >> pid >> inst >> op >> val))
      throw ParseError("history event needs 6 fields", 0);
    HistoryEvent e;
    try {
      e.seq = std::stoull(seq);
    } catch (const std::exception&) {
      throw ParseError("bad event sequence number '" + seq + "'", 0);
    }
    bool known = false;
    for (auto k : {EventKind::kInvoke, EventKind::kRespond, EventKind::kCrash,
                   EventKind::kRecoverInvoke, EventKind::kRecoverRespond}) {
      if (kind == event_kind_name(k)) {
        e.kind = k;
        known = true;
      }
    }
    if (!known) throw ParseError("unknown event kind '" + kind + "'", 0);
    if (e.kind == EventKind::kCrash) return e;
    try {
      e.pid = std::stoi(pid);
      e.instance = std::stoull(inst);
    } catch (const std::exception&) {
      throw ParseError("bad pid or instance in event", 0);
    }
    e.op = OpDescriptor::parse(op);
    if (val != "-") e.value = Value::parse(val);
    return e;
  }

  friend bool operator==(const HistoryEvent& a, const HistoryEvent& b) {
    return a.seq == b.seq && a.kind == b.kind && a.pid == b.pid && a.instance == b.instance &&
           a.op == b.op && a.value == b.value;
  }
};

/// Ordered event log; the checkers' input.
class History {
 public:
  const std::vector<HistoryEvent>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  const HistoryEvent& operator[](std::size_t i) const { return events_[i]; }

  void invoke(Pid p, std::uint64_t inst, const OpDescriptor& op) {
    push(EventKind::kInvoke, p, inst, op, Value());
  }
  void respond(Pid p, std::uint64_t inst, const OpDescriptor& op, const Value& v) {
    push(EventKind::kRespond, p, inst, op, v);
  }
  void crash() { push(EventKind::kCrash, -1, 0, OpDescriptor(), Value()); }
  void recover_invoke(Pid p, std::uint64_t inst, const OpDescriptor& op) {
    push(EventKind::kRecoverInvoke, p, inst, op, Value());
  }
  void recover_respond(Pid p, std::uint64_t inst, const OpDescriptor& op, const Value& v) {
    push(EventKind::kRecoverRespond, p, inst, op, v);
  }

  void push_raw(const HistoryEvent& e) { events_.push_back(e); }
  void truncate(std::size_t n) { events_.resize(n); }

  std::string str() const {
    std::string s;
    for (const auto& e : events_) s += e.str() + "\n";
    return s;
  }

  friend bool operator==(const History& a, const History& b) { return a.events_ == b.events_; }

 private:
  void push(EventKind k, Pid p, std::uint64_t inst, const OpDescriptor& op, const Value& v) {
    HistoryEvent e;
    e.seq = events_.empty() ? 0 : events_.back().seq + 1;
    e.kind = k;
    e.pid = p;
    e.instance = inst;
    e.op = op;
    e.value = v;
    events_.push_back(std::move(e));
  }

  std::vector<HistoryEvent> events_;
};

/**
 * Checks the structural invariants of a history: strictly increasing seq,
 * crash events carry no pid, each response matches an open invocation of the
 * same instance, and a process has at most one live instance at a time.
 * Returns an empty string when well formed.
 */
inline std::string validate_history(const History& h) {
  struct Open {
    Pid pid;
    OpDescriptor op;
    bool running;    // between invoke/recover-invoke and a response or crash
    bool resolved;
    bool recovering;
  };
  std::map<std::uint64_t, Open> inst;
  std::map<Pid, std::uint64_t> live;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto& e = h[i];
    auto where = "event " + std::to_string(i) + ": ";
    if (i > 0 && e.seq <= h[i - 1].seq) return where + "seq not strictly increasing";
    switch (e.kind) {
      case EventKind::kCrash:
        if (e.pid != -1) return where + "crash with a pid";
        for (auto& [id, o] : inst) o.running = false;
        break;
      case EventKind::kInvoke: {
        if (inst.count(e.instance)) return where + "instance invoked twice";
        if (live.count(e.pid)) return where + "process invokes while an operation is live";
        inst[e.instance] = {e.pid, e.op, true, false, false};
        live[e.pid] = e.instance;
        break;
      }
      case EventKind::kRespond: {
        auto it = inst.find(e.instance);
        if (it == inst.end() || !it->second.running || it->second.resolved ||
            it->second.recovering)
          return where + "respond without a running invocation";
        if (it->second.pid != e.pid || it->second.op != e.op) return where + "respond mismatch";
        it->second.resolved = true;
        it->second.running = false;
        live.erase(e.pid);
        break;
      }
      case EventKind::kRecoverInvoke: {
        auto it = inst.find(e.instance);
        if (it == inst.end() || it->second.running || it->second.resolved)
          return where + "recover-invoke for an instance that is not crashed";
        if (it->second.pid != e.pid || it->second.op != e.op) return where + "recover-invoke mismatch";
        it->second.running = true;
        it->second.recovering = true;
        break;
      }
      case EventKind::kRecoverRespond: {
        auto it = inst.find(e.instance);
        if (it == inst.end() || !it->second.running || it->second.resolved)
          return where + "recover-respond without a running recovery";
        if (it->second.pid != e.pid || it->second.op != e.op) return where + "recover-respond mismatch";
        it->second.resolved = true;
        it->second.running = false;
        live.erase(e.pid);
        break;
      }
    }
  }
  return {};
}

}  // namespace detrec

#endif  // DETREC_HISTORY_HPP_
