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

#ifndef DETREC_CHECKER_HPP_
#define DETREC_CHECKER_HPP_

#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "detrec/history.hpp"
#include "detrec/monitor.hpp"
#include "detrec/seq_spec.hpp"

namespace detrec {

enum class Verdict : std::uint8_t { kPass, kFail, kInconclusive };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "?";
}

struct LinearizedOp {
  Pid pid;
  std::uint64_t instance;
  OpDescriptor op;
  Value response;
};

struct CheckResult {
  Verdict verdict = Verdict::kPass;
  std::vector<LinearizedOp> witness;  // a valid linearization on pass
  std::string explanation;            // why, on fail or inconclusive
  std::uint64_t nodes = 0;
};

struct CheckLimits {
  std::uint64_t max_nodes = 2'000'000;
};

namespace checker_detail {

enum class Outcome : std::uint8_t { kCompleted, kRecovered, kRecoveredFail, kPending };

struct OpRecord {
  Pid pid = 0;
  std::uint64_t instance = 0;
  OpDescriptor op;
  std::size_t inv = 0;
  std::size_t end = std::numeric_limits<std::size_t>::max();
  Outcome outcome = Outcome::kPending;
  Value response;
  bool mandatory = false;
  bool check_response = false;
  bool eligible = true;
};

/// Collects one record per op instance. An instance's interval runs from its
/// invoke to its final response, recovery included; unresolved instances
/// stay open to the end of the history.
inline std::vector<OpRecord> collect(const History& h, Condition cond) {
  std::vector<OpRecord> ops;
  std::map<std::uint64_t, std::size_t> index;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto& e = h[i];
    switch (e.kind) {
      case EventKind::kInvoke:
        index[e.instance] = ops.size();
        ops.emplace_back();
        ops.back().pid = e.pid;
        ops.back().instance = e.instance;
        ops.back().op = e.op;
        ops.back().inv = i;
        break;
      case EventKind::kRespond: {
        auto& r = ops.at(index.at(e.instance));
        r.end = i;
        r.outcome = Outcome::kCompleted;
        r.response = e.value;
        break;
      }
      case EventKind::kRecoverRespond: {
        auto& r = ops.at(index.at(e.instance));
        r.end = i;
        r.outcome = e.value.is_fail() ? Outcome::kRecoveredFail : Outcome::kRecovered;
        r.response = e.value;
        break;
      }
      case EventKind::kCrash:
      case EventKind::kRecoverInvoke:
        break;
    }
  }
  for (auto& r : ops) {
    switch (r.outcome) {
      case Outcome::kCompleted:
        r.mandatory = r.check_response = true;
        break;
      case Outcome::kRecovered:
        r.mandatory = r.check_response = cond == Condition::kDetectability;
        break;
      case Outcome::kRecoveredFail:
        r.eligible = cond == Condition::kDurableLinearizability;
        break;
      case Outcome::kPending:
        break;
    }
  }
  return ops;
}

class Search {
 public:
  Search(const SeqSpec& spec, std::vector<OpRecord> ops, const CheckLimits& limits)
      : spec_(spec), ops_(std::move(ops)), limits_(limits) {
    for (std::size_t i = 0; i < ops_.size(); ++i)
      if (ops_[i].mandatory) mandatory_ |= 1ULL << i;
  }

  CheckResult run() {
    CheckResult out;
    if (ops_.size() > 64) {
      out.verdict = Verdict::kInconclusive;
      out.explanation = "history has " + std::to_string(ops_.size()) + " ops; the limit is 64";
      return out;
    }
    bool found = dfs(0, spec_.initial);
    out.nodes = nodes_;
    if (capped_) {
      out.verdict = Verdict::kInconclusive;
      out.explanation = "search cap of " + std::to_string(limits_.max_nodes) + " nodes reached";
    } else if (found) {
      out.verdict = Verdict::kPass;
      for (auto it = path_.rbegin(); it != path_.rend(); ++it) out.witness.push_back(*it);
    } else {
      out.verdict = Verdict::kFail;
      out.explanation = explain();
    }
    return out;
  }

 private:
  bool dfs(std::uint64_t done, const SpecState& state) {
    if ((done & mandatory_) == mandatory_) return true;
    if (++nodes_ > limits_.max_nodes) {
      capped_ = true;
      return false;
    }
    if (!failed_.insert({done, state}).second) return false;
    if (__builtin_popcountll(done) > __builtin_popcountll(best_)) best_ = done;
    for (std::size_t x = 0; x < ops_.size(); ++x) {
      const auto bit = 1ULL << x;
      if ((done & bit) || !ops_[x].eligible || !may_follow(done, x)) continue;
      auto st = spec_.apply(state, ops_[x].op);
      if (ops_[x].check_response && st.response != ops_[x].response) continue;
      if (dfs(done | bit, st.state)) {
        path_.push_back({ops_[x].pid, ops_[x].instance, ops_[x].op, st.response});
        return true;
      }
      if (capped_) return false;
    }
    return false;
  }

  // x may be appended after `done` iff no mandatory op that finished before
  // x started is still missing and x did not finish before some op already
  // placed had started.
  bool may_follow(std::uint64_t done, std::size_t x) const {
    for (std::size_t y = 0; y < ops_.size(); ++y) {
      if (y == x) continue;
      const auto bit = 1ULL << y;
      if ((done & bit) && ops_[x].end < ops_[y].inv) return false;
      if (!(done & bit) && ops_[y].mandatory && ops_[y].end < ops_[x].inv) return false;
    }
    return true;
  }

  std::string explain() const {
    std::string s = "no linearization includes every mandatory op;";
    s += " longest admissible prefix covers";
    for (std::size_t i = 0; i < ops_.size(); ++i)
      if (best_ & (1ULL << i)) s += " #" + std::to_string(ops_[i].instance);
    s += best_ ? "" : " nothing";
    s += "; unplaced mandatory:";
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      if (ops_[i].mandatory && !(best_ & (1ULL << i)))
        s += " #" + std::to_string(ops_[i].instance) + " p" + std::to_string(ops_[i].pid) + " " +
             ops_[i].op.str() + "=" + ops_[i].response.str();
    }
    return s;
  }

  const SeqSpec& spec_;
  std::vector<OpRecord> ops_;
  CheckLimits limits_;
  std::uint64_t mandatory_ = 0;
  std::uint64_t nodes_ = 0;
  std::uint64_t best_ = 0;
  bool capped_ = false;
  std::set<std::pair<std::uint64_t, SpecState>> failed_;
  std::vector<LinearizedOp> path_;
};

}  // namespace checker_detail

/**
 * Durable linearizability: normally completed ops are placed with their
 * recorded responses; ops that crashed may be placed or left out, and an
 * op's interval stays open until its recovery resolves it.
 */
inline CheckResult check_durable_linearizability(const History& h, const SeqSpec& spec,
                                                 const CheckLimits& limits = {}) {
  using namespace checker_detail;
  return Search(spec, collect(h, Condition::kDurableLinearizability), limits).run();
}

/**
 * Detectability: as above, except a recovery that returned a value forces
 * its op in with that value and a recovery that returned fail forces its op
 * out. Ops whose recovery is unresolved at the end stay optional.
 */
inline CheckResult check_detectability(const History& h, const SeqSpec& spec,
                                       const CheckLimits& limits = {}) {
  using namespace checker_detail;
  return Search(spec, collect(h, Condition::kDetectability), limits).run();
}

inline CheckResult check_condition(Condition c, const History& h, const SeqSpec& spec,
                                   const CheckLimits& limits = {}) {
  return c == Condition::kDetectability ? check_detectability(h, spec, limits)
                                        : check_durable_linearizability(h, spec, limits);
}

/// Replays a witness through the spec; true iff every response matches.
inline bool witness_replays(const std::vector<LinearizedOp>& w, const SeqSpec& spec) {
  SpecState s = spec.initial;
  for (const auto& op : w) {
    auto st = spec.apply(s, op.op);
    if (st.response != op.response) return false;
    s = std::move(st.state);
  }
  return true;
}

}  // namespace detrec

#endif  // DETREC_CHECKER_HPP_
