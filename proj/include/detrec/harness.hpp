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

#ifndef DETREC_HARNESS_HPP_
#define DETREC_HARNESS_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "detrec/history.hpp"
#include "detrec/nvm.hpp"
#include "detrec/object.hpp"

namespace detrec {

/// A rejected schedule directive; index() is its position in the schedule.
class ScheduleError : public ConfigError {
 public:
  ScheduleError(const std::string& what, std::size_t index)
      : ConfigError("directive " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

struct Directive {
  enum class Kind : std::uint8_t { kStep, kCrash, kRecover };
  Kind kind = Kind::kStep;
  Pid pid = 0;

  static Directive step(Pid p) { return {Kind::kStep, p}; }
  static Directive crash() { return {Kind::kCrash, -1}; }
  static Directive recover(Pid p) { return {Kind::kRecover, p}; }

  /// "s0", "c", "r1".
  std::string str() const {
    switch (kind) {
      case Kind::kStep: return "s" + std::to_string(pid);
      case Kind::kCrash: return "c";
      case Kind::kRecover: return "r" + std::to_string(pid);
    }
    return "?";
  }

  static Directive parse(const std::string& s) {
    if (s == "c") return crash();
    if (s.size() < 2 || (s[0] != 's' && s[0] != 'r')) throw ConfigError("bad directive '" + s + "'");
    Pid p = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') throw ConfigError("bad directive '" + s + "'");
      p = p * 10 + (s[i] - '0');
    }
    return s[0] == 's' ? step(p) : recover(p);
  }

  friend bool operator==(const Directive& a, const Directive& b) {
    return a.kind == b.kind && a.pid == b.pid;
  }
};

enum class CallerPolicy : std::uint8_t { kDrop, kRetry };

struct HarnessConfig {
  CallerPolicy policy = CallerPolicy::kDrop;
  int retries = 1;  // re-announcements allowed per op under kRetry
  // Primitive steps one op or recovery execution may take; 0 selects
  // 10 * N * ops-per-process.
  std::uint32_t step_budget = 0;
};

/// Per-process op scripts plus the directive sequence that drives them.
struct Schedule {
  std::vector<std::vector<OpDescriptor>> scripts;
  std::vector<Directive> directives;

  std::string directives_str() const {
    std::string s;
    for (const auto& d : directives) s += (s.empty() ? "" : " ") + d.str();
    return s;
  }
};

/// Largest step count seen for completed executions, keyed by op kind.
struct StepStats {
  std::map<OpKind, std::uint32_t> op_max;
  std::map<OpKind, std::uint32_t> recover_max;

  void merge(const StepStats& o) {
    for (auto [k, v] : o.op_max) op_max[k] = std::max(op_max[k], v);
    for (auto [k, v] : o.recover_max) recover_max[k] = std::max(recover_max[k], v);
  }
};

/**
 * One object instance under a deterministic scheduler. Each call to invoke(),
 * step(), recover() or crash() is a single scheduler step. Ops come either
 * from per-process scripts (step() on an idle process) or from explicit
 * invoke() calls.
 */
class Simulation {
 public:
  Simulation(std::shared_ptr<const ObjectModel> obj, HarnessConfig cfg,
             std::vector<std::vector<OpDescriptor>> scripts = {})
      : obj_(std::move(obj)), cfg_(cfg), sys_(obj_->layout()), scripts_(std::move(scripts)) {
    const auto n = static_cast<std::size_t>(obj_->processes());
    if (scripts_.size() > n) throw ConfigError("more scripts than processes");
    scripts_.resize(n);
    aux_.resize(n);
    if (cfg_.step_budget == 0) {
      std::size_t longest = 1;
      for (const auto& s : scripts_) longest = std::max(longest, s.size());
      cfg_.step_budget = static_cast<std::uint32_t>(10 * n * longest);
    }
  }

  const ObjectModel& object() const { return *obj_; }
  const HarnessConfig& config() const { return cfg_; }
  const System& system() const { return sys_; }
  const MemoryImage& memory() const { return sys_.mem; }
  const History& history() const { return log_; }
  const StepStats& step_stats() const { return stats_; }
  int processes() const { return sys_.processes(); }
  int crashes() const { return crashes_; }
  bool budget_exhausted() const { return exhausted_; }
  const ProcessContext& context(Pid p) const { return sys_.procs.at(static_cast<std::size_t>(p)); }
  void set_budget(std::uint32_t b) { cfg_.step_budget = b; }
  void set_trace(AccessTrace* t) { sys_.mem.set_trace(t); }

  /// Ops p has announced so far, retries excluded.
  int ops_started(Pid p) const { return aux_.at(static_cast<std::size_t>(p)).started; }
  bool retry_pending(Pid p) const { return aux_.at(static_cast<std::size_t>(p)).pending_retry; }

  /// The op a retry would re-announce; meaningful only when retry_pending(p).
  const OpDescriptor& retry_op(Pid p) const { return aux_.at(static_cast<std::size_t>(p)).last_op; }

  bool idle(Pid p) const { return !context(p).in_flight(); }

  /// Script-driven: true when p is idle and has a scripted op or a retry left.
  bool has_next_op(Pid p) const {
    const auto& a = aux_.at(static_cast<std::size_t>(p));
    return a.pending_retry ||
           a.started < static_cast<int>(scripts_.at(static_cast<std::size_t>(p)).size());
  }

  /// Every script consumed, no retry owed, nothing in flight.
  bool finished() const {
    for (Pid p = 0; p < processes(); ++p)
      if (!idle(p) || has_next_op(p)) return false;
    return true;
  }

  bool any_in_flight() const {
    for (const auto& c : sys_.procs)
      if (c.in_flight()) return true;
    return false;
  }

  /// Announces `op` and logs its invocation. A pending retry is consumed when
  /// `op` equals the op being retried.
  void invoke(Pid p, const OpDescriptor& op) {
    check_pid(p);
    auto& ctx = sys_.procs[static_cast<std::size_t>(p)];
    auto& a = aux_[static_cast<std::size_t>(p)];
    if (ctx.in_flight()) throw ModelViolation("invoke on a busy process " + std::to_string(p));
    if (!obj_->supports(op)) throw ConfigError(obj_->params().kind + " does not support " + op.str());
    announce(sys_, p, op, obj_->announce_resets());
    if (a.pending_retry && op == a.last_op) {
      a.pending_retry = false;
      ++a.retries_used;
    } else {
      a.pending_retry = false;
      a.retries_used = 0;
      ++a.started;
    }
    a.last_op = op;
    ctx.status = ProcStatus::kRunning;
    ctx.op = op;
    ctx.instance = next_instance_++;
    ctx.frame = Frame{};
    ctx.steps = 0;
    if (logging_) log_.invoke(p, ctx.instance, op);
    if (check_announce_ && obj_->announce_resets()) {
      auto ann = announcement(sys_.mem, p);
      if (ann.cp != 0 || !ann.resp.is_bottom())
        throw ModelViolation("announcement discipline broken for process " + std::to_string(p));
    }
  }

  /// One primitive of p's running op; on an idle process, invokes the next
  /// scripted op (or the pending retry) instead.
  void step(Pid p) {
    check_pid(p);
    auto& ctx = sys_.procs[static_cast<std::size_t>(p)];
    if (ctx.status == ProcStatus::kIdle) {
      const auto& a = aux_[static_cast<std::size_t>(p)];
      if (a.pending_retry) return invoke(p, a.last_op);
      const auto& script = scripts_[static_cast<std::size_t>(p)];
      if (a.started >= static_cast<int>(script.size()))
        throw ModelViolation("process " + std::to_string(p) + " has no op to run");
      return invoke(p, script[static_cast<std::size_t>(a.started)]);
    }
    if (ctx.status != ProcStatus::kRunning)
      throw ModelViolation("step on process " + std::to_string(p) + " which is " +
                           status_name(ctx.status));
    auto r = obj_->step(ctx.op, ctx.frame, sys_.mem, p);
    ++ctx.steps;
    if (r.done) {
      auto& m = stats_.op_max[ctx.op.kind];
      m = std::max(m, ctx.steps);
      if (logging_) log_.respond(p, ctx.instance, ctx.op, r.response);
      finish(ctx);
    } else if (ctx.steps >= cfg_.step_budget) {
      exhausted_ = true;
    }
  }

  /// One primitive of p's recovery. The first one after a crash logs the
  /// recover-invoke.
  void recover(Pid p) {
    check_pid(p);
    auto& ctx = sys_.procs[static_cast<std::size_t>(p)];
    if (ctx.status == ProcStatus::kCrashed) {
      ctx.status = ProcStatus::kRecovering;
      if (logging_) log_.recover_invoke(p, ctx.instance, ctx.op);
    } else if (ctx.status != ProcStatus::kRecovering) {
      throw ModelViolation("recover on process " + std::to_string(p) + " which is " +
                           status_name(ctx.status));
    }
    auto op = OpDescriptor::from_value(sys_.mem.raw(sys_.mem.layout().ann_op(p)));
    auto r = obj_->recover_step(op, ctx.frame, sys_.mem, p);
    ++ctx.steps;
    if (r.done) {
      auto& m = stats_.recover_max[ctx.op.kind];
      m = std::max(m, ctx.steps);
      if (logging_) log_.recover_respond(p, ctx.instance, ctx.op, r.response);
      auto& a = aux_[static_cast<std::size_t>(p)];
      if (r.response.is_fail() && cfg_.policy == CallerPolicy::kRetry && a.retries_used < cfg_.retries)
        a.pending_retry = true;
      finish(ctx);
    } else if (ctx.steps >= cfg_.step_budget) {
      exhausted_ = true;
    }
  }

  void crash() {
    crash_all(sys_, logging_ ? &log_ : nullptr);
    ++crashes_;
  }

  /// Applies one directive, rejecting it with ScheduleError if not enabled.
  void apply(const Directive& d, std::size_t index) {
    std::string why = disabled_reason(d);
    if (!why.empty()) throw ScheduleError(why, index);
    switch (d.kind) {
      case Directive::Kind::kStep: step(d.pid); break;
      case Directive::Kind::kCrash: crash(); break;
      case Directive::Kind::kRecover: recover(d.pid); break;
    }
  }

  /// Empty when `d` can be applied in a script-driven run.
  std::string disabled_reason(const Directive& d) const {
    if (d.kind == Directive::Kind::kCrash) return {};
    if (d.pid < 0 || d.pid >= processes()) return "no process " + std::to_string(d.pid);
    const auto& ctx = context(d.pid);
    if (d.kind == Directive::Kind::kStep) {
      if (ctx.status == ProcStatus::kRunning) return {};
      if (ctx.status == ProcStatus::kIdle && has_next_op(d.pid)) return {};
      return "process " + std::to_string(d.pid) + " has no enabled step";
    }
    if (ctx.status == ProcStatus::kCrashed || ctx.status == ProcStatus::kRecovering) return {};
    return "process " + std::to_string(d.pid) + " is not crashed";
  }

  /// Hash of every field that influences future behaviour: memory, process
  /// contexts, script cursors, retry state and crash count. Instance ids, the
  /// log and dead data (an idle process's Ann cells, frame and last op) are
  /// left out; with counters == false so are the op cursors and the crash
  /// count.
  template <class Sink>
  void feed(Sink& sink, bool counters = true) const {
    const auto& l = sys_.mem.layout();
    const bool resets = obj_->announce_resets();
    for (Slot s = 0; s < static_cast<Slot>(l.size()); ++s) {
      // An idle process's Ann cells are overwritten by its next announce.
      Pid o = l.info(s).owner;
      if (resets && o >= 0 && idle(o) && (s == l.ann_op(o) || s == l.ann_resp(o) || s == l.ann_cp(o)))
        continue;
      sys_.mem.raw(s).feed(sink);
    }
    for (std::size_t p = 0; p < sys_.procs.size(); ++p) {
      const auto& c = sys_.procs[p];
      const auto& a = aux_[p];
      sink(static_cast<std::uint64_t>(c.status) | static_cast<std::uint64_t>(a.pending_retry) << 16 |
           static_cast<std::uint64_t>(a.retries_used) << 24 |
           (counters ? static_cast<std::uint64_t>(a.started) << 32 : 0));
      if (c.in_flight()) {
        sink(static_cast<std::uint64_t>(c.op.kind));
        sink(static_cast<std::uint64_t>(c.op.arg0));
        sink(static_cast<std::uint64_t>(c.op.arg1));
        sink(static_cast<std::uint64_t>(c.frame.pc) | static_cast<std::uint64_t>(c.steps) << 32);
        for (auto v : c.frame.locals) sink(static_cast<std::uint64_t>(v));
      }
      if (a.pending_retry) a.last_op.to_value().feed(sink);
    }
    if (counters) sink(static_cast<std::uint64_t>(crashes_));
  }

  void set_check_announce(bool on) { check_announce_ = on; }
  void set_logging(bool on) { logging_ = on; }

 private:
  struct Aux {
    int started = 0;
    bool pending_retry = false;
    int retries_used = 0;
    OpDescriptor last_op;
  };

  void check_pid(Pid p) const {
    if (p < 0 || p >= processes()) throw ConfigError("no process " + std::to_string(p));
  }

  static void finish(ProcessContext& ctx) {
    ctx.status = ProcStatus::kIdle;
    ctx.frame = Frame{};
    ctx.steps = 0;
  }

  std::shared_ptr<const ObjectModel> obj_;
  HarnessConfig cfg_;
  System sys_;
  std::vector<std::vector<OpDescriptor>> scripts_;
  std::vector<Aux> aux_;
  History log_;
  StepStats stats_;
  std::uint64_t next_instance_ = 1;
  int crashes_ = 0;
  bool exhausted_ = false;
  bool check_announce_ = true;
  bool logging_ = true;
};

struct RunResult {
  History history;
  std::vector<MemoryImage> trace;  // memory after each directive
  StepStats stats;
  bool budget_exhausted = false;
};

/// Executes a complete schedule. Stops early if an execution exhausts its
/// step budget.
inline RunResult run_schedule(std::shared_ptr<const ObjectModel> obj, const Schedule& schedule,
                              const HarnessConfig& cfg = {}) {
  Simulation sim(std::move(obj), cfg, schedule.scripts);
  RunResult out;
  for (std::size_t i = 0; i < schedule.directives.size(); ++i) {
    sim.apply(schedule.directives[i], i);
    out.trace.push_back(sim.memory());
    if (sim.budget_exhausted()) break;
  }
  out.history = sim.history();
  out.stats = sim.step_stats();
  out.budget_exhausted = sim.budget_exhausted();
  return out;
}

}  // namespace detrec

#endif  // DETREC_HARNESS_HPP_
