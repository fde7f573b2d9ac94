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

#ifndef DETREC_EXPLORE_HPP_
#define DETREC_EXPLORE_HPP_

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "detrec/checker.hpp"
#include "detrec/harness.hpp"
#include "detrec/monitor.hpp"
#include "detrec/object.hpp"

namespace detrec {

using Digest = std::pair<std::uint64_t, std::uint64_t>;
using DigestSet = std::unordered_set<Digest, FingerprintHash>;

struct ExploreBounds {
  int ops_per_process = 2;
  int max_crashes = 1;
  // Skip crash injection when no process has an op in flight; such a crash
  // only wipes already-empty frames.
  bool prune_idle_crashes = true;
  // Run the offline checkers on every leaf and compare with the monitors.
  bool cross_check = true;
  // Explore only the step when some process's next step is private and
  // silent (see Explorer::invisible_step).
  bool reduce_invisible = true;
  std::uint64_t max_states = 5'000'000;
  std::size_t max_counterexamples = 1;
  bool stop_at_first_violation = false;
  HarnessConfig harness;
  CheckLimits limits;
};

/// A violating or budget-exhausting run, replayable from its schedule.
struct Counterexample {
  Schedule schedule;
  History history;
  std::string kind;  // "detectability", "durable-linearizability", "budget-exhausted"
  std::string explanation;
};

struct ExploreReport {
  std::uint64_t states = 0;       // distinct memoized states
  std::uint64_t transitions = 0;
  std::uint64_t leaves = 0;       // complete histories reached
  std::uint64_t dl_violations = 0;
  std::uint64_t det_violations = 0;
  std::uint64_t inconclusive = 0;
  std::uint64_t budget_exhausted = 0;
  std::uint64_t disagreements = 0;  // monitor and offline checker differ
  std::uint64_t reduced = 0;        // states expanded through a single invisible step
  bool truncated = false;           // max_states reached
  bool refused = false;
  std::string refusal;
  StepStats stats;
  std::vector<Counterexample> counterexamples;

  std::uint64_t violations() const { return dl_violations + det_violations; }
  bool clean() const {
    return !refused && !truncated && violations() == 0 && inconclusive == 0 && disagreements == 0;
  }
};

/// Called once per complete history (leaf) in exploration order.
using LeafCallback = std::function<void(const History&)>;

/// Rough log10 of the number of schedules an unpruned enumeration would
/// visit; used in refusals.
inline double estimate_log10_schedules(const ObjectModel& obj, const ExploreBounds& b) {
  const double n = obj.processes();
  const double per_op = 12.0 + n;
  const double total = n * b.ops_per_process * per_op;
  double lg = std::lgamma(total + 1) - n * std::lgamma(b.ops_per_process * per_op + 1);
  lg += n * b.ops_per_process * std::log(static_cast<double>(obj.alphabet().size()));
  lg += b.max_crashes * std::log(total + 1);
  return lg / std::log(10.0);
}

namespace explore_detail {

struct Node {
  Simulation sim;
  OnlineMonitor dl;
  OnlineMonitor det;
  std::size_t seen = 0;  // history events already fed to the monitors
  std::vector<Directive> path;
  std::vector<std::vector<OpDescriptor>> scripts;
};

class Explorer {
 public:
  Explorer(std::shared_ptr<const ObjectModel> obj, const ExploreBounds& b, LeafCallback cb)
      : obj_(std::move(obj)), b_(b), spec_(obj_->spec()), alphabet_(obj_->alphabet()),
        cb_(std::move(cb)) {}

  ExploreReport run() {
    auto cfg = b_.harness;
    if (cfg.step_budget == 0)
      cfg.step_budget = static_cast<std::uint32_t>(10 * obj_->processes() * b_.ops_per_process);
    Node root{Simulation(obj_, cfg), OnlineMonitor(spec_, obj_->processes(), Condition::kDurableLinearizability),
              OnlineMonitor(spec_, obj_->processes(), Condition::kDetectability), 0, {},
              std::vector<std::vector<OpDescriptor>>(static_cast<std::size_t>(obj_->processes()))};
    visit(root);
    rep_.states = visited_.size();
    return std::move(rep_);
  }

 private:
  bool stop() const {
    return rep_.truncated || (b_.stop_at_first_violation && rep_.violations() > 0);
  }

  Digest key(const Node& n) const {
    Fingerprint fp;
    n.sim.feed(fp);
    n.dl.feed(fp);
    n.det.feed(fp);
    return fp.digest();
  }

  void record(const Node& n, std::string kind, std::string why) {
    if (rep_.counterexamples.size() >= b_.max_counterexamples) return;
    Counterexample cx;
    cx.schedule.scripts = n.scripts;
    cx.schedule.directives = n.path;
    cx.history = n.sim.history();
    cx.kind = std::move(kind);
    cx.explanation = std::move(why);
    rep_.counterexamples.push_back(std::move(cx));
  }

  // Offline verdicts for a history, compared with the monitors' verdicts.
  void cross_check(const Node& n) {
    if (!b_.cross_check) return;
    for (auto cond : {Condition::kDurableLinearizability, Condition::kDetectability}) {
      auto r = check_condition(cond, n.sim.history(), spec_, b_.limits);
      bool online = cond == Condition::kDetectability ? n.det.ok() : n.dl.ok();
      if (r.verdict == Verdict::kInconclusive) {
        ++rep_.inconclusive;
      } else if ((r.verdict == Verdict::kPass) != online) {
        ++rep_.disagreements;
        record(n, "checker-disagreement",
               std::string(condition_name(cond)) + ": monitor says " + (online ? "pass" : "fail") +
                   ", offline checker says " + verdict_name(r.verdict));
      }
    }
  }

  void child(const Node& parent, const std::function<void(Node&)>& move, Directive d) {
    if (stop()) return;
    Node n = parent;
    move(n);
    n.path.push_back(d);
    ++rep_.transitions;
    rep_.stats.merge(n.sim.step_stats());
    const auto& h = n.sim.history();
    for (; n.seen < h.size(); ++n.seen) {
      n.dl.observe(h[n.seen]);
      n.det.observe(h[n.seen]);
    }
    if (!n.dl.ok() || !n.det.ok()) {
      if (!n.dl.ok()) ++rep_.dl_violations;
      else ++rep_.det_violations;
      auto cond = n.dl.ok() ? Condition::kDetectability : Condition::kDurableLinearizability;
      auto r = check_condition(cond, h, spec_, b_.limits);
      record(n, condition_name(cond), r.explanation);
      cross_check(n);
      return;
    }
    if (n.sim.budget_exhausted()) {
      ++rep_.budget_exhausted;
      record(n, "budget-exhausted", "an execution exceeded " +
                                        std::to_string(n.sim.config().step_budget) + " steps");
      return;
    }
    visit(n);
  }

  // A step of p that touches only p's private cells and logs nothing commutes
  // with every other process's step. If it also writes nothing, or no crash
  // can follow, then crashing before or after it reaches the same state, so
  // exploring that step alone from n loses no state. Returns true when it
  // took such a step.
  bool invisible_step(const Node& n) {
    const auto& sim = n.sim;
    const bool crash_possible = sim.crashes() < b_.max_crashes;
    for (Pid p = 0; p < sim.processes(); ++p) {
      auto st = sim.context(p).status;
      if (st != ProcStatus::kRunning && st != ProcStatus::kRecovering) continue;
      Node c = n;
      AccessTrace trace;
      c.sim.set_trace(&trace);
      if (st == ProcStatus::kRunning) c.sim.step(p);
      else c.sim.recover(p);
      c.sim.set_trace(nullptr);
      if (c.sim.history().size() != n.sim.history().size() || c.sim.budget_exhausted()) continue;
      bool ok = true;
      for (const auto& a : trace.accesses) {
        if (sim.memory().layout().info(a.slot).owner != p || (a.write && crash_possible)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      c.path.push_back(st == ProcStatus::kRunning ? Directive::step(p) : Directive::recover(p));
      ++rep_.transitions;
      ++rep_.reduced;
      visit(c);
      return true;
    }
    return false;
  }

  void visit(const Node& n) {
    if (stop()) return;
    if (!visited_.insert(key(n)).second) return;
    if (visited_.size() >= b_.max_states) {
      rep_.truncated = true;
      return;
    }
    const auto& sim = n.sim;
    if (b_.reduce_invisible && invisible_step(n)) return;
    bool any = false;
    for (Pid p = 0; p < sim.processes(); ++p) {
      const auto& ctx = sim.context(p);
      switch (ctx.status) {
        case ProcStatus::kIdle:
          if (sim.retry_pending(p)) {
            any = true;
            child(n, [p](Node& c) { c.sim.step(p); }, Directive::step(p));
          } else if (sim.ops_started(p) < b_.ops_per_process) {
            any = true;
            for (const auto& op : alphabet_) {
              child(n,
                    [p, op](Node& c) {
                      c.sim.invoke(p, op);
                      c.scripts[static_cast<std::size_t>(p)].push_back(op);
                    },
                    Directive::step(p));
            }
          }
          break;
        case ProcStatus::kRunning:
          any = true;
          child(n, [p](Node& c) { c.sim.step(p); }, Directive::step(p));
          break;
        case ProcStatus::kCrashed:
        case ProcStatus::kRecovering:
          any = true;
          child(n, [p](Node& c) { c.sim.recover(p); }, Directive::recover(p));
          break;
      }
    }
    if (sim.crashes() < b_.max_crashes && (!b_.prune_idle_crashes || sim.any_in_flight()))
      child(n, [](Node& c) { c.sim.crash(); }, Directive::crash());
    if (!any) {
      ++rep_.leaves;
      cross_check(n);
      if (cb_) cb_(sim.history());
    }
  }

  std::shared_ptr<const ObjectModel> obj_;
  ExploreBounds b_;
  SeqSpec spec_;
  std::vector<OpDescriptor> alphabet_;
  LeafCallback cb_;
  DigestSet visited_;
  ExploreReport rep_;
};

}  // namespace explore_detail

/**
 * Depth-first enumeration of every interleaving of process steps, op choices
 * from the object's alphabet, crashes at every step boundary (up to the
 * crash budget) and recovery steps. States are memoized on a 128-bit
 * fingerprint of the simulation plus both monitor frontiers.
 *
 * Refuses bounds beyond N = 3, two ops per process or two crashes.
 */
inline ExploreReport enumerate_schedules(std::shared_ptr<const ObjectModel> obj,
                                         const ExploreBounds& bounds, LeafCallback cb = {}) {
  if (obj->processes() > 3 || bounds.ops_per_process > 2 || bounds.max_crashes > 2 ||
      bounds.ops_per_process < 0 || bounds.max_crashes < 0) {
    ExploreReport r;
    r.refused = true;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", estimate_log10_schedules(*obj, bounds));
    r.refusal = "bounds exceed N <= 3, ops <= 2, crashes <= 2 (about 10^" + std::string(buf) +
                " schedules before pruning)";
    return r;
  }
  return explore_detail::Explorer(std::move(obj), bounds, std::move(cb)).run();
}

struct MemoryStateReport {
  std::uint64_t images = 0;   // distinct memory images
  std::uint64_t states = 0;   // distinct full states visited
  int depth_reached = 0;
  bool complete = false;      // the reachable set closed before the bound
  bool truncated = false;     // state cap hit; images is a lower bound
};

/**
 * Breadth-first search over all schedules of up to `depth` scheduler steps,
 * with any number of ops per process and crashes anywhere, counting distinct
 * memory images. Shared cells only unless include_private is set.
 */
inline MemoryStateReport enumerate_memory_states(std::shared_ptr<const ObjectModel> obj, int depth,
                                                 bool include_private = false,
                                                 std::uint64_t max_states = 1'000'000) {
  if (obj->processes() > 3) throw ConfigError("memory-state enumeration supports N <= 3");
  HarnessConfig cfg;
  cfg.step_budget = 1U << 30;
  Simulation root(obj, cfg);
  root.set_logging(false);
  const auto alphabet = obj->alphabet();

  MemoryStateReport rep;
  DigestSet seen, images;
  auto state_key = [](const Simulation& s) {
    Fingerprint fp;
    s.feed(fp, false);
    return fp.digest();
  };
  auto image_key = [include_private](const Simulation& s) {
    Fingerprint fp;
    s.memory().feed(fp, !include_private);
    return fp.digest();
  };
  std::vector<Simulation> level{root};
  seen.insert(state_key(root));
  images.insert(image_key(root));
  for (int d = 0; d < depth && !level.empty(); ++d) {
    std::vector<Simulation> next;
    auto push = [&](Simulation&& s) {
      if (rep.truncated) return;
      if (!seen.insert(state_key(s)).second) return;
      images.insert(image_key(s));
      if (seen.size() >= max_states) rep.truncated = true;
      next.push_back(std::move(s));
    };
    for (const auto& s : level) {
      for (Pid p = 0; p < s.processes(); ++p) {
        switch (s.context(p).status) {
          case ProcStatus::kIdle:
            for (const auto& op : alphabet) {
              Simulation c = s;
              c.invoke(p, op);
              push(std::move(c));
            }
            break;
          case ProcStatus::kRunning: {
            Simulation c = s;
            c.step(p);
            push(std::move(c));
            break;
          }
          default: {
            Simulation c = s;
            c.recover(p);
            push(std::move(c));
            break;
          }
        }
      }
      if (s.any_in_flight()) {
        Simulation c = s;
        c.crash();
        push(std::move(c));
      }
    }
    rep.depth_reached = d + 1;
    level = std::move(next);
    if (rep.truncated) break;
  }
  rep.complete = level.empty() && !rep.truncated;
  rep.images = images.size();
  rep.states = seen.size();
  return rep;
}

}  // namespace detrec

#endif  // DETREC_EXPLORE_HPP_
