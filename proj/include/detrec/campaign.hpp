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

#ifndef DETREC_CAMPAIGN_HPP_
#define DETREC_CAMPAIGN_HPP_

#include <atomic>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "detrec/checker.hpp"
#include "detrec/explore.hpp"
#include "detrec/harness.hpp"
#include "detrec/object.hpp"

namespace detrec {

struct CampaignConfig {
  std::uint64_t schedules = 1000;
  int ops_per_process = 2;
  double crash_prob = 0.05;  // per scheduler step, while some op is in flight
  int max_crashes = 2;
  std::uint64_t seed = 0;
  HarnessConfig harness;
  CheckLimits limits;
  unsigned threads = 1;
  std::size_t max_counterexamples = 1;
};

enum class RunVerdict : std::uint8_t { kPass, kDlFail, kDetFail, kInconclusive, kBudgetExhausted };

inline const char* run_verdict_name(RunVerdict v) {
  switch (v) {
    case RunVerdict::kPass: return "pass";
    case RunVerdict::kDlFail: return "durable-linearizability";
    case RunVerdict::kDetFail: return "detectability";
    case RunVerdict::kInconclusive: return "inconclusive";
    case RunVerdict::kBudgetExhausted: return "budget-exhausted";
  }
  return "?";
}

struct ScheduleOutcome {
  std::uint64_t index = 0;
  RunVerdict verdict = RunVerdict::kPass;
  Schedule schedule;
  History history;
  std::string explanation;
  StepStats stats;
};

struct CampaignReport {
  std::uint64_t schedules = 0;
  std::uint64_t pass = 0;
  std::uint64_t dl_violations = 0;
  std::uint64_t det_violations = 0;
  std::uint64_t inconclusive = 0;
  std::uint64_t budget_exhausted = 0;
  StepStats stats;
  std::vector<Counterexample> counterexamples;  // lowest schedule indices first

  std::uint64_t violations() const { return dl_violations + det_violations; }
};

/// Checks a finished history under both conditions. DL is checked first;
/// a DL failure is reported as such even though detectability fails too.
inline RunVerdict judge(const History& h, const SeqSpec& spec, const CheckLimits& limits,
                        std::string* why = nullptr) {
  auto dl = check_durable_linearizability(h, spec, limits);
  if (dl.verdict == Verdict::kFail) {
    if (why) *why = dl.explanation;
    return RunVerdict::kDlFail;
  }
  auto det = check_detectability(h, spec, limits);
  if (det.verdict == Verdict::kFail) {
    if (why) *why = det.explanation;
    return RunVerdict::kDetFail;
  }
  if (dl.verdict == Verdict::kInconclusive || det.verdict == Verdict::kInconclusive) {
    if (why) *why = dl.verdict == Verdict::kInconclusive ? dl.explanation : det.explanation;
    return RunVerdict::kInconclusive;
  }
  return RunVerdict::kPass;
}

/// Schedule `index` of a campaign. Its generator is seeded from (seed,
/// index) alone, so any schedule can be regenerated in isolation.
inline ScheduleOutcome run_campaign_schedule(const std::shared_ptr<const ObjectModel>& obj,
                                             const CampaignConfig& cfg, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  const auto alphabet = obj->alphabet();
  const int n = obj->processes();

  ScheduleOutcome out;
  out.index = index;
  out.schedule.scripts.resize(static_cast<std::size_t>(n));
  for (auto& script : out.schedule.scripts)
    for (int k = 0; k < cfg.ops_per_process; ++k) script.push_back(alphabet[rng() % alphabet.size()]);

  Simulation sim(obj, cfg.harness, out.schedule.scripts);
  std::vector<Directive> enabled;
  while (!sim.finished() && !sim.budget_exhausted()) {
    Directive d;
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (sim.crashes() < cfg.max_crashes && sim.any_in_flight() && u < cfg.crash_prob) {
      d = Directive::crash();
    } else {
      enabled.clear();
      for (Pid p = 0; p < n; ++p) {
        if (sim.disabled_reason(Directive::step(p)).empty()) enabled.push_back(Directive::step(p));
        if (sim.disabled_reason(Directive::recover(p)).empty())
          enabled.push_back(Directive::recover(p));
      }
      d = enabled[rng() % enabled.size()];
    }
    sim.apply(d, out.schedule.directives.size());
    out.schedule.directives.push_back(d);
  }
  out.history = sim.history();
  out.stats = sim.step_stats();
  if (sim.budget_exhausted()) {
    out.verdict = RunVerdict::kBudgetExhausted;
    out.explanation = "an execution exceeded the step budget of " +
                      std::to_string(sim.config().step_budget);
    return out;
  }
  out.verdict = judge(out.history, obj->spec(), cfg.limits, &out.explanation);
  return out;
}

/**
 * Seeded random campaign. Workers pull schedule indices from a shared
 * counter; the report is assembled in index order so it does not depend on
 * the thread count.
 */
inline CampaignReport random_campaign(std::shared_ptr<const ObjectModel> obj, const CampaignConfig& cfg) {
  if (cfg.ops_per_process < 1) throw ConfigError("ops per process must be at least 1");
  if (cfg.max_crashes < 0) throw ConfigError("max crashes must be non-negative");
  if (!(cfg.crash_prob >= 0.0 && cfg.crash_prob <= 1.0))
    throw ConfigError("crash probability must lie in [0, 1]");

  std::vector<RunVerdict> verdicts(cfg.schedules);
  std::vector<StepStats> stats(cfg.schedules);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t i = next++; i < cfg.schedules; i = next++) {
      auto o = run_campaign_schedule(obj, cfg, i);
      verdicts[i] = o.verdict;
      stats[i] = std::move(o.stats);
    }
  };
  const unsigned threads = std::max(1U, cfg.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  CampaignReport rep;
  rep.schedules = cfg.schedules;
  for (std::uint64_t i = 0; i < cfg.schedules; ++i) {
    rep.stats.merge(stats[i]);
    switch (verdicts[i]) {
      case RunVerdict::kPass: ++rep.pass; continue;
      case RunVerdict::kDlFail: ++rep.dl_violations; break;
      case RunVerdict::kDetFail: ++rep.det_violations; break;
      case RunVerdict::kInconclusive: ++rep.inconclusive; break;
      case RunVerdict::kBudgetExhausted: ++rep.budget_exhausted; break;
    }
    if (rep.counterexamples.size() < cfg.max_counterexamples) {
      // Regenerated here so that workers never hold histories.
      auto o = run_campaign_schedule(obj, cfg, i);
      rep.counterexamples.push_back(
          {std::move(o.schedule), std::move(o.history), run_verdict_name(o.verdict), o.explanation});
    }
  }
  return rep;
}

}  // namespace detrec

#endif  // DETREC_CAMPAIGN_HPP_
