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

#ifndef DETREC_REPORT_HPP_
#define DETREC_REPORT_HPP_

#include <json.hpp>

#include <string>

#include "detrec/campaign.hpp"
#include "detrec/explore.hpp"
#include "detrec/harness.hpp"
#include "detrec/version.hpp"

namespace detrec {

using json = nlohmann::ordered_json;

inline json stats_json(const StepStats& s) {
  json j = json::object();
  json ops = json::object(), rec = json::object();
  for (auto [k, v] : s.op_max) ops[OpDescriptor::name(k)] = v;
  for (auto [k, v] : s.recover_max) rec[OpDescriptor::name(k)] = v;
  j["opMaxSteps"] = ops;
  j["recoverMaxSteps"] = rec;
  return j;
}

inline json schedule_json(const Schedule& s) {
  json scripts = json::array();
  for (const auto& sc : s.scripts) {
    json ops = json::array();
    for (const auto& op : sc) ops.push_back(op.str());
    scripts.push_back(ops);
  }
  return {{"scripts", scripts}, {"directives", s.directives_str()}};
}

inline json counterexample_json(const Counterexample& c, const std::string& file = {}) {
  json events = json::array();
  for (const auto& e : c.history.events()) events.push_back(e.str());
  json j = {{"kind", c.kind},
            {"explanation", c.explanation},
            {"schedule", schedule_json(c.schedule)},
            {"history", events}};
  if (!file.empty()) j["file"] = file;
  return j;
}

inline json explore_totals(const ExploreReport& r) {
  return {{"states", r.states},
          {"transitions", r.transitions},
          {"leaves", r.leaves},
          {"reducedStates", r.reduced},
          {"truncated", r.truncated},
          {"disagreements", r.disagreements},
          {"steps", stats_json(r.stats)}};
}

inline json explore_verdicts(const ExploreReport& r) {
  return {{"durable-linearizability", r.dl_violations},
          {"detectability", r.det_violations},
          {"inconclusive", r.inconclusive},
          {"budget-exhausted", r.budget_exhausted}};
}

inline json campaign_totals(const CampaignReport& r) {
  return {{"schedules", r.schedules}, {"steps", stats_json(r.stats)}};
}

inline json campaign_verdicts(const CampaignReport& r) {
  return {{"pass", r.pass},
          {"durable-linearizability", r.dl_violations},
          {"detectability", r.det_violations},
          {"inconclusive", r.inconclusive},
          {"budget-exhausted", r.budget_exhausted}};
}

/// The single structured report document every command emits.
inline json make_report(const std::string& command, json config, json totals, json per_verdict,
                        json counterexamples = json::array(), json timing_ms = nullptr) {
  return {{"tool", "detrec"},
          {"version", kVersion},
          {"command", command},
          {"config", std::move(config)},
          {"totals", std::move(totals)},
          {"perVerdict", std::move(per_verdict)},
          {"counterexamples", std::move(counterexamples)},
          {"timingMs", std::move(timing_ms)}};
}

namespace report_detail {

inline std::string scalar(const json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

inline void flatten(const json& j, const std::string& prefix, std::string& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else if (j.is_array()) {
    out += prefix + ":";
    if (j.empty()) out += " (none)";
    for (const auto& v : j) out += "\n  " + scalar(v);
    out += "\n";
  } else {
    out += prefix + ": " + scalar(j) + "\n";
  }
}

}  // namespace report_detail

/// Plain-text rendering: one "path: value" line per leaf, in document
/// order, so both formats carry the same data.
inline std::string render_text(const json& report) {
  std::string out;
  report_detail::flatten(report, "", out);
  return out;
}

}  // namespace detrec

#endif  // DETREC_REPORT_HPP_
