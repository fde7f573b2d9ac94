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

#ifndef DETREC_TRACE_IO_HPP_
#define DETREC_TRACE_IO_HPP_

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "detrec/harness.hpp"
#include "detrec/registry.hpp"

namespace detrec {

inline constexpr int kTraceVersion = 1;

/**
 * A replayable run: object parameters, harness configuration, op scripts,
 * the directive sequence, and the verdict and history it produced.
 *
 *   detrec-trace 1
 *   object cas-detect
 *   n 2
 *   domain 0 1 2
 *   ...
 *   script 0 Cas(0,1) Read
 *   schedule s0 s0 c r0
 *   verdict detectability
 *   event 0 invoke 0 1 Cas(0,1) -
 *   end
 */
struct TraceFile {
  ObjectParams params;
  HarnessConfig harness;
  Schedule schedule;
  std::string verdict;
  History history;
};

inline const char* policy_name(CallerPolicy p) { return p == CallerPolicy::kRetry ? "retry" : "drop"; }

inline CallerPolicy parse_policy(const std::string& s) {
  if (s == "drop") return CallerPolicy::kDrop;
  if (s == "retry") return CallerPolicy::kRetry;
  throw ConfigError("unknown caller policy '" + s + "' (valid: drop, retry)");
}

inline void write_trace(std::ostream& os, const TraceFile& t) {
  os << "detrec-trace " << kTraceVersion << "\n";
  os << "object " << t.params.kind << "\n";
  os << "n " << t.params.n << "\n";
  os << "domain";
  for (auto v : t.params.domain) os << ' ' << v;
  os << "\n";
  os << "initial " << t.params.initial << "\n";
  os << "mutation " << mutation_name(t.params.mutation) << "\n";
  os << "literal-initial-toggle " << (t.params.literal_initial_toggle ? 1 : 0) << "\n";
  os << "identity-cas " << (t.params.identity_cas ? 1 : 0) << "\n";
  os << "policy " << policy_name(t.harness.policy) << "\n";
  os << "retries " << t.harness.retries << "\n";
  os << "budget " << t.harness.step_budget << "\n";
  for (std::size_t p = 0; p < t.schedule.scripts.size(); ++p) {
    os << "script " << p;
    for (const auto& op : t.schedule.scripts[p]) os << ' ' << op.str();
    os << "\n";
  }
  os << "schedule";
  for (const auto& d : t.schedule.directives) os << ' ' << d.str();
  os << "\n";
  os << "verdict " << t.verdict << "\n";
  for (const auto& e : t.history.events()) os << "event " << e.str() << "\n";
  os << "end\n";
}

inline std::string trace_str(const TraceFile& t) {
  std::ostringstream os;
  write_trace(os, t);
  return os.str();
}

namespace trace_detail {

inline std::int64_t to_int(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    auto v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError("expected an integer, got '" + s + "'", line);
}

}  // namespace trace_detail

/// Parses a trace; every error names the offending line.
inline TraceFile read_trace(std::istream& is) {
  using trace_detail::to_int;
  TraceFile t;
  std::string line;
  std::size_t no = 0;
  bool header = false, ended = false, saw_object = false, saw_schedule = false;
  while (std::getline(is, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (ended) throw ParseError("content after 'end'", no);
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    std::vector<std::string> rest;
    for (std::string w; ls >> w;) rest.push_back(w);
    auto one = [&]() -> const std::string& {
      if (rest.size() != 1) throw ParseError("'" + key + "' takes exactly one value", no);
      return rest[0];
    };
    if (!header) {
      if (key != "detrec-trace") throw ParseError("missing 'detrec-trace' header", no);
      auto v = to_int(one(), no);
      if (v != kTraceVersion)
        throw ParseError("unsupported trace version " + std::to_string(v) + " (expected " +
                             std::to_string(kTraceVersion) + ")",
                         no);
      header = true;
      continue;
    }
    try {
      if (key == "object") {
        t.params.kind = one();
        saw_object = true;
      } else if (key == "n") {
        t.params.n = static_cast<int>(to_int(one(), no));
      } else if (key == "domain") {
        t.params.domain.clear();
        for (const auto& w : rest) t.params.domain.push_back(to_int(w, no));
      } else if (key == "initial") {
        t.params.initial = to_int(one(), no);
      } else if (key == "mutation") {
        t.params.mutation = parse_mutation(one());
      } else if (key == "literal-initial-toggle") {
        t.params.literal_initial_toggle = to_int(one(), no) != 0;
      } else if (key == "identity-cas") {
        t.params.identity_cas = to_int(one(), no) != 0;
      } else if (key == "policy") {
        t.harness.policy = parse_policy(one());
      } else if (key == "retries") {
        t.harness.retries = static_cast<int>(to_int(one(), no));
      } else if (key == "budget") {
        t.harness.step_budget = static_cast<std::uint32_t>(to_int(one(), no));
      } else if (key == "script") {
        if (rest.empty()) throw ParseError("'script' needs a process id", no);
        auto p = to_int(rest[0], no);
        if (p < 0 || p > 64) throw ParseError("bad script process " + rest[0], no);
        if (t.schedule.scripts.size() <= static_cast<std::size_t>(p))
          t.schedule.scripts.resize(static_cast<std::size_t>(p) + 1);
        for (std::size_t i = 1; i < rest.size(); ++i)
          t.schedule.scripts[static_cast<std::size_t>(p)].push_back(OpDescriptor::parse(rest[i]));
      } else if (key == "schedule") {
        for (const auto& w : rest) t.schedule.directives.push_back(Directive::parse(w));
        saw_schedule = true;
      } else if (key == "verdict") {
        t.verdict = one();
      } else if (key == "event") {
        auto e = HistoryEvent::parse(line.substr(line.find("event") + 5));
        t.history.push_raw(e);
      } else if (key == "end") {
        ended = true;
      } else {
        throw ParseError("unknown record '" + key + "'", no);
      }
    } catch (const ParseError& e) {
      if (e.line()) throw;
      throw ParseError(e.what(), no);
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), no);
    }
  }
  if (!header) throw ParseError("empty trace", no + 1);
  if (!ended) throw ParseError("truncated trace: missing 'end'", no + 1);
  if (!saw_object) throw ParseError("trace has no 'object' record", no);
  if (!saw_schedule) throw ParseError("trace has no 'schedule' record", no);
  return t;
}

inline TraceFile parse_trace(const std::string& text) {
  std::istringstream is(text);
  return read_trace(is);
}

}  // namespace detrec

#endif  // DETREC_TRACE_IO_HPP_
