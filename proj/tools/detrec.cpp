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

// detrec: command-line front end.
//
// Exit status: 0 all checks pass, 1 violation found, 2 inconclusive or
// budget-exhausted (or no witness within the bound), 64 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "detrec/campaign.hpp"
#include "detrec/explore.hpp"
#include "detrec/perturb.hpp"
#include "detrec/registry.hpp"
#include "detrec/report.hpp"
#include "detrec/space.hpp"
#include "detrec/trace_io.hpp"

namespace {

using namespace detrec;

constexpr int kExitPass = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 64;

struct Options {
  // object
  std::string object = "reg-detect";
  int n = 2;
  std::vector<std::int64_t> domain;
  std::int64_t initial = 0;
  std::string mutation = "none";
  bool literal_initial_toggle = false;
  bool identity_cas = false;
  // harness
  std::string policy = "drop";
  int retries = 1;
  std::uint32_t budget = 0;
  // campaign / exhaustive
  std::uint64_t seed = 0;
  std::uint64_t schedules = 1000;
  int ops = 2;
  int max_crashes = 1;
  double crash_prob = 0.05;
  unsigned threads = 1;
  std::uint64_t max_states = 20'000'000;
  std::size_t max_counterexamples = 1;
  bool exhaustive = false;
  // spacecount / audit
  int depth = 40;
  std::uint64_t space_max_states = 1'000'000;
  bool include_private = false;
  int value_bits = 2;
  // perturb
  std::string spec = "register";
  int bound = 6;
  int extension_bound = 4;
  // replay
  std::string trace_file;
  // output
  std::string output;
  std::string format = "text";
  std::string cex_dir;
  bool timing = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key=value file; blank lines and '#' comments ignored. Each entry
// becomes "--key=value" ahead of the command-line flags, so flags win.
std::vector<std::string> read_config(const std::string& path, std::string* command) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::vector<std::string> args;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(no) + ": expected key=value");
    auto key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key == "command") {
      *command = value;
      continue;
    }
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

ObjectParams object_params(const Options& o) {
  if (o.n < 1) throw UsageError("--n must be at least 1");
  ObjectParams p;
  p.kind = o.object;
  p.n = o.n;
  p.domain = o.domain;
  p.initial = o.initial;
  p.literal_initial_toggle = o.literal_initial_toggle;
  p.identity_cas = o.identity_cas;
  return apply_mutation(p, o.mutation);
}

HarnessConfig harness_config(const Options& o) {
  HarnessConfig h;
  h.policy = parse_policy(o.policy);
  h.retries = o.retries;
  h.step_budget = o.budget ? o.budget : static_cast<std::uint32_t>(10 * o.n * o.ops);
  return h;
}

json object_json(const ObjectModel& obj) {
  const auto& p = obj.params();
  return {{"object", p.kind},
          {"n", p.n},
          {"domain", p.domain},
          {"initial", p.initial},
          {"mutation", mutation_name(p.mutation)},
          {"literalInitialToggle", p.literal_initial_toggle},
          {"identityCas", p.identity_cas}};
}

json harness_json(const HarnessConfig& h) {
  return {{"policy", policy_name(h.policy)}, {"retries", h.retries}, {"budget", h.step_budget}};
}

std::string output_dir(const Options& o) {
  if (!o.cex_dir.empty()) return o.cex_dir;
  if (const char* env = std::getenv("DETREC_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

// Writes each counterexample as a replayable trace and returns their
// report entries.
json write_counterexamples(const Options& o, const std::string& command, const ObjectModel& obj,
                           const HarnessConfig& h, const std::vector<Counterexample>& cxs) {
  json out = json::array();
  if (cxs.empty()) return out;
  const std::filesystem::path dir = output_dir(o);
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < cxs.size(); ++i) {
    TraceFile t{obj.params(), h, cxs[i].schedule, cxs[i].kind, cxs[i].history};
    auto path = dir / (command + "-" + obj.params().kind + "-" + std::to_string(i) + ".trace");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    write_trace(f, t);
    out.push_back(counterexample_json(cxs[i], path.string()));
  }
  return out;
}

void emit(const Options& o, const json& report) {
  std::string text = o.format == "structured" ? report.dump(2) + "\n" : render_text(report);
  if (o.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(o.output);
    if (!f) throw std::runtime_error("cannot write " + o.output);
    f << text;
  }
}

class Timer {
 public:
  json ms(bool on) const {
    if (!on) return nullptr;
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int campaign_exit(const CampaignReport& r) {
  if (r.violations()) return kExitViolation;
  if (r.inconclusive || r.budget_exhausted) return kExitInconclusive;
  return kExitPass;
}

int explore_exit(const ExploreReport& r) {
  if (r.violations() || r.disagreements) return kExitViolation;
  if (r.inconclusive || r.budget_exhausted || r.truncated) return kExitInconclusive;
  return kExitPass;
}

int run_campaign(const Options& o, const std::string& command) {
  Timer timer;
  auto obj = make_object(object_params(o));
  CampaignConfig c;
  c.schedules = o.schedules;
  c.ops_per_process = o.ops;
  c.crash_prob = o.crash_prob;
  c.max_crashes = o.max_crashes;
  c.seed = o.seed;
  c.harness = harness_config(o);
  c.threads = o.threads;
  c.max_counterexamples = o.max_counterexamples;
  auto rep = random_campaign(obj, c);
  json config = object_json(*obj);
  config["mode"] = "campaign";
  config["harness"] = harness_json(c.harness);
  config["seed"] = c.seed;
  config["schedules"] = c.schedules;
  config["opsPerProcess"] = c.ops_per_process;
  config["crashProb"] = c.crash_prob;
  config["maxCrashes"] = c.max_crashes;
  auto cx = write_counterexamples(o, command, *obj, c.harness, rep.counterexamples);
  emit(o, make_report(command, config, campaign_totals(rep), campaign_verdicts(rep), cx,
                      timer.ms(o.timing)));
  return campaign_exit(rep);
}

int run_exhaustive(const Options& o, const std::string& command) {
  Timer timer;
  auto obj = make_object(object_params(o));
  ExploreBounds b;
  b.ops_per_process = o.ops;
  b.max_crashes = o.max_crashes;
  b.max_states = o.max_states;
  b.max_counterexamples = o.max_counterexamples;
  b.harness = harness_config(o);
  b.stop_at_first_violation = command == "mutate";
  auto rep = enumerate_schedules(obj, b);
  if (rep.refused) throw UsageError(rep.refusal);
  json config = object_json(*obj);
  config["mode"] = "exhaustive";
  config["harness"] = harness_json(b.harness);
  config["opsPerProcess"] = b.ops_per_process;
  config["maxCrashes"] = b.max_crashes;
  config["maxStates"] = b.max_states;
  auto cx = write_counterexamples(o, command, *obj, b.harness, rep.counterexamples);
  emit(o, make_report(command, config, explore_totals(rep), explore_verdicts(rep), cx,
                      timer.ms(o.timing)));
  return explore_exit(rep);
}

int run_spacecount(const Options& o) {
  Timer timer;
  auto obj = make_object(object_params(o));
  if (o.depth < 0) throw UsageError("--depth must be non-negative");
  auto rep = enumerate_memory_states(obj, o.depth, o.include_private, o.space_max_states);
  json config = object_json(*obj);
  config["depth"] = o.depth;
  config["includePrivate"] = o.include_private;
  config["maxStates"] = o.space_max_states;
  json totals = {{"images", rep.images},
                 {"states", rep.states},
                 {"depthReached", rep.depth_reached},
                 {"complete", rep.complete},
                 {"truncated", rep.truncated}};
  emit(o, make_report("spacecount", config, totals, json::object(), json::array(),
                      timer.ms(o.timing)));
  return kExitPass;
}

int run_audit(const Options& o) {
  if (o.n < 1) throw UsageError("--n must be at least 1");
  auto r = space_audit(o.object, o.n, o.value_bits);
  json config = {{"object", r.kind}, {"n", r.n}, {"valueBits", r.value_bits}};
  json totals = {{"sharedBits", r.shared_bits}, {"sharedCells", r.shared_cells}};
  emit(o, make_report("audit", config, totals, json::object()));
  return kExitPass;
}

json seq_json(const SeqHistory& h) {
  json a = json::array();
  for (const auto& op : h) a.push_back(op.str());
  return a;
}

int run_perturb(const Options& o) {
  Timer timer;
  auto s = make_perturb_spec(o.spec, o.domain);
  s.history_bound = o.bound;
  s.extension_bound = o.extension_bound;
  auto r = search_doubly_perturbing_witness(s);
  json alphabet = json::array();
  for (const auto& op : s.alphabet) alphabet.push_back(op.str());
  json config = {{"spec", o.spec},
                 {"alphabet", alphabet},
                 {"historyBound", s.history_bound},
                 {"extensionBound", s.extension_bound}};
  json totals = {{"candidates", r.candidates}, {"bound", r.bound}};
  json per = {{"witness", r.witness ? 1 : 0}, {"exhausted-at-bound", r.exhausted ? 1 : 0}};
  if (r.witness) {
    const auto& w = *r.witness;
    json hist = json::array();
    const History h = witness_history(s.spec, w);
    for (const auto& e : h.events()) hist.push_back(e.str());
    totals["witness"] = {{"opP", w.op_p.str()},         {"h1", seq_json(w.h1)},
                         {"opPrime1", w.op_prime1.str()}, {"extension", seq_json(w.extension)},
                         {"h2", seq_json(w.h2)},          {"opPrime2", w.op_prime2.str()},
                         {"history", hist}};
  }
  emit(o, make_report("perturb", config, totals, per, json::array(), timer.ms(o.timing)));
  return r.witness ? kExitPass : kExitInconclusive;
}

int run_replay(const Options& o) {
  std::ifstream in(o.trace_file);
  if (!in) throw UsageError("cannot open " + o.trace_file);
  TraceFile t = read_trace(in);
  auto obj = make_object(t.params);
  auto run = run_schedule(obj, t.schedule, t.harness);
  RunVerdict v = RunVerdict::kBudgetExhausted;
  std::string why;
  if (!run.budget_exhausted) v = judge(run.history, obj->spec(), CheckLimits{}, &why);
  json events = json::array();
  for (const auto& e : run.history.events()) events.push_back(e.str());
  json config = object_json(*obj);
  config["harness"] = harness_json(t.harness);
  config["trace"] = o.trace_file;
  json totals = {{"directives", t.schedule.directives.size()},
                 {"verdict", run_verdict_name(v)},
                 {"recordedVerdict", t.verdict},
                 {"historyMatchesRecorded", run.history == t.history},
                 {"explanation", why},
                 {"history", events}};
  emit(o, make_report("replay", config, totals, {{run_verdict_name(v), 1}}));
  switch (v) {
    case RunVerdict::kPass: return kExitPass;
    case RunVerdict::kDlFail:
    case RunVerdict::kDetFail: return kExitViolation;
    default: return kExitInconclusive;
  }
}

void add_object_options(CLI::App* sub, Options& o) {
  sub->add_option("--object", o.object, "object kind: " + join_names(object_kinds()));
  sub->add_option("--n", o.n, "number of processes")->check(CLI::PositiveNumber);
  sub->add_option("--domain", o.domain, "value domain, comma separated")->delimiter(',');
  sub->add_option("--initial", o.initial, "initial value");
  sub->add_flag("--literal-initial-toggle", o.literal_initial_toggle,
                "reg-detect: start T_0 at 0");
  sub->add_flag("--identity-cas", o.identity_cas, "cas-detect: include Cas(v,v) ops");
  sub->add_option("--policy", o.policy, "caller policy after a failed recovery: drop | retry");
  sub->add_option("--retries", o.retries, "re-announcements per op under the retry policy");
  sub->add_option("--budget", o.budget, "step budget per execution (0: 10*N*ops)");
}

void add_output_options(CLI::App* sub, Options& o) {
  sub->add_option("--output", o.output, "report path (default: stdout)");
  sub->add_option("--format", o.format, "report format")
      ->check(CLI::IsMember({"structured", "text"}));
  sub->add_flag("--timing", o.timing, "include wall-clock time in the report");
}

void add_run_options(CLI::App* sub, Options& o) {
  sub->add_option("--ops", o.ops, "ops per process");
  sub->add_option("--max-crashes", o.max_crashes, "crash budget");
  sub->add_option("--max-counterexamples", o.max_counterexamples, "counterexamples to keep");
  sub->add_option("--cex-dir", o.cex_dir, "counterexample directory (default: $DETREC_OUTPUT_DIR or .)");
}

void add_campaign_options(CLI::App* sub, Options& o, bool seed_required) {
  auto* seed = sub->add_option("--seed", o.seed, "campaign seed");
  if (seed_required) seed->required();
  sub->add_option("--schedules", o.schedules, "schedules to run");
  sub->add_option("--crash-prob", o.crash_prob, "crash probability per step")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--threads", o.threads, "worker threads");
}

int dispatch(int argc, char** argv) {
  static const std::vector<std::string> kCommands = {"campaign", "exhaustive", "spacecount", "audit",
                                                     "perturb",  "mutate",     "replay"};
  // Pull --config out of argv and splice its entries in after the command.
  std::vector<std::string> args;
  std::vector<std::string> config_args;
  std::string config_command;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--config") {
      if (i + 1 >= argc) throw UsageError("--config needs a file");
      config_args = read_config(argv[++i], &config_command);
    } else if (a.rfind("--config=", 0) == 0) {
      config_args = read_config(a.substr(9), &config_command);
    } else {
      args.push_back(a);
    }
  }
  std::size_t cmd_at = args.size();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (std::find(kCommands.begin(), kCommands.end(), args[i]) != kCommands.end()) {
      cmd_at = i;
      break;
    }
  }
  if (cmd_at == args.size()) {
    if (!config_command.empty()) {
      args.insert(args.begin(), config_command);
      cmd_at = 0;
    }
  }
  if (cmd_at < args.size())
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(cmd_at) + 1, config_args.begin(),
                config_args.end());

  Options o;
  CLI::App app{"detrec: detectable recoverable objects under simulated NVM crashes", "detrec"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  app.footer("Options may also come from --config FILE (key=value lines; flags override).\n"
             "Exit status: 0 pass, 1 violation, 2 inconclusive/exhausted, 64 usage error.");

  auto* campaign = app.add_subcommand("campaign", "seeded random schedules with crash injection");
  add_object_options(campaign, o);
  add_run_options(campaign, o);
  add_campaign_options(campaign, o, true);
  add_output_options(campaign, o);

  auto* exhaustive = app.add_subcommand("exhaustive", "enumerate every schedule within bounds");
  add_object_options(exhaustive, o);
  add_run_options(exhaustive, o);
  exhaustive->add_option("--max-states", o.max_states, "memoized state cap");
  add_output_options(exhaustive, o);

  auto* spacecount = app.add_subcommand("spacecount", "count distinct reachable memory images");
  add_object_options(spacecount, o);
  spacecount->add_option("--depth", o.depth, "scheduler steps to explore");
  spacecount->add_flag("--include-private", o.include_private, "count private NVM cells too");
  spacecount->add_option("--max-states", o.space_max_states, "state cap");
  add_output_options(spacecount, o);

  auto* audit = app.add_subcommand("audit", "shared-memory bit count from the cell layout");
  audit->add_option("--object", o.object, "object kind: " + join_names(object_kinds()));
  audit->add_option("--n", o.n, "number of processes")->check(CLI::PositiveNumber);
  audit->add_option("--value-bits", o.value_bits, "bits per application value")
      ->check(CLI::PositiveNumber);
  add_output_options(audit, o);

  auto* perturb = app.add_subcommand("perturb", "search for a doubly-perturbing witness");
  perturb->add_option("--spec", o.spec, "sequential spec: " + join_names(perturb_spec_names()));
  perturb->add_option("--domain", o.domain, "value domain, comma separated")->delimiter(',');
  perturb->add_option("--bound", o.bound, "max length of H2");
  perturb->add_option("--extension-bound", o.extension_bound, "max length of the extension");
  add_output_options(perturb, o);

  auto* mutate = app.add_subcommand("mutate", "run a mutated object and expect a violation");
  add_object_options(mutate, o);
  mutate->add_option("--mutation", o.mutation, "mutation id")->required();
  add_run_options(mutate, o);
  add_campaign_options(mutate, o, false);
  mutate->add_flag("--exhaustive", o.exhaustive, "enumerate schedules instead of sampling");
  mutate->add_option("--max-states", o.max_states, "memoized state cap (with --exhaustive)");
  add_output_options(mutate, o);

  auto* replay = app.add_subcommand("replay", "re-execute a counterexample trace");
  replay->add_option("trace", o.trace_file, "trace file")->required();
  add_output_options(replay, o);

  for (auto* sub : {campaign, exhaustive, spacecount})
    sub->add_option("--mutation", o.mutation, "mutation id");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (campaign->parsed()) return run_campaign(o, "campaign");
  if (exhaustive->parsed()) return run_exhaustive(o, "exhaustive");
  if (spacecount->parsed()) return run_spacecount(o);
  if (audit->parsed()) return run_audit(o);
  if (perturb->parsed()) return run_perturb(o);
  if (mutate->parsed()) {
    if (parse_mutation(o.mutation) == Mutation::kNone) throw UsageError("mutate needs a mutation id");
    if (o.exhaustive) return run_exhaustive(o, "mutate");
    if (mutate->count("--seed") == 0) throw UsageError("--seed is required unless --exhaustive");
    return run_campaign(o, "mutate");
  }
  return run_replay(o);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "detrec: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "detrec: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "detrec: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "detrec: " << e.what() << "\n";
    return kExitInconclusive;
  }
}
