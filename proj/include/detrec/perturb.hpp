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

#ifndef DETREC_PERTURB_HPP_
#define DETREC_PERTURB_HPP_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "detrec/history.hpp"
#include "detrec/seq_spec.hpp"

namespace detrec {

/// One op of a sequential history.
struct SeqOp {
  Pid pid = 0;
  OpDescriptor op;

  std::string str() const { return op.str() + "_p" + std::to_string(pid); }
  friend bool operator==(const SeqOp& a, const SeqOp& b) { return a.pid == b.pid && a.op == b.op; }
};

using SeqHistory = std::vector<SeqOp>;

inline std::string seq_str(const SeqHistory& h) {
  if (h.empty()) return "()";
  std::string s;
  for (const auto& o : h) s += (s.empty() ? "" : " . ") + o.str();
  return s;
}

/// A sequential specification with the finite alphabet and bounds the
/// witness search runs over.
struct SeqObjectSpec {
  SeqSpec spec;
  int processes = 2;
  std::vector<OpDescriptor> alphabet;  // canonical order
  int history_bound = 6;               // max |H2|
  int extension_bound = 4;             // max |extension|
};

inline const std::vector<std::string>& perturb_spec_names() {
  static const std::vector<std::string> kNames = {"register", "counter", "cas",
                                                  "faa",      "queue",   "maxreg"};
  return kNames;
}

/**
 * Named specs over a value domain (first element is the initial value where
 * one applies). counter saturates at the domain maximum; faa adds 0 or 1;
 * queue starts empty and enqueues domain values.
 */
inline SeqObjectSpec make_perturb_spec(const std::string& name, std::vector<std::int64_t> domain = {}) {
  SeqObjectSpec s;
  auto dom = [&](std::vector<std::int64_t> dflt) {
    if (domain.empty()) domain = std::move(dflt);
  };
  std::vector<OpDescriptor>& ops = s.alphabet;
  if (name == "register") {
    dom({0, 1});
    s.spec = register_spec(domain.front());
    ops.push_back(OpDescriptor::read());
    for (auto v : domain) ops.push_back(OpDescriptor::write(v));
  } else if (name == "counter") {
    dom({0, 1, 2});
    s.spec = bounded_counter_spec(domain.front(), *std::max_element(domain.begin(), domain.end()));
    ops = {OpDescriptor::read(), OpDescriptor::increment()};
  } else if (name == "cas") {
    dom({0, 1});
    s.spec = cas_spec(domain.front());
    ops.push_back(OpDescriptor::read());
    for (auto a : domain)
      for (auto b : domain) ops.push_back(OpDescriptor::cas(a, b));
  } else if (name == "faa") {
    dom({0, 1, 2});
    s.spec = fetch_add_spec(domain.front());
    ops = {OpDescriptor::read(), OpDescriptor::fetch_add(0), OpDescriptor::fetch_add(1)};
  } else if (name == "queue") {
    dom({0, 1});
    s.spec = fifo_queue_spec();
    for (auto v : domain) ops.push_back(OpDescriptor::enqueue(v));
    ops.push_back(OpDescriptor::dequeue());
  } else if (name == "maxreg") {
    dom({0, 1, 2});
    s.spec = max_register_spec(domain.front());
    ops.push_back(OpDescriptor::read());
    for (auto v : domain) ops.push_back(OpDescriptor::write_max(v));
  } else {
    std::string valid;
    for (const auto& n : perturb_spec_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("unknown spec '" + name + "' (valid: " + valid + ")");
  }
  std::sort(ops.begin(), ops.end());
  ops.erase(std::unique(ops.begin(), ops.end()), ops.end());
  return s;
}

namespace perturb_detail {

inline SpecState run(const SeqSpec& spec, const SeqHistory& h) {
  SpecState s = spec.initial;
  for (const auto& o : h) s = spec.apply(s, o.op).state;
  return s;
}

}  // namespace perturb_detail

/// Response of `b` after `h` with and without `a` in between differ.
inline bool is_perturbing_after(const SeqSpec& spec, const SeqHistory& h, const SeqOp& a,
                                const SeqOp& b) {
  if (a.pid == b.pid) throw ConfigError("perturbation needs ops by different processes");
  const SpecState s = perturb_detail::run(spec, h);
  const Value without = spec.apply(s, b.op).response;
  const Value with = spec.apply(spec.apply(s, a.op).state, b.op).response;
  return with != without;
}

struct Witness {
  SeqOp op_p;
  SeqHistory h1;
  SeqOp op_prime1;
  SeqHistory extension;  // free of op_p's process
  SeqHistory h2;         // h1 . op_p . op_prime1 . extension
  SeqOp op_prime2;
};

/// Checks both witness conditions by direct replay, plus the structural
/// constraints tying the fields together.
inline bool certify_witness(const SeqSpec& spec, const Witness& w) {
  SeqHistory h2 = w.h1;
  h2.push_back(w.op_p);
  h2.push_back(w.op_prime1);
  h2.insert(h2.end(), w.extension.begin(), w.extension.end());
  if (!(h2 == w.h2)) return false;
  for (const auto& o : w.extension)
    if (o.pid == w.op_p.pid) return false;
  if (w.op_prime1.pid == w.op_p.pid || w.op_prime2.pid == w.op_p.pid) return false;
  return is_perturbing_after(spec, w.h1, w.op_p, w.op_prime1) &&
         is_perturbing_after(spec, w.h2, w.op_p, w.op_prime2);
}

/// h2 . op_p . op_prime2 as a sequential history in the harness format,
/// responses filled in by replay.
inline History witness_history(const SeqSpec& spec, const Witness& w) {
  SeqHistory all = w.h2;
  all.push_back(w.op_p);
  all.push_back(w.op_prime2);
  History h;
  SpecState s = spec.initial;
  std::uint64_t inst = 1;
  for (const auto& o : all) {
    auto st = spec.apply(s, o.op);
    h.invoke(o.pid, inst, o.op);
    h.respond(o.pid, inst, o.op, st.response);
    s = std::move(st.state);
    ++inst;
  }
  return h;
}

struct PerturbResult {
  std::optional<Witness> witness;
  bool exhausted = false;  // bounded space searched without a find
  int bound = 0;
  std::uint64_t candidates = 0;
};

/**
 * Bounded search. p is process 0 and every other op runs on process 1.
 * Candidates are ordered by |H2|, then |H1|, then lexicographically over
 * (H1, op_p, op_prime1, extension); op_prime2 is the first alphabet op that
 * completes the witness. Every find is certified by replay before return.
 */
inline PerturbResult search_doubly_perturbing_witness(const SeqObjectSpec& s) {
  if (s.processes < 2) throw ConfigError("witness search needs at least two processes");
  if (s.history_bound < 2) throw ConfigError("history bound must be at least 2");
  if (s.alphabet.empty()) throw ConfigError("empty op alphabet");
  const Pid p = 0, q = 1;
  const std::size_t k = s.alphabet.size();
  PerturbResult res;
  res.bound = s.history_bound;

  // Odometer over `len` alphabet indices; false once it wraps.
  auto advance = [k](std::vector<std::size_t>& idx) {
    for (std::size_t i = idx.size(); i-- > 0;) {
      if (++idx[i] < k) return true;
      idx[i] = 0;
    }
    return false;
  };
  auto ops_of = [&](const std::vector<std::size_t>& idx, std::size_t from, std::size_t len) {
    SeqHistory h;
    for (std::size_t i = from; i < from + len; ++i) h.push_back({q, s.alphabet[idx[i]]});
    return h;
  };

  for (int total = 2; total <= s.history_bound; ++total) {
    for (int a = 0; a <= total - 2; ++a) {
      const int e = total - 2 - a;
      if (e > s.extension_bound) continue;
      std::vector<std::size_t> idx(static_cast<std::size_t>(total), 0);
      do {
        ++res.candidates;
        Witness w;
        w.h1 = ops_of(idx, 0, static_cast<std::size_t>(a));
        w.op_p = {p, s.alphabet[idx[static_cast<std::size_t>(a)]]};
        w.op_prime1 = {q, s.alphabet[idx[static_cast<std::size_t>(a) + 1]]};
        if (!is_perturbing_after(s.spec, w.h1, w.op_p, w.op_prime1)) continue;
        w.extension = ops_of(idx, static_cast<std::size_t>(a) + 2, static_cast<std::size_t>(e));
        w.h2 = w.h1;
        w.h2.push_back(w.op_p);
        w.h2.push_back(w.op_prime1);
        w.h2.insert(w.h2.end(), w.extension.begin(), w.extension.end());
        for (const auto& op2 : s.alphabet) {
          if (!is_perturbing_after(s.spec, w.h2, w.op_p, {q, op2})) continue;
          w.op_prime2 = {q, op2};
          if (!certify_witness(s.spec, w))
            throw ModelViolation("witness failed certification: " + seq_str(w.h2));
          res.witness = std::move(w);
          return res;
        }
      } while (advance(idx));
    }
  }
  res.exhausted = true;
  return res;
}

}  // namespace detrec

#endif  // DETREC_PERTURB_HPP_
