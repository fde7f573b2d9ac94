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

// Simulated private-cache NVM: every shared or private non-volatile cell is
// persistent, process-local variables are volatile, and a crash is always
// system-wide.

#ifndef DETREC_NVM_HPP_
#define DETREC_NVM_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "detrec/history.hpp"
#include "detrec/value.hpp"

namespace detrec {

constexpr int kMaxProcesses = 16;
constexpr int kMaxLocals = 24;

struct CellId {
  std::string name;
  std::vector<int> index;

  std::string str() const {
    std::string s = name;
    for (int i : index) s += "[" + std::to_string(i) + "]";
    return s;
  }
  friend bool operator==(const CellId& a, const CellId& b) {
    return a.name == b.name && a.index == b.index;
  }
};

/// Field kinds used for analytic bit accounting of shared cells.
enum class FieldWidth : std::uint8_t {
  kDomainValue,  // valueBits
  kProcessId,    // ceil(log2 N)
  kBit,          // 1
};

using Slot = int;

struct SlotInfo {
  CellId id;
  Pid owner = -1;  // -1: shared
  bool cas_capable = false;
  std::vector<FieldWidth> fields;
};

inline int ceil_log2(int n) {
  int bits = 0;
  while ((1 << bits) < n) ++bits;
  return bits;
}

/**
 * Declares every non-volatile cell an object uses. Arrays are flattened in
 * row-major order; private cells get one slot per process. Every layout
 * carries the Ann_p announcement cells.
 */
class MemoryLayout {
 public:
  explicit MemoryLayout(int n_procs) : n_(n_procs) {
    if (n_procs < 1 || n_procs > kMaxProcesses)
      throw ConfigError("process count must be in [1, " + std::to_string(kMaxProcesses) + "]");
    ann_op_ = add_private("Ann.op", Value::bottom());
    ann_resp_ = add_private("Ann.resp", Value::bottom());
    ann_cp_ = add_private("Ann.cp", Value::integer(0));
  }

  int processes() const { return n_; }

  Slot add_shared(const std::string& name, std::vector<int> dims, const Value& initial,
                  std::vector<FieldWidth> fields, bool cas_capable = false) {
    Slot base = static_cast<Slot>(slots_.size());
    int count = 1;
    for (int d : dims) count *= d;
    for (int flat = 0; flat < count; ++flat) {
      std::vector<int> idx(dims.size());
      int rem = flat;
      for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
        idx[k] = rem % dims[k];
        rem /= dims[k];
      }
      slots_.push_back({CellId{name, idx}, -1, cas_capable, fields});
      initial_.push_back(initial);
    }
    arrays_[name] = {base, std::move(dims), false};
    return base;
  }

  /// One cell per process, addressed as name[p].
  Slot add_private(const std::string& name, const Value& initial) {
    Slot base = static_cast<Slot>(slots_.size());
    for (int p = 0; p < n_; ++p) {
      slots_.push_back({CellId{name, {p}}, p, false, {}});
      initial_.push_back(initial);
    }
    arrays_[name] = {base, {n_}, true};
    return base;
  }

  Slot resolve(const CellId& id) const {
    auto it = arrays_.find(id.name);
    if (it == arrays_.end()) throw ConfigError("unknown cell " + id.str());
    const auto& a = it->second;
    if (id.index.size() != a.dims.size()) throw ConfigError("wrong index arity for " + id.str());
    int flat = 0;
    for (std::size_t k = 0; k < a.dims.size(); ++k) {
      if (id.index[k] < 0 || id.index[k] >= a.dims[k])
        throw ConfigError("index out of bounds for " + id.str());
      flat = flat * a.dims[k] + id.index[k];
    }
    return a.base + flat;
  }

  void set_initial(Slot s, Value v) { initial_.at(static_cast<std::size_t>(s)) = std::move(v); }

  std::size_t size() const { return slots_.size(); }
  const SlotInfo& info(Slot s) const { return slots_.at(static_cast<std::size_t>(s)); }
  const std::vector<Value>& initial_values() const { return initial_; }

  Slot ann_op(Pid p) const { return ann_op_ + p; }
  Slot ann_resp(Pid p) const { return ann_resp_ + p; }
  Slot ann_cp(Pid p) const { return ann_cp_ + p; }

  /// Analytic shared-bit total from the declared field widths.
  std::int64_t shared_bits(int value_bits) const {
    std::int64_t total = 0;
    for (const auto& s : slots_) {
      if (s.owner != -1) continue;
      for (auto f : s.fields) {
        switch (f) {
          case FieldWidth::kDomainValue: total += value_bits; break;
          case FieldWidth::kProcessId: total += ceil_log2(n_); break;
          case FieldWidth::kBit: total += 1; break;
        }
      }
    }
    return total;
  }

 private:
  struct Array {
    Slot base;
    std::vector<int> dims;
    bool is_private;
  };

  int n_;
  std::vector<SlotInfo> slots_;
  std::vector<Value> initial_;
  std::map<std::string, Array> arrays_;
  Slot ann_op_ = 0, ann_resp_ = 0, ann_cp_ = 0;
};

/// Records which slots primitives touched; attached by tests.
struct AccessTrace {
  struct Access {
    Pid pid;
    Slot slot;
    bool write;
  };
  std::vector<Access> accesses;
};

/// The complete non-volatile state: shared cells plus every process's private
/// cells. Survives crashes unchanged.
class MemoryImage {
 public:
  explicit MemoryImage(std::shared_ptr<const MemoryLayout> layout)
      : layout_(std::move(layout)), cells_(layout_->initial_values()) {}

  const MemoryLayout& layout() const { return *layout_; }
  const std::shared_ptr<const MemoryLayout>& layout_ptr() const { return layout_; }

  const Value& raw(Slot s) const { return cells_[static_cast<std::size_t>(s)]; }
  Value& raw(Slot s) { return cells_[static_cast<std::size_t>(s)]; }

  /// The shared part only; memory-equivalence compares exactly this.
  std::vector<Value> shared_cells() const {
    std::vector<Value> out;
    for (std::size_t s = 0; s < cells_.size(); ++s)
      if (layout_->info(static_cast<Slot>(s)).owner == -1) out.push_back(cells_[s]);
    return out;
  }

  template <class Sink>
  void feed(Sink& sink, bool shared_only = false) const {
    for (std::size_t s = 0; s < cells_.size(); ++s) {
      if (shared_only && layout_->info(static_cast<Slot>(s)).owner != -1) continue;
      cells_[s].feed(sink);
    }
  }

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      s += layout_->info(static_cast<Slot>(i)).id.str() + "=" + cells_[i].str();
      s += i + 1 < cells_.size() ? " " : "";
    }
    return s;
  }

  friend bool operator==(const MemoryImage& a, const MemoryImage& b) {
    return a.cells_ == b.cells_;
  }

  void set_trace(AccessTrace* t) { trace_ = t; }
  void note(Pid p, Slot s, bool write) const {
    if (trace_) trace_->accesses.push_back({p, s, write});
  }

 private:
  std::shared_ptr<const MemoryLayout> layout_;
  std::vector<Value> cells_;
  AccessTrace* trace_ = nullptr;
};

namespace nvm_detail {
inline void check_access(const MemoryImage& mem, Pid p, Slot s) {
  const auto& info = mem.layout().info(s);
  if (info.owner != -1 && info.owner != p)
    throw ModelViolation("process " + std::to_string(p) + " accessed private cell " +
                         info.id.str());
}
}  // namespace nvm_detail

// Primitives. Each is exactly one scheduler step when called from a step
// machine.

inline const Value& read_cell(const MemoryImage& mem, Pid p, Slot s) {
  nvm_detail::check_access(mem, p, s);
  mem.note(p, s, false);
  return mem.raw(s);
}
inline const Value& read_cell(const MemoryImage& mem, Pid p, const CellId& c) {
  return read_cell(mem, p, mem.layout().resolve(c));
}

inline void write_cell(MemoryImage& mem, Pid p, Slot s, Value v) {
  nvm_detail::check_access(mem, p, s);
  mem.note(p, s, true);
  mem.raw(s) = std::move(v);
}
inline void write_cell(MemoryImage& mem, Pid p, const CellId& c, Value v) {
  write_cell(mem, p, mem.layout().resolve(c), std::move(v));
}

/// Structural, exact tuple comparison.
inline bool cas_cell(MemoryImage& mem, Pid p, Slot s, const Value& expected, Value desired) {
  nvm_detail::check_access(mem, p, s);
  if (!mem.layout().info(s).cas_capable)
    throw ConfigError("cell " + mem.layout().info(s).id.str() + " is not CAS-capable");
  mem.note(p, s, true);
  if (mem.raw(s) != expected) return false;
  mem.raw(s) = std::move(desired);
  return true;
}
inline bool cas_cell(MemoryImage& mem, Pid p, const CellId& c, const Value& expected,
                     Value desired) {
  return cas_cell(mem, p, mem.layout().resolve(c), expected, std::move(desired));
}

/// View of Ann_p. resp is bottom until persisted; cp is the checkpoint.
struct Announcement {
  Value op;
  Value resp;
  std::int64_t cp = 0;
};

inline Announcement announcement(const MemoryImage& mem, Pid p) {
  const auto& l = mem.layout();
  return {mem.raw(l.ann_op(p)), mem.raw(l.ann_resp(p)), mem.raw(l.ann_cp(p)).as_int()};
}

enum class ProcStatus : std::uint8_t { kIdle, kRunning, kCrashed, kRecovering };

inline const char* status_name(ProcStatus s) {
  switch (s) {
    case ProcStatus::kIdle: return "idle";
    case ProcStatus::kRunning: return "running";
    case ProcStatus::kCrashed: return "crashed";
    case ProcStatus::kRecovering: return "recovering";
  }
  return "?";
}

/// Resume point plus local variables of a step machine. Volatile.
struct Frame {
  int pc = 0;
  std::array<std::int64_t, kMaxLocals> locals{};

  friend bool operator==(const Frame& a, const Frame& b) {
    return a.pc == b.pc && a.locals == b.locals;
  }
};

/**
 * A process's volatile state together with the harness's bookkeeping about
 * which operation instance it is executing. The frame is wiped by a crash;
 * status, op and instance persist because they are derived from Ann_p.
 */
struct ProcessContext {
  Pid pid = 0;
  ProcStatus status = ProcStatus::kIdle;
  OpDescriptor op;
  std::uint64_t instance = 0;
  Frame frame;
  std::uint32_t steps = 0;  // primitives executed by the current op or recovery attempt

  bool in_flight() const { return status != ProcStatus::kIdle; }
};

/// Memory plus every process context; the unit a scheduler owns.
struct System {
  MemoryImage mem;
  std::vector<ProcessContext> procs;

  explicit System(std::shared_ptr<const MemoryLayout> layout) : mem(std::move(layout)) {
    procs.resize(static_cast<std::size_t>(mem.layout().processes()));
    for (std::size_t p = 0; p < procs.size(); ++p) procs[p].pid = static_cast<Pid>(p);
  }

  int processes() const { return static_cast<int>(procs.size()); }
};

/**
 * Caller-side announcement, persisted before the operation's first step:
 * Ann_p.op := op, Ann_p.resp := bot, Ann_p.cp := 0. With reset == false only
 * Ann_p.op is written (the harness:skip-announce-reset mutation).
 */
inline void announce(System& sys, Pid p, const OpDescriptor& op, bool reset = true) {
  auto& ctx = sys.procs.at(static_cast<std::size_t>(p));
  if (ctx.in_flight())
    throw ModelViolation("announce by process " + std::to_string(p) +
                         " while an operation is in flight");
  const auto& l = sys.mem.layout();
  write_cell(sys.mem, p, l.ann_op(p), op.to_value());
  if (reset) {
    write_cell(sys.mem, p, l.ann_resp(p), Value::bottom());
    write_cell(sys.mem, p, l.ann_cp(p), Value::integer(0));
  }
}

/// System-wide crash: every frame is reset, in-flight processes become
/// crashed, memory is untouched, and a crash event is logged.
inline void crash_all(System& sys, History* log) {
  for (auto& ctx : sys.procs) {
    ctx.frame = Frame{};
    ctx.steps = 0;
    if (ctx.in_flight()) ctx.status = ProcStatus::kCrashed;
  }
  if (log) log->crash();
}

}  // namespace detrec

#endif  // DETREC_NVM_HPP_
