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

#ifndef DETREC_REG_DETECT_HPP_
#define DETREC_REG_DETECT_HPP_

#include <algorithm>
#include <memory>
#include <vector>

#include "detrec/object.hpp"

namespace detrec {

/**
 * Bounded-space detectable read/write register.
 *
 * Shared: R = <val, writer, toggle>, A[N][N][2] toggle bits.
 * Private: RD_p = <mtoggle, qval, q, qtoggle>, T_p in {0,1}.
 *
 * R starts out attributed to a write by process 0 with toggle 0. Unless
 * literal_initial_toggle is set, T_0 starts at 1 so that process 0's first
 * real write uses the other toggle array; with T_0 = 0 that write can
 * reproduce R's initial contents bit for bit while setting the wrong toggle
 * row, and a concurrent writer's recovery then reports fail for a write that
 * was linearized.
 */
class RegDetect final : public ObjectModel {
 public:
  // Write program counters.
  enum WritePc : int {
    kWReadR = 0,
    kWClearToggle,
    kWReadT,
    kWPersistRd,
    kWRereadR,
    kWCp1,
    kWWriteR,
    kWCp2,
    kWSetToggles,
    kWFlipT,
    kWPersistResp,
  };
  // Write.Recover program counters.
  enum RecoverPc : int {
    kRReadRd = 0,
    kRReadResp,
    kRReadCp,
    kRReadR,
    kRReadToggle,
    kRCp2,
    kRSetToggles,
    kRFlipT,
    kRPersistResp,
  };

  explicit RegDetect(ObjectParams params) : ObjectModel(std::move(params)) {
    if (params_.domain.empty()) params_.domain = {0, 1, 2};
    if (std::find(params_.domain.begin(), params_.domain.end(), params_.initial) ==
        params_.domain.end())
      throw ConfigError("initial value " + std::to_string(params_.initial) +
                        " is not in the value domain");
    const int n = params_.n;
    auto l = std::make_shared<MemoryLayout>(n);
    r_ = l->add_shared("R", {},
                       Value::tuple({Value::integer(params_.initial), Value::pid(0),
                                     Value::integer(0)}),
                       {FieldWidth::kDomainValue, FieldWidth::kProcessId, FieldWidth::kBit});
    a_ = l->add_shared("A", {n, n, 2}, Value::boolean(false), {FieldWidth::kBit});
    rd_ = l->add_private("RD", Value::bottom());
    t_ = l->add_private("T", Value::integer(0));
    if (!params_.literal_initial_toggle) l->set_initial(t_, Value::integer(1));
    set_layout(std::move(l));
  }

  SeqSpec spec() const override { return register_spec(params_.initial); }

  std::vector<OpDescriptor> alphabet() const override {
    std::vector<OpDescriptor> ops{OpDescriptor::read()};
    for (auto v : params_.domain) ops.push_back(OpDescriptor::write(v));
    std::sort(ops.begin(), ops.end());
    return ops;
  }

  Slot r_slot() const { return r_; }
  Slot a_slot(int i, int q, int b) const { return a_ + (i * params_.n + q) * 2 + b; }
  Slot rd_slot(Pid p) const { return rd_ + p; }
  Slot t_slot(Pid p) const { return t_ + p; }

  StepResult step(const OpDescriptor& op, Frame& f, MemoryImage& mem, Pid p) const override {
    if (op.kind == OpKind::kRead) return read_step(f, mem, p);
    if (op.kind != OpKind::kWrite) throw ConfigError("reg-detect does not support " + op.str());
    return write_step(op.arg0, f, mem, p);
  }

  StepResult recover_step(const OpDescriptor& op, Frame& f, MemoryImage& mem,
                          Pid p) const override {
    if (op.kind == OpKind::kRead) return read_recover_step(f, mem, p);
    if (op.kind != OpKind::kWrite) throw ConfigError("reg-detect does not support " + op.str());
    return write_recover_step(f, mem, p);
  }

 private:
  // Local slots shared by Write and Write.Recover.
  enum Local : int { kQval = 0, kQ, kQtoggle, kMtoggle, kI, kHaveRd };

  // The snapshot is dead once R has been re-examined.
  static void drop_snapshot(Frame& f) {
    f.locals[kQval] = f.locals[kQ] = f.locals[kQtoggle] = f.locals[kHaveRd] = 0;
  }

  Value snapshot(const Frame& f) const {
    return Value::tuple({Value::integer(f.locals[kQval]), Value::pid(static_cast<Pid>(f.locals[kQ])),
                         Value::integer(f.locals[kQtoggle])});
  }

  bool write_skips(int pc) const {
    switch (params_.mutation) {
      case Mutation::kRegSkipCp1: return pc == kWCp1;
      case Mutation::kRegSkipToggleClear: return pc == kWClearToggle;
      case Mutation::kRegSkipToggleSet: return pc == kWSetToggles;
      default: return false;
    }
  }
  void write_goto(Frame& f, int pc) const {
    while (write_skips(pc)) ++pc;
    f.pc = pc;
  }
  void recover_goto(Frame& f, int pc) const {
    if (params_.mutation == Mutation::kRegSkipToggleSet && pc == kRSetToggles) ++pc;
    f.pc = pc;
  }

  StepResult write_step(std::int64_t val, Frame& f, MemoryImage& mem, Pid p) const {
    auto& L = f.locals;
    const int n = params_.n;
    switch (f.pc) {
      case kWReadR: {
        const Value& r = read_cell(mem, p, r_);
        L[kQval] = r.at(0).as_int();
        L[kQ] = r.at(1).as_int();
        L[kQtoggle] = r.at(2).as_int();
        write_goto(f, kWClearToggle);
        return {};
      }
      case kWClearToggle:
        write_cell(mem, p, a_slot(p, static_cast<int>(L[kQ]), static_cast<int>(1 - L[kQtoggle])),
                   Value::boolean(false));
        write_goto(f, kWReadT);
        return {};
      case kWReadT:
        L[kMtoggle] = read_cell(mem, p, t_slot(p)).as_int();
        write_goto(f, kWPersistRd);
        return {};
      case kWPersistRd:
        write_cell(mem, p, rd_slot(p),
                   Value::tuple({Value::integer(L[kMtoggle]), Value::integer(L[kQval]),
                                 Value::pid(static_cast<Pid>(L[kQ])), Value::integer(L[kQtoggle])}));
        write_goto(f, kWRereadR);
        return {};
      case kWRereadR: {
        bool changed = read_cell(mem, p, r_) != snapshot(f);
        drop_snapshot(f);
        write_goto(f, changed ? kWCp2 : kWCp1);
        return {};
      }
      case kWCp1:
        write_cell(mem, p, mem.layout().ann_cp(p), Value::integer(1));
        write_goto(f, kWWriteR);
        return {};
      case kWWriteR:
        write_cell(mem, p, r_,
                   Value::tuple({Value::integer(val), Value::pid(p), Value::integer(L[kMtoggle])}));
        write_goto(f, kWCp2);
        return {};
      case kWCp2:
        write_cell(mem, p, mem.layout().ann_cp(p), Value::integer(2));
        L[kI] = 0;
        write_goto(f, kWSetToggles);
        return {};
      case kWSetToggles:
        write_cell(mem, p, a_slot(static_cast<int>(L[kI]), p, static_cast<int>(L[kMtoggle])),
                   Value::boolean(true));
        if (++L[kI] == n) write_goto(f, kWFlipT);
        return {};
      case kWFlipT:
        write_cell(mem, p, t_slot(p), Value::integer(1 - L[kMtoggle]));
        write_goto(f, kWPersistResp);
        return {};
      case kWPersistResp:
        return persist_response(mem, p, Value::ack());
      default:
        throw ModelViolation("reg-detect write: bad pc " + std::to_string(f.pc));
    }
  }

  StepResult write_recover_step(Frame& f, MemoryImage& mem, Pid p) const {
    auto& L = f.locals;
    const int n = params_.n;
    switch (f.pc) {
      case kRReadRd: {
        const Value& rd = read_cell(mem, p, rd_slot(p));
        L[kHaveRd] = rd.is_bottom() ? 0 : 1;
        if (!rd.is_bottom()) {
          L[kMtoggle] = rd.at(0).as_int();
          L[kQval] = rd.at(1).as_int();
          L[kQ] = rd.at(2).as_int();
          L[kQtoggle] = rd.at(3).as_int();
        }
        recover_goto(f, kRReadResp);
        return {};
      }
      case kRReadResp:
        if (!read_cell(mem, p, mem.layout().ann_resp(p)).is_bottom()) return {true, Value::ack()};
        recover_goto(f, kRReadCp);
        return {};
      case kRReadCp: {
        auto cp = read_cell(mem, p, mem.layout().ann_cp(p)).as_int();
        if (cp == 0) return {true, Value::fail()};
        if (cp != 1) drop_snapshot(f);
        recover_goto(f, cp == 1 ? kRReadR : kRCp2);
        return {};
      }
      case kRReadR: {
        bool same = L[kHaveRd] && read_cell(mem, p, r_) == snapshot(f);
        if (!L[kHaveRd]) read_cell(mem, p, r_);
        if (!same) drop_snapshot(f);
        recover_goto(f, same ? kRReadToggle : kRCp2);
        return {};
      }
      case kRReadToggle: {
        const Value& bit = read_cell(
            mem, p, a_slot(p, static_cast<int>(L[kQ]), static_cast<int>(1 - L[kQtoggle])));
        if (!bit.as_bool()) return {true, Value::fail()};
        drop_snapshot(f);
        recover_goto(f, kRCp2);
        return {};
      }
      case kRCp2:
        write_cell(mem, p, mem.layout().ann_cp(p), Value::integer(2));
        L[kI] = 0;
        recover_goto(f, kRSetToggles);
        return {};
      case kRSetToggles:
        write_cell(mem, p, a_slot(static_cast<int>(L[kI]), p, static_cast<int>(L[kMtoggle])),
                   Value::boolean(true));
        if (++L[kI] == n) recover_goto(f, kRFlipT);
        return {};
      case kRFlipT:
        write_cell(mem, p, t_slot(p), Value::integer(1 - L[kMtoggle]));
        recover_goto(f, kRPersistResp);
        return {};
      case kRPersistResp:
        return persist_response(mem, p, Value::ack());
      default:
        throw ModelViolation("reg-detect recover: bad pc " + std::to_string(f.pc));
    }
  }

  StepResult read_step(Frame& f, MemoryImage& mem, Pid p) const {
    if (f.pc == 0) {
      f.locals[0] = read_cell(mem, p, r_).at(0).as_int();
      f.pc = 1;
      return {};
    }
    return persist_response(mem, p, Value::integer(f.locals[0]));
  }

  StepResult read_recover_step(Frame& f, MemoryImage& mem, Pid p) const {
    if (f.pc == 0) {
      const Value& resp = read_cell(mem, p, mem.layout().ann_resp(p));
      if (!resp.is_bottom()) return {true, resp};
      f.pc = 1;
      return {};
    }
    f.pc -= 1;
    auto r = read_step(f, mem, p);
    f.pc += 1;
    return r;
  }

  Slot r_ = 0, a_ = 0, rd_ = 0, t_ = 0;
};

}  // namespace detrec

#endif  // DETREC_REG_DETECT_HPP_
