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

#ifndef DETREC_CAS_DETECT_HPP_
#define DETREC_CAS_DETECT_HPP_

#include <algorithm>
#include <memory>
#include <vector>

#include "detrec/object.hpp"

namespace detrec {

/**
 * Bounded-space detectable CAS. C = <val, vec> where vec holds one bit per
 * process; only p's successful CAS flips vec[p]. RD_p keeps the bit p is
 * trying to install.
 */
class CasDetect final : public ObjectModel {
 public:
  enum CasPc : int { kCReadC = 0, kCPersistFalse, kCPersistRd, kCCp1, kCCas, kCPersistResp };
  enum RecoverPc : int { kRReadResp = 0, kRReadCp, kRReadC, kRReadRd, kRPersistTrue };

  explicit CasDetect(ObjectParams params) : ObjectModel(std::move(params)) {
    if (params_.domain.empty())
      for (int v = 0; v <= params_.n; ++v) params_.domain.push_back(v);
    if (std::find(params_.domain.begin(), params_.domain.end(), params_.initial) ==
        params_.domain.end())
      throw ConfigError("initial value " + std::to_string(params_.initial) +
                        " is not in the value domain");
    auto l = std::make_shared<MemoryLayout>(params_.n);
    std::vector<FieldWidth> fields{FieldWidth::kDomainValue};
    fields.insert(fields.end(), static_cast<std::size_t>(params_.n), FieldWidth::kBit);
    c_ = l->add_shared("C", {}, make_c(params_.initial, 0), std::move(fields), true);
    rd_ = l->add_private("RD", Value::bottom());
    set_layout(std::move(l));
  }

  SeqSpec spec() const override { return cas_spec(params_.initial); }

  std::vector<OpDescriptor> alphabet() const override {
    std::vector<OpDescriptor> ops{OpDescriptor::read()};
    for (auto a : params_.domain)
      for (auto b : params_.domain)
        if (a != b || params_.identity_cas) ops.push_back(OpDescriptor::cas(a, b));
    std::sort(ops.begin(), ops.end());
    return ops;
  }

  Slot c_slot() const { return c_; }
  Slot rd_slot(Pid p) const { return rd_ + p; }

  /// C's contents for value `val` and bit vector `vec` (bit i is vec[i]).
  Value make_c(std::int64_t val, std::uint32_t vec) const {
    std::vector<Value> bits;
    for (int i = 0; i < params_.n; ++i) bits.push_back(Value::boolean((vec >> i) & 1U));
    return Value::tuple({Value::integer(val), Value::tuple(std::move(bits))});
  }

  static std::uint32_t vec_of(const Value& c) {
    std::uint32_t vec = 0;
    const auto& bits = c.at(1).items();
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (bits[i].as_bool()) vec |= 1U << i;
    return vec;
  }

  StepResult step(const OpDescriptor& op, Frame& f, MemoryImage& mem, Pid p) const override {
    if (op.kind == OpKind::kRead) return read_step(f, mem, p);
    if (op.kind != OpKind::kCas) throw ConfigError("cas-detect does not support " + op.str());
    return cas_step(op.arg0, op.arg1, f, mem, p);
  }

  StepResult recover_step(const OpDescriptor& op, Frame& f, MemoryImage& mem,
                          Pid p) const override {
    if (op.kind == OpKind::kRead) return read_recover_step(f, mem, p);
    if (op.kind != OpKind::kCas) throw ConfigError("cas-detect does not support " + op.str());
    return cas_recover_step(f, mem, p);
  }

 private:
  enum Local : int { kVal = 0, kVec, kRes, kBit };

  bool skips(int pc) const {
    return (params_.mutation == Mutation::kCasSkipCp1 && pc == kCCp1) ||
           (params_.mutation == Mutation::kCasSkipRdPersist && pc == kCPersistRd);
  }
  void go(Frame& f, int pc) const {
    while (skips(pc)) ++pc;
    f.pc = pc;
  }

  StepResult cas_step(std::int64_t old_val, std::int64_t new_val, Frame& f, MemoryImage& mem,
                      Pid p) const {
    auto& L = f.locals;
    switch (f.pc) {
      case kCReadC: {
        const Value& c = read_cell(mem, p, c_);
        L[kVal] = c.at(0).as_int();
        L[kVec] = vec_of(c);
        go(f, L[kVal] != old_val ? kCPersistFalse : kCPersistRd);
        return {};
      }
      case kCPersistFalse:
        return persist_response(mem, p, Value::boolean(false));
      case kCPersistRd:
        write_cell(mem, p, rd_slot(p), Value::boolean(((L[kVec] >> p) & 1) == 0));
        go(f, kCCp1);
        return {};
      case kCCp1:
        write_cell(mem, p, mem.layout().ann_cp(p), Value::integer(1));
        go(f, kCCas);
        return {};
      case kCCas: {
        auto vec = static_cast<std::uint32_t>(L[kVec]);
        L[kRes] = cas_cell(mem, p, c_, make_c(L[kVal], vec), make_c(new_val, vec ^ (1U << p)));
        L[kVal] = L[kVec] = 0;
        go(f, kCPersistResp);
        return {};
      }
      case kCPersistResp:
        return persist_response(mem, p, Value::boolean(L[kRes] != 0));
      default:
        throw ModelViolation("cas-detect cas: bad pc " + std::to_string(f.pc));
    }
  }

  StepResult cas_recover_step(Frame& f, MemoryImage& mem, Pid p) const {
    auto& L = f.locals;
    switch (f.pc) {
      case kRReadResp: {
        const Value& resp = read_cell(mem, p, mem.layout().ann_resp(p));
        if (!resp.is_bottom()) return {true, resp};
        f.pc = kRReadCp;
        return {};
      }
      case kRReadCp:
        if (read_cell(mem, p, mem.layout().ann_cp(p)).as_int() == 0) return {true, Value::fail()};
        f.pc = kRReadC;
        return {};
      case kRReadC:
        L[kBit] = (vec_of(read_cell(mem, p, c_)) >> p) & 1U;
        f.pc = kRReadRd;
        return {};
      case kRReadRd: {
        const Value& rd = read_cell(mem, p, rd_slot(p));
        if (rd.is_bottom() || rd.as_bool() != (L[kBit] != 0)) return {true, Value::fail()};
        f.pc = kRPersistTrue;
        return {};
      }
      case kRPersistTrue:
        return persist_response(mem, p, Value::boolean(true));
      default:
        throw ModelViolation("cas-detect recover: bad pc " + std::to_string(f.pc));
    }
  }

  StepResult read_step(Frame& f, MemoryImage& mem, Pid p) const {
    if (f.pc == 0) {
      f.locals[kVal] = read_cell(mem, p, c_).at(0).as_int();
      f.pc = 1;
      return {};
    }
    return persist_response(mem, p, Value::integer(f.locals[kVal]));
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

  Slot c_ = 0, rd_ = 0;
};

}  // namespace detrec

#endif  // DETREC_CAS_DETECT_HPP_
