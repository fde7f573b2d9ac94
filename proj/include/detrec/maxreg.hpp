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

#ifndef DETREC_MAXREG_HPP_
#define DETREC_MAXREG_HPP_

#include <algorithm>
#include <memory>
#include <vector>

#include "detrec/object.hpp"

namespace detrec {

/**
 * Detectable max register without auxiliary state. MR[p] is p's largest
 * written value; Read double-collects MR one entry per step. Both recovery
 * functions re-run the operation from its first step.
 */
class MaxReg final : public ObjectModel {
 public:
  enum WritePc : int { kWReadOwn = 0, kWWriteOwn };
  enum ReadPc : int { kRCompare = 0, kRCopy, kRPersistResp };

  explicit MaxReg(ObjectParams params) : ObjectModel(std::move(params)) {
    if (params_.domain.empty()) params_.domain = {0, 1, 2};
    if (params_.initial != 0) throw ConfigError("maxreg starts with every MR entry at 0");
    for (auto v : params_.domain)
      if (v < 0) throw ConfigError("maxreg values must be non-negative");
    auto l = std::make_shared<MemoryLayout>(params_.n);
    mr_ = l->add_shared("MR", {params_.n}, Value::integer(0), {FieldWidth::kDomainValue});
    set_layout(std::move(l));
  }

  SeqSpec spec() const override { return max_register_spec(0); }

  std::vector<OpDescriptor> alphabet() const override {
    std::vector<OpDescriptor> ops{OpDescriptor::read()};
    for (auto v : params_.domain) ops.push_back(OpDescriptor::write_max(v));
    std::sort(ops.begin(), ops.end());
    return ops;
  }

  Slot mr_slot(int i) const { return mr_ + i; }

  StepResult step(const OpDescriptor& op, Frame& f, MemoryImage& mem, Pid p) const override {
    switch (op.kind) {
      case OpKind::kRead: return read_step(f, mem, p);
      case OpKind::kWriteMax: return write_max_step(op.arg0, f, mem, p);
      default: throw ConfigError("maxreg does not support " + op.str());
    }
  }

  StepResult recover_step(const OpDescriptor& op, Frame& f, MemoryImage& mem,
                          Pid p) const override {
    return step(op, f, mem, p);
  }

 private:
  // locals[0..N) hold the collect array a; kI is the entry cursor.
  static constexpr int kI = kMaxLocals - 1;

  StepResult write_max_step(std::int64_t val, Frame& f, MemoryImage& mem, Pid p) const {
    if (f.pc == kWReadOwn) {
      if (read_cell(mem, p, mr_slot(p)).as_int() >= val) return {true, Value::ack()};
      f.pc = kWWriteOwn;
      return {};
    }
    write_cell(mem, p, mr_slot(p), Value::integer(val));
    return {true, Value::ack()};
  }

  StepResult read_step(Frame& f, MemoryImage& mem, Pid p) const {
    auto& L = f.locals;
    const int n = params_.n;
    switch (f.pc) {
      case kRCompare: {
        auto i = static_cast<int>(L[kI]);
        if (read_cell(mem, p, mr_slot(i)).as_int() != L[i]) {
          L[kI] = 0;
          f.pc = kRCopy;
        } else if (++L[kI] == n) {
          f.pc = kRPersistResp;
        }
        return {};
      }
      case kRCopy: {
        auto i = static_cast<int>(L[kI]);
        L[i] = read_cell(mem, p, mr_slot(i)).as_int();
        if (++L[kI] == n) {
          L[kI] = 0;
          f.pc = kRCompare;
        }
        return {};
      }
      case kRPersistResp: {
        auto res = *std::max_element(L.begin(), L.begin() + n);
        return persist_response(mem, p, Value::integer(res));
      }
      default:
        throw ModelViolation("maxreg read: bad pc " + std::to_string(f.pc));
    }
  }

  Slot mr_ = 0;
};

}  // namespace detrec

#endif  // DETREC_MAXREG_HPP_
