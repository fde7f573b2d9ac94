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

#ifndef DETREC_OBJECT_HPP_
#define DETREC_OBJECT_HPP_

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "detrec/nvm.hpp"
#include "detrec/seq_spec.hpp"
#include "detrec/value.hpp"

namespace detrec {

/// Deletions of auxiliary-state writes; each removes exactly one step (or
/// one loop) from a step machine or from the harness's announce.
enum class Mutation : std::uint8_t {
  kNone,
  kRegSkipCp1,
  kRegSkipToggleClear,
  kRegSkipToggleSet,
  kCasSkipCp1,
  kCasSkipRdPersist,
  kHarnessSkipAnnounceReset,
};

struct MutationInfo {
  Mutation id;
  const char* name;
  const char* object;  // object kind it applies to, or "" for any
  const char* description;
};

inline const std::vector<MutationInfo>& mutation_registry() {
  static const std::vector<MutationInfo> kRegistry = {
      {Mutation::kRegSkipCp1, "reg:skip-cp1", "reg-detect", "Write omits Ann.cp := 1"},
      {Mutation::kRegSkipToggleClear, "reg:skip-toggle-clear", "reg-detect",
       "Write omits A[p][q][1-qtoggle] := 0"},
      {Mutation::kRegSkipToggleSet, "reg:skip-toggle-set", "reg-detect",
       "Write and Write.Recover omit the loop setting A[i][p][mtoggle] := 1"},
      {Mutation::kCasSkipCp1, "cas:skip-cp1", "cas-detect", "Cas omits Ann.cp := 1"},
      {Mutation::kCasSkipRdPersist, "cas:skip-rd-persist", "cas-detect",
       "Cas omits RD_p := newvec[p]"},
      {Mutation::kHarnessSkipAnnounceReset, "harness:skip-announce-reset", "",
       "announce writes Ann.op but leaves Ann.resp and Ann.cp untouched"},
  };
  return kRegistry;
}

inline std::string mutation_name(Mutation m) {
  for (const auto& info : mutation_registry())
    if (info.id == m) return info.name;
  return "none";
}

inline const std::vector<std::string>& object_kinds() {
  static const std::vector<std::string> kKinds = {"reg-detect", "cas-detect", "maxreg"};
  return kKinds;
}

/// Everything needed to rebuild an object deterministically.
struct ObjectParams {
  std::string kind = "reg-detect";
  int n = 2;
  std::vector<std::int64_t> domain;  // empty selects the per-kind default
  std::int64_t initial = 0;          // v_init
  Mutation mutation = Mutation::kNone;
  // reg-detect only: T_0 starts at 0 exactly as in the published pseudocode.
  // The default starts T_0 at 1; see reg_detect.hpp.
  bool literal_initial_toggle = false;
  // cas-detect only: include Cas(v,v) in the alphabet. A successful Cas(v,v)
  // flips vec[p] without changing the value, so a concurrent Cas(v,w) can
  // fail while the value equals v throughout its interval.
  bool identity_cas = false;
};

struct StepResult {
  bool done = false;
  Value response;
};

/**
 * A recoverable object as resumable step machines. Every call to step() or
 * recover_step() performs exactly one NVM primitive; the frame holds the
 * volatile resume point and locals.
 */
class ObjectModel {
 public:
  explicit ObjectModel(ObjectParams params) : params_(std::move(params)) {}
  virtual ~ObjectModel() = default;

  const ObjectParams& params() const { return params_; }
  int processes() const { return params_.n; }
  const std::vector<std::int64_t>& domain() const { return params_.domain; }
  const std::shared_ptr<const MemoryLayout>& layout() const { return layout_; }
  Mutation mutation() const { return params_.mutation; }
  bool announce_resets() const { return params_.mutation != Mutation::kHarnessSkipAnnounceReset; }

  virtual SeqSpec spec() const = 0;

  /// Every operation the object supports over its value domain, in canonical
  /// descriptor order.
  virtual std::vector<OpDescriptor> alphabet() const = 0;

  bool supports(const OpDescriptor& op) const {
    auto ops = alphabet();
    return std::find(ops.begin(), ops.end(), op) != ops.end();
  }

  virtual StepResult step(const OpDescriptor& op, Frame& f, MemoryImage& mem, Pid p) const = 0;
  virtual StepResult recover_step(const OpDescriptor& op, Frame& f, MemoryImage& mem,
                                  Pid p) const = 0;

  /// Smallest number of bits that encodes every domain value.
  int value_bits() const {
    std::int64_t hi = 0;
    for (auto v : params_.domain) hi = std::max(hi, v);
    int bits = 1;
    while ((std::int64_t{1} << bits) <= hi) ++bits;
    return bits;
  }

 protected:
  void set_layout(std::shared_ptr<MemoryLayout> l) { layout_ = std::move(l); }

  // Shared response persistence used by the Read step machines.
  static StepResult persist_response(MemoryImage& mem, Pid p, Value v) {
    write_cell(mem, p, mem.layout().ann_resp(p), v);
    return {true, std::move(v)};
  }

  ObjectParams params_;

 private:
  std::shared_ptr<const MemoryLayout> layout_;
};

}  // namespace detrec

#endif  // DETREC_OBJECT_HPP_
