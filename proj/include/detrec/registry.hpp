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

#ifndef DETREC_REGISTRY_HPP_
#define DETREC_REGISTRY_HPP_

#include <memory>
#include <string>

#include "detrec/cas_detect.hpp"
#include "detrec/maxreg.hpp"
#include "detrec/object.hpp"
#include "detrec/reg_detect.hpp"

namespace detrec {

inline std::string join_names(const std::vector<std::string>& names) {
  std::string s;
  for (const auto& n : names) s += (s.empty() ? "" : ", ") + n;
  return s;
}

inline std::shared_ptr<const ObjectModel> make_object(const ObjectParams& params) {
  if (params.kind == "reg-detect") return std::make_shared<RegDetect>(params);
  if (params.kind == "cas-detect") return std::make_shared<CasDetect>(params);
  if (params.kind == "maxreg") return std::make_shared<MaxReg>(params);
  throw ConfigError("unknown object kind '" + params.kind + "' (valid: " +
                    join_names(object_kinds()) + ")");
}

inline Mutation parse_mutation(const std::string& id) {
  if (id.empty() || id == "none") return Mutation::kNone;
  for (const auto& m : mutation_registry())
    if (id == m.name) return m.id;
  std::vector<std::string> names;
  for (const auto& m : mutation_registry()) names.emplace_back(m.name);
  throw ConfigError("unknown mutation '" + id + "' (valid: " + join_names(names) + ")");
}

/// The same parameters with `id` applied. Object-specific mutations only
/// apply to their own object kind.
inline ObjectParams apply_mutation(ObjectParams params, const std::string& id) {
  auto m = parse_mutation(id);
  if (m != Mutation::kNone) {
    for (const auto& info : mutation_registry()) {
      if (info.id == m && *info.object != '\0' && params.kind != info.object)
        throw ConfigError("mutation " + id + " applies to " + info.object + ", not " +
                          params.kind);
    }
  }
  params.mutation = m;
  return params;
}

}  // namespace detrec

#endif  // DETREC_REGISTRY_HPP_
