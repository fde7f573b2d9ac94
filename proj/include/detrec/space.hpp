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

#ifndef DETREC_SPACE_HPP_
#define DETREC_SPACE_HPP_

#include <cstdint>
#include <string>

#include "detrec/registry.hpp"

namespace detrec {

struct SpaceReport {
  std::string kind;
  int n = 0;
  int value_bits = 0;
  std::int64_t shared_bits = 0;
  std::int64_t shared_cells = 0;
};

/// Shared-memory bit total read off the object's declared cell layout.
/// Per-process private cells, Ann included, are not counted.
inline SpaceReport space_audit(const std::string& kind, int n, int value_bits) {
  if (value_bits < 1) throw ConfigError("value bits must be at least 1");
  ObjectParams params;
  params.kind = kind;
  params.n = n;
  auto obj = make_object(params);
  const auto& l = *obj->layout();
  SpaceReport r{kind, n, value_bits, l.shared_bits(value_bits), 0};
  for (Slot s = 0; s < static_cast<Slot>(l.size()); ++s)
    if (l.info(s).owner == -1) ++r.shared_cells;
  return r;
}

}  // namespace detrec

#endif  // DETREC_SPACE_HPP_
