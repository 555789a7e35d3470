// Copyright 2026 The uemit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <vector>

#include "uemit/time.hpp"

namespace uemit::test {

// Every subset K of the UE times that satisfies "u in K iff no k in K lies in
// [u - w, u)"; the rolling rule must reproduce the unique such set.
inline std::vector<std::vector<Timestamp>> burst_fixed_points(const std::vector<Timestamp>& ues, std::int64_t w) {
  std::vector<std::vector<Timestamp>> out;
  const std::size_t n = ues.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      bool blocked = false;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i && (mask >> j & 1u) && ues[j] < ues[i] && ues[i] - ues[j] < w) blocked = true;
        // Equal timestamps: the earlier one in file order blocks the later.
        if (j < i && (mask >> j & 1u) && ues[j] == ues[i]) blocked = true;
      }
      const bool in = mask >> i & 1u;
      ok = in == !blocked;
    }
    if (ok) {
      std::vector<Timestamp> kept;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1u) kept.push_back(ues[i]);
      out.push_back(kept);
    }
  }
  return out;
}

}  // namespace uemit::test
