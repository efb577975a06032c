// Copyright 2026 The gpattn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Published maximum-context-length figures for one 80 GiB A100 at
// S_f = 1e-4, with the accounting configuration that reproduces each cell.

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "gpattn/algorithm.hpp"
#include "gpattn/memmodel.hpp"

namespace gpattn {

enum class CellMatch {
  exact,      // within +/- 1 token
  within_01,  // within 0.1 %
  within_1,   // within 1 %
  known_deviation,
};

struct CapacityCell {
  int element_bytes;
  std::int64_t d;
  std::int64_t heads;
  Algorithm algorithm;
  int index_bytes;  // FP16 CSR uses 2-byte indices; every other cell uses 4
  std::uint64_t published;
  CellMatch expected;
};

inline constexpr double kReferenceSparsity = 1e-4;

inline std::vector<CapacityCell> reference_capacity_cells() {
  using A = Algorithm;
  using M = CellMatch;
  std::vector<CapacityCell> cells;
  struct Row {
    int eb;
    std::int64_t d, h;
    std::uint64_t sdp, csr, coo, flash, local, global;
  };
  constexpr Row rows[] = {
      {4, 64, 1, 146416, 9732519, 8038418, 0, 83235801, 83235769},
      {4, 128, 1, 146288, 9152140, 7644258, 0, 41779838, 41779830},
      {4, 4096, 32, 25651, 950434, 865272, 0, 1305620, 1305620},
      {2, 64, 1, 207116, 14013926, 9009893, 166471601, 166471601, 166471472},
      {2, 128, 1, 206988, 13416404, 8764655, 83559676, 83559676, 83559643},
      {2, 4096, 32, 36381, 1601190, 1200336, 2611240, 2611240, 2611239},
  };
  for (const auto& r : rows) {
    cells.push_back({r.eb, r.d, r.h, A::sdp, 4, r.sdp, M::within_01});
    cells.push_back({r.eb, r.d, r.h, A::csr, r.eb == 2 ? 2 : 4, r.csr, M::within_1});
    cells.push_back({r.eb, r.d, r.h, A::coo, 4, r.coo, M::within_1});
    if (r.flash != 0) cells.push_back({r.eb, r.d, r.h, A::flash_dense, 4, r.flash, M::exact});
    for (const A a : {A::local, A::dilated1d, A::dilated2d}) cells.push_back({r.eb, r.d, r.h, a, 4, r.local, M::exact});
    // One index per token for the global list undershoots these cells by up
    // to 0.8 %; the published figures imply a smaller, non-per-token cost.
    cells.push_back({r.eb, r.d, r.h, A::global, 4, r.global, M::known_deviation});
  }
  return cells;
}

inline std::uint64_t model_value(const CapacityCell& c) {
  const auto acc = accounting_for(c.algorithm, c.element_bytes, c.index_bytes, c.d, c.heads);
  return max_context_length(acc, kReferenceSparsity, HardwareBudget::a100_80gb());
}

inline bool cell_matches(const CapacityCell& c, std::uint64_t value) {
  const double diff = static_cast<double>(value) - static_cast<double>(c.published);
  const double rel = std::abs(diff) / static_cast<double>(c.published);
  switch (c.expected) {
    case CellMatch::exact: return std::abs(diff) <= 1.0;
    case CellMatch::within_01: return rel <= 1e-3;
    case CellMatch::within_1: return rel <= 1e-2;
    default: return true;
  }
}

}  // namespace gpattn
