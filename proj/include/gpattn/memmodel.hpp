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

// Maximum context length under a device memory budget.
//
// The working set of one attention call is modelled as
//
//   fixed + per_token * L + per_nnz * S_f * L^2 + quadratic_dense * L^2
//
// and the largest L that fits is the positive root of that polynomial set
// equal to the budget, rounded to the nearest integer.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpattn/algorithm.hpp"

namespace gpattn {

class MemoryModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Byte cost coefficients. Every field may be overridden after
/// accounting_for() fills in the defaults.
struct MemoryAccounting {
  double per_token_bytes = 0;
  double per_nnz_bytes = 0;
  double quadratic_dense_bytes = 0;
  double fixed_bytes = 0;

  void validate() const {
    if (per_token_bytes < 0 || per_nnz_bytes < 0 || quadratic_dense_bytes < 0 || fixed_bytes < 0) {
      throw MemoryModelError("memory accounting coefficients must be non-negative");
    }
    if (per_token_bytes == 0 && per_nnz_bytes == 0 && quadratic_dense_bytes == 0 && fixed_bytes == 0) {
      throw MemoryModelError("memory accounting needs at least one positive coefficient");
    }
  }

  double footprint(double length, double sparsity) const {
    return fixed_bytes + per_token_bytes * length + per_nnz_bytes * sparsity * length * length +
           quadratic_dense_bytes * length * length;
  }
};

struct HardwareBudget {
  std::uint64_t bytes = 0;

  /// 80 GiB, the A100 SXM4 80GB capacity.
  static constexpr HardwareBudget a100_80gb() { return {80ULL << 30}; }
};

/// Default accounting.
///
/// Every algorithm holds Q, K, V and O (4 * d elements per token). Algorithms
/// with an online softmax add two statistics vectors per head. SDP instead
/// materializes one L x L matrix per head. Explicit masks are stored per head:
/// CSR keeps offsets (one index per token) plus an index and a value per
/// nonzero, COO keeps two indices and a value per nonzero. Global keeps one
/// index per token for the global-token list.
inline MemoryAccounting accounting_for(Algorithm algorithm, int element_bytes, int index_bytes, std::int64_t d,
                                       std::int64_t heads) {
  if (element_bytes != 2 && element_bytes != 4) {
    throw MemoryModelError("element_bytes must be 2 or 4");
  }
  if (index_bytes < 1) throw MemoryModelError("index_bytes must be >= 1");
  if (d < 1 || heads < 1) throw MemoryModelError("d and heads must be >= 1");

  const double eb = element_bytes;
  const double ib = index_bytes;
  const double h = static_cast<double>(heads);
  MemoryAccounting acc;
  acc.per_token_bytes = 4.0 * static_cast<double>(d) * eb;
  const double stats = 2.0 * h * eb;

  switch (algorithm) {
    case Algorithm::sdp:
      acc.quadratic_dense_bytes = eb * h;
      break;
    case Algorithm::csr:
      acc.per_token_bytes += stats + ib * h;
      acc.per_nnz_bytes = (ib + eb) * h;
      break;
    case Algorithm::coo:
      acc.per_token_bytes += stats;
      acc.per_nnz_bytes = (2.0 * ib + eb) * h;
      break;
    case Algorithm::global:
      acc.per_token_bytes += stats + ib;
      break;
    case Algorithm::local:
    case Algorithm::dilated1d:
    case Algorithm::dilated2d:
    case Algorithm::flash_dense:
      acc.per_token_bytes += stats;
      break;
    default:
      throw MemoryModelError("unknown algorithm tag");
  }
  return acc;
}

/// Largest context length whose footprint fits the budget (nearest-integer
/// rounding of the real root, so the result can exceed the exact bound by
/// under one token).
inline std::uint64_t max_context_length(const MemoryAccounting& acc, double sparsity, HardwareBudget budget) {
  acc.validate();
  if (!(sparsity >= 0.0 && sparsity <= 1.0)) throw MemoryModelError("sparsity must lie in [0, 1]");
  if (budget.bytes == 0) throw MemoryModelError("budget must be positive");

  using Real = long double;
  const Real a = static_cast<Real>(acc.per_nnz_bytes) * sparsity + acc.quadratic_dense_bytes;
  const Real b = acc.per_token_bytes;
  const Real slack = static_cast<Real>(budget.bytes) - acc.fixed_bytes;
  if (slack <= 0) {
    throw MemoryModelError("budget of " + std::to_string(budget.bytes) +
                           " bytes does not cover the fixed cost");
  }
  if (a == 0 && b == 0) throw MemoryModelError("footprint does not grow with L; no finite maximum");

  Real root;
  if (a == 0) {
    root = slack / b;
  } else {
    // Stable form of (-b + sqrt(b^2 + 4 a slack)) / (2a).
    root = 2 * slack / (b + std::sqrt(b * b + 4 * a * slack));
  }
  const auto rounded = std::llround(root);
  if (rounded < 1) throw MemoryModelError("no positive context length fits the budget");
  return static_cast<std::uint64_t>(rounded);
}

struct CapacityPoint {
  double sparsity;
  std::uint64_t max_length;
};

inline std::vector<CapacityPoint> capacity_curve(Algorithm algorithm, int element_bytes, int index_bytes,
                                                 std::int64_t d, std::int64_t heads,
                                                 const std::vector<double>& sparsities, HardwareBudget budget) {
  const auto acc = accounting_for(algorithm, element_bytes, index_bytes, d, heads);
  std::vector<CapacityPoint> out;
  out.reserve(sparsities.size());
  for (const double s : sparsities) {
    if (!(s > 0.0 && s <= 1.0)) throw MemoryModelError("curve sparsities must lie in (0, 1]");
    out.push_back({s, max_context_length(acc, s, budget)});
  }
  return out;
}

}  // namespace gpattn
