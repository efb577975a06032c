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

// Attention masks viewed as a token graph: row i lists the keys (neighbors)
// that query i attends to. Explicit masks are stored as COO or CSR without a
// values vector (masks are 0-1). Implicit masks are parameter records whose
// neighbor lists are computed arithmetically per row.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "gpattn/tensor.hpp"

namespace gpattn {

class MaskError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by mask_union_disjoint when both operands contain (row, col).
class MaskOverlapError : public MaskError {
 public:
  MaskOverlapError(Index row, Index col)
      : MaskError("masks overlap at (" + std::to_string(row) + ", " + std::to_string(col) + ")"),
        row_(row),
        col_(col) {}
  Index row() const noexcept { return row_; }
  Index col() const noexcept { return col_; }

 private:
  Index row_;
  Index col_;
};

// ---------------------------------------------------------------------------
// Explicit masks

/// Coordinate form. Entries sorted by (row, col) without duplicates.
struct CooMask {
  Index length = 0;
  std::vector<Index> rows;
  std::vector<Index> cols;

  std::size_t nnz() const noexcept { return rows.size(); }

  void validate() const {
    if (length < 1) throw MaskError("CooMask: length must be >= 1");
    if (rows.size() != cols.size()) throw MaskError("CooMask: rows and cols differ in length");
    for (std::size_t n = 0; n < rows.size(); ++n) {
      if (rows[n] < 0 || rows[n] >= length || cols[n] < 0 || cols[n] >= length) {
        throw MaskError("CooMask: entry (" + std::to_string(rows[n]) + ", " +
                        std::to_string(cols[n]) + ") out of range for length " +
                        std::to_string(length));
      }
      if (n > 0) {
        const auto prev = std::pair(rows[n - 1], cols[n - 1]);
        const auto cur = std::pair(rows[n], cols[n]);
        if (!(prev < cur)) {
          throw MaskError("CooMask: entries unsorted or duplicated at (" +
                          std::to_string(rows[n]) + ", " + std::to_string(cols[n]) + ")");
        }
      }
    }
  }

  friend bool operator==(const CooMask&, const CooMask&) = default;
};

/// Compressed sparse row form.
struct CsrMask {
  Index length = 0;
  std::vector<Index> offsets;
  std::vector<Index> cols;

  static CsrMask empty(Index length) {
    if (length < 1) throw MaskError("CsrMask: length must be >= 1");
    return CsrMask{length, std::vector<Index>(static_cast<std::size_t>(length) + 1, 0), {}};
  }

  std::size_t nnz() const noexcept { return cols.size(); }

  std::span<const Index> row(Index i) const noexcept {
    const auto begin = static_cast<std::size_t>(offsets[static_cast<std::size_t>(i)]);
    const auto end = static_cast<std::size_t>(offsets[static_cast<std::size_t>(i) + 1]);
    return std::span<const Index>(cols).subspan(begin, end - begin);
  }

  bool contains(Index i, Index j) const noexcept {
    const auto r = row(i);
    return std::binary_search(r.begin(), r.end(), j);
  }

  void validate() const {
    if (length < 1) throw MaskError("CsrMask: length must be >= 1");
    if (offsets.size() != static_cast<std::size_t>(length) + 1) {
      throw MaskError("CsrMask: offsets must have length L + 1");
    }
    if (offsets.front() != 0) throw MaskError("CsrMask: offsets[0] must be 0");
    if (offsets.back() != static_cast<Index>(cols.size())) {
      throw MaskError("CsrMask: offsets[L] must equal nnz");
    }
    for (Index i = 0; i < length; ++i) {
      const auto lo = offsets[static_cast<std::size_t>(i)];
      const auto hi = offsets[static_cast<std::size_t>(i) + 1];
      if (hi < lo) throw MaskError("CsrMask: offsets decrease at row " + std::to_string(i));
      for (Index n = lo; n < hi; ++n) {
        const Index j = cols[static_cast<std::size_t>(n)];
        if (j < 0 || j >= length) {
          throw MaskError("CsrMask: column " + std::to_string(j) + " out of range in row " +
                          std::to_string(i));
        }
        if (n > lo && cols[static_cast<std::size_t>(n) - 1] >= j) {
          throw MaskError("CsrMask: columns not strictly increasing in row " + std::to_string(i));
        }
      }
    }
  }

  friend bool operator==(const CsrMask&, const CsrMask&) = default;
};

/// Dense 0-1 grid, row-major. Only meant for small masks and tests.
struct BinaryGrid {
  Index length = 0;
  std::vector<std::uint8_t> cells;

  explicit BinaryGrid(Index n = 0) : length(n), cells(static_cast<std::size_t>(n * n), 0) {}

  std::uint8_t& at(Index i, Index j) { return cells[static_cast<std::size_t>(i * length + j)]; }
  std::uint8_t at(Index i, Index j) const { return cells[static_cast<std::size_t>(i * length + j)]; }

  friend bool operator==(const BinaryGrid&, const BinaryGrid&) = default;
};

// ---------------------------------------------------------------------------
// Implicit patterns

struct Local {
  Index window = 1;
};
struct Dilated1D {
  Index window = 1;
  Index dilation = 1;
};
struct Dilated2D {
  Index block = 1;
  Index dilation = 1;
};
struct Global {
  std::vector<Index> indices;  // sorted, unique
  Index window = 1;
};
struct Random {
  double sparsity = 0.0;
  std::uint64_t seed = 0;
};

using MaskPattern = std::variant<Local, Dilated1D, Dilated2D, Global, Random>;

/// Either a parameterized pattern or an already materialized mask.
using MaskSpec = std::variant<MaskPattern, CsrMask>;

inline std::string pattern_name(const MaskPattern& p) {
  static constexpr const char* kNames[] = {"local", "dilated1d", "dilated2d", "global", "random"};
  return kNames[p.index()];
}

inline bool is_implicit(const MaskPattern& p) noexcept {
  return !std::holds_alternative<Random>(p);
}

inline void validate_pattern(const MaskPattern& pattern, Index length) {
  if (length < 1) throw MaskError("mask length must be >= 1");
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Local>) {
          if (p.window < 1) throw MaskError("local: window must be >= 1");
        } else if constexpr (std::is_same_v<P, Dilated1D>) {
          if (p.window < 1) throw MaskError("dilated1d: window must be >= 1");
          if (p.dilation < 1) throw MaskError("dilated1d: dilation must be >= 1");
        } else if constexpr (std::is_same_v<P, Dilated2D>) {
          if (p.block < 1) throw MaskError("dilated2d: block must be >= 1");
          if (p.dilation < 1) throw MaskError("dilated2d: dilation must be >= 1");
          if (length % p.block != 0) {
            throw MaskError("dilated2d: block " + std::to_string(p.block) +
                            " does not divide length " + std::to_string(length));
          }
        } else if constexpr (std::is_same_v<P, Global>) {
          if (p.window < 1) throw MaskError("global: window must be >= 1");
          for (std::size_t n = 0; n < p.indices.size(); ++n) {
            if (p.indices[n] < 0 || p.indices[n] >= length) {
              throw MaskError("global: index " + std::to_string(p.indices[n]) +
                              " out of range for length " + std::to_string(length));
            }
            if (n > 0 && p.indices[n - 1] >= p.indices[n]) {
              throw MaskError("global: indices must be sorted and unique");
            }
          }
        } else {
          if (!(p.sparsity > 0.0 && p.sparsity <= 1.0)) {
            throw MaskError("random: sparsity must lie in (0, 1]");
          }
        }
      },
      pattern);
}

// Membership predicates. These are the defining rules; generators and kernels
// enumerate the same sets row by row.

inline bool is_local(Index i, Index j, Index window) noexcept {
  return std::abs(i - j) < window;
}

inline bool is_dilated1d(Index i, Index j, Index window, Index dilation) noexcept {
  const Index diff = std::abs(i - j);
  return diff < window && diff % dilation == 0;
}

/// Same contiguous block of size `block`, and both in-block offsets are
/// multiples of `dilation`.
inline bool is_dilated2d(Index i, Index j, Index length, Index block, Index dilation) {
  if (block < 1 || length % block != 0) {
    throw MaskError("dilated2d: block " + std::to_string(block) + " does not divide length " +
                    std::to_string(length));
  }
  if (i / block != j / block) return false;
  return (i % block) % dilation == 0 && (j % block) % dilation == 0;
}

/// Full rows and columns of the global tokens, minus the local window.
inline bool is_global(Index i, Index j, std::span<const Index> indices, Index window) noexcept {
  if (std::abs(i - j) < window) return false;
  return std::binary_search(indices.begin(), indices.end(), i) ||
         std::binary_search(indices.begin(), indices.end(), j);
}

// Row enumeration. Each overload calls fn(j) for the neighbors of row i in
// ascending order; the cost is proportional to the neighbor count (plus the
// global-token count for Global).

template <class Fn>
void for_each_neighbor(const Local& p, Index i, Index length, Fn&& fn) {
  const Index lo = std::max<Index>(0, i - p.window + 1);
  const Index hi = std::min<Index>(length - 1, i + p.window - 1);
  for (Index j = lo; j <= hi; ++j) fn(j);
}

template <class Fn>
void for_each_neighbor(const Dilated1D& p, Index i, Index length, Fn&& fn) {
  const Index steps = (p.window - 1) / p.dilation;
  const Index back = std::min(steps, i / p.dilation);
  const Index fwd = std::min(steps, (length - 1 - i) / p.dilation);
  for (Index j = i - back * p.dilation; j <= i + fwd * p.dilation; j += p.dilation) fn(j);
}

template <class Fn>
void for_each_neighbor(const Dilated2D& p, Index i, Index /*length*/, Fn&& fn) {
  const Index base = (i / p.block) * p.block;
  if ((i - base) % p.dilation != 0) return;
  for (Index t = 0; t < p.block; t += p.dilation) fn(base + t);
}

template <class Fn>
void for_each_neighbor(const Global& p, Index i, Index length, Fn&& fn) {
  if (std::binary_search(p.indices.begin(), p.indices.end(), i)) {
    for (Index j = 0; j <= i - p.window; ++j) fn(j);
    for (Index j = std::max<Index>(0, i + p.window); j < length; ++j) fn(j);
    return;
  }
  for (const Index g : p.indices) {
    if (std::abs(i - g) >= p.window) fn(g);
  }
}

namespace detail {

inline Index local_row_count(Index window, Index i, Index length) noexcept {
  const Index lo = std::max<Index>(0, i - window + 1);
  const Index hi = std::min<Index>(length - 1, i + window - 1);
  return hi - lo + 1;
}

}  // namespace detail

/// Neighbor count of row i without enumerating (O(1), or O(#global) for Global).
inline Index neighbor_count(const MaskPattern& pattern, Index i, Index length) {
  return std::visit(
      [&](const auto& p) -> Index {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Local>) {
          return detail::local_row_count(p.window, i, length);
        } else if constexpr (std::is_same_v<P, Dilated1D>) {
          const Index steps = (p.window - 1) / p.dilation;
          return std::min(steps, i / p.dilation) + std::min(steps, (length - 1 - i) / p.dilation) +
                 1;
        } else if constexpr (std::is_same_v<P, Dilated2D>) {
          if ((i % p.block) % p.dilation != 0) return 0;
          return (p.block + p.dilation - 1) / p.dilation;
        } else if constexpr (std::is_same_v<P, Global>) {
          if (std::binary_search(p.indices.begin(), p.indices.end(), i)) {
            return length - detail::local_row_count(p.window, i, length);
          }
          Index n = 0;
          for (const Index g : p.indices) n += std::abs(i - g) >= p.window ? 1 : 0;
          return n;
        } else {
          throw MaskError("random pattern has no per-row neighbor rule; materialize it first");
        }
      },
      pattern);
}

template <class Fn>
void for_each_neighbor(const MaskPattern& pattern, Index i, Index length, Fn&& fn) {
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Random>) {
          throw MaskError("random pattern has no per-row neighbor rule; materialize it first");
        } else {
          for_each_neighbor(p, i, length, fn);
        }
      },
      pattern);
}

/// Total nonzeros of a pattern at a given length, computed row by row.
inline std::uint64_t pattern_nnz(const MaskPattern& pattern, Index length) {
  validate_pattern(pattern, length);
  if (const auto* r = std::get_if<Random>(&pattern)) {
    const double cells = static_cast<double>(length) * static_cast<double>(length);
    return static_cast<std::uint64_t>(std::llround(r->sparsity * cells));
  }
  std::uint64_t total = 0;
  for (Index i = 0; i < length; ++i) total += static_cast<std::uint64_t>(neighbor_count(pattern, i, length));
  return total;
}

// ---------------------------------------------------------------------------
// Neighbor lists

inline void check_row(Index i, Index length) {
  if (i < 0 || i >= length) {
    throw MaskError("row " + std::to_string(i) + " out of range for length " +
                    std::to_string(length));
  }
}

inline std::vector<Index> get_neighbors(const CsrMask& m, Index i) {
  check_row(i, m.length);
  const auto r = m.row(i);
  return {r.begin(), r.end()};
}

/// Half-open entry range [first, last) of row i in a COO mask, located by
/// binary search over the sorted rows vector.
inline std::pair<std::size_t, std::size_t> coo_row_span(const CooMask& m, Index i) {
  const auto [lo, hi] = std::equal_range(m.rows.begin(), m.rows.end(), i);
  return {static_cast<std::size_t>(lo - m.rows.begin()), static_cast<std::size_t>(hi - m.rows.begin())};
}

inline std::vector<Index> get_neighbors(const CooMask& m, Index i) {
  check_row(i, m.length);
  const auto [lo, hi] = coo_row_span(m, i);
  return {m.cols.begin() + static_cast<std::ptrdiff_t>(lo),
          m.cols.begin() + static_cast<std::ptrdiff_t>(hi)};
}

inline std::vector<Index> get_neighbors(const MaskPattern& p, Index i, Index length) {
  validate_pattern(p, length);
  check_row(i, length);
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(neighbor_count(p, i, length)));
  for_each_neighbor(p, i, length, [&](Index j) { out.push_back(j); });
  return out;
}

// ---------------------------------------------------------------------------
// Format conversion

inline CsrMask coo_to_csr(const CooMask& m) {
  m.validate();
  CsrMask out = CsrMask::empty(m.length);
  for (const Index r : m.rows) ++out.offsets[static_cast<std::size_t>(r) + 1];
  for (std::size_t i = 1; i < out.offsets.size(); ++i) out.offsets[i] += out.offsets[i - 1];
  out.cols = m.cols;  // already in (row, col) order
  return out;
}

inline CooMask csr_to_coo(const CsrMask& m) {
  m.validate();
  CooMask out{m.length, {}, m.cols};
  out.rows.reserve(m.nnz());
  for (Index i = 0; i < m.length; ++i) {
    const auto count = m.offsets[static_cast<std::size_t>(i) + 1] - m.offsets[static_cast<std::size_t>(i)];
    out.rows.insert(out.rows.end(), static_cast<std::size_t>(count), i);
  }
  return out;
}

inline CsrMask dense_to_csr(const BinaryGrid& grid) {
  if (grid.length < 1 || grid.cells.size() != static_cast<std::size_t>(grid.length * grid.length)) {
    throw MaskError("dense_to_csr: grid must be a non-empty square");
  }
  CsrMask out = CsrMask::empty(grid.length);
  for (Index i = 0; i < grid.length; ++i) {
    for (Index j = 0; j < grid.length; ++j) {
      const auto v = grid.at(i, j);
      if (v > 1) throw MaskError("dense_to_csr: grid entries must be 0 or 1");
      if (v == 1) out.cols.push_back(j);
    }
    out.offsets[static_cast<std::size_t>(i) + 1] = static_cast<Index>(out.cols.size());
  }
  return out;
}

inline BinaryGrid csr_to_dense(const CsrMask& m) {
  m.validate();
  BinaryGrid grid(m.length);
  for (Index i = 0; i < m.length; ++i) {
    for (const Index j : m.row(i)) grid.at(i, j) = 1;
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Generation

/// Draws `count` distinct cells of the L x L grid uniformly without
/// replacement, never choosing a cell present in `exclude`. Deterministic per
/// (length, count, seed, exclude).
inline CsrMask sample_random_mask(Index length, std::uint64_t count, std::uint64_t seed,
                                  const CsrMask* exclude = nullptr) {
  if (length < 1) throw MaskError("random: length must be >= 1");
  if (exclude != nullptr && exclude->length != length) {
    throw MaskError("random: exclusion mask length differs");
  }
  const auto n = static_cast<std::uint64_t>(length);
  const std::uint64_t cells = n * n;
  const std::uint64_t blocked = exclude != nullptr ? exclude->nnz() : 0;
  const std::uint64_t available = cells - blocked;
  if (count > available) {
    throw MaskError("random: requested " + std::to_string(count) + " cells but only " +
                    std::to_string(available) + " are available");
  }

  SplitMix64 rng(seed);
  CsrMask out = CsrMask::empty(length);
  out.cols.reserve(count);

  if (count * 16 >= available) {
    // Selection sampling (Knuth's Algorithm S) over the allowed cells in
    // row-major order; output comes out sorted.
    std::uint64_t needed = count;
    std::uint64_t remaining = available;
    for (Index i = 0; i < length; ++i) {
      std::span<const Index> skip;
      if (exclude != nullptr) skip = exclude->row(i);
      auto next_skip = skip.begin();
      for (Index j = 0; j < length && needed > 0; ++j) {
        if (next_skip != skip.end() && *next_skip == j) {
          ++next_skip;
          continue;
        }
        if (static_cast<double>(remaining) * rng.uniform() < static_cast<double>(needed)) {
          out.cols.push_back(j);
          --needed;
        }
        --remaining;
      }
      out.offsets[static_cast<std::size_t>(i) + 1] = static_cast<Index>(out.cols.size());
    }
    return out;
  }

  // Sparse case: rejection sampling. The accepted set is uniform over
  // count-subsets of the allowed cells.
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(count) * 2);
  std::vector<std::uint64_t> picked;
  picked.reserve(count);
  while (picked.size() < count) {
    const std::uint64_t cell = rng.below(cells);
    const auto i = static_cast<Index>(cell / n);
    const auto j = static_cast<Index>(cell % n);
    if (exclude != nullptr && exclude->contains(i, j)) continue;
    if (seen.insert(cell).second) picked.push_back(cell);
  }
  std::sort(picked.begin(), picked.end());
  for (const auto cell : picked) {
    out.cols.push_back(static_cast<Index>(cell % n));
    ++out.offsets[static_cast<std::size_t>(cell / n) + 1];
  }
  for (std::size_t i = 1; i < out.offsets.size(); ++i) out.offsets[i] += out.offsets[i - 1];
  return out;
}

inline std::uint64_t random_cell_count(double sparsity, Index length) {
  const double cells = static_cast<double>(length) * static_cast<double>(length);
  return static_cast<std::uint64_t>(std::llround(sparsity * cells));
}

/// Materializes a pattern as CSR.
inline CsrMask gen_pattern_mask(const MaskPattern& pattern, Index length) {
  validate_pattern(pattern, length);
  if (const auto* r = std::get_if<Random>(&pattern)) {
    return sample_random_mask(length, random_cell_count(r->sparsity, length), r->seed);
  }
  CsrMask out = CsrMask::empty(length);
  for (Index i = 0; i < length; ++i) {
    out.offsets[static_cast<std::size_t>(i) + 1] =
        out.offsets[static_cast<std::size_t>(i)] + neighbor_count(pattern, i, length);
  }
  out.cols.resize(static_cast<std::size_t>(out.offsets.back()));
#pragma omp parallel for schedule(dynamic, 256)
  for (Index i = 0; i < length; ++i) {
    auto slot = static_cast<std::size_t>(out.offsets[static_cast<std::size_t>(i)]);
    for_each_neighbor(pattern, i, length, [&](Index j) { out.cols[slot++] = j; });
  }
  return out;
}

inline CsrMask to_csr(const MaskSpec& spec, Index length) {
  if (const auto* m = std::get_if<CsrMask>(&spec)) {
    if (m->length != length) throw MaskError("mask length differs from input length");
    m->validate();
    return *m;
  }
  return gen_pattern_mask(std::get<MaskPattern>(spec), length);
}

// ---------------------------------------------------------------------------
// Set algebra and analytics

/// Exact union of two masks that must not share a coordinate.
inline CsrMask mask_union_disjoint(const CsrMask& a, const CsrMask& b) {
  if (a.length != b.length) throw MaskError("mask_union_disjoint: lengths differ");
  a.validate();
  b.validate();
  CsrMask out = CsrMask::empty(a.length);
  out.cols.reserve(a.nnz() + b.nnz());
  for (Index i = 0; i < a.length; ++i) {
    const auto ra = a.row(i);
    const auto rb = b.row(i);
    auto x = ra.begin();
    auto y = rb.begin();
    while (x != ra.end() || y != rb.end()) {
      if (y == rb.end() || (x != ra.end() && *x < *y)) {
        out.cols.push_back(*x++);
      } else if (x == ra.end() || *y < *x) {
        out.cols.push_back(*y++);
      } else {
        throw MaskOverlapError(i, *x);
      }
    }
    out.offsets[static_cast<std::size_t>(i) + 1] = static_cast<Index>(out.cols.size());
  }
  return out;
}

/// nnz / L^2.
inline double sparsity_factor(const CsrMask& m) {
  const double cells = static_cast<double>(m.length) * static_cast<double>(m.length);
  return static_cast<double>(m.nnz()) / cells;
}

inline double sparsity_factor(const CooMask& m) {
  const double cells = static_cast<double>(m.length) * static_cast<double>(m.length);
  return static_cast<double>(m.nnz()) / cells;
}

/// Sparsity implied by a dilated schedule needing 2730 * L dot products:
/// min(1, 2730 / L).
inline double longnet_sparsity(Index length) {
  if (length < 1) throw MaskError("longnet_sparsity: length must be >= 1");
  return std::min(1.0, 2730.0 / static_cast<double>(length));
}

// ---------------------------------------------------------------------------
// Sizing helpers: pick pattern parameters that hit a target sparsity.

namespace detail {

inline std::uint64_t target_nnz(double sparsity, Index length) {
  if (!(sparsity > 0.0 && sparsity <= 1.0)) throw MaskError("target sparsity must lie in (0, 1]");
  return random_cell_count(sparsity, length);
}

// Smallest-error parameter in [lo, hi] for a monotone non-decreasing count.
template <class Count>
Index closest_parameter(Index lo, Index hi, std::uint64_t target, Count&& count) {
  Index a = lo;
  Index b = hi;
  while (a < b) {
    const Index mid = a + (b - a) / 2;
    if (count(mid) < target) a = mid + 1; else b = mid;
  }
  if (a > lo) {
    const auto above = count(a);
    const auto below = count(a - 1);
    const auto err_above = above > target ? above - target : target - above;
    const auto err_below = below > target ? below - target : target - below;
    if (err_below <= err_above) return a - 1;
  }
  return a;
}

}  // namespace detail

/// Local window whose mask nnz is closest to sparsity * L^2.
inline Index window_for_sparsity(Index length, double sparsity) {
  const auto target = detail::target_nnz(sparsity, length);
  const auto n = static_cast<std::uint64_t>(length);
  return detail::closest_parameter(1, length, target, [&](Index w) {
    const auto uw = static_cast<std::uint64_t>(w);
    return n * (2 * uw - 1) - uw * (uw - 1);
  });
}

inline Index dilated_window_for_sparsity(Index length, double sparsity, Index dilation) {
  const auto target = detail::target_nnz(sparsity, length);
  // Only windows of the form k * dilation + 1 change the mask.
  const Index max_steps = (length - 1) / dilation;
  const Index steps = detail::closest_parameter(0, max_steps, target, [&](Index k) {
    return pattern_nnz(Dilated1D{k * dilation + 1, dilation}, length);
  });
  return steps * dilation + 1;
}

/// Block size (a divisor of L) whose dilated-2D mask is closest to the target.
inline Index block_for_sparsity(Index length, double sparsity, Index dilation) {
  const auto target = detail::target_nnz(sparsity, length);
  Index best = 1;
  std::uint64_t best_err = UINT64_MAX;
  for (Index b = 1; b <= length; ++b) {
    if (length % b != 0) continue;
    const auto per_block = static_cast<std::uint64_t>((b + dilation - 1) / dilation);
    const auto nnz = static_cast<std::uint64_t>(length / b) * per_block * per_block;
    const auto err = nnz > target ? nnz - target : target - nnz;
    if (err < best_err) {
      best_err = err;
      best = b;
    }
  }
  return best;
}

}  // namespace gpattn
