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

// Graph-processing attention.
//
// Every kernel walks query rows independently. For row i it pulls K_j and V_j
// for each neighbor j of the mask, in ascending j, and folds the scaled score
// W = Q_i . K_j / sqrt(d) into a running (max, denominator, output) triple
// with the online softmax recurrence. Only mask nonzeros are ever touched, so
// the dot-product count of a call equals the nnz it consumed.
//
// Kernels can be chained: passing the result of one call as `init` to the
// next continues the same softmax, which equals a single call on the union of
// the (disjoint) masks up to floating-point reassociation.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "gpattn/mask.hpp"
#include "gpattn/tensor.hpp"

namespace gpattn {

class AttentionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Per-row running max and running denominator.
template <class T>
struct SoftmaxState {
  std::vector<T> max;
  std::vector<T> sum;

  SoftmaxState() = default;
  explicit SoftmaxState(Index length)
      : max(static_cast<std::size_t>(length), -std::numeric_limits<T>::infinity()),
        sum(static_cast<std::size_t>(length), T{0}) {}

  Index length() const noexcept { return static_cast<Index>(max.size()); }
};

template <class T>
struct AttentionResult {
  DenseMatrix<T> output;
  SoftmaxState<T> state;
  std::uint64_t work = 0;  // dot products performed by the producing call
};

/// Optional carried state for chaining kernels. Non-deduced so callers can
/// pass std::nullopt or a previous result.
template <class T>
using InitState = std::type_identity_t<std::optional<AttentionResult<T>>>;

template <class T>
struct RowStats {
  T max;
  T sum;
};

/// Fixed-order dot product with eight partial sums; shared by the kernels and
/// the dense oracle.
template <class T>
T dot(std::span<const T> a, std::span<const T> b) noexcept {
  const std::size_t n = a.size();
  std::array<T, 8> acc{};
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    for (std::size_t u = 0; u < 8; ++u) acc[u] += a[k + u] * b[k + u];
  }
  T tail{0};
  for (; k < n; ++k) tail += a[k] * b[k];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

/// One step of the online softmax. `out` holds the normalized output of the
/// neighbors seen so far and is overwritten with the update including
/// (score, value). The prior contribution is dropped entirely when no
/// neighbor has been seen (sum == 0), so the first step yields out == value.
template <class T>
RowStats<T> online_update(RowStats<T> s, std::span<T> out, T score, std::span<const T> value) noexcept {
  const T new_max = s.max < score ? score : s.max;
  const T carried = s.sum == T{0} ? T{0} : s.sum * std::exp(s.max - new_max);
  const T fresh = std::exp(score - new_max);
  const T new_sum = carried + fresh;
  const T inv = T{1} / new_sum;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = inv * (carried * out[k] + fresh * value[k]);
  }
  return {new_max, new_sum};
}

/// Kernel instrumentation hook: called as probe(i, j) immediately before the
/// dot product of query i with key j. Calls for a given i come from the one
/// worker that owns row i.
struct NoProbe {
  void operator()(Index, Index) const noexcept {}
};

namespace detail {

template <class T>
void check_inputs(const DenseMatrix<T>& q, const DenseMatrix<T>& k, const DenseMatrix<T>& v) {
  if (!k.same_shape(q.rows(), q.cols()) || !v.same_shape(q.rows(), q.cols())) {
    throw AttentionError("Q, K and V must share one L x d shape");
  }
}

template <class T>
AttentionResult<T> prepare_result(const DenseMatrix<T>& q, std::optional<AttentionResult<T>>&& init) {
  const Index length = q.rows();
  if (!init) return {DenseMatrix<T>(length, q.cols()), SoftmaxState<T>(length), 0};

  AttentionResult<T> r = std::move(*init);
  if (!r.output.same_shape(length, q.cols())) throw AttentionError("init output shape mismatch");
  if (r.state.length() != length || r.state.sum.size() != r.state.max.size()) {
    throw AttentionError("init softmax state length mismatch");
  }
  for (Index i = 0; i < length; ++i) {
    const T m = r.state.max[static_cast<std::size_t>(i)];
    const T l = r.state.sum[static_cast<std::size_t>(i)];
    const bool untouched = m == -std::numeric_limits<T>::infinity();
    if (!(l >= T{0}) || (l == T{0}) != untouched) {
      throw AttentionError("init softmax state invalid at row " + std::to_string(i));
    }
    if (untouched) {
      for (const T x : r.output.row(i)) {
        if (x != T{0}) throw AttentionError("init output row " + std::to_string(i) + " must be zero");
      }
    }
  }
  r.work = 0;
  return r;
}

// Shared row loop. `neighbors(i, visit)` must call visit(j) for the neighbors
// of row i in ascending order.
template <class T, class Probe, class Neighbors>
AttentionResult<T> run_rows(const DenseMatrix<T>& q, const DenseMatrix<T>& k, const DenseMatrix<T>& v,
                            std::optional<AttentionResult<T>>&& init, Probe& probe,
                            Neighbors&& neighbors) {
  check_inputs(q, k, v);
  AttentionResult<T> r = prepare_result(q, std::move(init));
  const Index length = q.rows();
  const T scale = T{1} / std::sqrt(static_cast<T>(q.cols()));
  std::uint64_t work = 0;

#pragma omp parallel for schedule(dynamic, 64) reduction(+ : work)
  for (Index i = 0; i < length; ++i) {
    RowStats<T> s{r.state.max[static_cast<std::size_t>(i)], r.state.sum[static_cast<std::size_t>(i)]};
    const auto qi = q.row(i);
    const auto out = r.output.row(i);
    std::uint64_t row_work = 0;
    neighbors(i, [&](Index j) {
      probe(i, j);
      const T score = dot<T>(qi, k.row(j)) * scale;
      s = online_update<T>(s, out, score, v.row(j));
      ++row_work;
    });
    r.state.max[static_cast<std::size_t>(i)] = s.max;
    r.state.sum[static_cast<std::size_t>(i)] = s.sum;
    work += row_work;
  }
  r.work = work;
  return r;
}

template <class T, class Probe, class Pattern>
AttentionResult<T> run_pattern(const DenseMatrix<T>& q, const DenseMatrix<T>& k, const DenseMatrix<T>& v,
                               const Pattern& pattern, std::optional<AttentionResult<T>>&& init,
                               Probe& probe) {
  validate_pattern(MaskPattern{pattern}, q.rows());
  const Index length = q.rows();
  return run_rows(q, k, v, std::move(init), probe, [&](Index i, auto&& visit) {
    for_each_neighbor(pattern, i, length, visit);
  });
}

}  // namespace detail

/// Dense masked scaled-dot-product attention: materializes the full L x L
/// score matrix, sets masked-out entries to -inf, applies a row softmax and
/// multiplies by V. Rows without any mask entry come out as NaN.
template <class T>
DenseMatrix<T> sdp_masked_oracle(const DenseMatrix<T>& q, const DenseMatrix<T>& k,
                                 const DenseMatrix<T>& v, const CsrMask& mask) {
  detail::check_inputs(q, k, v);
  const Index length = q.rows();
  const Index d = q.cols();
  if (mask.length != length) throw AttentionError("mask length differs from L");
  mask.validate();

  const T scale = T{1} / std::sqrt(static_cast<T>(d));
  const T neg_inf = -std::numeric_limits<T>::infinity();
  std::vector<T> scores(static_cast<std::size_t>(length) * static_cast<std::size_t>(length));
  const auto score_row = [&](Index i) {
    return std::span<T>(scores.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(length),
                        static_cast<std::size_t>(length));
  };

  // S = Q K^T / sqrt(d), every cell.
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < length; ++i) {
    const auto qi = q.row(i);
    auto s = score_row(i);
    for (Index j = 0; j < length; ++j) s[static_cast<std::size_t>(j)] = dot<T>(qi, k.row(j)) * scale;
  }

  // Mask, then row softmax.
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < length; ++i) {
    auto s = score_row(i);
    const auto keep = mask.row(i);
    auto next = keep.begin();
    T row_max = neg_inf;
    for (Index j = 0; j < length; ++j) {
      if (next != keep.end() && *next == j) {
        ++next;
        row_max = std::max(row_max, s[static_cast<std::size_t>(j)]);
      } else {
        s[static_cast<std::size_t>(j)] = neg_inf;
      }
    }
    if (row_max == neg_inf) {
      for (auto& x : s) x = std::numeric_limits<T>::quiet_NaN();
      continue;
    }
    T total{0};
    for (auto& x : s) {
      x = std::exp(x - row_max);
      total += x;
    }
    const T inv = T{1} / total;
    for (auto& x : s) x *= inv;
  }

  // O = P V, dense.
  DenseMatrix<T> out(length, d);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < length; ++i) {
    const auto p = score_row(i);
    auto o = out.row(i);
    for (Index j = 0; j < length; ++j) {
      const T w = p[static_cast<std::size_t>(j)];
      const auto vj = v.row(j);
      for (Index c = 0; c < d; ++c) o[static_cast<std::size_t>(c)] += w * vj[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

/// Explicit mask, CSR: row i's neighbors are cols[offsets[i] .. offsets[i+1]).
template <class T, class Probe = NoProbe>
AttentionResult<T> attend_csr(const DenseMatrix<T>& q, const DenseMatrix<T>& k, const DenseMatrix<T>& v,
                              const CsrMask& mask, InitState<T> init = std::nullopt,
                              Probe probe = {}) {
  if (mask.length != q.rows()) throw AttentionError("mask length differs from L");
  mask.validate();
  return detail::run_rows(q, k, v, std::move(init), probe, [&](Index i, auto&& visit) {
    for (const Index j : mask.row(i)) visit(j);
  });
}

/// Explicit mask, COO: each row first binary-searches the sorted rows vector
/// for its span, then proceeds exactly like attend_csr.
template <class T, class Probe = NoProbe>
AttentionResult<T> attend_coo(const DenseMatrix<T>& q, const DenseMatrix<T>& k, const DenseMatrix<T>& v,
                              const CooMask& mask, InitState<T> init = std::nullopt,
                              Probe probe = {}) {
  if (mask.length != q.rows()) throw AttentionError("mask length differs from L");
  mask.validate();
  return detail::run_rows(q, k, v, std::move(init), probe, [&](Index i, auto&& visit) {
    const auto [lo, hi] = coo_row_span(mask, i);
    for (std::size_t n = lo; n < hi; ++n) visit(mask.cols[n]);
  });
}

template <class T, class Probe = NoProbe>
AttentionResult<T> attend_local(const DenseMatrix<T>& q, const DenseMatrix<T>& k, const DenseMatrix<T>& v,
                                Index window, InitState<T> init = std::nullopt,
                                Probe probe = {}) {
  return detail::run_pattern(q, k, v, Local{window}, std::move(init), probe);
}

template <class T, class Probe = NoProbe>
AttentionResult<T> attend_dilated1d(const DenseMatrix<T>& q, const DenseMatrix<T>& k,
                                    const DenseMatrix<T>& v, Index window, Index dilation,
                                    InitState<T> init = std::nullopt,
                                    Probe probe = {}) {
  return detail::run_pattern(q, k, v, Dilated1D{window, dilation}, std::move(init), probe);
}

template <class T, class Probe = NoProbe>
AttentionResult<T> attend_dilated2d(const DenseMatrix<T>& q, const DenseMatrix<T>& k,
                                    const DenseMatrix<T>& v, Index block, Index dilation,
                                    InitState<T> init = std::nullopt,
                                    Probe probe = {}) {
  return detail::run_pattern(q, k, v, Dilated2D{block, dilation}, std::move(init), probe);
}

/// Global tokens' full rows and columns with the local window removed.
template <class T, class Probe = NoProbe>
AttentionResult<T> attend_global(const DenseMatrix<T>& q, const DenseMatrix<T>& k, const DenseMatrix<T>& v,
                                 std::vector<Index> indices, Index window,
                                 InitState<T> init = std::nullopt,
                                 Probe probe = {}) {
  return detail::run_pattern(q, k, v, Global{std::move(indices), window}, std::move(init), probe);
}

/// Runs the kernel native to `spec`: implicit patterns use their arithmetic
/// kernel, random patterns and explicit masks go through CSR.
template <class T, class Probe = NoProbe>
AttentionResult<T> attend(const DenseMatrix<T>& q, const DenseMatrix<T>& k, const DenseMatrix<T>& v,
                          const MaskSpec& spec, InitState<T> init = std::nullopt,
                          Probe probe = {}) {
  if (const auto* m = std::get_if<CsrMask>(&spec)) return attend_csr(q, k, v, *m, std::move(init), probe);
  const auto& pattern = std::get<MaskPattern>(spec);
  return std::visit(
      [&](const auto& p) -> AttentionResult<T> {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Random>) {
          return attend_csr(q, k, v, gen_pattern_mask(p, q.rows()), std::move(init), probe);
        } else {
          return detail::run_pattern(q, k, v, p, std::move(init), probe);
        }
      },
      pattern);
}

}  // namespace gpattn
