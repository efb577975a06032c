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

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace gpattn {

// Token and mask indices are 64-bit so context lengths past 2^31 stay
// representable.
using Index = std::int64_t;

/// SplitMix64 (Steele, Lea, Flood 2014). Used both as a sequential stream and,
/// through mix(), as a counter-based generator keyed by (seed, element index).
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() noexcept {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) via Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("SplitMix64::below: bound must be positive");
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_;
};

/// Row-major rows x cols matrix. Holds Q, K, V and attention outputs.
template <class T>
class DenseMatrix {
  static_assert(std::is_floating_point_v<T>);

 public:
  using value_type = T;

  DenseMatrix(Index rows, Index cols) : rows_(rows), cols_(cols) {
    check_shape(rows, cols);
    data_.assign(static_cast<std::size_t>(rows * cols), T{0});
  }

  DenseMatrix(Index rows, Index cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    check_shape(rows, cols);
    if (data_.size() != static_cast<std::size_t>(rows * cols)) {
      throw std::invalid_argument("DenseMatrix: data length " + std::to_string(data_.size()) +
                                  " != rows * cols = " + std::to_string(rows * cols));
    }
  }

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  std::span<T> row(Index i) noexcept {
    return {data_.data() + i * cols_, static_cast<std::size_t>(cols_)};
  }
  std::span<const T> row(Index i) const noexcept {
    return {data_.data() + i * cols_, static_cast<std::size_t>(cols_)};
  }

  T& operator()(Index i, Index j) noexcept { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
  T operator()(Index i, Index j) const noexcept {
    return data_[static_cast<std::size_t>(i * cols_ + j)];
  }

  template <class U>
  DenseMatrix<U> cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return DenseMatrix<U>(rows_, cols_, std::move(out));
  }

  bool same_shape(Index rows, Index cols) const noexcept { return rows_ == rows && cols_ == cols; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  static void check_shape(Index rows, Index cols) {
    if (rows < 1 || cols < 1) {
      throw std::invalid_argument("DenseMatrix: dimensions must be >= 1, got " +
                                  std::to_string(rows) + "x" + std::to_string(cols));
    }
  }

  Index rows_;
  Index cols_;
  std::vector<T> data_;
};

/// Elementwise comparison rule |a - b| <= atol + rtol * |b|. Defaults are the
/// tolerances used for kernel verification.
struct Tolerances {
  double rtol = 1e-5;
  double atol = 1e-8;
  bool nan_equal = true;

  Tolerances scaled(double factor) const { return {rtol * factor, atol * factor, nan_equal}; }

  void validate() const {
    if (!(rtol >= 0.0) || !(atol >= 0.0)) {
      throw std::invalid_argument("Tolerances: rtol and atol must be non-negative");
    }
  }
};

inline bool close_element(double a, double b, const Tolerances& tol) noexcept {
  const bool a_nan = std::isnan(a);
  const bool b_nan = std::isnan(b);
  if (a_nan || b_nan) return tol.nan_equal && a_nan && b_nan;
  if (a == b) return true;  // covers matching infinities
  return std::abs(a - b) <= tol.atol + tol.rtol * std::abs(b);
}

/// True iff every element pair is close. Shape mismatch throws.
template <class T, class U>
bool allclose(const DenseMatrix<T>& a, const DenseMatrix<U>& b, const Tolerances& tol = {}) {
  tol.validate();
  if (!b.same_shape(a.rows(), a.cols())) {
    throw std::invalid_argument("allclose: shape mismatch " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                "x" + std::to_string(b.cols()));
  }
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t n = 0; n < da.size(); ++n) {
    if (!close_element(static_cast<double>(da[n]), static_cast<double>(db[n]), tol)) return false;
  }
  return true;
}

/// Element (i, j) is a pure function of (seed, i * cols + j), so the result is
/// independent of evaluation order and thread count.
template <class T>
T uniform_element(std::uint64_t seed, std::uint64_t counter) noexcept {
  const std::uint64_t key = SplitMix64::mix(seed ^ 0x6A09E667F3BCC909ULL);
  const std::uint64_t bits = SplitMix64::mix(key + (counter + 1) * SplitMix64::kGamma);
  if constexpr (std::is_same_v<T, float>) {
    return static_cast<float>(bits >> 40) * 0x1.0p-24f;
  } else {
    return static_cast<T>(static_cast<double>(bits >> 11) * 0x1.0p-53);
  }
}

/// i.i.d. uniform [0, 1) entries, reproducible per (rows, cols, seed).
template <class T>
DenseMatrix<T> random_uniform_matrix(Index rows, Index cols, std::uint64_t seed) {
  DenseMatrix<T> m(rows, cols);
  auto data = m.data();
  const auto n = static_cast<std::int64_t>(data.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) {
    data[static_cast<std::size_t>(k)] = uniform_element<T>(seed, static_cast<std::uint64_t>(k));
  }
  return m;
}

}  // namespace gpattn
