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

// Correctness harness: kernels against the dense masked oracle, dot-product
// accounting, and chained-kernel composition.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gpattn/algorithm.hpp"
#include "gpattn/attention.hpp"
#include "gpattn/mask.hpp"
#include "gpattn/tensor.hpp"

namespace gpattn {

/// Bad case setup, as opposed to a kernel producing wrong numbers.
class VerifyConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct VerifyCase {
  MaskSpec mask = MaskPattern{Local{1}};
  Index length = 256;
  Index dim = 32;
  std::uint64_t seed = 0;
  Tolerances tolerances{};  // rtol 1e-5, atol 1e-8, NaN == NaN
};

struct VerifyReport {
  bool passed = false;
  double max_abs_deviation = 0;
  double max_rel_deviation = 0;
  std::optional<std::pair<Index, Index>> first_failure;
  std::uint64_t work = 0;
  std::uint64_t nnz = 0;
  std::string detail;
};

template <class T>
struct AttentionInputs {
  DenseMatrix<T> q;
  DenseMatrix<T> k;
  DenseMatrix<T> v;
};

template <class T>
AttentionInputs<T> make_inputs(Index length, Index dim, std::uint64_t seed) {
  return {random_uniform_matrix<T>(length, dim, 3 * seed), random_uniform_matrix<T>(length, dim, 3 * seed + 1),
          random_uniform_matrix<T>(length, dim, 3 * seed + 2)};
}

/// Builds the mask of a pattern by testing every (i, j) against the membership
/// predicates. O(L^2); independent of the row enumerators used by the kernels.
inline CsrMask predicate_mask(const MaskPattern& pattern, Index length) {
  validate_pattern(pattern, length);
  if (std::holds_alternative<Random>(pattern)) return gen_pattern_mask(pattern, length);
  BinaryGrid grid(length);
  for (Index i = 0; i < length; ++i) {
    for (Index j = 0; j < length; ++j) {
      bool in = false;
      if (const auto* p = std::get_if<Local>(&pattern)) in = is_local(i, j, p->window);
      if (const auto* p = std::get_if<Dilated1D>(&pattern)) in = is_dilated1d(i, j, p->window, p->dilation);
      if (const auto* p = std::get_if<Dilated2D>(&pattern)) in = is_dilated2d(i, j, length, p->block, p->dilation);
      if (const auto* p = std::get_if<Global>(&pattern)) in = is_global(i, j, p->indices, p->window);
      grid.at(i, j) = in ? 1 : 0;
    }
  }
  return dense_to_csr(grid);
}

inline CsrMask reference_mask(const MaskSpec& spec, Index length) {
  if (std::holds_alternative<CsrMask>(spec)) return to_csr(spec, length);
  return predicate_mask(std::get<MaskPattern>(spec), length);
}

/// Compares kernel output with oracle output. An oracle row that is all NaN
/// (no mask entries) must be an all-zero kernel row; other elements follow
/// the allclose rule against the oracle value.
template <class T>
VerifyReport compare_outputs(const DenseMatrix<T>& kernel, const DenseMatrix<double>& oracle,
                             const Tolerances& tol) {
  tol.validate();
  if (!oracle.same_shape(kernel.rows(), kernel.cols())) {
    throw VerifyConfigError("kernel and oracle outputs differ in shape");
  }
  VerifyReport report;
  report.passed = true;
  const auto fail = [&](Index i, Index j, std::string why) {
    if (!report.first_failure) {
      report.first_failure = std::pair(i, j);
      report.detail = std::move(why);
    }
    report.passed = false;
  };

  for (Index i = 0; i < kernel.rows(); ++i) {
    const auto o = oracle.row(i);
    const auto kr = kernel.row(i);
    bool empty_row = true;
    for (const double x : o) empty_row = empty_row && std::isnan(x);
    if (empty_row && tol.nan_equal) {
      for (Index j = 0; j < kernel.cols(); ++j) {
        if (kr[static_cast<std::size_t>(j)] != T{0}) {
          fail(i, j, "row " + std::to_string(i) + " has no mask entries but kernel output is non-zero");
        }
      }
      continue;
    }
    for (Index j = 0; j < kernel.cols(); ++j) {
      const double a = static_cast<double>(kr[static_cast<std::size_t>(j)]);
      const double b = o[static_cast<std::size_t>(j)];
      if (std::isfinite(a) && std::isfinite(b)) {
        const double abs_dev = std::abs(a - b);
        report.max_abs_deviation = std::max(report.max_abs_deviation, abs_dev);
        if (b != 0.0) report.max_rel_deviation = std::max(report.max_rel_deviation, abs_dev / std::abs(b));
      }
      if (!close_element(a, b, tol)) {
        fail(i, j, "element (" + std::to_string(i) + ", " + std::to_string(j) + "): kernel " +
                       std::to_string(a) + " vs oracle " + std::to_string(b));
      }
    }
  }
  return report;
}

namespace detail {

template <class T, class Probe = NoProbe>
AttentionResult<T> run_kernel(Algorithm algorithm, const AttentionInputs<T>& in, const MaskSpec& spec,
                              Probe probe = {}) {
  const Index length = in.q.rows();
  if (algorithm == Algorithm::csr) {
    return attend_csr(in.q, in.k, in.v, to_csr(spec, length), std::nullopt, probe);
  }
  if (algorithm == Algorithm::coo) {
    return attend_coo(in.q, in.k, in.v, csr_to_coo(to_csr(spec, length)), std::nullopt, probe);
  }
  const auto* pattern = std::get_if<MaskPattern>(&spec);
  const bool matches =
      pattern != nullptr &&
      ((algorithm == Algorithm::local && std::holds_alternative<Local>(*pattern)) ||
       (algorithm == Algorithm::dilated1d && std::holds_alternative<Dilated1D>(*pattern)) ||
       (algorithm == Algorithm::dilated2d && std::holds_alternative<Dilated2D>(*pattern)) ||
       (algorithm == Algorithm::global && std::holds_alternative<Global>(*pattern)));
  if (!matches) {
    throw VerifyConfigError("algorithm " + to_string(algorithm) + " cannot run this mask");
  }
  return attend(in.q, in.k, in.v, spec, std::nullopt, probe);
}

}  // namespace detail

/// Runs one kernel (precision T) and the double-precision dense oracle on the
/// same inputs and compares them.
template <class T = double>
VerifyReport verify_kernel(const VerifyCase& c, Algorithm algorithm) {
  if (algorithm == Algorithm::sdp || algorithm == Algorithm::flash_dense) {
    throw VerifyConfigError(to_string(algorithm) + " is not a graph kernel");
  }
  CsrMask reference;
  try {
    reference = reference_mask(c.mask, c.length);
  } catch (const MaskError& e) {
    throw VerifyConfigError(e.what());
  }
  const auto in = make_inputs<T>(c.length, c.dim, c.seed);
  const auto result = detail::run_kernel(algorithm, in, c.mask);
  const auto oracle = sdp_masked_oracle(in.q.template cast<double>(), in.k.template cast<double>(),
                                        in.v.template cast<double>(), reference);
  auto report = compare_outputs(result.output, oracle, c.tolerances);
  report.work = result.work;
  report.nnz = reference.nnz();
  return report;
}

namespace detail {

// Records every (i, j) a kernel touches, one list per query row.
struct RecordingProbe {
  std::vector<std::vector<Index>>* touched;
  void operator()(Index i, Index j) const { (*touched)[static_cast<std::size_t>(i)].push_back(j); }
};

}  // namespace detail

/// Passes iff the kernel's dot-product count equals nnz and the probe saw
/// exactly the mask's coordinates, each once, in ascending order per row.
template <class T = double>
VerifyReport verify_work(const VerifyCase& c, Algorithm algorithm) {
  CsrMask reference;
  try {
    reference = reference_mask(c.mask, c.length);
  } catch (const MaskError& e) {
    throw VerifyConfigError(e.what());
  }
  const auto in = make_inputs<T>(c.length, c.dim, c.seed);
  std::vector<std::vector<Index>> touched(static_cast<std::size_t>(c.length));
  const auto result = detail::run_kernel(algorithm, in, c.mask, detail::RecordingProbe{&touched});

  VerifyReport report;
  report.work = result.work;
  report.nnz = reference.nnz();
  report.passed = result.work == reference.nnz();
  if (!report.passed) {
    report.detail = "work " + std::to_string(result.work) + " != nnz " + std::to_string(reference.nnz());
  }
  for (Index i = 0; i < c.length && report.passed; ++i) {
    const auto expect = reference.row(i);
    const auto& seen = touched[static_cast<std::size_t>(i)];
    if (!std::equal(expect.begin(), expect.end(), seen.begin(), seen.end())) {
      report.passed = false;
      Index j = -1;
      for (std::size_t n = 0; n < seen.size(); ++n) {
        if (n >= expect.size() || seen[n] != expect[n]) {
          j = seen[n];
          break;
        }
      }
      report.first_failure = std::pair(i, j);
      report.detail = "row " + std::to_string(i) + " touched a coordinate set different from the mask";
    }
  }
  return report;
}

/// Chains one kernel call per leg, carrying softmax state, and compares with a
/// single CSR call on the union of the legs. Legs must be pairwise disjoint.
template <class T = double>
VerifyReport verify_composition(const std::vector<MaskSpec>& legs, Index length, Index dim, std::uint64_t seed,
                                Tolerances tol = Tolerances{}.scaled(10.0)) {
  if (legs.empty()) throw VerifyConfigError("composition needs at least one leg");
  CsrMask combined;
  try {
    combined = to_csr(legs.front(), length);
    for (std::size_t n = 1; n < legs.size(); ++n) {
      combined = mask_union_disjoint(combined, to_csr(legs[n], length));
    }
  } catch (const MaskOverlapError& e) {
    throw VerifyConfigError(std::string("composition legs overlap: ") + e.what());
  } catch (const MaskError& e) {
    throw VerifyConfigError(e.what());
  }

  const auto in = make_inputs<T>(length, dim, seed);
  std::optional<AttentionResult<T>> carried;
  std::uint64_t work = 0;
  for (const auto& leg : legs) {
    carried = attend(in.q, in.k, in.v, leg, std::move(carried));
    work += carried->work;
  }
  const auto single = attend_csr(in.q, in.k, in.v, combined);
  auto report = compare_outputs(carried->output, single.output.template cast<double>(), tol);
  report.work = work;
  report.nnz = combined.nnz();
  if (work != single.work) {
    report.passed = false;
    report.detail = "sequential work " + std::to_string(work) + " != union work " + std::to_string(single.work);
  }
  return report;
}

/// Seeded random cases for one kernel family at the given size.
inline std::vector<VerifyCase> random_cases(Algorithm family, int count, std::uint64_t seed, Index length = 256,
                                            Index dim = 32) {
  SplitMix64 rng(seed ^ (0x51ED27ULL * (static_cast<std::uint64_t>(family) + 1)));
  const auto pick = [&](Index lo, Index hi) { return lo + static_cast<Index>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))); };
  std::vector<Index> divisors;
  for (Index b = 1; b <= length; ++b) {
    if (length % b == 0) divisors.push_back(b);
  }

  std::vector<VerifyCase> cases;
  for (int n = 0; n < count; ++n) {
    MaskPattern pattern;
    switch (family) {
      case Algorithm::local:
        pattern = Local{pick(1, length)};
        break;
      case Algorithm::dilated1d:
        pattern = Dilated1D{pick(1, length), pick(1, 8)};
        break;
      case Algorithm::dilated2d:
        pattern = Dilated2D{divisors[static_cast<std::size_t>(pick(0, static_cast<Index>(divisors.size()) - 1))],
                            pick(1, 8)};
        break;
      case Algorithm::global: {
        const Index tokens = pick(1, 8);
        std::vector<Index> idx;
        while (static_cast<Index>(idx.size()) < tokens) {
          const Index g = pick(0, length - 1);
          if (std::find(idx.begin(), idx.end(), g) == idx.end()) idx.push_back(g);
        }
        std::sort(idx.begin(), idx.end());
        pattern = Global{std::move(idx), pick(1, length / 2)};
        break;
      }
      case Algorithm::csr:
      case Algorithm::coo:
        // Log-uniform over [1e-3, 1]; the sparse end leaves many empty rows.
        pattern = Random{std::pow(10.0, -3.0 * rng.uniform()), rng.next()};
        break;
      default:
        throw VerifyConfigError(to_string(family) + " is not a graph kernel family");
    }
    cases.push_back(VerifyCase{pattern, length, dim, seed * 1000 + static_cast<std::uint64_t>(n), Tolerances{}});
  }
  return cases;
}

}  // namespace gpattn
