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

#include <gtest/gtest.h>

#include "gpattn/verify.hpp"

namespace gpattn {
namespace {

TEST(PredicateMask, AgreesWithGenerator) {
  const MaskPattern patterns[] = {Local{9}, Dilated1D{13, 4}, Dilated2D{16, 3}, Global{{0, 17, 63}, 6}};
  for (const auto& p : patterns) EXPECT_EQ(predicate_mask(p, 64), gen_pattern_mask(p, 64)) << pattern_name(p);
}

TEST(VerifyKernel, PassesForEveryFamily) {
  for (const Algorithm a : kGraphKernels) {
    for (const auto& c : random_cases(a, 3, 5, 64, 8)) {
      const auto r = verify_kernel<double>(c, a);
      EXPECT_TRUE(r.passed) << to_string(a) << ": " << r.detail;
      EXPECT_EQ(r.work, r.nnz);
    }
  }
}

TEST(VerifyKernel, FloatKernelAgainstDoubleOracle) {
  VerifyCase c;
  c.mask = MaskPattern{Local{17}};
  EXPECT_TRUE(verify_kernel<float>(c, Algorithm::local).passed);
}

TEST(VerifyKernel, MismatchedAlgorithmIsConfigError) {
  VerifyCase c;
  c.mask = MaskPattern{Local{3}};
  EXPECT_THROW(verify_kernel(c, Algorithm::global), VerifyConfigError);
  EXPECT_THROW(verify_kernel(c, Algorithm::sdp), VerifyConfigError);
}

TEST(VerifyKernel, EmptyRowsCountAsZero) {
  VerifyCase c;
  c.length = 16;
  c.mask = CsrMask::empty(16);
  const auto r = verify_kernel(c, Algorithm::csr);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.work, 0u);
}

TEST(CompareOutputs, DetectsNonZeroOnEmptyRow) {
  DenseMatrix<double> oracle(1, 2, {NAN, NAN});
  DenseMatrix<double> kernel(1, 2, {0.0, 1e-3});
  const auto r = compare_outputs(kernel, oracle, Tolerances{});
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.first_failure, (std::pair<Index, Index>(0, 1)));
}

TEST(CompareOutputs, ReportsFirstFailingElement) {
  DenseMatrix<double> oracle(2, 2, {1, 1, 1, 1});
  DenseMatrix<double> kernel(2, 2, {1, 1, 1.1, 1.2});
  const auto r = compare_outputs(kernel, oracle, Tolerances{});
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.first_failure, (std::pair<Index, Index>(1, 0)));
  EXPECT_NEAR(r.max_abs_deviation, 0.2, 1e-12);
}

TEST(VerifyWork, PassesForEveryFamily) {
  for (const Algorithm a : kGraphKernels) {
    for (const auto& c : random_cases(a, 3, 9, 64, 8)) {
      const auto r = verify_work(c, a);
      EXPECT_TRUE(r.passed) << to_string(a) << ": " << r.detail;
    }
  }
}

TEST(VerifyComposition, LocalGlobalRandom) {
  const Index L = 256;
  const std::vector<Index> g{0, 128, 255};
  const auto local = gen_pattern_mask(Local{10}, L);
  const auto glob = gen_pattern_mask(Global{g, 10}, L);
  const auto both = mask_union_disjoint(local, glob);
  const auto rnd = sample_random_mask(L, 300, 4, &both);
  const std::vector<MaskSpec> legs{MaskPattern{Local{10}}, MaskPattern{Global{g, 10}}, rnd};
  const auto r = verify_composition(legs, L, 16, 1);
  EXPECT_TRUE(r.passed) << r.detail;
  EXPECT_EQ(r.work, r.nnz);
}

TEST(VerifyComposition, OverlapIsConfigError) {
  const std::vector<MaskSpec> legs{MaskPattern{Local{3}}, MaskPattern{Local{2}}};
  EXPECT_THROW(verify_composition(legs, 32, 4, 0), VerifyConfigError);
}

TEST(RandomCases, CountAndDeterminism) {
  for (const Algorithm a : kGraphKernels) {
    const auto x = random_cases(a, 20, 3);
    const auto y = random_cases(a, 20, 3);
    ASSERT_EQ(x.size(), 20u);
    for (std::size_t n = 0; n < x.size(); ++n) {
      EXPECT_EQ(reference_mask(x[n].mask, 256), reference_mask(y[n].mask, 256));
      EXPECT_EQ(x[n].length, 256);
      EXPECT_EQ(x[n].dim, 32);
    }
  }
}

}  // namespace
}  // namespace gpattn
