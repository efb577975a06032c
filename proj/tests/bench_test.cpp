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

#include <filesystem>

#include <gtest/gtest.h>

#include "gpattn/bench.hpp"

namespace gpattn {
namespace {

BenchConfig small(Algorithm a) {
  BenchConfig c;
  c.algorithm = a;
  c.length = 256;
  c.dim = 16;
  c.warmup = 1;
  c.iters = 3;
  return c;
}

TEST(Summarize, Statistics) {
  const auto t = summarize({3.0, 1.0, 2.0, 6.0});
  EXPECT_DOUBLE_EQ(t.mean_s, 3.0);
  EXPECT_DOUBLE_EQ(t.median_s, 2.5);
  EXPECT_DOUBLE_EQ(t.min_s, 1.0);
  EXPECT_DOUBLE_EQ(t.max_s, 6.0);
  EXPECT_EQ(t.samples_s.size(), 4u);
}

TEST(RunBenchmark, LocalFromSparsity) {
  auto c = small(Algorithm::local);
  c.length = 8192;
  c.dim = 16;
  c.sparsity = 0.01;
  c.warmup = 0;
  c.iters = 2;
  const auto r = run_benchmark(c);
  ASSERT_TRUE(r.resolved_pattern);
  const Index w = std::get<Local>(*r.resolved_pattern).window;
  EXPECT_EQ(w, window_for_sparsity(8192, 0.01));
  EXPECT_EQ(r.work, r.nnz);
  EXPECT_EQ(r.nnz, pattern_nnz(Local{w}, 8192));
  EXPECT_EQ(r.timing.samples_s.size(), 2u);
  EXPECT_NEAR(r.achieved_sf, 0.01, 1e-3);
}

TEST(RunBenchmark, DefaultIterationCounts) {
  BenchConfig c;
  EXPECT_EQ(c.warmup, 10);
  EXPECT_EQ(c.iters, 15);
  c.length = 64;
  c.dim = 4;
  c.pattern = Local{3};
  EXPECT_EQ(run_benchmark(c).timing.samples_s.size(), 15u);
}

TEST(RunBenchmark, EveryAlgorithmMatchesOracle) {
  const std::pair<Algorithm, MaskPattern> runs[] = {
      {Algorithm::csr, Random{0.05, 1}},       {Algorithm::coo, Random{0.05, 1}},
      {Algorithm::local, Local{9}},            {Algorithm::dilated1d, Dilated1D{17, 4}},
      {Algorithm::dilated2d, Dilated2D{32, 2}}, {Algorithm::global, Global{{0, 100}, 9}}};
  for (const auto& [a, p] : runs) {
    auto c = small(a);
    c.pattern = p;
    c.compare_oracle = true;
    const auto r = run_benchmark(c);
    ASSERT_TRUE(r.oracle_match) << to_string(a);
    EXPECT_TRUE(*r.oracle_match) << to_string(a);
    EXPECT_EQ(r.work, r.nnz) << to_string(a);
  }
}

TEST(RunBenchmark, SdpWorkIsQuadratic) {
  auto c = small(Algorithm::sdp);
  c.pattern = Local{5};
  EXPECT_EQ(run_benchmark(c).work, 256u * 256u);
}

TEST(RunBenchmark, MaskFileLengthMustMatch) {
  const auto path = (std::filesystem::temp_directory_path() / "gpattn_bench_test.csrm").string();
  save_csr(path, gen_pattern_mask(Local{2}, 100));
  auto c = small(Algorithm::csr);
  c.mask_file = path;
  try {
    run_benchmark(c);
    FAIL();
  } catch (const BenchError& e) {
    EXPECT_EQ(e.kind(), "config");
  }
  c.length = 100;
  EXPECT_EQ(run_benchmark(c).nnz, gen_pattern_mask(Local{2}, 100).nnz());
  std::filesystem::remove(path);
}

TEST(RunBenchmark, ConfigErrors) {
  auto c = small(Algorithm::csr);
  EXPECT_THROW(run_benchmark(c), BenchError);  // no mask source
  c = small(Algorithm::local);
  c.pattern = Global{{0}, 1};
  EXPECT_THROW(run_benchmark(c), BenchError);
  c = small(Algorithm::flash_dense);
  EXPECT_THROW(run_benchmark(c), BenchError);
  c = small(Algorithm::local);
  c.pattern = Local{2};
  c.iters = 0;
  EXPECT_THROW(run_benchmark(c), BenchError);
}

TEST(RunBenchmark, DenseCapGivesOutOfMemory) {
  auto c = small(Algorithm::sdp);
  c.pattern = Local{5};
  c.dense_memory_cap = 1024;
  try {
    run_benchmark(c);
    FAIL();
  } catch (const BenchError& e) {
    EXPECT_EQ(e.kind(), "out_of_memory");
    EXPECT_EQ(e.requested_bytes(), 256u * 256u * sizeof(float));
  }
}

TEST(Presets, ShapesAndDisjointness) {
  for (const auto name : {PresetName::longformer, PresetName::longformer_dilated, PresetName::bigbird}) {
    const auto p = make_preset(name, 1024, 3);
    std::uint64_t total = 0;
    for (const auto& leg : p.legs) total += leg.mask.nnz();
    EXPECT_EQ(total, p.combined.nnz());
    EXPECT_EQ(p.legs.size(), name == PresetName::bigbird ? 3u : 2u);
  }
}

TEST(Presets, LongformerAtFiveTwelve) {
  const auto p = make_preset(PresetName::longformer, 512, 0, PresetOptions{std::vector<Index>{0, 256, 511}, 49});
  EXPECT_EQ(p.combined.nnz(), 50906u);
}

TEST(Presets, SequentialMatchesCombined) {
  const auto p = make_preset(PresetName::bigbird, 600, 5);
  const auto in = make_inputs<double>(600, 8, 2);
  const auto seq = run_preset_legs(p, in);
  const auto one = attend_csr(in.q, in.k, in.v, p.combined);
  EXPECT_TRUE(allclose(seq.output, one.output, Tolerances{}.scaled(10)));
  EXPECT_EQ(seq.work, one.work);
}

TEST(Presets, TooShortIsConfigError) {
  EXPECT_THROW(make_preset(PresetName::longformer, 50, 0), BenchError);
  EXPECT_THROW(parse_preset("reformer"), BenchError);
}

TEST(Presets, BenchSkipsDenseOverCap) {
  const auto p = make_preset(PresetName::longformer, 256, 0, PresetOptions{std::nullopt, 10});
  const auto t = bench_preset<float>(p, 8, 0, 1, 0, 1024);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0].work, p.combined.nnz());
  EXPECT_EQ(t[1].work, p.combined.nnz());
  EXPECT_EQ(t[2].status, "skipped");
}

TEST(Sweep, ConstantWindowKeepsPattern) {
  auto base = small(Algorithm::local);
  base.pattern = Local{8};
  const auto rows = sweep(SweepKind::constant_window, {128, 256}, base);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].algorithm, Algorithm::local);
  EXPECT_EQ(rows[1].algorithm, Algorithm::sdp);
  EXPECT_EQ(rows[2].report->nnz, pattern_nnz(Local{8}, 256));
}

TEST(Sweep, ConstantSparsityResizes) {
  auto base = small(Algorithm::local);
  base.sparsity = 0.05;
  const auto rows = sweep(SweepKind::constant_sparsity, {256, 512}, base, false);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) EXPECT_NEAR(r.report->achieved_sf, 0.05, 0.01);
}

TEST(Sweep, OracleOverCapIsSkippedRow) {
  auto base = small(Algorithm::local);
  base.pattern = Local{4};
  base.dense_memory_cap = 128 * 128 * 4;
  const auto rows = sweep(SweepKind::constant_window, {128, 256}, base);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1].status, "ok");
  EXPECT_EQ(rows[3].status, "skipped");
}

TEST(Sweep, RejectsUnsortedLengths) {
  auto base = small(Algorithm::local);
  base.pattern = Local{4};
  EXPECT_THROW(sweep(SweepKind::constant_window, {256, 128}, base), BenchError);
}

}  // namespace
}  // namespace gpattn
