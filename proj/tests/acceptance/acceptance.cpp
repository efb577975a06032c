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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Timing criteria use reduced warm-up and iteration counts;
// see README for the exact settings.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gpattn/capacity_reference.hpp"
#include "gpattn/gpattn.hpp"

namespace {

using namespace gpattn;

int g_failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// 1 and 2: every graph kernel against the dense oracle, and its work count
// and touched coordinates against the mask.
void oracle_and_work() {
  constexpr int kCases = 24;
  int oracle_ok = 0, oracle_total = 0, work_ok = 0, work_total = 0;
  double worst_rel_double = 0, worst_rel_float = 0;
  std::string first_oracle_fail, first_work_fail;
  for (std::size_t a = 0; a < kGraphKernels.size(); ++a) {
    const Algorithm algo = kGraphKernels[a];
    const auto cases = random_cases(algo, kCases, 2026 + a, 256, 32);
    for (std::size_t n = 0; n < cases.size(); ++n) {
      const auto rd = verify_kernel<double>(cases[n], algo);
      const auto rf = verify_kernel<float>(cases[n], algo);
      oracle_total += 2;
      oracle_ok += rd.passed + rf.passed;
      worst_rel_double = std::max(worst_rel_double, rd.max_rel_deviation);
      worst_rel_float = std::max(worst_rel_float, rf.max_rel_deviation);
      if ((!rd.passed || !rf.passed) && first_oracle_fail.empty()) {
        first_oracle_fail = to_string(algo) + "#" + std::to_string(n) + ": " + (rd.passed ? rf.detail : rd.detail);
      }
      for (const auto& r : {verify_work<double>(cases[n], algo), verify_work<float>(cases[n], algo)}) {
        ++work_total;
        work_ok += r.passed;
        if (!r.passed && first_work_fail.empty()) first_work_fail = to_string(algo) + ": " + r.detail;
      }
    }
  }
  std::ostringstream d1;
  d1 << oracle_ok << "/" << oracle_total << " kernel runs (6 kernels x " << kCases
     << " cases x {fp64, fp32}) match at rtol 1e-5 atol 1e-8; max rel dev fp64 " << fmt("%.2e", worst_rel_double)
     << ", fp32 " << fmt("%.2e", worst_rel_float);
  if (!first_oracle_fail.empty()) d1 << "; first failure " << first_oracle_fail;
  report(1, "oracle equivalence", oracle_ok == oracle_total, d1.str());

  std::ostringstream d2;
  d2 << work_ok << "/" << work_total << " runs with work == nnz and probe-recorded cells == mask cells";
  if (!first_work_fail.empty()) d2 << "; first failure " << first_work_fail;
  report(2, "work optimality", work_ok == work_total, d2.str());
}

// 3: online recurrence against the two-pass max-subtracted softmax.
void online_softmax() {
  SplitMix64 rng(31337);
  constexpr int kRows = 10000;
  constexpr int kDim = 4;
  double worst = 0;
  for (int row = 0; row < kRows; ++row) {
    const int n = 1 + static_cast<int>(rng.below(64));
    std::vector<double> w(n);
    std::vector<std::array<double, kDim>> v(n);
    for (int k = 0; k < n; ++k) {
      w[k] = 40.0 * rng.uniform() - 20.0;
      for (auto& x : v[k]) x = rng.uniform();
    }
    std::array<double, kDim> online{};
    RowStats<double> s{-std::numeric_limits<double>::infinity(), 0.0};
    for (int k = 0; k < n; ++k) s = online_update<double>(s, online, w[k], v[k]);

    const double m = *std::max_element(w.begin(), w.end());
    double z = 0;
    for (const double x : w) z += std::exp(x - m);
    for (int c = 0; c < kDim; ++c) {
      double acc = 0;
      for (int k = 0; k < n; ++k) acc += std::exp(w[k] - m) / z * v[k][c];
      worst = std::max(worst, std::abs(acc - online[c]));
    }
  }
  report(3, "online softmax fidelity", worst <= 1e-12,
         std::to_string(kRows) + " rows of length 1-64, max |online - two-pass| = " + fmt("%.2e", worst));
}

// 4: local + global as two carried-state calls against one CSR call.
void composition() {
  bool ok = true;
  std::ostringstream d;
  for (const Index length : {Index{512}, Index{4096}}) {
    const std::vector<Index> globals{0, length / 2, length - 1};
    const std::vector<MaskSpec> legs{MaskPattern{Local{51}}, MaskPattern{Global{globals, 51}}};
    for (const bool fp64 : {true, false}) {
      const auto r = fp64 ? verify_composition<double>(legs, length, 32, 5) : verify_composition<float>(legs, length, 32, 5);
      ok = ok && r.passed && r.work == r.nnz;
      d << "L=" << length << (fp64 ? " fp64" : " fp32") << (r.passed ? " ok" : " FAIL") << " (max rel "
        << fmt("%.1e", r.max_rel_deviation) << ", nnz " << r.nnz << "); ";
    }
  }
  report(4, "composition", ok, d.str() + "tolerance rtol 1e-4 atol 1e-7");
}

// 5: memory model against the published A100 table.
void memory_model() {
  int gated = 0, gated_ok = 0, deviations = 0;
  double worst_deviation = 0;
  std::string misses;
  for (const auto& c : reference_capacity_cells()) {
    const auto v = model_value(c);
    if (c.expected == CellMatch::known_deviation) {
      ++deviations;
      worst_deviation = std::max(worst_deviation, std::abs(double(v) - double(c.published)) / double(c.published));
      continue;
    }
    ++gated;
    if (cell_matches(c, v)) {
      ++gated_ok;
    } else {
      misses += " " + to_string(c.algorithm) + "/eb" + std::to_string(c.element_bytes) + "/d" + std::to_string(c.d) +
                "=" + std::to_string(v) + " vs " + std::to_string(c.published);
    }
  }
  std::ostringstream d;
  d << gated_ok << "/" << gated
    << " cells in tolerance (implicit +/-1 token, sdp 0.1%, csr/coo 1%); global cells are a documented deviation "
       "(worst "
    << fmt("%.2f", 100 * worst_deviation) << "% over " << deviations << " cells)";
  if (!misses.empty()) d << "; misses:" << misses;
  report(5, "memory model", gated_ok == gated, d.str());
}

double round_sig2(double x) {
  const double e = std::floor(std::log10(x));
  const double scale = std::pow(10.0, 1 - e);
  return std::round(x * scale) / scale;
}

// 6: sparsity schedule to two significant figures.
void sparsity_schedule() {
  struct Point {
    Index length;
    double expected;
  };
  // The published sequence uses decimal multiples (16k = 16,000, 32k = 32,000).
  // At binary lengths the same formula gives 0.17 at 16,384 and 0.083 at 32,768.
  const Point points[] = {{16000, 0.17},       {32000, 0.085},        {1000000, 0.0027}, {160000000, 1.7e-5},
                          {1000000000, 2.7e-6}, {16384, 0.17},         {32768, 0.083}};
  bool ok = true;
  std::ostringstream d;
  for (const auto& p : points) {
    const double got = round_sig2(longnet_sparsity(p.length));
    const bool hit = std::abs(got - p.expected) <= 1e-9 * p.expected;
    ok = ok && hit;
    d << p.length << "->" << got << (hit ? "" : " (expected " + std::to_string(p.expected) + ")") << "; ";
  }
  report(6, "sparsity schedule", ok, d.str());
}

// MemAvailable from /proc/meminfo; falls back to the 4.5 GiB default cap when unreadable.
std::uint64_t available_memory_bytes() {
  std::ifstream in("/proc/meminfo");
  std::string key;
  std::uint64_t kib = 0;
  std::string unit;
  while (in >> key >> kib >> unit) {
    if (key == "MemAvailable:") return kib * 1024;
  }
  return (9ULL << 29) / 8 * 10;
}

double median_time(const BenchConfig& cfg) { return run_benchmark<float>(cfg).timing.median_s; }

// 7: local kernel time is linear in L at fixed per-row nnz; dense oracle time
// grows ~4x per doubling.
void scaling() {
  const std::array<Index, 4> lengths{8192, 16384, 32768, 65536};
  // 4.5 GiB fits the fp32 score matrix at L = 32768 but not 65536; smaller
  // hosts get a proportionally smaller cap instead of an OOM kill.
  const std::uint64_t dense_cap = std::min<std::uint64_t>(9ULL << 29, available_memory_bytes() / 10 * 8);
  BenchConfig base;
  base.dim = 64;
  base.warmup = 1;
  base.iters = 5;
  base.seed = 1;
  base.pattern = Local{64};

  // Ten interleaved rounds of 3 timed runs per length, so drift on a shared
  // host lands on every length alike; the fit uses the fastest of the 30.
  // The starting length rotates each round to avoid locking onto periodic noise.
  std::vector<double> t_local(lengths.size(), std::numeric_limits<double>::infinity());
  for (std::size_t round = 0; round < 10; ++round) {
    for (std::size_t step = 0; step < lengths.size(); ++step) {
      const std::size_t n = (round + step) % lengths.size();
      BenchConfig c = base;
      c.algorithm = Algorithm::local;
      c.length = lengths[n];
      c.warmup = 2;
      c.iters = 3;
      t_local[n] = std::min(t_local[n], run_benchmark<float>(c).timing.min_s);
    }
  }
  // Least-squares fit t = a + b L + c L^2 via normal equations on L in units of 65536.
  double s[5] = {0, 0, 0, 0, 0}, r[3] = {0, 0, 0};
  for (std::size_t n = 0; n < lengths.size(); ++n) {
    const double x = double(lengths[n]) / 65536.0;
    double p = 1;
    for (int k = 0; k < 5; ++k, p *= x) s[k] += p;
    r[0] += t_local[n];
    r[1] += t_local[n] * x;
    r[2] += t_local[n] * x * x;
  }
  double m[3][4] = {{s[0], s[1], s[2], r[0]}, {s[1], s[2], s[3], r[1]}, {s[2], s[3], s[4], r[2]}};
  for (int col = 0; col < 3; ++col) {
    for (int row = col + 1; row < 3; ++row) {
      const double f = m[row][col] / m[col][col];
      for (int k = col; k < 4; ++k) m[row][k] -= f * m[col][k];
    }
  }
  double coef[3];
  for (int row = 2; row >= 0; --row) {
    double acc = m[row][3];
    for (int k = row + 1; k < 3; ++k) acc -= m[row][k] * coef[k];
    coef[row] = acc / m[row][row];
  }
  const double quad_share = std::abs(coef[2]) / t_local.back();  // x = 1 at the largest L
  const bool linear_ok = quad_share < 0.10;

  // Two interleaved rounds per dense length; the faster timed run counts.
  // One 4 GiB score allocation near the memory limit can stall a single run.
  std::vector<double> t_dense;
  std::vector<Index> dense_lengths;
  std::string skipped;
  for (int round = 0; round < 2; ++round) {
    std::size_t slot = 0;
    for (const Index l : lengths) {
      BenchConfig c = base;
      c.algorithm = Algorithm::sdp;
      c.length = l;
      c.warmup = 1;
      c.iters = 1;
      c.dense_memory_cap = dense_cap;
      if (round > 0 && (slot >= dense_lengths.size() || dense_lengths[slot] != l)) continue;
      try {
        const double t = run_benchmark<float>(c).timing.min_s;
        if (round == 0) {
          t_dense.push_back(t);
          dense_lengths.push_back(l);
        } else {
          t_dense[slot] = std::min(t_dense[slot], t);
        }
        ++slot;
      } catch (const BenchError& e) {
        if (e.kind() != "out_of_memory") throw;
        if (round == 0) skipped += " L=" + std::to_string(l);
      }
    }
  }
  bool dense_ok = t_dense.size() >= 2;
  std::ostringstream d;
  d << "local w=64 d=64 min s over 30 runs:";
  for (const double t : t_local) d << " " << fmt("%.4f", t);
  d << "; quadratic share at L=65536 " << fmt("%.3f", quad_share) << (linear_ok ? " < 0.10" : " >= 0.10")
    << "; dense ratios:";
  for (std::size_t n = 1; n < t_dense.size(); ++n) {
    const double ratio = t_dense[n] / t_dense[n - 1];
    dense_ok = dense_ok && ratio >= 3.0 && ratio <= 5.0;
    d << " " << dense_lengths[n - 1] << "->" << dense_lengths[n] << "=" << fmt("%.2f", ratio);
  }
  if (!skipped.empty()) d << "; dense skipped over the " << dense_cap << "-byte score cap:" << skipped;
  report(7, "scaling", linear_ok && dense_ok, d.str());
}

// 8: CSR time relative to the dense oracle across a decade sparsity sweep.
void crossover() {
  const std::array<double, 5> sparsities{1.0, 1e-1, 1e-2, 1e-3, 1e-4};
  BenchConfig base;
  base.length = 8192;
  base.dim = 64;
  base.warmup = 1;
  base.iters = 3;
  base.seed = 2;

  std::vector<double> ratios;
  std::ostringstream d;
  d << "L=8192 d=64 median t_csr/t_dense:";
  for (const double sf : sparsities) {
    BenchConfig csr = base;
    csr.algorithm = Algorithm::csr;
    csr.sparsity = sf;
    BenchConfig dense = csr;
    dense.algorithm = Algorithm::sdp;
    const double ratio = median_time(csr) / median_time(dense);
    ratios.push_back(ratio);
    d << " S_f=" << sf << ":" << fmt("%.4f", ratio);
  }
  bool monotone = true;
  for (std::size_t n = 1; n < ratios.size(); ++n) monotone = monotone && ratios[n] < ratios[n - 1];
  const bool crosses = *std::min_element(ratios.begin(), ratios.end()) < 1.0;
  d << (monotone ? "; ratio falls at every step as S_f decreases" : "; ratio NOT monotone")
    << (crosses ? "; csr beats dense below some S_f" : "; csr never beats dense");
  report(8, "crossover", monotone && crosses, d.str());
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  oracle_and_work();
  online_softmax();
  composition();
  memory_model();
  sparsity_schedule();
  scaling();
  crossover();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s: %d criterion(s) failed, %.1f s\n", g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures, secs);
  return g_failures == 0 ? 0 : 1;
}
