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

// Benchmark harness: warm-up runs, timed runs, mask-family presets and
// length sweeps. Only the attention call itself is timed; mask and input
// generation happen beforehand.

#pragma once

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <new>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gpattn/algorithm.hpp"
#include "gpattn/attention.hpp"
#include "gpattn/mask.hpp"
#include "gpattn/mask_io.hpp"
#include "gpattn/verify.hpp"

namespace gpattn {

/// Structured benchmark failure. `kind` is a stable machine-readable tag
/// ("config", "out_of_memory").
class BenchError : public std::runtime_error {
 public:
  BenchError(std::string kind, const std::string& message, std::uint64_t requested_bytes = 0)
      : std::runtime_error(message), kind_(std::move(kind)), requested_bytes_(requested_bytes) {}
  const std::string& kind() const noexcept { return kind_; }
  std::uint64_t requested_bytes() const noexcept { return requested_bytes_; }

 private:
  std::string kind_;
  std::uint64_t requested_bytes_;
};

struct BenchConfig {
  Algorithm algorithm = Algorithm::local;
  Index length = 8192;
  Index dim = 64;
  std::optional<MaskPattern> pattern;
  std::optional<std::string> mask_file;
  std::optional<double> sparsity;  // sizes the pattern (or a random mask) when set
  Index warmup = 10;
  Index iters = 15;
  std::uint64_t seed = 0;
  bool compare_oracle = false;
  std::uint64_t dense_memory_cap = 2ULL << 30;  // bytes allowed for the L x L score matrix

  void validate() const {
    if (length < 1 || dim < 1) throw BenchError("config", "length and dim must be >= 1");
    if (warmup < 0) throw BenchError("config", "warmup must be >= 0");
    if (iters < 1) throw BenchError("config", "iters must be >= 1");
    if (sparsity && !(*sparsity > 0.0 && *sparsity <= 1.0)) {
      throw BenchError("config", "sparsity must lie in (0, 1]");
    }
    if (algorithm == Algorithm::flash_dense) {
      throw BenchError("config", "flash_dense exists only in the memory model; there is no kernel for it");
    }
  }
};

struct TimingStats {
  std::vector<double> samples_s;
  double mean_s = 0;
  double median_s = 0;
  double min_s = 0;
  double max_s = 0;
};

inline TimingStats summarize(std::vector<double> samples) {
  TimingStats t;
  t.samples_s = samples;
  if (samples.empty()) return t;
  t.mean_s = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  t.median_s = n % 2 == 1 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  t.min_s = samples.front();
  t.max_s = samples.back();
  return t;
}

struct BenchReport {
  BenchConfig config;
  std::optional<MaskPattern> resolved_pattern;  // pattern actually run, if any
  TimingStats timing;
  std::uint64_t work = 0;  // dot products (kernels) or materialized cells (sdp)
  std::uint64_t nnz = 0;
  double achieved_sf = 0;
  std::uint64_t peak_rss_bytes = 0;
  std::optional<bool> oracle_match;
};

inline std::uint64_t peak_rss_bytes() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return 0;
  return static_cast<std::uint64_t>(usage.ru_maxrss) * 1024;  // Linux reports KiB
}

// ---------------------------------------------------------------------------
// Workload resolution

struct Workload {
  Algorithm algorithm;
  std::optional<MaskPattern> pattern;  // implicit kernels, or the source of a materialized mask
  std::optional<CsrMask> mask;         // csr / coo / sdp
  std::uint64_t nnz = 0;
};

namespace detail {

inline bool pattern_matches(Algorithm a, const MaskPattern& p) {
  switch (a) {
    case Algorithm::local: return std::holds_alternative<Local>(p);
    case Algorithm::dilated1d: return std::holds_alternative<Dilated1D>(p);
    case Algorithm::dilated2d: return std::holds_alternative<Dilated2D>(p);
    case Algorithm::global: return std::holds_alternative<Global>(p);
    default: return false;
  }
}

inline Algorithm native_algorithm(const MaskPattern& p) {
  static constexpr Algorithm kNative[] = {Algorithm::local, Algorithm::dilated1d, Algorithm::dilated2d,
                                          Algorithm::global, Algorithm::csr};
  return kNative[p.index()];
}

// Implicit pattern for `a`, resized to hit `sparsity` when given.
inline MaskPattern implicit_pattern(Algorithm a, const std::optional<MaskPattern>& given,
                                    std::optional<double> sparsity, Index length) {
  if (given && !pattern_matches(a, *given)) {
    throw BenchError("config", to_string(a) + " cannot run a " + pattern_name(*given) + " pattern");
  }
  if (!sparsity) {
    if (!given) throw BenchError("config", to_string(a) + " needs pattern parameters or a target sparsity");
    return *given;
  }
  switch (a) {
    case Algorithm::local:
      return Local{window_for_sparsity(length, *sparsity)};
    case Algorithm::dilated1d: {
      const Index r = given ? std::get<Dilated1D>(*given).dilation : 1;
      return Dilated1D{dilated_window_for_sparsity(length, *sparsity, r), r};
    }
    case Algorithm::dilated2d: {
      const Index r = given ? std::get<Dilated2D>(*given).dilation : 1;
      return Dilated2D{block_for_sparsity(length, *sparsity, r), r};
    }
    default:
      throw BenchError("config", "global takes explicit global indices, not a target sparsity");
  }
}

}  // namespace detail

inline Workload resolve_workload(const BenchConfig& cfg) {
  cfg.validate();
  Workload w{cfg.algorithm, std::nullopt, std::nullopt, 0};
  try {
    if (!is_explicit_mask(cfg.algorithm) && cfg.algorithm != Algorithm::sdp) {
      w.pattern = detail::implicit_pattern(cfg.algorithm, cfg.pattern, cfg.sparsity, cfg.length);
      w.nnz = pattern_nnz(*w.pattern, cfg.length);
      return w;
    }
    if (cfg.mask_file) {
      w.mask = load_mask_file(*cfg.mask_file);
      if (w.mask->length != cfg.length) {
        throw BenchError("config", "mask file length " + std::to_string(w.mask->length) +
                                       " does not match --length " + std::to_string(cfg.length));
      }
    } else if (cfg.pattern) {
      MaskPattern p = *cfg.pattern;
      if (cfg.sparsity && is_implicit(p)) {
        p = detail::implicit_pattern(detail::native_algorithm(p), p, cfg.sparsity, cfg.length);
      } else if (cfg.sparsity) {
        p = Random{*cfg.sparsity, std::get<Random>(p).seed};
      }
      w.pattern = p;
      w.mask = gen_pattern_mask(p, cfg.length);
    } else if (cfg.sparsity) {
      w.pattern = Random{*cfg.sparsity, cfg.seed};
      w.mask = gen_pattern_mask(*w.pattern, cfg.length);
    } else {
      throw BenchError("config", to_string(cfg.algorithm) + " needs --mask-file, a pattern or --sparsity");
    }
  } catch (const MaskError& e) {
    throw BenchError("config", e.what());
  }
  w.nnz = w.mask->nnz();
  return w;
}

/// Rough working-set size of one benchmark call, in bytes.
template <class T = float>
std::uint64_t estimated_footprint_bytes(const BenchConfig& cfg, std::uint64_t nnz) {
  const auto l = static_cast<std::uint64_t>(cfg.length);
  const auto d = static_cast<std::uint64_t>(cfg.dim);
  std::uint64_t bytes = 4 * l * d * sizeof(T) + 2 * l * sizeof(T);
  if (cfg.algorithm == Algorithm::sdp) bytes += l * l * sizeof(T);
  if (cfg.algorithm == Algorithm::csr) bytes += (l + 1 + nnz) * sizeof(Index);
  if (cfg.algorithm == Algorithm::coo) bytes += 2 * nnz * sizeof(Index);
  return bytes;
}

namespace detail {

template <class Fn>
TimingStats time_runs(Index warmup, Index iters, Fn&& fn) {
  for (Index n = 0; n < warmup; ++n) fn();
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(iters));
  for (Index n = 0; n < iters; ++n) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double>(stop - start).count());
  }
  return summarize(std::move(samples));
}

inline void check_dense_cap(const BenchConfig& cfg, std::size_t element_bytes) {
  const auto l = static_cast<std::uint64_t>(cfg.length);
  const std::uint64_t need = l * l * element_bytes;
  if (need > cfg.dense_memory_cap) {
    throw BenchError("out_of_memory",
                     "dense oracle needs " + std::to_string(need) + " bytes for its score matrix, cap is " +
                         std::to_string(cfg.dense_memory_cap),
                     need);
  }
}

}  // namespace detail

/// Runs cfg.warmup untimed and cfg.iters timed calls of the selected kernel
/// on fixed seeded inputs.
template <class T = float>
BenchReport run_benchmark(const BenchConfig& cfg) {
  const Workload w = resolve_workload(cfg);
  BenchReport report;
  report.config = cfg;
  report.resolved_pattern = w.pattern;
  report.nnz = w.nnz;
  report.achieved_sf = static_cast<double>(w.nnz) / (static_cast<double>(cfg.length) * static_cast<double>(cfg.length));

  try {
    if (cfg.algorithm == Algorithm::sdp) detail::check_dense_cap(cfg, sizeof(T));
    const auto in = make_inputs<T>(cfg.length, cfg.dim, cfg.seed);
    std::optional<CooMask> coo;
    if (cfg.algorithm == Algorithm::coo) coo = csr_to_coo(*w.mask);

    std::uint64_t work = 0;
    std::optional<DenseMatrix<T>> last;
    const auto call = [&] {
      switch (cfg.algorithm) {
        case Algorithm::sdp:
          last = sdp_masked_oracle(in.q, in.k, in.v, *w.mask);
          work = static_cast<std::uint64_t>(cfg.length) * static_cast<std::uint64_t>(cfg.length);
          break;
        case Algorithm::csr: {
          auto r = attend_csr(in.q, in.k, in.v, *w.mask);
          work = r.work;
          last = std::move(r.output);
          break;
        }
        case Algorithm::coo: {
          auto r = attend_coo(in.q, in.k, in.v, *coo);
          work = r.work;
          last = std::move(r.output);
          break;
        }
        default: {
          auto r = attend(in.q, in.k, in.v, MaskSpec{*w.pattern});
          work = r.work;
          last = std::move(r.output);
        }
      }
    };
    report.timing = detail::time_runs(cfg.warmup, cfg.iters, call);
    report.work = work;

    if (cfg.compare_oracle && cfg.algorithm != Algorithm::sdp) {
      detail::check_dense_cap(cfg, sizeof(double));
      const CsrMask reference = w.mask ? *w.mask : gen_pattern_mask(*w.pattern, cfg.length);
      const auto oracle = sdp_masked_oracle(in.q.template cast<double>(), in.k.template cast<double>(),
                                            in.v.template cast<double>(), reference);
      report.oracle_match = compare_outputs(*last, oracle, Tolerances{}).passed;
    }
  } catch (const std::bad_alloc&) {
    const auto need = estimated_footprint_bytes<T>(cfg, w.nnz);
    throw BenchError("out_of_memory", "allocation failed; estimated footprint " + std::to_string(need) + " bytes",
                     need);
  }
  report.peak_rss_bytes = peak_rss_bytes();
  return report;
}

// ---------------------------------------------------------------------------
// Presets

enum class PresetName { longformer, longformer_dilated, bigbird };

inline PresetName parse_preset(const std::string& name) {
  if (name == "longformer") return PresetName::longformer;
  if (name == "longformer_dilated") return PresetName::longformer_dilated;
  if (name == "bigbird") return PresetName::bigbird;
  throw BenchError("config", "unknown preset '" + name + "'");
}

inline std::string to_string(PresetName n) {
  switch (n) {
    case PresetName::longformer: return "longformer";
    case PresetName::longformer_dilated: return "longformer_dilated";
    default: return "bigbird";
  }
}

struct PresetOptions {
  std::optional<std::vector<Index>> global_indices;  // default {0, L/2, L-1}
  Index half_window = 50;                            // attended tokens on each side
  Index dilation = 2;                                // longformer_dilated only
  double random_sparsity = 0.001;                    // bigbird only
};

struct PresetLeg {
  Algorithm algorithm;
  MaskPattern pattern;
  CsrMask mask;
};

struct Preset {
  PresetName name;
  Index length = 0;
  std::vector<PresetLeg> legs;  // pairwise disjoint
  CsrMask combined;             // union of the legs
};

/// Local window (strict |i - j| < w) covering `half_window` attended tokens
/// on each side at the given stride.
inline Index preset_window(Index half_window, Index dilation) { return half_window * dilation + 1; }

inline Preset make_preset(PresetName name, Index length, std::uint64_t seed, const PresetOptions& opt = {}) {
  const Index r = name == PresetName::longformer_dilated ? opt.dilation : 1;
  if (opt.half_window < 1 || r < 1) throw BenchError("config", "preset window and dilation must be >= 1");
  const Index w = preset_window(opt.half_window, r);
  if (length < 2 * w + 1) {
    throw BenchError("config", "preset " + to_string(name) + " needs length >= " + std::to_string(2 * w + 1));
  }
  std::vector<Index> globals = opt.global_indices.value_or(std::vector<Index>{0, length / 2, length - 1});
  std::sort(globals.begin(), globals.end());
  globals.erase(std::unique(globals.begin(), globals.end()), globals.end());

  Preset p{name, length, {}, {}};
  try {
    MaskPattern local = name == PresetName::longformer_dilated ? MaskPattern{Dilated1D{w, r}} : MaskPattern{Local{w}};
    const Algorithm local_algo = name == PresetName::longformer_dilated ? Algorithm::dilated1d : Algorithm::local;
    p.legs.push_back({local_algo, local, gen_pattern_mask(local, length)});
    const MaskPattern global = Global{globals, w};
    p.legs.push_back({Algorithm::global, global, gen_pattern_mask(global, length)});
    p.combined = mask_union_disjoint(p.legs[0].mask, p.legs[1].mask);

    if (name == PresetName::bigbird) {
      const MaskPattern random = Random{opt.random_sparsity, seed};
      auto mask = sample_random_mask(length, random_cell_count(opt.random_sparsity, length), seed, &p.combined);
      p.combined = mask_union_disjoint(p.combined, mask);
      p.legs.push_back({Algorithm::csr, random, std::move(mask)});
    }
  } catch (const MaskError& e) {
    throw BenchError("config", e.what());
  }
  return p;
}

/// Chains the preset's legs with carried softmax state: implicit legs run
/// their own kernel, the random leg runs CSR on its mask.
template <class T>
AttentionResult<T> run_preset_legs(const Preset& preset, const AttentionInputs<T>& in) {
  std::optional<AttentionResult<T>> carried;
  std::uint64_t work = 0;
  for (const auto& leg : preset.legs) {
    const MaskSpec spec = leg.algorithm == Algorithm::csr ? MaskSpec{leg.mask} : MaskSpec{leg.pattern};
    carried = attend(in.q, in.k, in.v, spec, std::move(carried));
    work += carried->work;
  }
  carried->work = work;
  return std::move(*carried);
}

struct PresetTiming {
  std::string approach;  // "sequential", "csr", "sdp"
  std::string status;    // "ok" or "skipped"
  std::string reason;
  TimingStats timing;
  std::uint64_t work = 0;
};

/// Times the three ways of running a preset: chained leg kernels, a single
/// CSR call on the union, and the dense oracle (skipped above the memory cap).
template <class T = float>
std::vector<PresetTiming> bench_preset(const Preset& preset, Index dim, Index warmup, Index iters,
                                       std::uint64_t seed, std::uint64_t dense_memory_cap = 2ULL << 30) {
  const auto in = make_inputs<T>(preset.length, dim, seed);
  std::vector<PresetTiming> out;

  PresetTiming seq{"sequential", "ok", "", {}, 0};
  seq.timing = detail::time_runs(warmup, iters, [&] { seq.work = run_preset_legs(preset, in).work; });
  out.push_back(std::move(seq));

  PresetTiming csr{"csr", "ok", "", {}, 0};
  csr.timing = detail::time_runs(warmup, iters, [&] { csr.work = attend_csr(in.q, in.k, in.v, preset.combined).work; });
  out.push_back(std::move(csr));

  PresetTiming sdp{"sdp", "ok", "", {}, 0};
  const auto l = static_cast<std::uint64_t>(preset.length);
  if (l * l * sizeof(T) > dense_memory_cap) {
    sdp.status = "skipped";
    sdp.reason = "score matrix needs " + std::to_string(l * l * sizeof(T)) + " bytes, over the cap";
  } else {
    sdp.timing = detail::time_runs(warmup, iters, [&] { (void)sdp_masked_oracle(in.q, in.k, in.v, preset.combined); });
    sdp.work = l * l;
  }
  out.push_back(std::move(sdp));
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepKind { constant_window, constant_sparsity };

inline SweepKind parse_sweep_kind(const std::string& name) {
  if (name == "constant_window") return SweepKind::constant_window;
  if (name == "constant_sparsity") return SweepKind::constant_sparsity;
  throw BenchError("config", "unknown sweep kind '" + name + "'");
}

inline std::string to_string(SweepKind k) {
  return k == SweepKind::constant_window ? "constant_window" : "constant_sparsity";
}

struct SweepRow {
  SweepKind kind;
  Index length;
  Algorithm algorithm;
  std::string status;  // "ok" or "skipped"
  std::string reason;
  std::optional<BenchReport> report;
};

/// For each length, benchmarks the base graph kernel and the dense oracle on
/// the same mask. constant_window keeps the base pattern's parameters;
/// constant_sparsity re-sizes the pattern to hold base.sparsity.
template <class T = float>
std::vector<SweepRow> sweep(SweepKind kind, const std::vector<Index>& lengths, const BenchConfig& base,
                            bool include_oracle = true) {
  if (lengths.empty() || !std::is_sorted(lengths.begin(), lengths.end())) {
    throw BenchError("config", "sweep lengths must be non-empty and ascending");
  }
  if (base.algorithm == Algorithm::sdp) throw BenchError("config", "sweep needs a graph kernel as its base");
  if (kind == SweepKind::constant_window && !base.pattern && !base.mask_file) {
    throw BenchError("config", "constant_window sweep needs fixed pattern parameters");
  }
  if (kind == SweepKind::constant_sparsity && !base.sparsity) {
    throw BenchError("config", "constant_sparsity sweep needs a target sparsity");
  }

  std::vector<SweepRow> rows;
  for (const Index length : lengths) {
    BenchConfig cfg = base;
    cfg.length = length;
    if (kind == SweepKind::constant_window) cfg.sparsity.reset();
    auto kernel = run_benchmark<T>(cfg);
    const auto resolved = kernel.resolved_pattern;
    rows.push_back({kind, length, base.algorithm, "ok", "", std::move(kernel)});

    if (!include_oracle) continue;
    BenchConfig dense = cfg;
    dense.algorithm = Algorithm::sdp;
    dense.compare_oracle = false;
    dense.sparsity.reset();
    if (resolved) dense.pattern = resolved;
    try {
      rows.push_back({kind, length, Algorithm::sdp, "ok", "", run_benchmark<T>(dense)});
    } catch (const BenchError& e) {
      if (e.kind() != "out_of_memory") throw;
      rows.push_back({kind, length, Algorithm::sdp, "skipped", e.what(), std::nullopt});
    }
  }
  return rows;
}

}  // namespace gpattn
