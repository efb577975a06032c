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

// gpattn command-line driver: bench, sweep, preset, maxlen, verify, maskgen.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gpattn/capacity_reference.hpp"
#include "gpattn/gpattn.hpp"
#include "gpattn/report.hpp"

namespace {

using namespace gpattn;

struct PatternFlags {
  std::optional<std::string> kind;  // local, dilated1d, dilated2d, global, random
  std::optional<Index> window;
  std::optional<Index> dilation;
  std::optional<Index> block;
  std::vector<Index> global_indices;
};

struct BenchFlags {
  std::string algo = "local";
  Index length = 8192;
  Index dim = 64;
  PatternFlags pattern;
  std::optional<std::string> mask_file;
  std::optional<double> sparsity;
  Index warmup = 10;
  Index iters = 15;
  std::uint64_t seed = 0;
  std::string format = "json";
  std::optional<std::string> out;
  bool compare_oracle = false;
  std::string precision = "fp32";
  std::uint64_t dense_cap = 2ULL << 30;
};

class CliError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void add_pattern_flags(CLI::App* app, PatternFlags& p) {
  app->add_option("--pattern", p.kind, "Mask pattern for csr/coo/sdp: local, dilated1d, dilated2d, global, random")
      ->check(CLI::IsMember({"local", "dilated1d", "dilated2d", "global", "random"}));
  app->add_option("--window", p.window, "Window w (strict |i-j| < w)");
  app->add_option("--dilation", p.dilation, "Dilation r");
  app->add_option("--block", p.block, "2D dilation block size b (must divide L)");
  app->add_option("--global-indices", p.global_indices, "Global token indices")->delimiter(',');
}

void add_bench_flags(CLI::App* app, BenchFlags& f) {
  app->add_option("--algo", f.algo, "Algorithm: sdp, csr, coo, local, dilated1d, dilated2d, global");
  app->add_option("--length", f.length, "Sequence length L");
  app->add_option("--dim", f.dim, "Head dimension d");
  add_pattern_flags(app, f.pattern);
  app->add_option("--mask-file", f.mask_file, "Explicit mask (.csv dense grid or binary CSR)");
  app->add_option("--sparsity", f.sparsity, "Target sparsity factor in (0, 1]");
  app->add_option("--warmup", f.warmup, "Untimed warm-up runs");
  app->add_option("--iters", f.iters, "Timed runs");
  app->add_option("--seed", f.seed, "Input and mask seed");
  app->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--out", f.out, "Write the report here instead of stdout");
  app->add_flag("--compare-oracle", f.compare_oracle, "Also check the output against the dense oracle");
  app->add_option("--precision", f.precision, "Element type")->check(CLI::IsMember({"fp32", "fp64"}));
  app->add_option("--dense-cap-bytes", f.dense_cap, "Largest L*L score matrix the dense path may allocate");
}

Index need(const std::optional<Index>& v, const char* flag, const std::string& kind) {
  if (!v) throw CliError(kind + " pattern needs " + flag);
  return *v;
}

MaskPattern build_pattern(const std::string& kind, const PatternFlags& p, std::optional<double> sparsity,
                          std::uint64_t seed) {
  if (kind == "local") return Local{need(p.window, "--window", kind)};
  if (kind == "dilated1d") return Dilated1D{need(p.window, "--window", kind), p.dilation.value_or(1)};
  if (kind == "dilated2d") return Dilated2D{need(p.block, "--block", kind), p.dilation.value_or(1)};
  if (kind == "global") {
    if (p.global_indices.empty()) throw CliError("global pattern needs --global-indices");
    std::vector<Index> idx = p.global_indices;
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return Global{idx, p.window.value_or(1)};
  }
  if (!sparsity) throw CliError("random pattern needs --sparsity");
  return Random{*sparsity, seed};
}

bool has_shape_flags(const PatternFlags& p) {
  return p.window || p.block || !p.global_indices.empty();
}

BenchConfig to_config(const BenchFlags& f) {
  BenchConfig c;
  try {
    c.algorithm = parse_algorithm(f.algo);
  } catch (const std::invalid_argument& e) {
    throw BenchError("config", e.what());
  }
  c.length = f.length;
  c.dim = f.dim;
  c.mask_file = f.mask_file;
  c.sparsity = f.sparsity;
  c.warmup = f.warmup;
  c.iters = f.iters;
  c.seed = f.seed;
  c.compare_oracle = f.compare_oracle;
  c.dense_memory_cap = f.dense_cap;

  std::optional<std::string> kind = f.pattern.kind;
  if (!kind && !is_explicit_mask(c.algorithm) && c.algorithm != Algorithm::sdp) {
    if (has_shape_flags(f.pattern) || c.algorithm == Algorithm::global) kind = to_string(c.algorithm);
  }
  if (kind) c.pattern = build_pattern(*kind, f.pattern, c.sparsity, c.seed);
  return c;
}

std::ostream& open_out(const std::optional<std::string>& path, std::ofstream& file) {
  if (!path) return std::cout;
  file.open(*path);
  if (!file) throw CliError("cannot open " + *path + " for writing");
  return file;
}

template <class T>
BenchReport bench_with(const BenchConfig& c) {
  return run_benchmark<T>(c);
}

int cmd_bench(const BenchFlags& f) {
  const BenchConfig c = to_config(f);
  const BenchReport r = f.precision == "fp64" ? bench_with<double>(c) : bench_with<float>(c);
  std::ofstream file;
  auto& os = open_out(f.out, file);
  if (f.format == "csv") {
    write_report_csv(os, {r});
  } else {
    os << report_to_json(r).dump(2) << '\n';
  }
  return 0;
}

int cmd_sweep(const BenchFlags& f, const std::string& kind, const std::vector<Index>& lengths, bool no_oracle) {
  const BenchConfig c = to_config(f);
  const SweepKind k = parse_sweep_kind(kind);
  const auto rows = f.precision == "fp64" ? sweep<double>(k, lengths, c, !no_oracle) : sweep<float>(k, lengths, c, !no_oracle);
  std::ofstream file;
  auto& os = open_out(f.out, file);
  if (f.format == "csv") {
    write_sweep_csv(os, rows);
    return 0;
  }
  json out = json::array();
  for (const auto& row : rows) {
    json j = {{"kind", to_string(row.kind)},
              {"length", row.length},
              {"algorithm", to_string(row.algorithm)},
              {"status", row.status}};
    if (!row.reason.empty()) j["reason"] = row.reason;
    if (row.report) j["report"] = report_to_json(*row.report);
    out.push_back(std::move(j));
  }
  os << out.dump(2) << '\n';
  return 0;
}

struct PresetFlags {
  std::string name = "longformer";
  Index length = 4096;
  std::uint64_t seed = 0;
  Index dim = 64;
  bool bench = false;
  Index warmup = 1;
  Index iters = 3;
  std::optional<std::string> out_mask;
  std::uint64_t dense_cap = 2ULL << 30;
};

int cmd_preset(const PresetFlags& f) {
  const Preset p = make_preset(parse_preset(f.name), f.length, f.seed);
  json j = {{"name", to_string(p.name)},
            {"length", p.length},
            {"nnz", p.combined.nnz()},
            {"sparsity", sparsity_factor(p.combined)}};
  json legs = json::array();
  for (const auto& leg : p.legs) {
    legs.push_back({{"algorithm", to_string(leg.algorithm)},
                    {"pattern", pattern_to_json(leg.pattern)},
                    {"nnz", leg.mask.nnz()}});
  }
  j["legs"] = legs;
  if (f.bench) {
    json timings = json::array();
    for (const auto& t : bench_preset<float>(p, f.dim, f.warmup, f.iters, f.seed, f.dense_cap)) {
      json tj = {{"approach", t.approach}, {"status", t.status}, {"work", t.work}};
      if (t.status == "ok") {
        tj["samples_s"] = t.timing.samples_s;
        tj["mean_s"] = t.timing.mean_s;
        tj["median_s"] = t.timing.median_s;
        tj["min_s"] = t.timing.min_s;
      } else {
        tj["reason"] = t.reason;
      }
      timings.push_back(std::move(tj));
    }
    j["timings"] = timings;
  }
  if (f.out_mask) save_csr(*f.out_mask, p.combined);
  std::cout << j.dump(2) << '\n';
  return 0;
}

struct MaxlenFlags {
  std::vector<std::string> algos;
  std::vector<int> dtype_bytes{4, 2};
  std::optional<int> index_bytes;
  std::vector<std::int64_t> dims{64};
  std::int64_t heads = 1;
  std::vector<double> sparsities{1e-4};
  double budget_gib = 80.0;
  bool reference = false;
  std::optional<std::string> out;
};

int cmd_maxlen(const MaxlenFlags& f) {
  std::ofstream file;
  auto& os = open_out(f.out, file);
  const HardwareBudget budget{static_cast<std::uint64_t>(f.budget_gib * static_cast<double>(1ULL << 30))};
  if (f.reference) {
    os << "algorithm,dtype_bytes,index_bytes,d,heads,s_f,max_L,published,match\n";
    for (const auto& c : reference_capacity_cells()) {
      const auto v = model_value(c);
      os << to_string(c.algorithm) << ',' << c.element_bytes << ',' << c.index_bytes << ',' << c.d << ','
         << c.heads << ',' << detail::fmt_double(kReferenceSparsity) << ',' << v << ',' << c.published << ','
         << (c.expected == CellMatch::known_deviation ? "deviation" : (cell_matches(c, v) ? "yes" : "no")) << '\n';
    }
    return 0;
  }
  std::vector<Algorithm> algos;
  if (f.algos.empty()) {
    for (const auto& name : kAlgorithmNames) algos.push_back(parse_algorithm(std::string(name)));
  } else {
    for (const auto& name : f.algos) algos.push_back(parse_algorithm(name));
  }
  std::vector<CapacityRow> rows;
  for (const int eb : f.dtype_bytes) {
    for (const auto d : f.dims) {
      for (const auto a : algos) {
        const int ib = f.index_bytes.value_or(a == Algorithm::csr && eb == 2 ? 2 : 4);
        for (const auto& pt : capacity_curve(a, eb, ib, d, f.heads, f.sparsities, budget)) {
          rows.push_back({a, eb, ib, d, f.heads, pt.sparsity, pt.max_length});
        }
      }
    }
  }
  write_capacity_csv(os, rows);
  return 0;
}

struct VerifyFlags {
  std::string suite = "all";
  std::uint64_t seed = 0;
  int cases = 20;
  Index length = 256;
  Index dim = 32;
  bool json_out = false;
};

int cmd_verify(const VerifyFlags& f) {
  json results = json::array();
  bool all_ok = true;
  const auto record = [&](const std::string& suite, const std::string& name, const VerifyReport& r) {
    all_ok = all_ok && r.passed;
    results.push_back({{"suite", suite},
                       {"case", name},
                       {"passed", r.passed},
                       {"max_abs_deviation", r.max_abs_deviation},
                       {"max_rel_deviation", r.max_rel_deviation},
                       {"work", r.work},
                       {"nnz", r.nnz},
                       {"detail", r.detail}});
    if (!f.json_out) {
      std::cout << (r.passed ? "PASS " : "FAIL ") << suite << ' ' << name;
      if (!r.passed) std::cout << ": " << r.detail;
      std::cout << '\n';
    }
  };
  const bool oracle = f.suite == "oracle" || f.suite == "all";
  const bool work = f.suite == "work" || f.suite == "all";
  const bool compose = f.suite == "composition" || f.suite == "all";

  for (std::size_t a = 0; a < kGraphKernels.size(); ++a) {
    const Algorithm algo = kGraphKernels[a];
    const auto cases = random_cases(algo, f.cases, f.seed + a, f.length, f.dim);
    for (std::size_t n = 0; n < cases.size(); ++n) {
      const std::string name = to_string(algo) + "#" + std::to_string(n);
      if (oracle) record("oracle", name, verify_kernel<double>(cases[n], algo));
      if (work) record("work", name, verify_work<double>(cases[n], algo));
    }
  }
  if (compose) {
    for (const Index len : {Index{512}, Index{4096}}) {
      const Preset p = make_preset(PresetName::bigbird, len, f.seed);
      std::vector<MaskSpec> legs;
      for (const auto& leg : p.legs) {
        legs.push_back(leg.algorithm == Algorithm::csr ? MaskSpec{leg.mask} : MaskSpec{leg.pattern});
      }
      record("composition", "bigbird@" + std::to_string(len), verify_composition<double>(legs, len, f.dim, f.seed));
    }
  }
  if (f.json_out) {
    std::cout << json{{"passed", all_ok}, {"results", results}}.dump(2) << '\n';
  }
  return all_ok ? 0 : 1;
}

struct MaskgenFlags {
  std::string kind = "local";
  Index length = 1024;
  PatternFlags pattern;
  std::optional<double> sparsity;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "binary";
};

int cmd_maskgen(const MaskgenFlags& f) {
  const MaskPattern p = build_pattern(f.kind, f.pattern, f.sparsity, f.seed);
  CsrMask m;
  try {
    m = gen_pattern_mask(p, f.length);
  } catch (const MaskError& e) {
    throw BenchError("config", e.what());
  }
  if (f.format == "csv") {
    std::ofstream os(f.out);
    if (!os) throw CliError("cannot open " + f.out + " for writing");
    write_dense_csv(os, m);
  } else {
    save_csr(f.out, m);
  }
  std::cout << json{{"length", m.length}, {"nnz", m.nnz()}, {"sparsity", sparsity_factor(m)}, {"out", f.out}}.dump()
            << '\n';
  return 0;
}

int fail(const std::string& kind, const std::string& message, std::uint64_t bytes = 0) {
  std::cerr << error_to_json(kind, message, bytes).dump() << '\n';
  return kind == "out_of_memory" ? 3 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gpattn: graph-kernel sparse attention benchmarks and tools"};
  app.require_subcommand(1);

  BenchFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "Time one kernel on one workload");
  add_bench_flags(bench, bench_flags);

  BenchFlags sweep_flags;
  std::string sweep_kind = "constant_window";
  std::vector<Index> sweep_lengths{8192, 16384, 32768, 65536};
  bool sweep_no_oracle = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "Benchmark a kernel and the dense oracle across lengths");
  add_bench_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--kind", sweep_kind, "constant_window or constant_sparsity");
  sweep_cmd->add_option("--lengths", sweep_lengths, "Ascending sequence lengths")->delimiter(',');
  sweep_cmd->add_flag("--no-oracle", sweep_no_oracle, "Skip the dense oracle rows");

  PresetFlags preset_flags;
  auto* preset = app.add_subcommand("preset", "Build (and optionally time) a composed mask preset");
  preset->add_option("--name", preset_flags.name, "longformer, longformer_dilated or bigbird");
  preset->add_option("--length", preset_flags.length, "Sequence length");
  preset->add_option("--seed", preset_flags.seed, "Seed for the random leg and inputs");
  preset->add_option("--dim", preset_flags.dim, "Head dimension for --bench");
  preset->add_flag("--bench", preset_flags.bench, "Time sequential, csr and sdp execution");
  preset->add_option("--warmup", preset_flags.warmup, "Untimed runs for --bench");
  preset->add_option("--iters", preset_flags.iters, "Timed runs for --bench");
  preset->add_option("--out-mask", preset_flags.out_mask, "Save the combined mask (binary CSR)");
  preset->add_option("--dense-cap-bytes", preset_flags.dense_cap, "Cap on the dense score matrix");

  MaxlenFlags maxlen_flags;
  auto* maxlen = app.add_subcommand("maxlen", "Maximum context length under the memory model (CSV)");
  maxlen->add_option("--algo", maxlen_flags.algos, "Algorithms (default: all)")->delimiter(',');
  maxlen->add_option("--dtype-bytes", maxlen_flags.dtype_bytes, "Element sizes, 2 or 4")->delimiter(',');
  maxlen->add_option("--index-bytes", maxlen_flags.index_bytes, "Index size (default 4; 2 for FP16 csr)");
  maxlen->add_option("--d", maxlen_flags.dims, "Head dimensions")->delimiter(',');
  maxlen->add_option("--heads", maxlen_flags.heads, "Number of heads");
  maxlen->add_option("--sparsity", maxlen_flags.sparsities, "Sparsity factors")->delimiter(',');
  maxlen->add_option("--budget-gib", maxlen_flags.budget_gib, "Device memory in GiB");
  maxlen->add_flag("--reference", maxlen_flags.reference, "Compare against the published A100 table");
  maxlen->add_option("--out", maxlen_flags.out, "Write CSV here instead of stdout");

  VerifyFlags verify_flags;
  auto* verify = app.add_subcommand("verify", "Check kernels against the dense oracle");
  verify->add_option("--suite", verify_flags.suite, "Suite to run")
      ->check(CLI::IsMember({"oracle", "work", "composition", "all"}));
  verify->add_option("--seed", verify_flags.seed, "Case generator seed");
  verify->add_option("--cases", verify_flags.cases, "Random cases per kernel");
  verify->add_option("--length", verify_flags.length, "Sequence length of the random cases");
  verify->add_option("--dim", verify_flags.dim, "Head dimension");
  verify->add_flag("--json", verify_flags.json_out, "Print a JSON summary");

  MaskgenFlags maskgen_flags;
  auto* maskgen = app.add_subcommand("maskgen", "Write a pattern mask to a file");
  maskgen->add_option("--pattern", maskgen_flags.kind, "local, dilated1d, dilated2d, global, random")
      ->check(CLI::IsMember({"local", "dilated1d", "dilated2d", "global", "random"}));
  maskgen->add_option("--length", maskgen_flags.length, "Sequence length");
  maskgen->add_option("--window", maskgen_flags.pattern.window, "Window w");
  maskgen->add_option("--dilation", maskgen_flags.pattern.dilation, "Dilation r");
  maskgen->add_option("--block", maskgen_flags.pattern.block, "Block size b");
  maskgen->add_option("--global-indices", maskgen_flags.pattern.global_indices, "Global tokens")->delimiter(',');
  maskgen->add_option("--sparsity", maskgen_flags.sparsity, "Random pattern sparsity");
  maskgen->add_option("--seed", maskgen_flags.seed, "Random pattern seed");
  maskgen->add_option("--out", maskgen_flags.out, "Output path")->required();
  maskgen->add_option("--format", maskgen_flags.format, "binary or csv")->check(CLI::IsMember({"binary", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("config", e.what());
  }

  try {
    if (*bench) return cmd_bench(bench_flags);
    if (*sweep_cmd) return cmd_sweep(sweep_flags, sweep_kind, sweep_lengths, sweep_no_oracle);
    if (*preset) return cmd_preset(preset_flags);
    if (*maxlen) return cmd_maxlen(maxlen_flags);
    if (*verify) return cmd_verify(verify_flags);
    if (*maskgen) return cmd_maskgen(maskgen_flags);
  } catch (const BenchError& e) {
    return fail(e.kind(), e.what(), e.requested_bytes());
  } catch (const std::bad_alloc&) {
    return fail("out_of_memory", "allocation failed");
  } catch (const std::exception& e) {
    return fail("config", e.what());
  }
  return 0;
}
