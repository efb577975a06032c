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

// JSON and CSV renderings of benchmark, sweep and capacity results.

#pragma once

#include <array>
#include <charconv>
#include <ostream>
#include <string>
#include <vector>

#include "gpattn/bench.hpp"
#include "gpattn/memmodel.hpp"
#include "json.hpp"

namespace gpattn {

using json = nlohmann::json;

inline json pattern_to_json(const MaskPattern& pattern) {
  return std::visit(
      [](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Local>) {
          return {{"type", "local"}, {"window", p.window}};
        } else if constexpr (std::is_same_v<P, Dilated1D>) {
          return {{"type", "dilated1d"}, {"window", p.window}, {"dilation", p.dilation}};
        } else if constexpr (std::is_same_v<P, Dilated2D>) {
          return {{"type", "dilated2d"}, {"block", p.block}, {"dilation", p.dilation}};
        } else if constexpr (std::is_same_v<P, Global>) {
          return {{"type", "global"}, {"indices", p.indices}, {"window", p.window}};
        } else {
          return {{"type", "random"}, {"sparsity", p.sparsity}, {"seed", p.seed}};
        }
      },
      pattern);
}

inline json config_to_json(const BenchConfig& c) {
  json j = {{"algorithm", to_string(c.algorithm)},
            {"length", c.length},
            {"dim", c.dim},
            {"warmup", c.warmup},
            {"iters", c.iters},
            {"seed", c.seed},
            {"compare_oracle", c.compare_oracle}};
  j["pattern"] = c.pattern ? pattern_to_json(*c.pattern) : json(nullptr);
  j["mask_file"] = c.mask_file ? json(*c.mask_file) : json(nullptr);
  j["sparsity"] = c.sparsity ? json(*c.sparsity) : json(nullptr);
  return j;
}

/// {config, samples_s, mean_s, median_s, min_s, work, achieved_sf, ...}
inline json report_to_json(const BenchReport& r) {
  json j = {{"config", config_to_json(r.config)},
            {"samples_s", r.timing.samples_s},
            {"mean_s", r.timing.mean_s},
            {"median_s", r.timing.median_s},
            {"min_s", r.timing.min_s},
            {"max_s", r.timing.max_s},
            {"work", r.work},
            {"nnz", r.nnz},
            {"achieved_sf", r.achieved_sf},
            {"peak_rss_bytes", r.peak_rss_bytes}};
  j["resolved_pattern"] = r.resolved_pattern ? pattern_to_json(*r.resolved_pattern) : json(nullptr);
  if (r.oracle_match) j["oracle_match"] = *r.oracle_match;
  return j;
}

inline json error_to_json(const std::string& kind, const std::string& message, std::uint64_t requested_bytes = 0) {
  json e = {{"kind", kind}, {"message", message}};
  if (requested_bytes > 0) e["requested_bytes"] = requested_bytes;
  return {{"error", e}};
}

namespace detail {

// Shortest text that reads back to the same double.
inline std::string fmt_double(double x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

}  // namespace detail

inline void write_report_csv(std::ostream& os, const std::vector<BenchReport>& reports) {
  os << "algorithm,length,dim,warmup,iters,seed,nnz,work,achieved_sf,mean_s,median_s,min_s,max_s\n";
  for (const auto& r : reports) {
    os << to_string(r.config.algorithm) << ',' << r.config.length << ',' << r.config.dim << ','
       << r.config.warmup << ',' << r.config.iters << ',' << r.config.seed << ',' << r.nnz << ',' << r.work << ','
       << detail::fmt_double(r.achieved_sf) << ',' << detail::fmt_double(r.timing.mean_s) << ','
       << detail::fmt_double(r.timing.median_s) << ',' << detail::fmt_double(r.timing.min_s) << ','
       << detail::fmt_double(r.timing.max_s) << '\n';
  }
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "kind,length,algorithm,status,nnz,work,achieved_sf,mean_s,median_s,min_s,reason\n";
  for (const auto& row : rows) {
    os << to_string(row.kind) << ',' << row.length << ',' << to_string(row.algorithm) << ',' << row.status << ',';
    if (row.report) {
      const auto& r = *row.report;
      os << r.nnz << ',' << r.work << ',' << detail::fmt_double(r.achieved_sf) << ','
         << detail::fmt_double(r.timing.mean_s) << ',' << detail::fmt_double(r.timing.median_s) << ','
         << detail::fmt_double(r.timing.min_s) << ',';
    } else {
      os << ",,,,,,";
    }
    std::string reason = row.reason;
    for (auto& ch : reason) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    os << reason << '\n';
  }
}

struct CapacityRow {
  Algorithm algorithm;
  int element_bytes;
  int index_bytes;
  std::int64_t d;
  std::int64_t heads;
  double sparsity;
  std::uint64_t max_length;
};

inline void write_capacity_csv(std::ostream& os, const std::vector<CapacityRow>& rows) {
  os << "algorithm,dtype_bytes,index_bytes,d,heads,s_f,max_L\n";
  for (const auto& r : rows) {
    os << to_string(r.algorithm) << ',' << r.element_bytes << ',' << r.index_bytes << ',' << r.d << ','
       << r.heads << ',' << detail::fmt_double(r.sparsity) << ',' << r.max_length << '\n';
  }
}

}  // namespace gpattn
