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

#include <sstream>

#include <gtest/gtest.h>

#include "gpattn/report.hpp"

namespace gpattn {
namespace {

BenchReport sample_report() {
  BenchConfig c;
  c.length = 64;
  c.dim = 4;
  c.pattern = Local{3};
  c.warmup = 0;
  c.iters = 2;
  return run_benchmark(c);
}

TEST(ReportJson, Schema) {
  const auto j = report_to_json(sample_report());
  for (const char* key : {"config", "samples_s", "mean_s", "median_s", "min_s", "work", "achieved_sf"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["config"]["algorithm"], "local");
  EXPECT_EQ(j["samples_s"].size(), 2u);
  EXPECT_EQ(j["resolved_pattern"]["window"], 3);
  EXPECT_EQ(j["work"], pattern_nnz(Local{3}, 64));
}

TEST(ReportJson, ErrorObject) {
  const auto j = error_to_json("out_of_memory", "too big", 1234);
  EXPECT_EQ(j["error"]["kind"], "out_of_memory");
  EXPECT_EQ(j["error"]["requested_bytes"], 1234);
  EXPECT_FALSE(error_to_json("config", "bad")["error"].contains("requested_bytes"));
}

TEST(ReportCsv, HeaderAndRow) {
  std::ostringstream os;
  write_report_csv(os, {sample_report()});
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  EXPECT_EQ(header.rfind("algorithm,length,dim", 0), 0u);
  EXPECT_EQ(row.rfind("local,64,4", 0), 0u);
}

TEST(CapacityCsv, Columns) {
  std::ostringstream os;
  write_capacity_csv(os, {{Algorithm::local, 2, 4, 128, 1, 1e-4, 83559675}});
  EXPECT_EQ(os.str(), "algorithm,dtype_bytes,index_bytes,d,heads,s_f,max_L\nlocal,2,4,128,1,1e-04,83559675\n");
}

}  // namespace
}  // namespace gpattn
