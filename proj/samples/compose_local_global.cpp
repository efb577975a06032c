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

// Runs a sliding window and a set of global tokens as two separate kernel
// calls, carrying the softmax state between them, then checks the result
// against one CSR call on the combined mask.

#include <cstdio>

#include "gpattn/gpattn.hpp"

int main() {
  using namespace gpattn;
  constexpr Index kLength = 1024;
  constexpr Index kDim = 64;
  const Local local{33};
  const Global global{{0, 511, 1023}, 33};

  const auto in = make_inputs<float>(kLength, kDim, /*seed=*/7);

  auto partial = attend_local(in.q, in.k, in.v, local.window);
  const std::uint64_t local_work = partial.work;
  auto full = attend_global(in.q, in.k, in.v, global.indices, global.window, std::move(partial));

  const CsrMask combined = mask_union_disjoint(gen_pattern_mask(local, kLength), gen_pattern_mask(global, kLength));
  const auto single = attend_csr(in.q, in.k, in.v, combined);

  const bool same = allclose(full.output, single.output, Tolerances{}.scaled(10));
  std::printf("nnz=%lld sparsity=%.5f work(two calls)=%llu work(csr)=%llu match=%s\n",
              static_cast<long long>(combined.nnz()), sparsity_factor(combined),
              static_cast<unsigned long long>(local_work + full.work), static_cast<unsigned long long>(single.work),
              same ? "yes" : "no");
  return same ? 0 : 1;
}
