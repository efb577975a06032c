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

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gpattn {

enum class Algorithm { sdp, csr, coo, local, dilated1d, dilated2d, global, flash_dense };

inline constexpr std::array<std::string_view, 8> kAlgorithmNames = {
    "sdp", "csr", "coo", "local", "dilated1d", "dilated2d", "global", "flash_dense"};

inline std::string to_string(Algorithm a) { return std::string(kAlgorithmNames[static_cast<std::size_t>(a)]); }

inline Algorithm parse_algorithm(std::string_view name) {
  for (std::size_t n = 0; n < kAlgorithmNames.size(); ++n) {
    if (kAlgorithmNames[n] == name) return static_cast<Algorithm>(n);
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

/// The six graph kernels.
inline constexpr std::array<Algorithm, 6> kGraphKernels = {
    Algorithm::coo, Algorithm::csr, Algorithm::local, Algorithm::dilated1d, Algorithm::dilated2d,
    Algorithm::global};

inline constexpr bool is_explicit_mask(Algorithm a) noexcept {
  return a == Algorithm::csr || a == Algorithm::coo;
}

}  // namespace gpattn
