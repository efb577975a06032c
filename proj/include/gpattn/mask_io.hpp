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

// On-disk mask formats.
//
// Binary CSR layout (all integers unsigned 64-bit little-endian):
//
//   "CSRM" | version=1 | L | nnz | offsets[L+1] | cols[nnz]
//
// The text format is a dense 0-1 grid, one CSV row per query row.

#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "gpattn/mask.hpp"

namespace gpattn {

inline constexpr std::array<char, 4> kCsrMagic = {'C', 'S', 'R', 'M'};
inline constexpr std::uint64_t kCsrVersion = 1;

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> bytes;
  for (int b = 0; b < 8; ++b) bytes[static_cast<std::size_t>(b)] = static_cast<char>((v >> (8 * b)) & 0xFF);
  os.write(bytes.data(), bytes.size());
}

inline std::uint64_t get_u64(std::istream& is) {
  std::array<unsigned char, 8> bytes{};
  is.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!is) throw MaskError("CSR file truncated");
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | bytes[static_cast<std::size_t>(b)];
  return v;
}

}  // namespace detail

inline void write_csr_binary(std::ostream& os, const CsrMask& m) {
  m.validate();
  os.write(kCsrMagic.data(), kCsrMagic.size());
  detail::put_u64(os, kCsrVersion);
  detail::put_u64(os, static_cast<std::uint64_t>(m.length));
  detail::put_u64(os, m.nnz());
  for (const Index o : m.offsets) detail::put_u64(os, static_cast<std::uint64_t>(o));
  for (const Index c : m.cols) detail::put_u64(os, static_cast<std::uint64_t>(c));
  if (!os) throw MaskError("failed writing CSR mask");
}

inline CsrMask read_csr_binary(std::istream& is) {
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kCsrMagic) throw MaskError("not a CSR mask file (bad magic)");
  const auto version = detail::get_u64(is);
  if (version != kCsrVersion) {
    throw MaskError("unsupported CSR mask version " + std::to_string(version));
  }
  const auto length = detail::get_u64(is);
  const auto nnz = detail::get_u64(is);
  if (length == 0 || length > (1ULL << 40)) throw MaskError("CSR file has invalid length");
  if (nnz > length * length) throw MaskError("CSR file nnz exceeds L^2");

  CsrMask m;
  m.length = static_cast<Index>(length);
  m.offsets.resize(length + 1);
  for (auto& o : m.offsets) o = static_cast<Index>(detail::get_u64(is));
  m.cols.resize(nnz);
  for (auto& c : m.cols) c = static_cast<Index>(detail::get_u64(is));
  m.validate();
  return m;
}

inline void save_csr(const std::string& path, const CsrMask& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw MaskError("cannot open " + path + " for writing");
  write_csr_binary(os, m);
}

inline CsrMask load_csr(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw MaskError("cannot open " + path);
  return read_csr_binary(is);
}

/// Parses a square 0-1 grid. Blank lines are ignored; cells may be padded
/// with spaces.
inline CsrMask read_dense_csv(std::istream& is) {
  std::vector<std::vector<std::uint8_t>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<std::uint8_t> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto first = cell.find_first_not_of(" \t\r");
      const auto last = cell.find_last_not_of(" \t\r");
      const std::string v = first == std::string::npos ? "" : cell.substr(first, last - first + 1);
      if (v == "0") {
        row.push_back(0);
      } else if (v == "1") {
        row.push_back(1);
      } else {
        throw MaskError("CSV mask cell '" + v + "' is not 0 or 1 (row " +
                        std::to_string(rows.size()) + ")");
      }
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Index>(rows.size());
  if (n == 0) throw MaskError("CSV mask is empty");
  BinaryGrid grid(n);
  for (Index i = 0; i < n; ++i) {
    if (static_cast<Index>(rows[static_cast<std::size_t>(i)].size()) != n) {
      throw MaskError("CSV mask is not square at row " + std::to_string(i));
    }
    std::memcpy(grid.cells.data() + i * n, rows[static_cast<std::size_t>(i)].data(),
                static_cast<std::size_t>(n));
  }
  return dense_to_csr(grid);
}

inline void write_dense_csv(std::ostream& os, const CsrMask& m) {
  const auto grid = csr_to_dense(m);
  for (Index i = 0; i < m.length; ++i) {
    for (Index j = 0; j < m.length; ++j) {
      if (j > 0) os << ',';
      os << static_cast<int>(grid.at(i, j));
    }
    os << '\n';
  }
}

/// Loads by extension: ".csv" is the dense text grid, anything else binary.
inline CsrMask load_mask_file(const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
    std::ifstream is(path);
    if (!is) throw MaskError("cannot open " + path);
    return read_dense_csv(is);
  }
  return load_csr(path);
}

}  // namespace gpattn
