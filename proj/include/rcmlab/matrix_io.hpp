// Copyright 2026 The rcmlab authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rcmlab/model.hpp"

namespace rcmlab {

// Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

// Text format: header "rcm n m d", then one line per row listing the d
// support indices, 1-based and strictly increasing.
inline void write_rcm(std::ostream& os, const RowSupportMatrix& M) {
  os << "rcm " << M.n << ' ' << M.m << ' ' << M.d << '\n';
  for (const auto& row : M.supports) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) os << ' ';
      os << row[j] + 1;
    }
    os << '\n';
  }
}

inline RowSupportMatrix read_rcm(std::istream& is) {
  std::string magic;
  RowSupportMatrix M;
  if (!(is >> magic) || magic != "rcm")
    throw std::runtime_error("read_rcm: missing 'rcm' header");
  if (!(is >> M.n >> M.m >> M.d))
    throw std::runtime_error("read_rcm: malformed header");
  M.supports.assign(static_cast<std::size_t>(M.m), {});
  for (auto& row : M.supports) {
    row.resize(static_cast<std::size_t>(M.d));
    for (auto& idx : row) {
      if (!(is >> idx)) throw std::runtime_error("read_rcm: truncated support data");
      --idx;  // to 0-based
    }
  }
  validate(M);
  return M;
}

inline void save_rcm(const std::string& path, const RowSupportMatrix& M) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_rcm: cannot open " + path);
  write_rcm(os, M);
}

inline RowSupportMatrix load_rcm(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_rcm: cannot open " + path);
  return read_rcm(is);
}

// Dense export: one matrix row per line, each entry as a real,imag pair, so a
// row has 2 * cols comma-separated numbers.
inline void write_dense_csv(std::ostream& os, const DenseComplexMatrix& A) {
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (j > 0) os << ',';
      os << format_double(A(i, j).real()) << ',' << format_double(A(i, j).imag());
    }
    os << '\n';
  }
}

}  // namespace rcmlab
