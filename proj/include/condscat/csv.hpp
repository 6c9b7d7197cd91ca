// Copyright 2026 The condscat Authors
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

//! \file csv.hpp
//! Locale-independent, round-trip number formatting for CSV and JSON output.

#ifndef CONDSCAT_CSV_HPP_
#define CONDSCAT_CSV_HPP_

#include <charconv>
#include <ostream>
#include <string>
#include <vector>

namespace condscat {

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void write_csv_row(std::ostream& os, const std::vector<double>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) os << ',';
    os << format_double(row[i]);
  }
  os << '\n';
}

}  // namespace condscat

#endif  // CONDSCAT_CSV_HPP_
