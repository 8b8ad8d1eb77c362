//
// Copyright 2026 The dpsel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DPSEL_CSV_HPP_
#define DPSEL_CSV_HPP_

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "dpsel/errors.hpp"

namespace dpsel {

// 17 significant digits round-trip any double exactly.
inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) {
    if (row.size() != columns.size()) {
      throw DomainError("row width does not match the header");
    }
    rows.push_back(std::move(row));
  }

  std::string serialize() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      out += (i ? "," : "") + columns[i];
    }
    out += '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        out += (i ? "," : "") + row[i];
      }
      out += '\n';
    }
    return out;
  }
};

// Writes through a sibling temp file and renames it into place, so readers
// never observe a partially written file.
inline void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw DataError("cannot open '" + tmp + "' for writing");
    }
    out << content;
    if (!out.flush()) {
      throw DataError("write to '" + tmp + "' failed");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw DataError("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

inline void write_csv_atomic(const std::string& path, const CsvTable& table) {
  write_text_atomic(path, table.serialize());
}

}  // namespace dpsel

#endif  // DPSEL_CSV_HPP_
