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

#ifndef DPSEL_DATASET_HPP_
#define DPSEL_DATASET_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "dpsel/errors.hpp"
#include "dpsel/rng.hpp"

namespace dpsel {

// Daily activity counts rescaled to per-user participation rates. One user
// contributes at most one count per day, so neighboring datasets move every
// value by at most delta_sens.
struct SeriesDataset {
  std::vector<double> values;
  std::size_t n_users = 0;
  double delta_sens = 0.0;
};

namespace detail {

inline bool parse_count(const std::string& token, double* out) {
  std::size_t used = 0;
  try {
    *out = std::stod(token, &used);
  } catch (const std::exception&) {
    return false;
  }
  while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used]))) {
    ++used;
  }
  return used == token.size();
}

}  // namespace detail

// Reads one count per line from CSV-ish text: the count is the last comma
// separated field, earlier fields are free-form labels. A first line whose
// count field does not parse is treated as a header. Counts above n_users
// clamp to a rate of one.
inline SeriesDataset ingest_series(std::istream& in, std::size_t n_users) {
  if (n_users == 0) {
    throw DataError("n_users must be positive");
  }
  SeriesDataset ds;
  ds.n_users = n_users;
  ds.delta_sens = 1.0 / static_cast<double>(n_users);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    if (trimmed.empty() || trimmed[0] == '#') {
      continue;
    }
    const std::size_t comma = trimmed.find_last_of(',');
    const std::string token =
        comma == std::string::npos ? trimmed : trimmed.substr(comma + 1);
    double count = 0.0;
    if (!detail::parse_count(token, &count)) {
      if (line_no == 1) {
        continue;
      }
      throw DataError("line " + std::to_string(line_no) + ": cannot parse count '" +
                      token + "'");
    }
    if (!std::isfinite(count) || count < 0.0) {
      throw DataError("line " + std::to_string(line_no) + ": count must be nonnegative");
    }
    ds.values.push_back(std::min(count / static_cast<double>(n_users), 1.0));
  }
  if (ds.values.empty()) {
    throw DataError("no data rows found");
  }
  return ds;
}

inline SeriesDataset ingest_series_file(const std::string& path, std::size_t n_users) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open '" + path + "'");
  }
  return ingest_series(in, n_users);
}

// Seasonal toy series: a sine wave around a base rate of 0.45 plus a small
// seeded jitter. Zero amplitude suppresses the jitter too, giving an exactly
// constant series.
inline SeriesDataset generate_synthetic_series(std::size_t n_days, std::size_t n_users,
                                               double amplitude, std::size_t period,
                                               std::uint64_t seed) {
  if (n_days == 0 || n_users == 0 || period == 0) {
    throw DataError("n_days, n_users, and period must be positive");
  }
  if (!(amplitude >= 0.0) || amplitude > 1.0) {
    throw DataError("amplitude must lie in [0, 1]");
  }
  SeriesDataset ds;
  ds.n_users = n_users;
  ds.delta_sens = 1.0 / static_cast<double>(n_users);
  ds.values.reserve(n_days);
  SequentialRng rng(seed);
  const double users = static_cast<double>(n_users);
  for (std::size_t i = 0; i < n_days; ++i) {
    const double phase = 2.0 * 3.14159265358979323846 * static_cast<double>(i) /
                         static_cast<double>(period);
    double count = 0.45 * users + 0.45 * amplitude * users * std::sin(phase) +
                   0.002 * amplitude * users * rng.normal();
    count = std::clamp(std::round(count), 0.0, users);
    ds.values.push_back(count / users);
  }
  return ds;
}

}  // namespace dpsel

#endif  // DPSEL_DATASET_HPP_
