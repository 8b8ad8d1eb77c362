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

#pragma once

#include <cmath>
#include <limits>

#include "dpsel/errors.hpp"

namespace dpsel {

// Nonnegative real stored as its natural log. -inf encodes exact zero.
// The stored log is always finite or -inf, never NaN and never +inf;
// every constructor enforces that.
class LogReal {
 public:
  static LogReal from_log(double log_value) {
    if (std::isnan(log_value) || log_value == std::numeric_limits<double>::infinity()) {
      throw DomainError("LogReal: log value must be finite or -inf");
    }
    return LogReal(log_value);
  }

  static LogReal from_value(double value) {
    if (std::isnan(value) || value < 0.0) {
      throw DomainError("LogReal: value must be a nonnegative real");
    }
    return LogReal(std::log(value));  // log(0) = -inf is the encoding for zero
  }

  static LogReal zero() { return LogReal(-std::numeric_limits<double>::infinity()); }
  static LogReal one() { return LogReal(0.0); }

  double log() const { return log_; }
  double value() const { return std::exp(log_); }
  bool is_zero() const { return log_ == -std::numeric_limits<double>::infinity(); }

  // Product of the underlying reals; sums in log domain.
  friend LogReal operator*(LogReal a, LogReal b) {
    if (a.is_zero() || b.is_zero()) return zero();
    return from_log(a.log_ + b.log_);
  }

  // Integer power. pow(zero, 0) is one by the empty-product convention.
  LogReal pow(double exponent) const {
    if (exponent == 0.0) return one();
    if (is_zero()) {
      if (exponent < 0.0) throw DomainError("LogReal: negative power of zero");
      return zero();
    }
    return from_log(log_ * exponent);
  }

  friend bool operator<(LogReal a, LogReal b) { return a.log_ < b.log_; }
  friend bool operator==(LogReal a, LogReal b) { return a.log_ == b.log_; }

 private:
  explicit LogReal(double log_value) : log_(log_value) {}
  double log_;
};

}  // namespace dpsel
