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
#include "dpsel/log_real.hpp"

namespace dpsel {

inline constexpr double kSqrt2 = 1.4142135623730951;
inline constexpr double kHalfLogTwoPi = 0.9189385332046727;  // log(2*pi)/2

inline double gaussian_pdf(double z) { return std::exp(-0.5 * z * z - kHalfLogTwoPi); }
inline double log_gaussian_pdf(double z) { return -0.5 * z * z - kHalfLogTwoPi; }

// Standard normal CDF. Accurate until erfc underflows near z = -37.5; use
// log_gaussian_cdf below for anything in the deep tail.
inline double gaussian_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

namespace detail {

// Mills ratio Phi(-x)/phi(x) for x > 0 via the Laplace continued fraction
//   1/(x + 1/(x + 2/(x + 3/(x + ...)))),
// evaluated by backward recurrence. 128 levels is far past full double
// precision for x >= 6, the only range this is used in.
inline double mills_ratio_cf(double x) {
  double tail = x;
  for (int k = 128; k >= 1; --k) tail = x + static_cast<double>(k) / tail;
  return 1.0 / tail;
}

}  // namespace detail

// log Phi(z) with small absolute error over the whole real line, including
// the deep negative tail where Phi underflows. Strictly increasing in z as
// long as Phi(z) < 1 in double precision.
inline LogReal log_gaussian_cdf(double z) {
  if (std::isnan(z)) throw DomainError("log_gaussian_cdf: NaN input");
  if (z == std::numeric_limits<double>::infinity()) return LogReal::one();
  if (z == -std::numeric_limits<double>::infinity()) return LogReal::zero();
  if (z >= 6.0) {
    // Phi(z) is within 1e-9 of 1; log1p on the survival mass keeps all digits.
    return LogReal::from_log(std::log1p(-0.5 * std::erfc(z / kSqrt2)));
  }
  if (z > -6.0) {
    return LogReal::from_log(std::log(0.5 * std::erfc(-z / kSqrt2)));
  }
  const double x = -z;
  return LogReal::from_log(-0.5 * x * x - kHalfLogTwoPi + std::log(detail::mills_ratio_cf(x)));
}

// phi(z)/Phi(z), the slope of log Phi. Evaluated through the log CDF so it
// stays finite and accurate for arbitrarily negative z.
inline double gaussian_log_cdf_slope(double z) {
  if (std::isnan(z)) throw DomainError("gaussian_log_cdf_slope: NaN input");
  return std::exp(log_gaussian_pdf(z) - log_gaussian_cdf(z).log());
}

}  // namespace dpsel
