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

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "dpsel/errors.hpp"
#include "dpsel/log_real.hpp"
#include "dpsel/normal.hpp"
#include "dpsel/summation.hpp"

namespace dpsel {

struct QuadratureConfig {
  // Integration window half-width in standard deviations around the window
  // center. Must be >= 8 so the truncated tail mass is negligible relative
  // to any mass inside the window.
  double half_width = 12.0;
  // Refinement stops when successive levels agree to this relative change
  // in the log value.
  double refinement_tol = 1e-12;
  // Panel count doubles per level; must be >= 2 so at least one comparison
  // between levels happens.
  int max_levels = 16;
};

inline void validate(const QuadratureConfig& cfg) {
  if (!(cfg.half_width >= 8.0)) throw DomainError("QuadratureConfig: half_width must be >= 8");
  if (!(cfg.refinement_tol > 0.0)) throw DomainError("QuadratureConfig: refinement_tol must be > 0");
  if (cfg.max_levels < 2) throw DomainError("QuadratureConfig: max_levels must be >= 2");
}

namespace detail {

inline constexpr int kGaussPoints = 24;
inline constexpr int kBasePanels = 16;

struct GaussRule {
  std::array<double, kGaussPoints> node;
  std::array<double, kGaussPoints> weight;
};

// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
// Legendre recurrence from the Chebyshev initial guess.
inline const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    GaussRule r{};
    const int n = kGaussPoints;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 64; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      r.node[i] = x;
      r.node[n - 1 - i] = -x;
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      r.weight[i] = w;
      r.weight[n - 1 - i] = w;
    }
    return r;
  }();
  return rule;
}

inline double logsumexp(const std::vector<double>& logs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : logs) m = std::max(m, v);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  CompensatedSum s;
  for (double v : logs) {
    if (v != -std::numeric_limits<double>::infinity()) s.add(std::exp(v - m));
  }
  return m + std::log(s.total());
}

// log of integral exp(h(x)) dx over [lo, hi], composite Gauss-Legendre with
// panel doubling until the log value stabilizes. h may return -inf where the
// integrand vanishes.
template <class H>
double log_integral_refined(H&& h, double lo, double hi, const QuadratureConfig& cfg) {
  const GaussRule& rule = gauss_rule();
  double previous = std::numeric_limits<double>::quiet_NaN();
  double last = std::numeric_limits<double>::quiet_NaN();
  for (int level = 0; level < cfg.max_levels; ++level) {
    const std::size_t panels = static_cast<std::size_t>(kBasePanels) << level;
    const double width = (hi - lo) / static_cast<double>(panels);
    const double log_half_width = std::log(width / 2.0);
    std::vector<double> panel_logs(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const double a = lo + width * static_cast<double>(p);
      const double mid = a + width / 2.0;
      std::array<double, kGaussPoints> term{};
      double m = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < kGaussPoints; ++j) {
        const double hv = h(mid + (width / 2.0) * rule.node[j]);
        if (std::isnan(hv) || hv == std::numeric_limits<double>::infinity()) {
          throw DomainError("quadrature: integrand produced a non-finite log value");
        }
        term[j] = hv + std::log(rule.weight[j]);
        m = std::max(m, term[j]);
      }
      if (m == -std::numeric_limits<double>::infinity()) {
        panel_logs[p] = m;
        continue;
      }
      CompensatedSum s;
      for (int j = 0; j < kGaussPoints; ++j) {
        if (term[j] != -std::numeric_limits<double>::infinity()) s.add(std::exp(term[j] - m));
      }
      panel_logs[p] = m + std::log(s.total()) + log_half_width;
    }
    const double current = logsumexp(panel_logs);
    if (level >= 1) {
      const bool both_zero = std::isinf(current) && std::isinf(last) && current < 0 && last < 0;
      if (both_zero) return current;
      const double scale = std::max(1.0, std::abs(current));
      if (std::abs(current - last) <= cfg.refinement_tol * scale) return current;
    }
    previous = last;
    last = current;
  }
  throw ConvergenceError(
      "quadrature: refinement did not stabilize within " + std::to_string(cfg.max_levels) + " levels",
      last, previous);
}

// Expectation window centered away from the origin. Used by bound integrands
// whose mass concentrates near a known peak of log phi(z) + g(z).
template <class G>
LogReal log_expectation_window(G&& g, const QuadratureConfig& cfg, double center) {
  validate(cfg);
  auto h = [&g](double z) { return log_gaussian_pdf(z) + g(z).log(); };
  const double value =
      log_integral_refined(h, center - cfg.half_width, center + cfg.half_width, cfg);
  return LogReal::from_log(value);
}

}  // namespace detail

// log E_{z ~ N(0,1)}[exp(g(z))], integrated over [-half_width, half_width].
// The caller guarantees g is bounded above on the window; mass outside the
// window is truncated, which is negligible whenever the integrand's peak
// lies well inside it.
template <class G>
LogReal log_expectation_std_normal(G&& g, const QuadratureConfig& cfg = {}) {
  return detail::log_expectation_window(g, cfg, 0.0);
}

}  // namespace dpsel
