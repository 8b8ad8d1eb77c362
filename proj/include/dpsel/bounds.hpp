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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "dpsel/errors.hpp"
#include "dpsel/log_real.hpp"
#include "dpsel/normal.hpp"
#include "dpsel/quadrature.hpp"

namespace dpsel {

// Query family with values in [a, b] and per-record sensitivity delta_sens:
// one record changes each query value by at most delta_sens.
struct BoundedQueryParams {
  double a = 0.0;
  double b = 1.0;
  double delta_sens = 0.0;
};

inline void validate(const BoundedQueryParams& q) {
  if (!(std::isfinite(q.a) && std::isfinite(q.b) && q.a < q.b)) {
    throw DomainError("BoundedQueryParams: requires finite a < b");
  }
  if (!(q.delta_sens >= 0.0) || !(q.delta_sens <= q.b - q.a)) {
    throw DomainError("BoundedQueryParams: requires 0 <= delta_sens <= b - a");
  }
}

struct RnmNoise {
  double sigma = 0.0;
};

inline void validate(const RnmNoise& n) {
  if (!(n.sigma > 0.0) || !std::isfinite(n.sigma)) {
    throw DomainError("RnmNoise: requires sigma > 0");
  }
}

// Above-threshold noise: sigma_x perturbs the public threshold once per run,
// sigma_z perturbs each query.
struct AtNoise {
  double sigma_x = 0.0;
  double sigma_z = 0.0;
};

inline void validate(const AtNoise& n) {
  if (!(n.sigma_x > 0.0) || !std::isfinite(n.sigma_x)) {
    throw DomainError("AtNoise: requires sigma_x > 0");
  }
  if (!(n.sigma_z > 0.0) || !std::isfinite(n.sigma_z)) {
    throw DomainError("AtNoise: requires sigma_z > 0");
  }
}

// A Renyi privacy curve: alpha > 1 -> eps(alpha).
struct RdpCurve {
  std::function<double(double)> eval;
};

enum class GuaranteeKind { kPure, kApproximate, kProbabilistic, kExPost };

struct DpGuarantee {
  GuaranteeKind kind = GuaranteeKind::kPure;
  double epsilon = 0.0;
  double delta = 0.0;
};

namespace detail {

// log E_z[Phi(z - shift)^m], with the window centered on the integrand peak.
// log phi(z) + m log Phi(z - shift) has second derivative <= -1 everywhere
// (the log-CDF slope is strictly decreasing), so the peak is the unique root
// of the derivative and a [peak - R, peak + R] window captures all but
// e^{-R^2/2} relative mass.
inline double log_cdf_power_expectation(double shift, double m, const QuadratureConfig& cfg) {
  auto dh = [&](double z) { return -z + m * gaussian_log_cdf_slope(z - shift); };
  double lo = std::min(0.0, shift) - 2.0;
  double hi = std::max(0.0, shift) + 2.0;
  while (dh(lo) <= 0.0) lo -= 8.0;
  while (dh(hi) >= 0.0) hi += 8.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (dh(mid) > 0.0 ? lo : hi) = mid;
  }
  const double peak = 0.5 * (lo + hi);
  auto g = [&](double z) { return log_gaussian_cdf(z - shift).pow(m); };
  return log_expectation_window(g, cfg, peak).log();
}

// log E_x[Phi(k x + c1)^{t-1} * Phi(-k x + c2)] for the threshold-noise
// variable x. Same concavity argument as above: each log-CDF factor has a
// strictly decreasing slope, so the full log integrand is strictly concave.
inline double log_threshold_transcript_expectation(double k, double c1, double c2, int t,
                                                   const QuadratureConfig& cfg) {
  const double m = static_cast<double>(t - 1);
  auto dh = [&](double x) {
    double d = -x - k * gaussian_log_cdf_slope(-k * x + c2);
    if (m > 0.0) d += m * k * gaussian_log_cdf_slope(k * x + c1);
    return d;
  };
  double lo = -16.0;
  double hi = 16.0;
  while (dh(lo) <= 0.0) lo -= 16.0;
  while (dh(hi) >= 0.0) hi += 16.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (dh(mid) > 0.0 ? lo : hi) = mid;
  }
  const double peak = 0.5 * (lo + hi);
  auto g = [&](double x) {
    LogReal v = log_gaussian_cdf(-k * x + c2);
    if (m > 0.0) v = v * log_gaussian_cdf(k * x + c1).pow(m);
    return v;
  };
  return log_expectation_window(g, cfg, peak).log();
}

inline double clamp_log_ratio(double eps) {
  // Both expectations are evaluated the same way and the numerator dominates
  // the denominator pointwise, so any negative value is pure rounding noise.
  if (eps < -1e-9) {
    throw ConvergenceError("bound log-ratio came out materially negative", eps, 0.0);
  }
  return std::max(eps, 0.0);
}

}  // namespace detail

// Pure DP bound for the Gaussian argmax over d queries: the worst-case
// probability ratio for the distinguished index, as a log of a ratio of
// shifted CDF-power expectations.
inline double rnm_pure_epsilon(int d, const BoundedQueryParams& q, const RnmNoise& noise,
                               const QuadratureConfig& cfg = {}) {
  if (d < 2) throw DomainError("rnm_pure_epsilon: requires d >= 2");
  validate(q);
  validate(noise);
  validate(cfg);
  const double c = q.b - q.a;
  const double m = static_cast<double>(d - 1);
  if (q.delta_sens == 0.0) return 0.0;
  const double log_num = detail::log_cdf_power_expectation((c - 2.0 * q.delta_sens) / noise.sigma, m, cfg);
  const double log_den = detail::log_cdf_power_expectation(c / noise.sigma, m, cfg);
  return detail::clamp_log_ratio(log_num - log_den);
}

namespace detail {

// orientation flips the sign convention of the threshold-noise variable; the
// two orientations describe the same expectation because the noise law is
// symmetric. Exposed so tests can check the convention does not matter.
inline double at_expost_epsilon_oriented(int t, const BoundedQueryParams& q, const AtNoise& noise,
                                         double rho, const QuadratureConfig& cfg, int orientation) {
  if (t < 1) throw DomainError("at_expost_epsilon: requires t >= 1");
  validate(q);
  validate(noise);
  validate(cfg);
  if (!std::isfinite(rho)) throw DomainError("at_expost_epsilon: rho must be finite");
  if (q.delta_sens == 0.0) return 0.0;
  const double k = static_cast<double>(orientation) * noise.sigma_x / noise.sigma_z;
  auto log_side = [&](double shift) {
    const double c1 = (rho - q.b + shift) / noise.sigma_z;
    const double c2 = (q.a - rho + shift) / noise.sigma_z;
    return log_threshold_transcript_expectation(k, c1, c2, t, cfg);
  };
  return clamp_log_ratio(log_side(q.delta_sens) - log_side(0.0));
}

}  // namespace detail

// Ex-post DP charge for an above-threshold transcript that produced t - 1
// rejections followed by one acceptance, at worst-case query values.
inline double at_expost_epsilon(int t, const BoundedQueryParams& q, const AtNoise& noise,
                                double rho, const QuadratureConfig& cfg = {}) {
  return detail::at_expost_epsilon_oriented(t, q, noise, rho, cfg, +1);
}

// Renyi curve of the Gaussian mechanism with query sensitivity delta_q.
inline RdpCurve rdp_gaussian(double delta_q, double sigma) {
  if (!(delta_q >= 0.0) || !std::isfinite(delta_q)) {
    throw DomainError("rdp_gaussian: requires delta_q >= 0");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("rdp_gaussian: requires sigma > 0");
  return RdpCurve{[delta_q, sigma](double alpha) {
    if (!(alpha > 1.0)) throw DomainError("rdp_gaussian: requires alpha > 1");
    return alpha * delta_q * delta_q / (2.0 * sigma * sigma);
  }};
}

// Renyi curve for one noisy-threshold run (threshold noise sigma_x, query
// noise sigma_z, threshold rho). Requires sigma_z >= sqrt(3) * sigma_x and
// rho >= 0; the additive log term is evaluated in a form that cannot
// overflow for large rho / sigma_x.
inline RdpCurve rdp_gaussian_at(double delta_sens, const AtNoise& noise, double rho) {
  if (!(delta_sens >= 0.0) || !std::isfinite(delta_sens)) {
    throw DomainError("rdp_gaussian_at: requires delta_sens >= 0");
  }
  validate(noise);
  if (noise.sigma_z < std::sqrt(3.0) * noise.sigma_x) {
    throw DomainError("rdp_gaussian_at: requires sigma_z >= sqrt(3) * sigma_x");
  }
  if (!(rho >= 0.0)) throw DomainError("rdp_gaussian_at: requires rho >= 0");
  const double r = rho * rho / (noise.sigma_x * noise.sigma_x);
  const double log_a = std::log(2.0 * std::sqrt(3.0) * 3.14159265358979323846 *
                                (1.0 + 9.0 * r));
  // log(1 + A e^r): keep full precision whether A e^r is tiny or astronomical.
  const double log_term = (r + log_a > 36.0)
                              ? r + log_a + std::log1p(std::exp(-r - log_a))
                              : std::log1p(std::exp(r + log_a));
  const double d2 = delta_sens * delta_sens;
  const double sx2 = noise.sigma_x * noise.sigma_x;
  const double sz2 = noise.sigma_z * noise.sigma_z;
  return RdpCurve{[=](double alpha) {
    if (!(alpha > 1.0)) throw DomainError("rdp_gaussian_at: requires alpha > 1");
    return alpha * d2 / sx2 + 2.0 * alpha * d2 / sz2 + log_term / (2.0 * (alpha - 1.0));
  }};
}

struct PdpConversion {
  DpGuarantee guarantee;
  double alpha = 0.0;  // minimizing Renyi order
};

// Convert a Renyi curve to a probabilistic-DP guarantee at failure mass
// delta: minimize eval(alpha) + log(1/delta)/(alpha - 1) over alpha > 1.
// Log-spaced grid scan with golden-section refinement on the bracketing
// interval; the grid extends itself when the minimum sits on its upper edge.
inline PdpConversion rdp_to_pdp(const RdpCurve& curve, double delta) {
  if (!curve.eval) throw DomainError("rdp_to_pdp: curve has no evaluator");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("rdp_to_pdp: requires 0 < delta < 1");
  const double log_inv_delta = std::log(1.0 / delta);
  auto objective = [&](double alpha) -> double {
    double v;
    try {
      v = curve.eval(alpha);
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    }
    if (std::isnan(v)) return std::numeric_limits<double>::infinity();
    return v + log_inv_delta / (alpha - 1.0);
  };

  constexpr int kGridPoints = 2000;
  double span_lo = 1e-6;  // alpha - 1
  double span_hi = 1e6;
  int best = -1;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> alphas(kGridPoints);
  for (int extension = 0; extension < 8; ++extension) {
    const double step = std::log(span_hi / span_lo) / (kGridPoints - 1);
    best = -1;
    best_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGridPoints; ++i) {
      alphas[i] = 1.0 + span_lo * std::exp(step * i);
      const double v = objective(alphas[i]);
      if (v < best_val) {
        best_val = v;
        best = i;
      }
    }
    if (best < 0) throw DomainError("rdp_to_pdp: curve is undefined on the whole alpha grid");
    if (best < kGridPoints - 1) break;
    span_lo = span_hi / 2.0;  // minimum on the upper edge: extend the range
    span_hi *= 1e4;
  }

  double lo = alphas[std::max(best - 1, 0)];
  double hi = alphas[std::min(best + 1, kGridPoints - 1)];
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, lo); ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = objective(x2);
    }
  }
  const double alpha_star = 0.5 * (lo + hi);
  double eps_star = objective(alpha_star);
  double alpha_out = alpha_star;
  if (best_val < eps_star) {  // grid already had the better point
    eps_star = best_val;
    alpha_out = alphas[best];
  }
  PdpConversion out;
  out.guarantee = DpGuarantee{GuaranteeKind::kProbabilistic, eps_star, delta};
  out.alpha = alpha_out;
  return out;
}

// Classical baseline for the Gaussian argmax: treat the d queries as one
// vector query with l2 sensitivity delta_sens * sqrt(d) and convert the
// Gaussian Renyi curve at failure mass delta.
inline DpGuarantee classical_rnm_epsilon(int d, double delta_sens, double sigma, double delta) {
  if (d < 2) throw DomainError("classical_rnm_epsilon: requires d >= 2");
  if (!(delta_sens >= 0.0) || !std::isfinite(delta_sens)) {
    throw DomainError("classical_rnm_epsilon: requires delta_sens >= 0");
  }
  if (!(sigma > 0.0)) throw DomainError("classical_rnm_epsilon: requires sigma > 0");
  const double delta_q = delta_sens * std::sqrt(static_cast<double>(d));
  PdpConversion conv = rdp_to_pdp(rdp_gaussian(delta_q, sigma), delta);
  return DpGuarantee{GuaranteeKind::kApproximate, conv.guarantee.epsilon, delta};
}

}  // namespace dpsel
