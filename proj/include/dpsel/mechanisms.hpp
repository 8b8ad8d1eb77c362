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

#ifndef DPSEL_MECHANISMS_HPP_
#define DPSEL_MECHANISMS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "dpsel/bounds.hpp"
#include "dpsel/errors.hpp"
#include "dpsel/quadrature.hpp"
#include "dpsel/rng.hpp"

namespace dpsel {

namespace detail {

inline void require_scores(const std::vector<double>& scores) {
  if (scores.empty()) {
    throw DomainError("score vector must be non-empty");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) {
      throw DomainError("scores must be finite");
    }
  }
}

inline void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive and finite");
  }
}

// Lowest index wins ties so repeated runs with zero noise are deterministic.
inline std::size_t strict_argmax(const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) {
      best = i;
    }
  }
  return best;
}

inline double laplace_noise(double scale, SequentialRng& rng) {
  const double x = rng.uniform() - 0.5;
  if (x == 0.0) {
    return 0.0;
  }
  return -scale * (x > 0.0 ? 1.0 : -1.0) * std::log1p(-2.0 * std::abs(x));
}

}  // namespace detail

// Argmax of scores perturbed by iid Gaussian noise. sigma == 0 is the exact
// argmax and performs no draws.
inline std::size_t run_rnm_gaussian(const std::vector<double>& scores, double sigma,
                                    SequentialRng& rng) {
  detail::require_scores(scores);
  if (sigma < 0.0 || !std::isfinite(sigma)) {
    throw DomainError("sigma must be nonnegative and finite");
  }
  if (sigma == 0.0) {
    return detail::strict_argmax(scores);
  }
  std::vector<double> noisy(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    noisy[i] = scores[i] + sigma * rng.normal();
  }
  return detail::strict_argmax(noisy);
}

// Argmax under iid Laplace noise with scale 2 * delta_sens / epsilon, the
// textbook calibration for per-coordinate sensitivity delta_sens.
inline std::size_t run_rnm_laplace(const std::vector<double>& scores, double epsilon,
                                   double delta_sens, SequentialRng& rng) {
  detail::require_scores(scores);
  detail::require_positive(epsilon, "epsilon");
  detail::require_positive(delta_sens, "delta_sens");
  const double scale = 2.0 * delta_sens / epsilon;
  std::vector<double> noisy(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    noisy[i] = scores[i] + detail::laplace_noise(scale, rng);
  }
  return detail::strict_argmax(noisy);
}

// Samples index i with probability proportional to exp(epsilon * q_i /
// (2 * delta_sens)). Normalization happens in log space so widely spread
// scores cannot overflow.
inline std::size_t exponential_mechanism(const std::vector<double>& scores, double epsilon,
                                         double delta_sens, SequentialRng& rng) {
  detail::require_scores(scores);
  detail::require_positive(epsilon, "epsilon");
  detail::require_positive(delta_sens, "delta_sens");
  std::vector<double> logits(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    logits[i] = 0.5 * epsilon * scores[i] / delta_sens;
  }
  const double norm = detail::logsumexp(logits);
  const double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    cum += std::exp(logits[i] - norm);
    if (cum >= u) {
      return i;
    }
  }
  return logits.size() - 1;
}

// Visits candidates in a uniformly random order and flips a coin with
// acceptance probability exp(epsilon * (q_i - q_max) / (2 * delta_sens)).
// Terminates because every maximizer accepts with probability one.
inline std::size_t permute_and_flip(const std::vector<double>& scores, double epsilon,
                                    double delta_sens, SequentialRng& rng) {
  detail::require_scores(scores);
  detail::require_positive(epsilon, "epsilon");
  detail::require_positive(delta_sens, "delta_sens");
  const double q_max = *std::max_element(scores.begin(), scores.end());
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
    std::swap(order[i - 1], order[std::min(j, i - 1)]);
  }
  for (std::size_t round = 0;; ++round) {
    const std::size_t i = order[round % order.size()];
    const double accept = std::exp(0.5 * epsilon * (scores[i] - q_max) / delta_sens);
    if (rng.uniform() <= accept) {
      return i;
    }
  }
}

struct AtResult {
  // One entry per examined query; only the final entry can be true.
  std::vector<bool> answers;
  // True when the run halted on a noisy comparison success, false when the
  // stream ran out first.
  bool fired = false;
  std::size_t transcript_len = 0;
};

// Noisy threshold scan: the threshold is perturbed once up front, then each
// query gets fresh noise and the scan halts on the first noisy exceedance.
// The threshold draw is the first consumed, so transcripts are replayable
// from the seed alone.
inline AtResult run_above_threshold(const std::vector<double>& queries, double rho,
                                    const AtNoise& noise, SequentialRng& rng) {
  validate(noise);
  if (!std::isfinite(rho)) {
    throw DomainError("rho must be finite");
  }
  for (double q : queries) {
    if (!std::isfinite(q)) {
      throw DomainError("queries must be finite");
    }
  }
  const double rho_hat = rho + noise.sigma_x * rng.normal();
  AtResult result;
  result.answers.reserve(queries.size());
  for (double q : queries) {
    const bool over = q + noise.sigma_z * rng.normal() >= rho_hat;
    result.answers.push_back(over);
    if (over) {
      result.fired = true;
      break;
    }
  }
  result.transcript_len = result.answers.size();
  return result;
}

struct StoppingQuantiles {
  double median = 0.0;
  double p80 = 0.0;
};

// Stop-time quantiles for the scan on an all-zero stream, the slowest-firing
// input for nonnegative thresholds. Runs that survive max_steps are recorded
// as max_steps + 1. Trial i uses the i-th child seed, so sweeps over rho with
// a shared base seed reuse the same noise and are monotone trial by trial.
inline StoppingQuantiles simulate_worst_case_stopping(std::size_t max_steps, double rho,
                                                      const AtNoise& noise, std::size_t n_trials,
                                                      std::uint64_t seed) {
  validate(noise);
  if (max_steps == 0 || n_trials == 0) {
    throw DomainError("max_steps and n_trials must be positive");
  }
  const std::vector<double> zeros(max_steps, 0.0);
  SequentialRng root(seed);
  std::vector<double> stops(n_trials);
  for (std::size_t i = 0; i < n_trials; ++i) {
    SequentialRng trial_rng(root.child_seed(i));
    const AtResult r = run_above_threshold(zeros, rho, noise, trial_rng);
    stops[i] = r.fired ? static_cast<double>(r.transcript_len)
                       : static_cast<double>(max_steps + 1);
  }
  std::sort(stops.begin(), stops.end());
  auto quantile = [&](double p) {
    const std::size_t idx = static_cast<std::size_t>(
        std::ceil(p * static_cast<double>(n_trials))) - 1;
    return stops[std::min(idx, n_trials - 1)];
  };
  return StoppingQuantiles{quantile(0.5), quantile(0.8)};
}

}  // namespace dpsel

#endif  // DPSEL_MECHANISMS_HPP_
