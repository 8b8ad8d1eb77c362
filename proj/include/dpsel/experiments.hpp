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

#ifndef DPSEL_EXPERIMENTS_HPP_
#define DPSEL_EXPERIMENTS_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "dpsel/bounds.hpp"
#include "dpsel/composition.hpp"
#include "dpsel/dataset.hpp"
#include "dpsel/mechanisms.hpp"
#include "dpsel/metrics.hpp"
#include "dpsel/monte_carlo.hpp"
#include "dpsel/normal.hpp"

namespace dpsel {

// Adaptive quadrature and plain sampling estimates of the same pair of
// expectations whose log ratio is the privacy bound.
struct McCrossCheck {
  double log_num_quad = 0.0;
  double log_den_quad = 0.0;
  McEstimate num_mc;
  McEstimate den_mc;

  double epsilon_quad() const { return log_num_quad - log_den_quad; }
  double epsilon_mc() const { return std::log(num_mc.mean) - std::log(den_mc.mean); }
};

inline McCrossCheck mc_check_rnm(int d, const BoundedQueryParams& q, const RnmNoise& noise,
                                 std::size_t n_samples, std::uint64_t seed,
                                 const QuadratureConfig& cfg = {}) {
  if (d < 2) {
    throw DomainError("mc_check_rnm: requires d >= 2");
  }
  validate(q);
  validate(noise);
  const double c = q.b - q.a;
  const double m = static_cast<double>(d - 1);
  const double shift_num = (c - 2.0 * q.delta_sens) / noise.sigma;
  const double shift_den = c / noise.sigma;
  McCrossCheck out;
  out.log_num_quad = detail::log_cdf_power_expectation(shift_num, m, cfg);
  out.log_den_quad = detail::log_cdf_power_expectation(shift_den, m, cfg);
  auto power = [m](double shift) {
    return [m, shift](double z) { return std::exp(m * log_gaussian_cdf(z - shift).log()); };
  };
  SequentialRng root(seed);
  out.num_mc = mc_expectation_std_normal(power(shift_num), n_samples, root.child_seed(0));
  out.den_mc = mc_expectation_std_normal(power(shift_den), n_samples, root.child_seed(1));
  return out;
}

inline McCrossCheck mc_check_at(int t, const BoundedQueryParams& q, const AtNoise& noise,
                                double rho, std::size_t n_samples, std::uint64_t seed,
                                const QuadratureConfig& cfg = {}) {
  if (t < 1) {
    throw DomainError("mc_check_at: requires t >= 1");
  }
  validate(q);
  validate(noise);
  if (!std::isfinite(rho)) {
    throw DomainError("mc_check_at: rho must be finite");
  }
  const double k = noise.sigma_x / noise.sigma_z;
  const double m = static_cast<double>(t - 1);
  auto side = [&](double shift) {
    const double c1 = (rho - q.b + shift) / noise.sigma_z;
    const double c2 = (q.a - rho + shift) / noise.sigma_z;
    return std::pair<double, std::function<double(double)>>{
        detail::log_threshold_transcript_expectation(k, c1, c2, t, cfg),
        [k, m, c1, c2](double x) {
          return std::exp(m * log_gaussian_cdf(k * x + c1).log() +
                          log_gaussian_cdf(-k * x + c2).log());
        }};
  };
  const auto num = side(q.delta_sens);
  const auto den = side(0.0);
  McCrossCheck out;
  out.log_num_quad = num.first;
  out.log_den_quad = den.first;
  SequentialRng root(seed);
  out.num_mc = mc_expectation_std_normal(num.second, n_samples, root.child_seed(0));
  out.den_mc = mc_expectation_std_normal(den.second, n_samples, root.child_seed(1));
  return out;
}

// Repeated sampling estimates of the argmax bound, for studying estimator
// spread at a given sample size.
inline std::vector<double> mc_epsilon_trials_rnm(int d, const BoundedQueryParams& q,
                                                 const RnmNoise& noise, std::size_t n_samples,
                                                 std::size_t n_trials, std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(n_trials);
  SequentialRng root(seed);
  for (std::size_t j = 0; j < n_trials; ++j) {
    const McCrossCheck chk = mc_check_rnm(d, q, noise, n_samples, root.child_seed(j));
    out.push_back(chk.epsilon_mc());
  }
  return out;
}

struct OfflineRow {
  double sigma = 0.0;
  // Per-candidate analysis of the Gaussian arm and the vector-sensitivity
  // analysis of the same arm; the alternatives run at the former.
  double eps_pure = 0.0;
  double eps_classical = 0.0;
  double acc_gaussian = 0.0;
  double acc_laplace = 0.0;
  double acc_exponential = 0.0;
  double acc_permute_flip = 0.0;
};

// One-shot selection of the busiest day. Every arm is scored at the same
// pure-DP level: the Gaussian arm's own tight epsilon at that sigma.
inline std::vector<OfflineRow> run_offline_experiment(const SeriesDataset& ds,
                                                      const std::vector<double>& sigma_grid,
                                                      double delta, std::size_t n_trials,
                                                      std::uint64_t seed,
                                                      const QuadratureConfig& cfg = {}) {
  if (ds.values.size() < 2) {
    throw DataError("need at least two days to select over");
  }
  if (n_trials == 0) {
    throw DomainError("n_trials must be positive");
  }
  const int d = static_cast<int>(ds.values.size());
  const BoundedQueryParams q{0.0, 1.0, ds.delta_sens};
  std::vector<OfflineRow> rows;
  SequentialRng root(seed);
  for (std::size_t si = 0; si < sigma_grid.size(); ++si) {
    const double sigma = sigma_grid[si];
    OfflineRow row;
    row.sigma = sigma;
    row.eps_pure = rnm_pure_epsilon(d, q, RnmNoise{sigma}, cfg);
    row.eps_classical = classical_rnm_epsilon(d, ds.delta_sens, sigma, delta).epsilon;
    SequentialRng arm_gauss(root.child_seed(4 * si));
    SequentialRng arm_lap(root.child_seed(4 * si + 1));
    SequentialRng arm_exp(root.child_seed(4 * si + 2));
    SequentialRng arm_pf(root.child_seed(4 * si + 3));
    double acc_g = 0.0, acc_l = 0.0, acc_e = 0.0, acc_p = 0.0;
    for (std::size_t j = 0; j < n_trials; ++j) {
      acc_g += selection_accuracy(ds.values, run_rnm_gaussian(ds.values, sigma, arm_gauss));
      acc_l += selection_accuracy(
          ds.values, run_rnm_laplace(ds.values, row.eps_pure, ds.delta_sens, arm_lap));
      acc_e += selection_accuracy(
          ds.values, exponential_mechanism(ds.values, row.eps_pure, ds.delta_sens, arm_exp));
      acc_p += selection_accuracy(
          ds.values, permute_and_flip(ds.values, row.eps_pure, ds.delta_sens, arm_pf));
    }
    const double n = static_cast<double>(n_trials);
    row.acc_gaussian = acc_g / n;
    row.acc_laplace = acc_l / n;
    row.acc_exponential = acc_e / n;
    row.acc_permute_flip = acc_p / n;
    rows.push_back(row);
  }
  return rows;
}

struct OnlineRow {
  double sigma_x = 0.0;
  double epsilon_max = 0.0;
  double f1_adaptive = 0.0;
  double f1_baseline = 0.0;
  double spend_adaptive = 0.0;
  double spend_baseline = 0.0;
  double halted_adaptive = 0.0;
  double halted_baseline = 0.0;
};

// Streaming release of above-threshold days under one budget, adaptive
// charging versus worst-case booking. Trial i hands the same seed to both
// strategies, so they face identical noise and any metric gap comes from the
// budgeting alone. F1 is scored against the noiseless threshold rule.
inline std::vector<OnlineRow> run_online_experiment(const SeriesDataset& ds, double rho,
                                                    double epsilon_budget, double delta,
                                                    const std::vector<double>& sigma_x_grid,
                                                    std::size_t n_trials, std::uint64_t seed,
                                                    const QuadratureConfig& cfg = {}) {
  if (n_trials == 0) {
    throw DomainError("n_trials must be positive");
  }
  std::vector<bool> truth(ds.values.size());
  for (std::size_t i = 0; i < ds.values.size(); ++i) {
    truth[i] = ds.values[i] >= rho;
  }
  FsrcParams params;
  params.query = BoundedQueryParams{0.0, 1.0, ds.delta_sens};
  params.rho = rho;
  params.epsilon_budget = epsilon_budget;
  params.per_mechanism_delta = delta;
  std::vector<OnlineRow> rows;
  SequentialRng root(seed);
  for (double sx : sigma_x_grid) {
    const AtNoise noise{sx, sx * std::sqrt(3.0)};
    OnlineRow row;
    row.sigma_x = sx;
    row.epsilon_max = fsrc_epsilon_max(params, noise);
    for (std::size_t j = 0; j < n_trials; ++j) {
      const std::uint64_t trial_seed = root.child_seed(j);
      const FsrcOutcome a = fsrc_run(ds.values, params, noise, trial_seed, cfg);
      const FilterBaselineOutcome b =
          filtered_composition_baseline(ds.values, params, noise, trial_seed, cfg);
      auto mask = [&](const std::vector<std::size_t>& released) {
        std::vector<bool> m(ds.values.size(), false);
        for (std::size_t idx : released) {
          m[idx] = true;
        }
        return m;
      };
      row.f1_adaptive += f1_score(mask(a.released), truth);
      row.f1_baseline += f1_score(mask(b.released), truth);
      row.spend_adaptive += a.total_spent;
      row.spend_baseline += b.total_spent;
      row.halted_adaptive += a.halted ? 1.0 : 0.0;
      row.halted_baseline += b.halted ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(n_trials);
    row.f1_adaptive /= n;
    row.f1_baseline /= n;
    row.spend_adaptive /= n;
    row.spend_baseline /= n;
    row.halted_adaptive /= n;
    row.halted_baseline /= n;
    rows.push_back(row);
  }
  return rows;
}

struct HeatmapRow {
  double sigma_x = 0.0;
  double rho = 0.0;
  std::size_t t = 0;
  double eps_max = 0.0;
  double eps_expost = 0.0;
  // Budget recovered when a run stops at t instead of being booked at the
  // cap. Negative values mean late stops that cost more than the cap.
  double savings = 0.0;
  double stop_median = 0.0;
  double stop_p80 = 0.0;
};

// Realized-charge map over noise scale, stop time, and threshold, with
// worst-case stop-time quantiles attached to every (sigma_x, rho) pair. The
// stopping simulation reuses one base seed, so rho sweeps are paired.
inline std::vector<HeatmapRow> run_heatmap(double delta_sens, double delta,
                                           const std::vector<double>& sigma_x_grid,
                                           const std::vector<std::size_t>& t_grid,
                                           const std::vector<double>& rho_grid,
                                           std::size_t sim_trials, std::size_t sim_max_steps,
                                           std::uint64_t seed,
                                           const QuadratureConfig& cfg = {}) {
  const BoundedQueryParams q{0.0, 1.0, delta_sens};
  std::vector<HeatmapRow> rows;
  for (double sx : sigma_x_grid) {
    const AtNoise noise{sx, sx * std::sqrt(3.0)};
    for (double rho : rho_grid) {
      FsrcParams params;
      params.query = q;
      params.rho = rho;
      params.epsilon_budget = 1.0;
      params.per_mechanism_delta = delta;
      const double eps_max = fsrc_epsilon_max(params, noise);
      const StoppingQuantiles sq =
          simulate_worst_case_stopping(sim_max_steps, rho, noise, sim_trials, seed);
      for (std::size_t t : t_grid) {
        HeatmapRow row;
        row.sigma_x = sx;
        row.rho = rho;
        row.t = t;
        row.eps_max = eps_max;
        row.eps_expost = at_expost_epsilon(static_cast<int>(t), q, noise, rho, cfg);
        row.savings = row.eps_max - row.eps_expost;
        row.stop_median = sq.median;
        row.stop_p80 = sq.p80;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace dpsel

#endif  // DPSEL_EXPERIMENTS_HPP_
