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

#ifndef DPSEL_COMPOSITION_HPP_
#define DPSEL_COMPOSITION_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "dpsel/bounds.hpp"
#include "dpsel/errors.hpp"
#include "dpsel/mechanisms.hpp"
#include "dpsel/rng.hpp"
#include "dpsel/summation.hpp"

namespace dpsel {

struct FsrcParams {
  BoundedQueryParams query;
  double rho = 0.0;
  double epsilon_budget = 0.0;
  double per_mechanism_delta = 0.0;
};

// Checks the fields that define the per-run mechanism; the budget is only
// needed once runs compose.
inline void validate_mechanism_config(const FsrcParams& p) {
  validate(p.query);
  if (!(p.rho >= 0.0) || !std::isfinite(p.rho)) {
    throw DomainError("rho must be nonnegative and finite");
  }
  if (!(p.per_mechanism_delta > 0.0) || !(p.per_mechanism_delta < 1.0)) {
    throw DomainError("per_mechanism_delta must lie in (0, 1)");
  }
}

inline void validate(const FsrcParams& p) {
  validate_mechanism_config(p);
  if (!(p.epsilon_budget > 0.0) || !std::isfinite(p.epsilon_budget)) {
    throw DomainError("epsilon_budget must be positive and finite");
  }
}

struct CompositionRunRecord {
  std::size_t start = 0;
  std::size_t transcript_len = 0;
  bool fired = false;
  double charged = 0.0;
};

struct FsrcOutcome {
  std::vector<CompositionRunRecord> runs;
  // Stream positions where a run halted on a noisy exceedance.
  std::vector<std::size_t> released;
  // Worst-case charge of one future run; the amount the admission gate
  // reserves before letting a run start.
  double epsilon_max = 0.0;
  double total_spent = 0.0;
  bool halted = false;
  std::size_t restarts = 0;
};

namespace detail {

// Stop-time charges recur across runs, so cache them per transcript length.
class ExPostChargeTable {
 public:
  ExPostChargeTable(const BoundedQueryParams& query, const AtNoise& noise, double rho,
                    const QuadratureConfig& cfg)
      : query_(query), noise_(noise), rho_(rho), cfg_(cfg) {}

  double operator()(std::size_t t) {
    auto it = cache_.find(t);
    if (it != cache_.end()) {
      return it->second;
    }
    const double eps = at_expost_epsilon(t, query_, noise_, rho_, cfg_);
    cache_.emplace(t, eps);
    return eps;
  }

 private:
  BoundedQueryParams query_;
  AtNoise noise_;
  double rho_;
  QuadratureConfig cfg_;
  std::map<std::size_t, double> cache_;
};

}  // namespace detail

// Per-run privacy cap used by both composition strategies: the Renyi curve of
// one full threshold scan converted at the per-mechanism delta.
inline double fsrc_epsilon_max(const FsrcParams& params, const AtNoise& noise) {
  validate_mechanism_config(params);
  const auto curve = rdp_gaussian_at(params.query.delta_sens, noise, params.rho);
  return rdp_to_pdp(curve, params.per_mechanism_delta).guarantee.epsilon;
}

// Repeated threshold scans under a shared budget. A run is admitted only
// while the spend so far plus the worst-case charge of one more run stays
// below the budget; admitted runs are then charged their realized stop-time
// cost, which is what makes early stops cheap. A run cut off by the end of
// the stream is charged as if it had fired one step later, which dominates
// its realized cost.
inline FsrcOutcome fsrc_run(const std::vector<double>& stream, const FsrcParams& params,
                            const AtNoise& noise, std::uint64_t seed,
                            const QuadratureConfig& cfg = {}) {
  validate(params);
  validate(cfg);
  FsrcOutcome out;
  out.epsilon_max = fsrc_epsilon_max(params, noise);
  detail::ExPostChargeTable charge(params.query, noise, params.rho, cfg);
  SequentialRng root(seed);
  CompensatedSum spent;
  std::size_t pos = 0;
  while (pos < stream.size()) {
    if (spent.total() + out.epsilon_max >= params.epsilon_budget) {
      out.halted = true;
      break;
    }
    SequentialRng run_rng(root.child_seed(out.runs.size()));
    const std::vector<double> tail(stream.begin() + static_cast<std::ptrdiff_t>(pos),
                                   stream.end());
    const AtResult r = run_above_threshold(tail, params.rho, noise, run_rng);
    CompositionRunRecord rec;
    rec.start = pos;
    rec.transcript_len = r.transcript_len;
    rec.fired = r.fired;
    rec.charged = r.fired ? charge(r.transcript_len) : charge(r.transcript_len + 1);
    spent.add(rec.charged);
    out.runs.push_back(rec);
    if (r.fired) {
      out.released.push_back(pos + r.transcript_len - 1);
      pos += r.transcript_len;
    } else {
      pos = stream.size();
    }
  }
  out.total_spent = spent.total();
  out.restarts = out.runs.size() > 1 ? out.runs.size() - 1 : 0;
  return out;
}

struct FilterState {
  double budget_epsilon = 0.0;
  // Slack accepted on top of the tail-bound delta; per-run delta draws on it.
  double budget_delta = 0.0;
  double delta_prime = 0.0;
  std::vector<double> eps_history;
  std::vector<double> delta_history;
};

inline void validate(const FilterState& s) {
  if (!(s.budget_epsilon > 0.0) || !std::isfinite(s.budget_epsilon)) {
    throw DomainError("budget_epsilon must be positive and finite");
  }
  if (!(s.budget_delta >= 0.0) || !(s.budget_delta < 1.0)) {
    throw DomainError("budget_delta must lie in [0, 1)");
  }
  if (!(s.delta_prime > 0.0) || !(s.delta_prime < 1.0)) {
    throw DomainError("delta_prime must lie in (0, 1)");
  }
}

// Composed guarantee the filter assigns to the recorded charges.
inline double filter_bound(const FilterState& state) {
  CompensatedSum sq;
  for (double e : state.eps_history) {
    sq.add(e * e);
  }
  const double s = sq.total();
  if (s == 0.0) {
    return 0.0;
  }
  return std::sqrt(2.0 * std::log(1.0 / state.delta_prime) * s) + 0.5 * s;
}

// Admission rule: append the candidate charge to both histories and test the
// composed guarantee against the budgets. True means the run may proceed.
inline bool filter_admits(const FilterState& state, double next_eps, double next_delta) {
  validate(state);
  if (!(next_eps >= 0.0) || !std::isfinite(next_eps) || !(next_delta >= 0.0)) {
    throw DomainError("candidate charges must be nonnegative and finite");
  }
  CompensatedSum sq;
  for (double e : state.eps_history) {
    sq.add(e * e);
  }
  sq.add(next_eps * next_eps);
  const double s = sq.total();
  const double bound = std::sqrt(2.0 * std::log(1.0 / state.delta_prime) * s) + 0.5 * s;
  if (state.budget_epsilon < bound) {
    return false;
  }
  CompensatedSum ds;
  for (double d : state.delta_history) {
    ds.add(d);
  }
  ds.add(next_delta);
  return state.budget_delta >= ds.total();
}

// Largest number of identical-charge runs the filter admits. Solved from the
// quadratic in sqrt(n), then nudged so the answer agrees exactly with
// repeated filter_admits calls.
inline std::size_t filter_max_runs(double epsilon_budget, double delta_prime,
                                   double per_run_eps) {
  FilterState probe;
  probe.budget_epsilon = epsilon_budget;
  probe.budget_delta = 0.0;
  probe.delta_prime = delta_prime;
  validate(probe);
  if (!(per_run_eps > 0.0) || !std::isfinite(per_run_eps)) {
    throw DomainError("per_run_eps must be positive and finite");
  }
  const double big_l = std::log(1.0 / delta_prime);
  auto bound_at = [&](double n) {
    const double s = n * per_run_eps * per_run_eps;
    return std::sqrt(2.0 * big_l * s) + 0.5 * s;
  };
  const double a = 0.5 * per_run_eps * per_run_eps;
  const double b = std::sqrt(2.0 * big_l) * per_run_eps;
  const double root = (-b + std::sqrt(b * b + 4.0 * a * epsilon_budget)) / (2.0 * a);
  double n = std::max(0.0, std::floor(root * root));
  while (bound_at(n + 1.0) <= epsilon_budget) {
    n += 1.0;
  }
  while (n > 0.0 && bound_at(n) > epsilon_budget) {
    n -= 1.0;
  }
  return static_cast<std::size_t>(n);
}

struct FilterBaselineOutcome {
  std::vector<CompositionRunRecord> runs;
  std::vector<std::size_t> released;
  // Fixed worst-case charge booked for every run regardless of stop time.
  double per_run_epsilon = 0.0;
  // Composed guarantee of the booked charges, the number this strategy must
  // report as consumed.
  double total_spent = 0.0;
  bool halted = false;
  std::size_t restarts = 0;
};

// Same scans and the same per-run cap as fsrc_run, but composed through the
// filter with the cap booked up front for every run, so stop times do not
// affect the spend. Per-run delta is already folded into the cap's
// conversion, so runs contribute zero to the filter's delta sum. Run i draws
// the i-th child seed, matching fsrc_run, so the two strategies see
// identical noise until one of them halts.
inline FilterBaselineOutcome filtered_composition_baseline(const std::vector<double>& stream,
                                                           const FsrcParams& params,
                                                           const AtNoise& noise,
                                                           std::uint64_t seed,
                                                           const QuadratureConfig& cfg = {}) {
  validate(params);
  validate(cfg);
  FilterBaselineOutcome out;
  out.per_run_epsilon = fsrc_epsilon_max(params, noise);
  FilterState state;
  state.budget_epsilon = params.epsilon_budget;
  state.budget_delta = 0.0;
  state.delta_prime = params.per_mechanism_delta;
  SequentialRng root(seed);
  std::size_t pos = 0;
  while (pos < stream.size()) {
    if (!filter_admits(state, out.per_run_epsilon, 0.0)) {
      out.halted = true;
      break;
    }
    state.eps_history.push_back(out.per_run_epsilon);
    state.delta_history.push_back(0.0);
    SequentialRng run_rng(root.child_seed(out.runs.size()));
    const std::vector<double> tail(stream.begin() + static_cast<std::ptrdiff_t>(pos),
                                   stream.end());
    const AtResult r = run_above_threshold(tail, params.rho, noise, run_rng);
    CompositionRunRecord rec;
    rec.start = pos;
    rec.transcript_len = r.transcript_len;
    rec.fired = r.fired;
    rec.charged = out.per_run_epsilon;
    out.runs.push_back(rec);
    if (r.fired) {
      out.released.push_back(pos + r.transcript_len - 1);
      pos += r.transcript_len;
    } else {
      pos = stream.size();
    }
  }
  out.total_spent = filter_bound(state);
  out.restarts = out.runs.size() > 1 ? out.runs.size() - 1 : 0;
  return out;
}

}  // namespace dpsel

#endif  // DPSEL_COMPOSITION_HPP_
