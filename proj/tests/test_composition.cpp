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

#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "dpsel/composition.hpp"

using dpsel::AtNoise;
using dpsel::BoundedQueryParams;
using dpsel::FilterState;
using dpsel::FsrcOutcome;
using dpsel::FsrcParams;
using dpsel::at_expost_epsilon;
using dpsel::filter_admits;
using dpsel::filter_bound;
using dpsel::filter_max_runs;
using dpsel::filtered_composition_baseline;
using dpsel::fsrc_epsilon_max;
using dpsel::fsrc_run;

namespace {

// Margin of one between query and threshold against tiny noise scales makes
// every comparison outcome deterministic in practice.
const AtNoise kSharpNoise{0.05, 0.1};

FsrcParams hot_params(double budget) {
  FsrcParams p;
  p.query = BoundedQueryParams{0.0, 1.0, 0.01};
  p.rho = 0.0;
  p.epsilon_budget = budget;
  p.per_mechanism_delta = 1e-5;
  return p;
}

}  // namespace

TEST_CASE("budgeted scans on an always-firing stream spend one step per run") {
  FsrcParams p = hot_params(1.0);
  const double eps_max = fsrc_epsilon_max(p, kSharpNoise);
  const double eps1 = at_expost_epsilon(1, p.query, kSharpNoise, p.rho);
  p.epsilon_budget = eps_max + 5.5 * eps1;
  const std::vector<double> stream(100, 1.0);
  const FsrcOutcome out = fsrc_run(stream, p, kSharpNoise, 97);
  CHECK(out.epsilon_max == eps_max);
  CHECK(out.runs.size() == 6);
  CHECK(out.halted);
  CHECK(out.restarts == 5);
  REQUIRE(out.released.size() == 6);
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    CHECK(out.runs[i].start == i);
    CHECK(out.runs[i].transcript_len == 1);
    CHECK(out.runs[i].fired);
    CHECK(out.runs[i].charged == eps1);
    CHECK(out.released[i] == i);
  }
  CHECK(out.total_spent == Catch::Approx(6.0 * eps1).epsilon(1e-12));
}

TEST_CASE("a budget below the per-run cap admits nothing") {
  FsrcParams p = hot_params(1.0);
  const double eps_max = fsrc_epsilon_max(p, kSharpNoise);
  p.epsilon_budget = 0.5 * eps_max;
  const FsrcOutcome out = fsrc_run(std::vector<double>(10, 1.0), p, kSharpNoise, 3);
  CHECK(out.halted);
  CHECK(out.runs.empty());
  CHECK(out.released.empty());
  CHECK(out.total_spent == 0.0);
}

TEST_CASE("a stream that never fires is charged one virtual extra step") {
  FsrcParams p;
  p.query = BoundedQueryParams{0.0, 1.0, 0.01};
  p.rho = 1.0;
  p.per_mechanism_delta = 1e-5;
  p.epsilon_budget = 2.0 * fsrc_epsilon_max(p, kSharpNoise);
  const std::vector<double> stream(8, 0.0);
  const FsrcOutcome out = fsrc_run(stream, p, kSharpNoise, 5);
  REQUIRE(out.runs.size() == 1);
  CHECK_FALSE(out.halted);
  CHECK_FALSE(out.runs[0].fired);
  CHECK(out.runs[0].transcript_len == 8);
  CHECK(out.runs[0].charged ==
        Catch::Approx(at_expost_epsilon(9, p.query, kSharpNoise, p.rho)).epsilon(1e-12));
  CHECK(out.released.empty());
}

TEST_CASE("empty streams produce empty outcomes") {
  FsrcParams p = hot_params(5.0);
  const FsrcOutcome out = fsrc_run({}, p, kSharpNoise, 1);
  CHECK(out.runs.empty());
  CHECK_FALSE(out.halted);
  CHECK(out.total_spent == 0.0);
}

TEST_CASE("outcomes replay identically from the same seed") {
  FsrcParams p = hot_params(3.0);
  const std::vector<double> stream{0.9, 0.1, 0.8, 0.2, 0.95, 0.0, 0.7};
  const FsrcOutcome a = fsrc_run(stream, p, kSharpNoise, 123);
  const FsrcOutcome b = fsrc_run(stream, p, kSharpNoise, 123);
  REQUIRE(a.runs.size() == b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    CHECK(a.runs[i].start == b.runs[i].start);
    CHECK(a.runs[i].transcript_len == b.runs[i].transcript_len);
    CHECK(a.runs[i].fired == b.runs[i].fired);
    CHECK(a.runs[i].charged == b.runs[i].charged);
  }
  CHECK(a.released == b.released);
  CHECK(a.total_spent == b.total_spent);
}

TEST_CASE("randomized short-stream runs respect the admission gate throughout") {
  for (std::uint64_t trial = 0; trial < 60; ++trial) {
    dpsel::SequentialRng cfg_rng(trial + 1000);
    FsrcParams p;
    p.query = BoundedQueryParams{0.0, 1.0, cfg_rng.uniform() < 0.5 ? 1e-3 : 0.01};
    p.rho = cfg_rng.uniform();
    p.per_mechanism_delta = 1e-5;
    const double sx = 0.05 + 0.15 * cfg_rng.uniform();
    const AtNoise noise{sx, sx * std::sqrt(3.0) * (1.0 + cfg_rng.uniform())};
    const double eps_max = fsrc_epsilon_max(p, noise);
    std::size_t len = 1 + static_cast<std::size_t>(cfg_rng.uniform() * 6.0);
    // Keep the stream short enough that even the worst realizable charge
    // fits inside the reservation the gate holds back.
    while (len > 1 &&
           at_expost_epsilon(len + 1, p.query, noise, p.rho) > eps_max) {
      --len;
    }
    REQUIRE(at_expost_epsilon(len + 1, p.query, noise, p.rho) <= eps_max);
    p.epsilon_budget = eps_max * (1.0 + 3.0 * cfg_rng.uniform());
    std::vector<double> stream(len);
    for (double& q : stream) {
      q = cfg_rng.uniform();
    }
    const FsrcOutcome out = fsrc_run(stream, p, noise, trial * 77 + 5);
    double before = 0.0;
    for (const auto& run : out.runs) {
      CHECK(before + eps_max < p.epsilon_budget);
      before += run.charged;
    }
    CHECK(out.total_spent < p.epsilon_budget);
    for (std::size_t i = 0; i + 1 < out.runs.size(); ++i) {
      CHECK(out.runs[i].fired);
    }
    for (std::size_t idx : out.released) {
      CHECK(idx < stream.size());
    }
  }
}

TEST_CASE("filter admission matches a hand-computed boundary") {
  FilterState state;
  state.budget_epsilon = 2.0;
  state.budget_delta = 0.0;
  state.delta_prime = std::exp(-1.0);
  // One unit charge composes to sqrt(2) + 0.5 < 2; two compose to 3 > 2.
  CHECK(filter_admits(state, 1.0, 0.0));
  state.eps_history.push_back(1.0);
  state.delta_history.push_back(0.0);
  CHECK(filter_bound(state) == Catch::Approx(std::sqrt(2.0) + 0.5).epsilon(1e-15));
  CHECK_FALSE(filter_admits(state, 1.0, 0.0));
  CHECK(filter_max_runs(2.0, std::exp(-1.0), 1.0) == 1);
  CHECK(filter_max_runs(1.9, std::exp(-1.0), 1.0) == 0);
}

TEST_CASE("filter delta budget is enforced on the summed history") {
  FilterState state;
  state.budget_epsilon = 100.0;
  state.budget_delta = 1e-6;
  state.delta_prime = 1e-5;
  CHECK_FALSE(filter_admits(state, 0.1, 2e-6));
  CHECK(filter_admits(state, 0.1, 0.5e-6));
  state.eps_history.push_back(0.1);
  state.delta_history.push_back(0.5e-6);
  CHECK_FALSE(filter_admits(state, 0.1, 0.6e-6));
  CHECK(filter_admits(state, 0.1, 0.5e-6));
}

TEST_CASE("closed-form run count agrees with step-by-step admission") {
  struct Triple {
    double eps, delta_prime, per_run;
  };
  const Triple triples[] = {
      {3.0, 1e-5, 0.5},  {1.0, 0.3, 2.0},    {10.0, 1e-2, 0.05}, {0.5, 1e-6, 0.01},
      {2.5, 1e-3, 0.31}, {7.0, 1e-4, 0.013}, {1.2, 0.05, 0.4},   {4.0, 1e-8, 1.1},
  };
  for (const auto& t : triples) {
    FilterState state;
    state.budget_epsilon = t.eps;
    state.budget_delta = 0.0;
    state.delta_prime = t.delta_prime;
    std::size_t by_iteration = 0;
    while (filter_admits(state, t.per_run, 0.0)) {
      state.eps_history.push_back(t.per_run);
      state.delta_history.push_back(0.0);
      ++by_iteration;
      REQUIRE(by_iteration < 2000000);
    }
    INFO("eps=" << t.eps << " delta'=" << t.delta_prime << " per_run=" << t.per_run);
    CHECK(filter_max_runs(t.eps, t.delta_prime, t.per_run) == by_iteration);
  }
}

TEST_CASE("baseline runs pair with the adaptive strategy run for run") {
  FsrcParams p = hot_params(1.0);
  const double eps_max = fsrc_epsilon_max(p, kSharpNoise);
  p.epsilon_budget = 8.0 * eps_max;
  const std::vector<double> stream(4, 1.0);
  const FsrcOutcome adaptive = fsrc_run(stream, p, kSharpNoise, 55);
  const auto baseline = filtered_composition_baseline(stream, p, kSharpNoise, 55);
  CHECK(baseline.per_run_epsilon == eps_max);
  REQUIRE(baseline.runs.size() >= 1);
  const std::size_t shared = std::min(adaptive.runs.size(), baseline.runs.size());
  for (std::size_t i = 0; i < shared; ++i) {
    CHECK(adaptive.runs[i].start == baseline.runs[i].start);
    CHECK(adaptive.runs[i].transcript_len == baseline.runs[i].transcript_len);
    CHECK(adaptive.runs[i].fired == baseline.runs[i].fired);
  }
  // Realized one-step charges are orders of magnitude below the booked cap,
  // so the adaptive strategy finishes the stream and still reports less
  // spend than the worst-case booking for its shorter prefix.
  CHECK_FALSE(adaptive.halted);
  CHECK(adaptive.released.size() == stream.size());
  CHECK(adaptive.released.size() >= baseline.released.size());
  CHECK(adaptive.total_spent < baseline.total_spent);
}

TEST_CASE("baseline books the composed bound of its performed runs") {
  FsrcParams p = hot_params(1.0);
  const double eps_max = fsrc_epsilon_max(p, kSharpNoise);
  p.epsilon_budget = 6.0 * eps_max;
  const auto baseline =
      filtered_composition_baseline(std::vector<double>(500, 1.0), p, kSharpNoise, 9);
  CHECK(baseline.halted);
  const std::size_t n = baseline.runs.size();
  CHECK(n == filter_max_runs(p.epsilon_budget, p.per_mechanism_delta, eps_max));
  const double s = static_cast<double>(n) * eps_max * eps_max;
  const double want = std::sqrt(2.0 * std::log(1.0 / p.per_mechanism_delta) * s) + 0.5 * s;
  CHECK(baseline.total_spent == Catch::Approx(want).epsilon(1e-12));
  CHECK(baseline.total_spent <= p.epsilon_budget);
}

TEST_CASE("composition parameter validation raises domain errors") {
  FsrcParams p = hot_params(1.0);
  p.rho = -0.1;
  CHECK_THROWS_AS(fsrc_run({1.0}, p, kSharpNoise, 1), dpsel::DomainError);
  p = hot_params(0.0);
  CHECK_THROWS_AS(fsrc_run({1.0}, p, kSharpNoise, 1), dpsel::DomainError);
  p = hot_params(1.0);
  p.per_mechanism_delta = 1.0;
  CHECK_THROWS_AS(fsrc_run({1.0}, p, kSharpNoise, 1), dpsel::DomainError);
  FilterState state;
  state.budget_epsilon = 1.0;
  state.budget_delta = 0.0;
  state.delta_prime = 0.0;
  CHECK_THROWS_AS(filter_admits(state, 0.1, 0.0), dpsel::DomainError);
  CHECK_THROWS_AS(filter_max_runs(1.0, 1e-5, 0.0), dpsel::DomainError);
}
