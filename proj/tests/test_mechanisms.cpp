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

#include "dpsel/mechanisms.hpp"
#include "dpsel/normal.hpp"

using dpsel::AtNoise;
using dpsel::AtResult;
using dpsel::SequentialRng;
using dpsel::exponential_mechanism;
using dpsel::gaussian_cdf;
using dpsel::permute_and_flip;
using dpsel::run_above_threshold;
using dpsel::run_rnm_gaussian;
using dpsel::run_rnm_laplace;
using dpsel::simulate_worst_case_stopping;

namespace {

double binomial_3se(double p, double n) { return 3.0 * std::sqrt(p * (1.0 - p) / n); }

}  // namespace

TEST_CASE("zero noise returns the argmax with lowest-index ties") {
  SequentialRng rng(1);
  CHECK(run_rnm_gaussian({0.3, 0.9, 0.9, 0.1}, 0.0, rng) == 1);
  CHECK(run_rnm_gaussian({-2.0, -5.0}, 0.0, rng) == 0);
  CHECK(run_rnm_gaussian({7.0}, 0.0, rng) == 0);
}

TEST_CASE("equal scores select uniformly under Gaussian noise") {
  const std::size_t d = 5;
  const std::size_t n = 100000;
  std::vector<std::size_t> counts(d, 0);
  SequentialRng rng(7);
  for (std::size_t i = 0; i < n; ++i) {
    counts[run_rnm_gaussian(std::vector<double>(d, 0.4), 1.0, rng)] += 1;
  }
  double chi2 = 0.0;
  const double expected = static_cast<double>(n) / d;
  for (std::size_t c : counts) {
    const double dev = static_cast<double>(c) - expected;
    chi2 += dev * dev / expected;
  }
  // 1% critical value of chi-squared with 4 degrees of freedom.
  CHECK(chi2 < 13.2767);
}

TEST_CASE("two-candidate Gaussian selection matches the closed-form win rate") {
  const double c = 0.3, sigma = 0.5;
  const std::size_t n = 100000;
  std::size_t wins = 0;
  SequentialRng rng(11);
  for (std::size_t i = 0; i < n; ++i) {
    wins += run_rnm_gaussian({0.0, c}, sigma, rng) == 1 ? 1 : 0;
  }
  const double p = gaussian_cdf(c / (sigma * dpsel::kSqrt2));
  CHECK(std::abs(static_cast<double>(wins) / n - p) < binomial_3se(p, n));
}

TEST_CASE("Laplace selection at huge epsilon reduces to the argmax") {
  SequentialRng rng(3);
  for (int i = 0; i < 200; ++i) {
    CHECK(run_rnm_laplace({0.1, 0.7, 0.4}, 1e6, 0.1, rng) == 1);
  }
}

TEST_CASE("exponential mechanism reproduces the two-outcome logistic odds") {
  const std::size_t n = 100000;
  std::size_t ones = 0;
  SequentialRng rng(5);
  for (std::size_t i = 0; i < n; ++i) {
    ones += exponential_mechanism({0.0, 0.5}, 2.0, 0.5, rng) == 1 ? 1 : 0;
  }
  const double p = 1.0 / (1.0 + std::exp(-1.0));
  CHECK(std::abs(static_cast<double>(ones) / n - p) < binomial_3se(p, n));

  std::size_t top = 0;
  for (std::size_t i = 0; i < 2000; ++i) {
    top += exponential_mechanism({0.0, 0.5, 0.2}, 200.0, 0.5, rng) == 1 ? 1 : 0;
  }
  CHECK(static_cast<double>(top) / 2000.0 >= 0.999);
}

TEST_CASE("permute-and-flip two-candidate law matches enumeration") {
  // With scores {q0, q1}, q1 larger, the lower item is returned only when the
  // permutation tries it first and its coin accepts: P(0) = accept0 / 2.
  const std::size_t n = 100000;
  std::size_t lows = 0;
  SequentialRng rng(13);
  for (std::size_t i = 0; i < n; ++i) {
    lows += permute_and_flip({0.0, 0.5}, 2.0, 0.5, rng) == 0 ? 1 : 0;
  }
  const double p = 0.5 * std::exp(-1.0);
  CHECK(std::abs(static_cast<double>(lows) / n - p) < binomial_3se(p, n));
}

TEST_CASE("single-query scan fires at the convolved-noise rate") {
  const double rho = 0.3;
  const AtNoise noise{0.2, 0.4};
  const std::size_t n = 100000;
  std::size_t fired = 0;
  SequentialRng root(17);
  for (std::size_t i = 0; i < n; ++i) {
    SequentialRng rng(root.child_seed(i));
    fired += run_above_threshold({0.0}, rho, noise, rng).fired ? 1 : 0;
  }
  const double s = std::sqrt(noise.sigma_x * noise.sigma_x + noise.sigma_z * noise.sigma_z);
  const double p = gaussian_cdf(-rho / s);
  CHECK(std::abs(static_cast<double>(fired) / n - p) < binomial_3se(p, n));
}

TEST_CASE("scan transcripts end in the only positive answer") {
  SequentialRng rng(19);
  const std::vector<double> stream(50, 0.2);
  const AtResult r = run_above_threshold(stream, 0.4, AtNoise{0.1, 0.2}, rng);
  CHECK(r.transcript_len == r.answers.size());
  if (r.fired) {
    CHECK(r.answers.back());
    for (std::size_t i = 0; i + 1 < r.answers.size(); ++i) {
      CHECK_FALSE(r.answers[i]);
    }
  } else {
    CHECK(r.transcript_len == stream.size());
    for (bool a : r.answers) {
      CHECK_FALSE(a);
    }
  }
}

TEST_CASE("scan on an unreachable threshold exhausts the stream") {
  SequentialRng rng(23);
  const AtResult r = run_above_threshold(std::vector<double>(10, 0.0), 50.0,
                                         AtNoise{0.1, 0.2}, rng);
  CHECK_FALSE(r.fired);
  CHECK(r.transcript_len == 10);
}

TEST_CASE("scan runs are reproducible from the seed") {
  const std::vector<double> stream(30, 0.35);
  AtResult a, b;
  {
    SequentialRng rng(29);
    a = run_above_threshold(stream, 0.4, AtNoise{0.15, 0.3}, rng);
  }
  {
    SequentialRng rng(29);
    b = run_above_threshold(stream, 0.4, AtNoise{0.15, 0.3}, rng);
  }
  CHECK(a.fired == b.fired);
  CHECK(a.answers == b.answers);
}

TEST_CASE("worst-case stop time collapses to one for very low thresholds") {
  const auto q = simulate_worst_case_stopping(64, -10.0, AtNoise{0.3, 0.6}, 500, 31);
  CHECK(q.median == 1.0);
  CHECK(q.p80 == 1.0);
}

TEST_CASE("worst-case stop quantiles are deterministic and monotone in rho") {
  const AtNoise noise{0.15, 0.15 * std::sqrt(3.0)};
  const auto a = simulate_worst_case_stopping(4096, 0.4, noise, 2000, 37);
  const auto b = simulate_worst_case_stopping(4096, 0.4, noise, 2000, 37);
  CHECK(a.median == b.median);
  CHECK(a.p80 == b.p80);
  double prev_median = 0.0;
  double prev_p80 = 0.0;
  for (double rho : {0.2, 0.4, 0.6}) {
    const auto q = simulate_worst_case_stopping(4096, rho, noise, 2000, 37);
    CHECK(q.median >= prev_median);
    CHECK(q.p80 >= prev_p80);
    prev_median = q.median;
    prev_p80 = q.p80;
  }
}

TEST_CASE("mechanism preconditions raise domain errors") {
  SequentialRng rng(41);
  CHECK_THROWS_AS(run_rnm_gaussian({}, 1.0, rng), dpsel::DomainError);
  CHECK_THROWS_AS(run_rnm_gaussian({0.0, std::nan("")}, 1.0, rng), dpsel::DomainError);
  CHECK_THROWS_AS(run_rnm_gaussian({0.0}, -1.0, rng), dpsel::DomainError);
  CHECK_THROWS_AS(run_rnm_laplace({0.0}, 0.0, 0.1, rng), dpsel::DomainError);
  CHECK_THROWS_AS(exponential_mechanism({0.0}, 1.0, 0.0, rng), dpsel::DomainError);
  CHECK_THROWS_AS(permute_and_flip({0.0}, -2.0, 0.1, rng), dpsel::DomainError);
  CHECK_THROWS_AS(run_above_threshold({0.0}, std::nan(""), AtNoise{0.1, 0.2}, rng),
                  dpsel::DomainError);
  CHECK_THROWS_AS(run_above_threshold({0.0}, 0.5, AtNoise{0.1, 0.0}, rng), dpsel::DomainError);
  CHECK_THROWS_AS(simulate_worst_case_stopping(0, 0.5, AtNoise{0.1, 0.2}, 10, 1),
                  dpsel::DomainError);
  CHECK_THROWS_AS(simulate_worst_case_stopping(8, 0.5, AtNoise{0.1, 0.2}, 0, 1),
                  dpsel::DomainError);
}
