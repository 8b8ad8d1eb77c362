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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "dpsel/errors.hpp"
#include "dpsel/rng.hpp"
#include "dpsel/summation.hpp"

namespace dpsel {

// Two-sided 99% normal quantile, for the confidence interval below.
inline constexpr double kZ99 = 2.5758293035489008;

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double ci99_low = 0.0;
  double ci99_high = 0.0;
  std::uint64_t n_samples = 0;
};

namespace detail {

struct McPartial {
  CompensatedSum sum;
  CompensatedSum sum_sq;
};

}  // namespace detail

// Plain Monte Carlo estimate of E_{z ~ N(0,1)}[f(z)] for f with values in
// [0, 1]. Sample i is a pure function of (seed, i), and per-block partial
// sums are merged in block order, so the result is bit-identical for any
// thread count or scheduling.
template <class F>
McEstimate mc_expectation_std_normal(F&& f, std::uint64_t n_samples, std::uint64_t seed,
                                     int n_threads = 0) {
  if (n_samples < 1000) throw DomainError("mc_expectation_std_normal: n_samples must be >= 1000");
  const std::uint64_t key = derive_stream_key(seed, 0);

  constexpr std::uint64_t kBlock = 1u << 20;
  const std::uint64_t n_blocks = (n_samples + kBlock - 1) / kBlock;
  std::vector<detail::McPartial> partials(n_blocks);

  std::atomic<bool> bad_value{false};
  std::atomic<std::uint64_t> next_block{0};
  auto worker = [&] {
    for (;;) {
      const std::uint64_t b = next_block.fetch_add(1);
      if (b >= n_blocks || bad_value.load(std::memory_order_relaxed)) return;
      const std::uint64_t begin = b * kBlock;
      const std::uint64_t end = std::min(begin + kBlock, n_samples);
      detail::McPartial part;
      for (std::uint64_t i = begin; i < end; ++i) {
        const double v = f(counter_normal(key, i));
        if (!(v >= 0.0 && v <= 1.0)) {
          bad_value.store(true, std::memory_order_relaxed);
          return;
        }
        part.sum.add(v);
        part.sum_sq.add(v * v);
      }
      partials[b] = part;
    }
  };

  int threads = n_threads > 0 ? n_threads : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (bad_value.load()) {
    throw DomainError("mc_expectation_std_normal: integrand value outside [0, 1]");
  }

  CompensatedSum total, total_sq;
  for (const auto& p : partials) {
    total.merge(p.sum);
    total_sq.merge(p.sum_sq);
  }

  McEstimate est;
  est.n_samples = n_samples;
  const double n = static_cast<double>(n_samples);
  est.mean = total.total() / n;
  const double var_num = total_sq.total() - n * est.mean * est.mean;
  const double sample_var = var_num > 0.0 ? var_num / (n - 1.0) : 0.0;
  est.std_error = std::sqrt(sample_var / n);
  est.ci99_low = est.mean - kZ99 * est.std_error;
  est.ci99_high = est.mean + kZ99 * est.std_error;
  return est;
}

}  // namespace dpsel
