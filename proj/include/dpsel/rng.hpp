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
#include <cstdint>

namespace dpsel {

// Counter-based generator built on the splitmix64 finalizer. A draw is a pure
// function of (key, counter), so parallel shards reproduce the identical
// stream no matter how work is scheduled, and transcripts are reproducible
// bit for bit across platforms (no libc distribution involved).

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t word_at(std::uint64_t key, std::uint64_t counter) {
  return mix64(key + (counter + 1) * kGolden);
}

}  // namespace detail

// Stream key for (seed, stream_index). Distinct indices give statistically
// independent streams under the same seed.
inline std::uint64_t derive_stream_key(std::uint64_t seed, std::uint64_t stream_index) {
  return detail::mix64(detail::mix64(seed) + stream_index * 0xD1B54A32D192ED03ULL);
}

// Uniform draw in (0, 1] so it is always a valid log argument.
inline double counter_uniform(std::uint64_t key, std::uint64_t counter) {
  return static_cast<double>((detail::word_at(key, counter) >> 11) + 1) * 0x1.0p-53;
}

// Standard normal via Box-Muller; consumes counters 2i and 2i+1 for draw i.
inline double counter_normal(std::uint64_t key, std::uint64_t draw_index) {
  const double u1 = counter_uniform(key, 2 * draw_index);
  const double u2 = counter_uniform(key, 2 * draw_index + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(6.283185307179586477 * u2);
}

// Sequential view over the counter stream, for mechanism runs that consume
// draws in a documented order.
class SequentialRng {
 public:
  explicit SequentialRng(std::uint64_t seed, std::uint64_t stream_index = 0)
      : key_(derive_stream_key(seed, stream_index)) {}

  double uniform() { return counter_uniform(key_, raw_counter_++); }
  double normal() { return counter_normal(key_, next_draw_++); }

  // Child seed for trial or shard `index`; independent of draws taken so far.
  std::uint64_t child_seed(std::uint64_t index) const {
    return detail::mix64(key_ ^ detail::word_at(key_, ~index));
  }

 private:
  std::uint64_t key_;
  // uniform() and normal() advance separate counters; normal draw i always
  // consumes Box-Muller counters (2i, 2i+1) regardless of interleaving.
  std::uint64_t next_draw_ = 0;
  std::uint64_t raw_counter_ = 0x8000000000000000ULL;  // disjoint from normal counters
};

}  // namespace dpsel
