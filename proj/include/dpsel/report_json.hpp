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

#ifndef DPSEL_REPORT_JSON_HPP_
#define DPSEL_REPORT_JSON_HPP_

#include <cstdint>

#include <json.hpp>

#include "dpsel/composition.hpp"

namespace dpsel {

namespace detail {

inline nlohmann::json composition_config_json(const FsrcParams& params, const AtNoise& noise,
                                              std::uint64_t seed) {
  return nlohmann::json{
      {"a", params.query.a},
      {"b", params.query.b},
      {"delta_sens", params.query.delta_sens},
      {"rho", params.rho},
      {"epsilon_budget", params.epsilon_budget},
      {"per_mechanism_delta", params.per_mechanism_delta},
      {"sigma_x", noise.sigma_x},
      {"sigma_z", noise.sigma_z},
      {"seed", seed},
  };
}

inline nlohmann::json run_records_json(const std::vector<CompositionRunRecord>& runs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : runs) {
    arr.push_back(nlohmann::json{{"start", r.start},
                                 {"transcript_len", r.transcript_len},
                                 {"fired", r.fired},
                                 {"charged", r.charged}});
  }
  return arr;
}

}  // namespace detail

// The adaptive strategy's spend is data dependent but safe to publish
// alongside the outputs; publishable_spend records that.
inline nlohmann::json fsrc_report(const FsrcParams& params, const AtNoise& noise,
                                  std::uint64_t seed, const FsrcOutcome& out) {
  nlohmann::json spent = nlohmann::json::array();
  for (const auto& r : out.runs) {
    spent.push_back(r.charged);
  }
  return nlohmann::json{
      {"config", detail::composition_config_json(params, noise, seed)},
      {"strategy", "adaptive"},
      {"outcomes", detail::run_records_json(out.runs)},
      {"released", out.released},
      {"spent", spent},
      {"epsilon_max", out.epsilon_max},
      {"total_spent", out.total_spent},
      {"halted", out.halted},
      {"restarts", out.restarts},
      {"publishable_spend", true},
  };
}

inline nlohmann::json filter_baseline_report(const FsrcParams& params, const AtNoise& noise,
                                             std::uint64_t seed,
                                             const FilterBaselineOutcome& out) {
  nlohmann::json spent = nlohmann::json::array();
  for (const auto& r : out.runs) {
    spent.push_back(r.charged);
  }
  return nlohmann::json{
      {"config", detail::composition_config_json(params, noise, seed)},
      {"strategy", "filter-baseline"},
      {"outcomes", detail::run_records_json(out.runs)},
      {"released", out.released},
      {"spent", spent},
      {"per_run_epsilon", out.per_run_epsilon},
      {"total_spent", out.total_spent},
      {"halted", out.halted},
      {"restarts", out.restarts},
      {"publishable_spend", false},
  };
}

}  // namespace dpsel

#endif  // DPSEL_REPORT_JSON_HPP_
