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
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpsel/bounds.hpp"
#include "dpsel/composition.hpp"
#include "dpsel/csv.hpp"
#include "dpsel/dataset.hpp"
#include "dpsel/experiments.hpp"
#include "dpsel/report_json.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitData = 4;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    dpsel::write_text_atomic(out_path, text);
  }
}

std::string quantiles_csv(const std::vector<double>& rho_grid, const dpsel::AtNoise& noise,
                          std::size_t max_steps, std::size_t trials, std::uint64_t seed) {
  dpsel::CsvTable t;
  t.columns = {"rho", "stop_median", "stop_p80"};
  for (double rho : rho_grid) {
    const auto q = dpsel::simulate_worst_case_stopping(max_steps, rho, noise, trials, seed);
    t.add_row({dpsel::csv_number(rho), dpsel::csv_number(q.median),
               dpsel::csv_number(q.p80)});
  }
  return t.serialize();
}

struct SeriesSource {
  std::string data_path;
  std::size_t n_users = 0;
  std::size_t synth_days = 0;
  double synth_amplitude = 1.0;
  std::size_t synth_period = 365;
  std::uint64_t synth_seed = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--data", data_path, "CSV of daily counts, last field per line");
    cmd->add_option("--n-users", n_users, "population size behind the counts")->required();
    cmd->add_option("--synth-days", synth_days,
                    "generate this many synthetic days instead of reading --data");
    cmd->add_option("--synth-amplitude", synth_amplitude, "seasonal swing in [0, 1]");
    cmd->add_option("--synth-period", synth_period, "seasonal period in days");
    cmd->add_option("--synth-seed", synth_seed, "seed for the synthetic jitter");
  }

  dpsel::SeriesDataset load() const {
    if (!data_path.empty()) {
      return dpsel::ingest_series_file(data_path, n_users);
    }
    if (synth_days == 0) {
      throw dpsel::DataError("provide --data or --synth-days");
    }
    return dpsel::generate_synthetic_series(synth_days, n_users, synth_amplitude,
                                            synth_period, synth_seed);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy accounting and selection mechanisms for Gaussian noise"};
  app.set_config("--config", "", "read options from an INI file");
  app.require_subcommand(1);
  std::string out_path;

  // bound: deterministic privacy computations.
  auto* bound = app.add_subcommand("bound", "compute privacy bounds");
  bound->require_subcommand(1);

  struct {
    int d = 2;
    double delta_sens = 0.0, sigma = 0.0, a = 0.0, b = 1.0;
  } rnm;
  auto* bound_rnm = bound->add_subcommand("rnm", "argmax selection, pure DP");
  bound_rnm->add_option("--d", rnm.d, "number of candidates")->required();
  bound_rnm->add_option("--delta-sens", rnm.delta_sens, "per-candidate sensitivity")
      ->required();
  bound_rnm->add_option("--sigma", rnm.sigma, "noise scale")->required();
  bound_rnm->add_option("--a", rnm.a, "lower query bound");
  bound_rnm->add_option("--b", rnm.b, "upper query bound");
  bound_rnm->callback([&] {
    const double eps = dpsel::rnm_pure_epsilon(
        rnm.d, dpsel::BoundedQueryParams{rnm.a, rnm.b, rnm.delta_sens},
        dpsel::RnmNoise{rnm.sigma});
    emit("epsilon," + dpsel::csv_number(eps) + "\n", out_path);
  });

  struct {
    int t = 1;
    double delta_sens = 0.0, sigma_x = 0.0, sigma_z = 0.0, rho = 0.0, a = 0.0, b = 1.0;
  } atp;
  auto* bound_at = bound->add_subcommand("at-expost", "threshold scan, realized stop-time DP");
  bound_at->add_option("--t", atp.t, "stop time (queries examined)")->required();
  bound_at->add_option("--delta-sens", atp.delta_sens, "per-query sensitivity")->required();
  bound_at->add_option("--sigma-x", atp.sigma_x, "threshold noise scale")->required();
  bound_at->add_option("--sigma-z", atp.sigma_z,
                       "query noise scale (default sqrt(3) * sigma-x)");
  bound_at->add_option("--rho", atp.rho, "threshold")->required();
  bound_at->add_option("--a", atp.a, "lower query bound");
  bound_at->add_option("--b", atp.b, "upper query bound");
  bound_at->callback([&] {
    const double sz = atp.sigma_z > 0.0 ? atp.sigma_z : atp.sigma_x * std::sqrt(3.0);
    const double eps = dpsel::at_expost_epsilon(
        atp.t, dpsel::BoundedQueryParams{atp.a, atp.b, atp.delta_sens},
        dpsel::AtNoise{atp.sigma_x, sz}, atp.rho);
    emit("epsilon," + dpsel::csv_number(eps) + "\n", out_path);
  });

  struct {
    double alpha = 2.0, delta_sens = 0.0, sigma_x = 0.0, sigma_z = 0.0, rho = 0.0;
    double to_pdp_delta = 0.0;
  } rdp;
  auto* bound_rdp = bound->add_subcommand("at-rdp", "threshold scan, Renyi curve");
  bound_rdp->add_option("--alpha", rdp.alpha, "Renyi order")->required();
  bound_rdp->add_option("--delta-sens", rdp.delta_sens, "per-query sensitivity")->required();
  bound_rdp->add_option("--sigma-x", rdp.sigma_x, "threshold noise scale")->required();
  bound_rdp->add_option("--sigma-z", rdp.sigma_z,
                        "query noise scale (default sqrt(3) * sigma-x)");
  bound_rdp->add_option("--rho", rdp.rho, "threshold")->required();
  bound_rdp->add_option("--to-pdp-delta", rdp.to_pdp_delta,
                        "also convert the whole curve at this delta");
  bound_rdp->callback([&] {
    const double sz = rdp.sigma_z > 0.0 ? rdp.sigma_z : rdp.sigma_x * std::sqrt(3.0);
    const auto curve =
        dpsel::rdp_gaussian_at(rdp.delta_sens, dpsel::AtNoise{rdp.sigma_x, sz}, rdp.rho);
    std::string text = "epsilon_at_alpha," + dpsel::csv_number(curve.eval(rdp.alpha)) + "\n";
    if (rdp.to_pdp_delta > 0.0) {
      const auto conv = dpsel::rdp_to_pdp(curve, rdp.to_pdp_delta);
      text += "epsilon_pdp," + dpsel::csv_number(conv.guarantee.epsilon) + "\n";
      text += "alpha_star," + dpsel::csv_number(conv.alpha) + "\n";
    }
    emit(text, out_path);
  });

  // simulate: seeded runs of the mechanisms themselves.
  auto* simulate = app.add_subcommand("simulate", "run seeded simulations");
  simulate->require_subcommand(1);
  struct {
    std::vector<double> rho_grid;
    double sigma_x = 0.0, sigma_z = 0.0;
    std::size_t trials = 0, max_steps = 0;
    std::uint64_t seed = 0;
  } stop;
  auto* sim_stop = simulate->add_subcommand(
      "stopping", "worst-case stop-time quantiles of the threshold scan");
  sim_stop->add_option("--rho-grid", stop.rho_grid, "thresholds to sweep")
      ->required()
      ->delimiter(',');
  sim_stop->add_option("--sigma-x", stop.sigma_x, "threshold noise scale")->required();
  sim_stop->add_option("--sigma-z", stop.sigma_z,
                       "query noise scale (default sqrt(3) * sigma-x)");
  sim_stop->add_option("--trials", stop.trials, "trials per threshold")->required();
  sim_stop->add_option("--max-steps", stop.max_steps, "censoring horizon")->required();
  sim_stop->add_option("--seed", stop.seed, "base seed, shared across the sweep")
      ->required();
  sim_stop->callback([&] {
    const double sz = stop.sigma_z > 0.0 ? stop.sigma_z : stop.sigma_x * std::sqrt(3.0);
    emit(quantiles_csv(stop.rho_grid, dpsel::AtNoise{stop.sigma_x, sz}, stop.max_steps,
                       stop.trials, stop.seed),
         out_path);
  });

  // run: one composed release session, reported as JSON.
  auto* run = app.add_subcommand("run", "compose threshold scans under a budget");
  run->require_subcommand(1);
  struct {
    SeriesSource source;
    double rho = 0.0, epsilon = 0.0, delta = 0.0, sigma_x = 0.0, sigma_z = 0.0;
    std::uint64_t seed = 0;
  } session;
  auto attach_session = [&](CLI::App* cmd) {
    session.source.attach(cmd);
    cmd->add_option("--rho", session.rho, "release threshold")->required();
    cmd->add_option("--epsilon", session.epsilon, "total budget")->required();
    cmd->add_option("--delta", session.delta, "per-mechanism delta")->required();
    cmd->add_option("--sigma-x", session.sigma_x, "threshold noise scale")->required();
    cmd->add_option("--sigma-z", session.sigma_z,
                    "query noise scale (default sqrt(3) * sigma-x)");
    cmd->add_option("--seed", session.seed, "run seed")->required();
  };
  auto session_inputs = [&] {
    const dpsel::SeriesDataset ds = session.source.load();
    dpsel::FsrcParams params;
    params.query = dpsel::BoundedQueryParams{0.0, 1.0, ds.delta_sens};
    params.rho = session.rho;
    params.epsilon_budget = session.epsilon;
    params.per_mechanism_delta = session.delta;
    const double sz =
        session.sigma_z > 0.0 ? session.sigma_z : session.sigma_x * std::sqrt(3.0);
    return std::tuple<dpsel::SeriesDataset, dpsel::FsrcParams, dpsel::AtNoise>(
        ds, params, dpsel::AtNoise{session.sigma_x, sz});
  };
  auto* run_fsrc = run->add_subcommand("fsrc", "adaptive stop-time charging");
  attach_session(run_fsrc);
  run_fsrc->callback([&] {
    const auto [ds, params, noise] = session_inputs();
    const auto out = dpsel::fsrc_run(ds.values, params, noise, session.seed);
    emit(dpsel::fsrc_report(params, noise, session.seed, out).dump(2) + "\n", out_path);
  });
  auto* run_base = run->add_subcommand("filter-baseline", "worst-case booking per run");
  attach_session(run_base);
  run_base->callback([&] {
    const auto [ds, params, noise] = session_inputs();
    const auto out =
        dpsel::filtered_composition_baseline(ds.values, params, noise, session.seed);
    emit(dpsel::filter_baseline_report(params, noise, session.seed, out).dump(2) + "\n",
         out_path);
  });

  // experiment: grid studies written as CSV.
  auto* experiment = app.add_subcommand("experiment", "accuracy and spend studies");
  experiment->require_subcommand(1);

  struct {
    SeriesSource source;
    std::vector<double> sigma_grid;
    double delta = 0.0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
  } off;
  auto* exp_off = experiment->add_subcommand("offline", "one-shot selection arms");
  off.source.attach(exp_off);
  exp_off->add_option("--sigma-grid", off.sigma_grid, "noise scales to sweep")
      ->required()
      ->delimiter(',');
  exp_off->add_option("--delta", off.delta, "delta for the vector-sensitivity analysis")
      ->required();
  exp_off->add_option("--trials", off.trials, "trials per scale")->required();
  exp_off->add_option("--seed", off.seed, "experiment seed")->required();
  exp_off->callback([&] {
    const auto rows = dpsel::run_offline_experiment(off.source.load(), off.sigma_grid,
                                                    off.delta, off.trials, off.seed);
    dpsel::CsvTable t;
    t.columns = {"sigma",        "eps_pure",    "eps_classical",  "acc_gaussian",
                 "acc_laplace",  "acc_exponential", "acc_permute_flip"};
    for (const auto& r : rows) {
      t.add_row({dpsel::csv_number(r.sigma), dpsel::csv_number(r.eps_pure),
                 dpsel::csv_number(r.eps_classical), dpsel::csv_number(r.acc_gaussian),
                 dpsel::csv_number(r.acc_laplace), dpsel::csv_number(r.acc_exponential),
                 dpsel::csv_number(r.acc_permute_flip)});
    }
    emit(t.serialize(), out_path);
  });

  struct {
    SeriesSource source;
    std::vector<double> sigma_x_grid;
    double rho = 0.0, epsilon = 0.0, delta = 0.0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
  } onl;
  auto* exp_onl = experiment->add_subcommand("online", "streaming release strategies");
  onl.source.attach(exp_onl);
  exp_onl->add_option("--sigma-x-grid", onl.sigma_x_grid, "threshold noise scales")
      ->required()
      ->delimiter(',');
  exp_onl->add_option("--rho", onl.rho, "release threshold")->required();
  exp_onl->add_option("--epsilon", onl.epsilon, "total budget")->required();
  exp_onl->add_option("--delta", onl.delta, "per-mechanism delta")->required();
  exp_onl->add_option("--trials", onl.trials, "paired trials per scale")->required();
  exp_onl->add_option("--seed", onl.seed, "experiment seed")->required();
  exp_onl->callback([&] {
    const auto rows =
        dpsel::run_online_experiment(onl.source.load(), onl.rho, onl.epsilon, onl.delta,
                                     onl.sigma_x_grid, onl.trials, onl.seed);
    dpsel::CsvTable t;
    t.columns = {"sigma_x",        "epsilon_max",    "f1_adaptive",
                 "f1_baseline",    "spend_adaptive", "spend_baseline",
                 "halted_adaptive", "halted_baseline"};
    for (const auto& r : rows) {
      t.add_row({dpsel::csv_number(r.sigma_x), dpsel::csv_number(r.epsilon_max),
                 dpsel::csv_number(r.f1_adaptive), dpsel::csv_number(r.f1_baseline),
                 dpsel::csv_number(r.spend_adaptive), dpsel::csv_number(r.spend_baseline),
                 dpsel::csv_number(r.halted_adaptive),
                 dpsel::csv_number(r.halted_baseline)});
    }
    emit(t.serialize(), out_path);
  });

  struct {
    double delta_sens = 0.0, delta = 0.0;
    std::vector<double> sigma_x_grid, rho_grid;
    std::vector<std::size_t> t_grid;
    std::size_t sim_trials = 1000, sim_max_steps = 4096;
    std::uint64_t seed = 0;
  } heat;
  auto* exp_heat =
      experiment->add_subcommand("heatmap", "realized charges against the booked cap");
  exp_heat->add_option("--delta-sens", heat.delta_sens, "per-query sensitivity")->required();
  exp_heat->add_option("--delta", heat.delta, "per-mechanism delta")->required();
  exp_heat->add_option("--sigma-x-grid", heat.sigma_x_grid, "threshold noise scales")
      ->required()
      ->delimiter(',');
  exp_heat->add_option("--t-grid", heat.t_grid, "stop times")->required()->delimiter(',');
  exp_heat->add_option("--rho-grid", heat.rho_grid, "thresholds")->required()->delimiter(',');
  exp_heat->add_option("--sim-trials", heat.sim_trials, "stopping-simulation trials");
  exp_heat->add_option("--sim-max-steps", heat.sim_max_steps, "stopping-simulation horizon");
  exp_heat->add_option("--seed", heat.seed, "simulation seed")->required();
  exp_heat->callback([&] {
    const auto rows =
        dpsel::run_heatmap(heat.delta_sens, heat.delta, heat.sigma_x_grid, heat.t_grid,
                           heat.rho_grid, heat.sim_trials, heat.sim_max_steps, heat.seed);
    dpsel::CsvTable t;
    t.columns = {"sigma_x", "rho",        "t",           "eps_max", "eps_expost",
                 "savings", "stop_median", "stop_p80"};
    for (const auto& r : rows) {
      t.add_row({dpsel::csv_number(r.sigma_x), dpsel::csv_number(r.rho),
                 std::to_string(r.t), dpsel::csv_number(r.eps_max),
                 dpsel::csv_number(r.eps_expost), dpsel::csv_number(r.savings),
                 dpsel::csv_number(r.stop_median), dpsel::csv_number(r.stop_p80)});
    }
    emit(t.serialize(), out_path);
  });

  // synth: materialize a synthetic series as ingestible CSV.
  struct {
    std::size_t days = 0, users = 0, period = 365;
    double amplitude = 1.0;
    std::uint64_t seed = 0;
  } synth;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic daily-count series");
  synth_cmd->add_option("--days", synth.days, "number of days")->required();
  synth_cmd->add_option("--users", synth.users, "population size")->required();
  synth_cmd->add_option("--amplitude", synth.amplitude, "seasonal swing in [0, 1]");
  synth_cmd->add_option("--period", synth.period, "seasonal period in days");
  synth_cmd->add_option("--seed", synth.seed, "jitter seed")->required();
  synth_cmd->callback([&] {
    const auto ds = dpsel::generate_synthetic_series(synth.days, synth.users,
                                                     synth.amplitude, synth.period,
                                                     synth.seed);
    dpsel::CsvTable t;
    t.columns = {"day", "count"};
    for (std::size_t i = 0; i < ds.values.size(); ++i) {
      const double count = std::round(ds.values[i] * static_cast<double>(ds.n_users));
      t.add_row({std::to_string(i), dpsel::csv_number(count)});
    }
    emit(t.serialize(), out_path);
  });

  for (auto* cmd : {bound_rnm, bound_at, bound_rdp, sim_stop, run_fsrc, run_base, exp_off,
                    exp_onl, exp_heat, synth_cmd}) {
    cmd->add_option("--out", out_path, "write output to this file instead of stdout");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  } catch (const dpsel::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const dpsel::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const dpsel::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
