#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddpc/scenario.hpp"
#include "ddpc/transition.hpp"

namespace ddpc {

/// Per-model collected data: one nominal-controller trajectory per commanded
/// step length, with the paper's CoP dither for persistent excitation.
std::vector<IoTrajectory> collect_model_data(const Scenario& scenario,
                                             const WalkerParams& plant_truth,
                                             std::uint64_t seed_base);

/// Runs collection for every randomized model and writes trajectory CSVs
/// under <out_dir>/data/model_<k>/.  Returns the file paths written.
std::vector<std::string> run_collect(const Scenario& scenario,
                                     const std::string& out_dir);

/// Fits G from every trajectory CSV in a collect output directory and dumps
/// it to <out_dir>/transition_model_<k>.json.
std::vector<std::string> run_fit(const Scenario& scenario,
                                 const std::string& out_dir);

struct GridRow {
  double delta_t = 0.0;
  int T = 0;
  int T_ini = 0;
  int N = 0;
  double mse = 0.0;
  std::string status;  // "ok" or the skip reason
};

/// Hyperparameter grid search scored by mean squared prediction error over
/// held-out windows; writes grid.csv sorted by score.
std::vector<GridRow> run_grid_search(const Scenario& scenario,
                                     const std::string& out_dir);

struct RunRecord {
  std::string scenario;
  std::string controller;
  std::uint64_t seed = 0;
  double sweep_value = 0.0;  // speed [m/s] or perturbation flag
  MetricsReport metrics;
  std::string failure_reason;
};

/// Closed-loop comparison sweep (controllers x speeds x models); writes
/// runs.csv and summary.csv.
std::vector<RunRecord> run_comparison(const Scenario& scenario,
                                      const std::string& out_dir);

/// Perturbation-ramp campaign: nominal vs DDPC-with-online-update on every
/// model; writes perturb_runs.csv and the rebuild event log.
std::vector<RunRecord> run_perturbation(const Scenario& scenario,
                                        const std::string& out_dir);

/// Tidy long-format summary (scenario, controller, seed, metric, value) of
/// all runs.csv / perturb_runs.csv files in out_dir.  Throws MissingRuns on
/// an empty directory.
void run_report(const std::string& out_dir, const std::string& report_path);

}  // namespace ddpc
