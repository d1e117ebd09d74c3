#pragma once

#include <string>
#include <vector>

#include "ddpc/simulation.hpp"

namespace ddpc {

/// Hyperparameter grid for the search over (delta_t, T, T_ini, N).
struct GridRanges {
  std::vector<double> delta_t = {0.02};
  std::vector<int> T = {100, 250, 400};
  std::vector<int> T_ini = {5, 10, 20};
  std::vector<int> N = {10, 20, 40};
};

/// One experiment campaign: plant randomization, controllers, sweep axes,
/// perturbation and online-update settings.  Loaded from JSON; every field
/// has a desk-scale default so a minimal config file works.
struct Scenario {
  std::string name = "scenario";
  WalkerParams plant;  // nominal values; randomization samples around them
  RandomizationRanges randomize;
  int model_count = 20;
  std::vector<std::string> controllers = {"nominal", "ddpc", "lip_mpc"};

  GaitDesign gait;
  DdpcHyperparams hyper{.T = 400, .T_ini = 10, .N = 20, .delta_t = 0.02};
  double q_weight = 10.0;
  double r_weight = 0.005;
  NominalGains gains;
  double replan_hz = 50.0;
  double sim_dt = 1e-3;

  // Data collection.
  std::vector<double> collect_step_lengths = {0.10, 0.11, 0.12,
                                              0.13, 0.14, 0.15};
  double collect_duration = 8.0;  // seconds per trajectory (T * delta_t)
  double cop_dither = 0.01;

  // Tracking sweep.
  std::vector<double> sweep_speeds = {0.14, 0.15, 0.16, 0.17, 0.18, 0.19};
  double sweep_duration = 11.0;

  // Perturbation campaign.
  PerturbationSchedule perturbation{5.0, 3.0, 3.0, {-1.0, 0.0, 0.0}};
  OnlineUpdateConfig online{true, 1.5, 250, 5.0};
  double perturb_speed = 0.13;
  double perturb_mass = 15.0;  // desk-scale point mass the ramp acts on

  LipMpcConfig mpc{.dt = 0.02, .horizon = 100};  // desk scale; --paper-scale
                                                 // restores 0.01 / 300
  SuccessCriteria success;
  double foothold_drift_gain = 1.0;
  double switch_jitter_ms = 0.0;
  std::uint64_t seed = 1;

  // Grid search.
  GridRanges grid;
  double grid_holdout_step = 0.125;
  double held_out_mse_threshold = 1e-4;  // selection-criterion bound

  static Scenario load_json(const std::string& path);
  void save_json(const std::string& path) const;
  void apply_paper_scale();

  DdpcHyperparams hyper_preset(const std::string& which) const;
  PlannerConfig make_planner_config() const;
  LipMpcConfig make_mpc_config() const;
  SimConfig base_sim_config(const WalkerParams& plant_truth,
                            ControllerKind kind, double step_length,
                            double duration, std::uint64_t run_seed) const;
};

}  // namespace ddpc
