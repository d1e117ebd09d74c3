#include "ddpc/scenario.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace ddpc {

namespace {

using nlohmann::json;

template <typename T>
void maybe(const json& j, const char* key, T& field) {
  if (j.contains(key)) {
    field = j.at(key).get<T>();
  }
}

}  // namespace

DdpcHyperparams Scenario::hyper_preset(const std::string& which) const {
  DdpcHyperparams h;
  if (which == "sim") {
    h.T = 400;
    h.T_ini = 10;
    h.N = 20;
    h.delta_t = 0.02;
  } else if (which == "hardware") {
    h.T = 800;
    h.T_ini = 20;
    h.N = 100;
    h.delta_t = 0.015;
  } else {
    throw ConfigError("unknown hyperparameter preset: " + which);
  }
  return h;
}

Scenario Scenario::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("Scenario: cannot open " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("Scenario: " + path + ": " + e.what());
  }

  Scenario s;
  s.hyper = s.hyper_preset("sim");
  maybe(j, "name", s.name);
  maybe(j, "seed", s.seed);
  maybe(j, "model_count", s.model_count);
  maybe(j, "controllers", s.controllers);
  maybe(j, "replan_hz", s.replan_hz);
  maybe(j, "sim_dt", s.sim_dt);
  maybe(j, "cop_dither", s.cop_dither);
  maybe(j, "foothold_drift_gain", s.foothold_drift_gain);
  maybe(j, "switch_jitter_ms", s.switch_jitter_ms);

  if (j.contains("plant")) {
    const json& p = j.at("plant");
    maybe(p, "z0", s.plant.z0);
    maybe(p, "mass", s.plant.mass);
    maybe(p, "gravity", s.plant.gravity);
    maybe(p, "support_half_x", s.plant.support.half_x);
    maybe(p, "support_half_y", s.plant.support.half_y);
    maybe(p, "max_step", s.plant.max_step);
    maybe(p, "noise_sigma", s.plant.noise_sigma);
    maybe(p, "obs_bias_gain", s.plant.obs_bias_gain);
    maybe(p, "mismatch_force_gain", s.plant.mismatch_force_gain);
    maybe(p, "nominal_com_offset", s.plant.nominal_com_offset);
    s.plant.com_offset = s.plant.nominal_com_offset;
    if (p.contains("randomize")) {
      const json& r = p.at("randomize");
      maybe(r, "count", s.model_count);
      maybe(r, "offset_lo", s.randomize.offset_lo);
      maybe(r, "offset_hi", s.randomize.offset_hi);
      maybe(r, "height_lo", s.randomize.height_lo);
      maybe(r, "height_hi", s.randomize.height_hi);
    }
  }
  // Keep the assumed nominal offset at the center of the sampled range so
  // the mismatch is the deviation, not the full device offset.
  s.plant.nominal_com_offset =
      0.5 * (s.randomize.offset_lo + s.randomize.offset_hi);
  s.plant.com_offset = s.plant.nominal_com_offset;

  if (j.contains("gait")) {
    const json& g = j.at("gait");
    maybe(g, "t_d", s.gait.t_d);
    maybe(g, "step_width", s.gait.step_width);
    maybe(g, "swing_apex", s.gait.swing_apex);
    maybe(g, "step_length", s.gait.step_length);
  }
  s.gait.z0 = s.plant.z0;
  s.gait.gravity = s.plant.gravity;

  if (j.contains("hyper")) {
    const json& h = j.at("hyper");
    if (h.contains("preset")) {
      s.hyper = s.hyper_preset(h.at("preset").get<std::string>());
    }
    maybe(h, "T", s.hyper.T);
    maybe(h, "T_ini", s.hyper.T_ini);
    maybe(h, "N", s.hyper.N);
    maybe(h, "delta_t", s.hyper.delta_t);
  }
  s.collect_duration = s.hyper.T * s.hyper.delta_t;
  maybe(j, "collect_duration", s.collect_duration);

  if (j.contains("weights")) {
    maybe(j.at("weights"), "q", s.q_weight);
    maybe(j.at("weights"), "r", s.r_weight);
  }
  if (j.contains("gains")) {
    maybe(j.at("gains"), "kp", s.gains.kp);
    maybe(j.at("gains"), "kd", s.gains.kd);
  }
  if (j.contains("collect")) {
    maybe(j.at("collect"), "step_lengths", s.collect_step_lengths);
    maybe(j.at("collect"), "duration", s.collect_duration);
    maybe(j.at("collect"), "dither", s.cop_dither);
  }
  if (j.contains("sweep")) {
    maybe(j.at("sweep"), "speeds", s.sweep_speeds);
    maybe(j.at("sweep"), "duration", s.sweep_duration);
    maybe(j.at("sweep"), "t_d", s.gait.t_d);
  }
  if (j.contains("perturbation")) {
    const json& p = j.at("perturbation");
    maybe(p, "base", s.perturbation.base_force);
    maybe(p, "increment", s.perturbation.increment);
    maybe(p, "period", s.perturbation.period);
    maybe(p, "speed", s.perturb_speed);
    maybe(p, "mass", s.perturb_mass);
  }
  if (j.contains("online")) {
    const json& o = j.contains("online") ? j.at("online") : json{};
    maybe(o, "enabled", s.online.enabled);
    maybe(o, "period", s.online.rebuild_period);
    maybe(o, "window", s.online.window_length);
    maybe(o, "collect_time", s.online.collect_time);
  }
  if (j.contains("mpc")) {
    const json& m = j.at("mpc");
    maybe(m, "z", s.mpc.z_model);
    maybe(m, "dt", s.mpc.dt);
    maybe(m, "horizon", s.mpc.horizon);
  }
  if (j.contains("success")) {
    maybe(j.at("success"), "min_height_fraction",
          s.success.min_height_fraction);
    maybe(j.at("success"), "max_com_stance_dist",
          s.success.max_com_stance_dist);
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    maybe(g, "delta_t", s.grid.delta_t);
    maybe(g, "T", s.grid.T);
    maybe(g, "T_ini", s.grid.T_ini);
    maybe(g, "N", s.grid.N);
    maybe(g, "holdout_step", s.grid_holdout_step);
    maybe(g, "mse_threshold", s.held_out_mse_threshold);
  }

  for (const std::string& c : s.controllers) {
    controller_from_string(c);  // validate names early
  }
  s.hyper.validate();
  return s;
}

void Scenario::save_json(const std::string& path) const {
  json j;
  j["name"] = name;
  j["seed"] = seed;
  j["model_count"] = model_count;
  j["controllers"] = controllers;
  j["plant"] = {{"z0", plant.z0},
                {"mass", plant.mass},
                {"support_half_x", plant.support.half_x},
                {"support_half_y", plant.support.half_y},
                {"max_step", plant.max_step},
                {"noise_sigma", plant.noise_sigma},
                {"obs_bias_gain", plant.obs_bias_gain},
                {"mismatch_force_gain", plant.mismatch_force_gain},
                {"randomize",
                 {{"count", model_count},
                  {"offset_lo", randomize.offset_lo},
                  {"offset_hi", randomize.offset_hi},
                  {"height_lo", randomize.height_lo},
                  {"height_hi", randomize.height_hi}}}};
  j["gait"] = {{"t_d", gait.t_d},
               {"step_width", gait.step_width},
               {"swing_apex", gait.swing_apex},
               {"step_length", gait.step_length}};
  j["hyper"] = {{"T", hyper.T},
                {"T_ini", hyper.T_ini},
                {"N", hyper.N},
                {"delta_t", hyper.delta_t}};
  j["weights"] = {{"q", q_weight}, {"r", r_weight}};
  j["gains"] = {{"kp", gains.kp}, {"kd", gains.kd}};
  j["collect"] = {{"step_lengths", collect_step_lengths},
                  {"duration", collect_duration},
                  {"dither", cop_dither}};
  j["sweep"] = {{"speeds", sweep_speeds}, {"duration", sweep_duration}};
  j["perturbation"] = {{"base", perturbation.base_force},
                       {"increment", perturbation.increment},
                       {"period", perturbation.period},
                       {"speed", perturb_speed},
                       {"mass", perturb_mass}};
  j["online"] = {{"enabled", online.enabled},
                 {"period", online.rebuild_period},
                 {"window", online.window_length},
                 {"collect_time", online.collect_time}};
  j["mpc"] = {{"z", mpc.z_model}, {"dt", mpc.dt}, {"horizon", mpc.horizon}};
  j["replan_hz"] = replan_hz;
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("Scenario: cannot write " + path);
  }
  out << j.dump(2) << "\n";
}

void Scenario::apply_paper_scale() {
  model_count = 50;
  sweep_speeds = {0.14, 0.15, 0.16, 0.17, 0.18, 0.19};
  mpc.dt = 0.01;
  mpc.horizon = 300;
  replan_hz = 100.0;
  grid.delta_t = {0.01, 0.02, 0.03};
  grid.T = {50, 100, 200, 400, 600};
  grid.T_ini = {5, 10, 20, 50};
  grid.N = {10, 20, 50, 100, 300};
}

PlannerConfig Scenario::make_planner_config() const {
  PlannerConfig cfg;
  cfg.hyper = hyper;
  cfg.q_weight = q_weight * Eigen::Matrix<double, 6, 6>::Identity();
  cfg.r_weight = r_weight * Eigen::Matrix<double, 4, 4>::Identity();
  cfg.stance_cop_lower = {-plant.support.half_x, -plant.support.half_y};
  cfg.stance_cop_upper = {plant.support.half_x, plant.support.half_y};
  cfg.eta_lower << -0.3, -0.3, 0.75 * plant.z0, -0.3, -0.3, 0.75 * plant.z0;
  cfg.eta_upper << 0.3, 0.3, 1.25 * plant.z0, 0.3, 0.3, 1.25 * plant.z0;
  cfg.replan_hz = replan_hz;
  return cfg;
}

LipMpcConfig Scenario::make_mpc_config() const {
  LipMpcConfig cfg = mpc;
  cfg.gravity = plant.gravity;
  cfg.q_weight = q_weight * Eigen::Matrix<double, 6, 6>::Identity();
  cfg.r_weight = r_weight * Eigen::Matrix<double, 4, 4>::Identity();
  cfg.stance_cop_lower = {-plant.support.half_x, -plant.support.half_y};
  cfg.stance_cop_upper = {plant.support.half_x, plant.support.half_y};
  cfg.eta_lower << -0.3, -0.3, 0.75 * plant.z0, -0.3, -0.3, 0.75 * plant.z0;
  cfg.eta_upper << 0.3, 0.3, 1.25 * plant.z0, 0.3, 0.3, 1.25 * plant.z0;
  return cfg;
}

SimConfig Scenario::base_sim_config(const WalkerParams& plant_truth,
                                    ControllerKind kind, double step_length,
                                    double duration,
                                    std::uint64_t run_seed) const {
  SimConfig cfg;
  cfg.plant = plant_truth;
  cfg.nominal_model = plant;
  cfg.gait = gait;
  cfg.gait.step_length = step_length;
  cfg.controller = kind;
  cfg.planner = make_planner_config();
  cfg.mpc = make_mpc_config();
  cfg.gains = gains;
  cfg.duration = duration;
  cfg.sim_dt = sim_dt;
  cfg.replan_hz = replan_hz;
  cfg.seed = run_seed;
  cfg.success = success;
  cfg.foothold_drift_gain = foothold_drift_gain;
  cfg.switch_jitter_ms = switch_jitter_ms;
  return cfg;
}

}  // namespace ddpc
