#pragma once

#include <memory>
#include <string>

#include "ddpc/lip_mpc.hpp"
#include "ddpc/metrics.hpp"
#include "ddpc/planner.hpp"
#include "ddpc/walker.hpp"

namespace ddpc {

enum class ControllerKind { Nominal, Ddpc, LipMpc };

std::string to_string(ControllerKind kind);
ControllerKind controller_from_string(const std::string& name);

/// Run-failure definition: the CoM must stay above the height fraction and
/// within horizontal reach of the stance foot; a kinematically infeasible
/// touchdown or an unusable plan also ends the run.
struct SuccessCriteria {
  double min_height_fraction = 0.5;
  double max_com_stance_dist = 0.5;
};

struct NominalGains {
  double kp = 8.0;
  double kd = 5.0;
};

struct SimConfig {
  WalkerParams plant;          // the (possibly randomized) truth
  WalkerParams nominal_model;  // what every controller assumes
  GaitDesign gait;
  ControllerKind controller = ControllerKind::Nominal;
  PlannerConfig planner;  // DDPC weights, boxes, hyperparameters
  LipMpcConfig mpc;
  NominalGains gains;
  double duration = 11.0;
  double sim_dt = 1e-3;
  double replan_hz = 50.0;
  double cop_dither = 0.0;  // uniform CoP excitation during collection
  std::uint64_t seed = 0;
  PerturbationSchedule perturbation;  // zero magnitudes = off
  OnlineUpdateConfig online;
  SuccessCriteria success;
  double foothold_drift_gain = 1.0;
  double switch_jitter_ms = 0.0;
};

struct SimEvent {
  std::string type;
  double time = 0.0;
  double value = 0.0;
};

struct RunLog {
  Eigen::VectorXd times;      // delta_t cadence
  Eigen::MatrixXd mu_log;     // 4 x K applied inputs (observed)
  Eigen::MatrixXd eta_log;    // 6 x K measured outputs
  Eigen::MatrixXd r_eta_log;  // 6 x K references at the sample times
  std::vector<SimEvent> events;
  MetricsReport metrics;
  std::string failure_reason;

  IoTrajectory to_trajectory(double delta_t) const {
    return IoTrajectory(mu_log, eta_log, delta_t);
  }
};

/// Closed-loop rollout of one controller on one plant.  g_init supplies the
/// offline-fitted transition matrix for the DDPC controller; with online
/// updates enabled the controller may also start from data collected during
/// the run's initial window.
RunLog simulate_run(const SimConfig& cfg, const TransitionMatrix* g_init);

}  // namespace ddpc
