#pragma once

#include <Eigen/Dense>

#include "ddpc/planner.hpp"

namespace ddpc {

/// Physics-based baseline: same cost and box structure as the data-driven
/// planner, but eta is predicted through the exactly discretized
/// constant-height pendulum instead of the Hankel-fitted G.  The decision
/// variable is the world CoP sequence.
struct LipMpcConfig {
  double z_model = 0.8;
  double dt = 0.01;
  int horizon = 300;
  double gravity = 9.81;
  Eigen::Matrix<double, 6, 6> q_weight =
      10.0 * Eigen::Matrix<double, 6, 6>::Identity();
  Eigen::Matrix<double, 4, 4> r_weight =
      0.1 * Eigen::Matrix<double, 4, 4>::Identity();
  Eigen::Vector2d stance_cop_lower = {-0.09, -0.05};
  Eigen::Vector2d stance_cop_upper = {0.09, 0.05};
  Vector6d eta_lower = (Vector6d() << -0.3, -0.3, 0.6, -0.3, -0.3, 0.6).finished();
  Vector6d eta_upper = (Vector6d() << 0.3, 0.3, 1.0, 0.3, 0.3, 1.0).finished();
  bool eta_box_enabled = true;

  double omega() const { return std::sqrt(gravity / z_model); }
  double horizon_seconds() const { return horizon * dt; }
  void validate() const;
};

class LipMpcPlanner {
 public:
  explicit LipMpcPlanner(LipMpcConfig cfg);

  /// Plans from the measured CoM position/velocity; the reference timeline
  /// supplies foot positions and stance over the horizon.  Knot k predicts
  /// the state after k+1 model steps.
  PlanResult plan(const Eigen::Vector2d& com_xy, const Eigen::Vector2d& vel_xy,
                  const HorizonRefs& refs, double first_knot_time);

  const LipMpcConfig& config() const { return cfg_; }

 private:
  LipMpcConfig cfg_;
  Eigen::MatrixXd s_state_;  // N x 2 position prediction from the initial state
  Eigen::MatrixXd s_input_;  // N x N position prediction from the CoP sequence
  QpSolver solver_;
  Eigen::VectorXd prev_solution_;
  double prev_first_knot_ = 0.0;
  bool have_prev_ = false;
};

}  // namespace ddpc
