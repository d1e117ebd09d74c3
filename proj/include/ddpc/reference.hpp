#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ddpc/gait.hpp"

namespace ddpc {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Vector4d = Eigen::Matrix<double, 4, 1>;

/// Quintic smoothstep 6 tau^5 - 15 tau^4 + 10 tau^3: zero slope at both ends.
double smoothstep_quintic(double tau);

/// Normalized time within the stance domain, clamped to [0, 1] so late
/// impacts hold the terminal reference.
double phase_variable(double t, double t0, double t_d);

/// Swing-foot interpolation from the post-impact position toward the target.
Eigen::Vector2d swing_blend(const Eigen::Vector2d& p_post_impact,
                            const Eigen::Vector2d& target, double tau);

/// CoM reference relative to both feet: col(com - p_left, com - p_right)
/// with the CoM taken from the stance-relative gait curve at tau.
Vector6d com_reference(const BezierCurve& com_curve, double tau,
                       const Eigen::Vector3d& p_stance,
                       const Eigen::Vector3d& p_left,
                       const Eigen::Vector3d& p_right);

/// CoP reference: the stance block is zero (CoP at the stance-foot origin),
/// the swing block tracks -p_sw of the gait's swing curve.  Block order is
/// (left frame, right frame).
Vector4d cop_reference(const BezierCurve& swing_curve, double tau,
                       Stance stance);

/// World-frame CoM reference with time derivatives for tracking controllers.
struct ComWorldRef {
  Eigen::Vector3d pos;
  Eigen::Vector3d vel;
  Eigen::Vector3d acc;
};
ComWorldRef com_world_reference(const GaitLibrary& lib, Stance stance,
                                const Eigen::Vector3d& p_stance, double tau);

/// Reference trajectories over a planning horizon.  When the horizon crosses
/// the end of the current domain, references continue into the following
/// stance with the commanded touchdown as the new foot position.  The foot
/// timeline and per-knot stance ride along for planners that need them.
struct HorizonRefs {
  Eigen::MatrixXd r_eta;   // 6 x knots
  Eigen::MatrixXd r_mu;    // 4 x knots
  Eigen::MatrixXd p_left;  // 3 x knots, reference foot positions
  Eigen::MatrixXd p_right;
  std::vector<Stance> stance;  // per knot

  int knots() const { return static_cast<int>(r_eta.cols()); }
};
HorizonRefs horizon_references(const GaitLibrary& lib, Stance stance,
                               double domain_start,
                               const Eigen::Vector3d& p_left,
                               const Eigen::Vector3d& p_right,
                               const Eigen::Vector2d& lambda, double t_start,
                               double dt, int knots);

}  // namespace ddpc
