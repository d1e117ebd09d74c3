#pragma once

#include <Eigen/Dense>
#include <string>

#include "ddpc/bezier.hpp"

namespace ddpc {

enum class Stance { Left, Right };

inline Stance other(Stance s) {
  return s == Stance::Left ? Stance::Right : Stance::Left;
}

/// Lateral direction of the swing foot relative to the stance foot: the left
/// foot sits at +y of the right foot.
inline double swing_side(Stance stance) {
  return stance == Stance::Right ? 1.0 : -1.0;
}

struct GaitParams {
  double step_duration = 1.0;
  Eigen::Vector2d step_target = Eigen::Vector2d::Zero();
  Stance stance = Stance::Right;

  void validate(double max_step) const;
};

/// Per-stance reference curves in the stance-foot frame plus the gait
/// constants they were designed for.
struct GaitLibrary {
  BezierCurve com_left;     // CoM rel stance foot during left stance, 3x8
  BezierCurve com_right;
  BezierCurve swing_left;   // swing-foot rel stance foot during left stance
  BezierCurve swing_right;
  double t_d = 1.0;
  Eigen::Vector2d lambda_default = Eigen::Vector2d::Zero();
  double step_width = 0.2;
  double z0 = 0.8;
  double swing_apex = 0.05;

  const BezierCurve& com_curve(Stance s) const {
    return s == Stance::Left ? com_left : com_right;
  }
  const BezierCurve& swing_curve(Stance s) const {
    return s == Stance::Left ? swing_left : swing_right;
  }

  void save_json(const std::string& path) const;
  static GaitLibrary load_json(const std::string& path);
};

struct GaitDesign {
  double step_length = 0.12;
  double t_d = 1.0;
  double step_width = 0.2;
  double z0 = 0.8;
  double swing_apex = 0.05;
  double gravity = 9.81;
};

/// Desk-walker gait: CoM follows the periodic pendulum orbit for the given
/// step length and duration, the swing foot blends between footholds with a
/// half-sine apex.  Endpoint values and slopes of every curve are pinned
/// analytically so references stay continuous across domain switches.
GaitLibrary make_walker_gait(const GaitDesign& design);

}  // namespace ddpc
