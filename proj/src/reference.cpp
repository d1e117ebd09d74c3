#include "ddpc/reference.hpp"

#include <cmath>

namespace ddpc {

double smoothstep_quintic(double tau) {
  if (tau < 0.0 || tau > 1.0) {
    throw OutOfDomain("smoothstep_quintic: tau outside [0, 1]");
  }
  return ((6.0 * tau - 15.0) * tau + 10.0) * tau * tau * tau;
}

double phase_variable(double t, double t0, double t_d) {
  if (t_d <= 0.0) {
    throw NegativeDuration("phase_variable: nonpositive step duration");
  }
  const double tau = (t - t0) / t_d;
  return std::clamp(tau, 0.0, 1.0);
}

Eigen::Vector2d swing_blend(const Eigen::Vector2d& p_post_impact,
                            const Eigen::Vector2d& target, double tau) {
  const double beta = smoothstep_quintic(tau);
  return (1.0 - beta) * p_post_impact + beta * target;
}

Vector6d com_reference(const BezierCurve& com_curve, double tau,
                       const Eigen::Vector3d& p_stance,
                       const Eigen::Vector3d& p_left,
                       const Eigen::Vector3d& p_right) {
  if (!p_left.allFinite() || !p_right.allFinite()) {
    throw OutOfDomain("com_reference: foot positions must be finite");
  }
  const Eigen::Vector3d com = p_stance + com_curve.value(tau);
  Vector6d r;
  r << com - p_left, com - p_right;
  return r;
}

Vector4d cop_reference(const BezierCurve& swing_curve, double tau,
                       Stance stance) {
  const Eigen::Vector2d p_sw = swing_curve.value(tau).head<2>();
  Vector4d r = Vector4d::Zero();
  if (stance == Stance::Right) {
    r.head<2>() = -p_sw;  // left-frame block; stance (right) block stays zero
  } else {
    r.tail<2>() = -p_sw;
  }
  return r;
}

ComWorldRef com_world_reference(const GaitLibrary& lib, Stance stance,
                                const Eigen::Vector3d& p_stance, double tau) {
  const BezierCurve& curve = lib.com_curve(stance);
  ComWorldRef ref;
  ref.pos = p_stance + curve.value(tau);
  ref.vel = curve.derivative(tau) / lib.t_d;
  ref.acc = curve.second_derivative(tau) / (lib.t_d * lib.t_d);
  return ref;
}

HorizonRefs horizon_references(const GaitLibrary& lib, Stance stance,
                               double domain_start,
                               const Eigen::Vector3d& p_left,
                               const Eigen::Vector3d& p_right,
                               const Eigen::Vector2d& lambda, double t_start,
                               double dt, int knots) {
  HorizonRefs refs;
  refs.r_eta.resize(6, knots);
  refs.r_mu.resize(4, knots);
  refs.p_left.resize(3, knots);
  refs.p_right.resize(3, knots);
  refs.stance.resize(knots);

  Stance s = stance;
  double t0 = domain_start;
  Eigen::Vector3d p_stance = s == Stance::Left ? p_left : p_right;

  for (int k = 0; k < knots; ++k) {
    const double t = t_start + k * dt;
    // Advance through any domain switches before this knot; the commanded
    // touchdown becomes the new stance foot.
    while (t >= t0 + lib.t_d) {
      p_stance +=
          Eigen::Vector3d(lambda.x(), swing_side(s) * lambda.y(), 0.0);
      s = other(s);
      t0 += lib.t_d;
    }
    const double tau = phase_variable(t, t0, lib.t_d);
    // Both reference feet come from the gait curves: swing follows its
    // curve, stance stays put.  This keeps r_eta continuous at impact.
    const Eigen::Vector3d p_swing = p_stance + lib.swing_curve(s).value(tau);
    const Eigen::Vector3d pl = s == Stance::Left ? p_stance : p_swing;
    const Eigen::Vector3d pr = s == Stance::Left ? p_swing : p_stance;
    refs.r_eta.col(k) = com_reference(lib.com_curve(s), tau, p_stance, pl, pr);
    refs.r_mu.col(k) = cop_reference(lib.swing_curve(s), tau, s);
    refs.p_left.col(k) = pl;
    refs.p_right.col(k) = pr;
    refs.stance[k] = s;
  }
  return refs;
}

}  // namespace ddpc
