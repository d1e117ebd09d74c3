#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "ddpc/gait.hpp"

namespace ddpc {

/// Rectangular foot support area centered at the stance foot.
struct SupportBox {
  double half_x = 0.09;
  double half_y = 0.05;
};

/// Desk-walker parameters.  The com_offset / height_mult pair is the
/// randomized model-mismatch channel: controllers assume the nominal values,
/// the plant runs the sampled ones.  The offset deviation biases the CoM
/// observation and injects a constant unmodeled force.
struct WalkerParams {
  double z0 = 0.8;
  double mass = 82.0;
  double gravity = 9.81;
  SupportBox support;
  double max_step = 0.2;

  double com_offset = -0.114;          // sampled device CoM x-offset [m]
  double nominal_com_offset = -0.114;  // what the controllers assume
  double height_mult = 1.0;            // effective pendulum height multiplier
  double obs_bias_gain = 1.0;
  double mismatch_force_gain = 2.5;
  double noise_sigma = 0.0;

  double effective_height() const { return z0 * height_mult; }
  double omega() const { return std::sqrt(gravity / effective_height()); }
  double offset_deviation() const { return com_offset - nominal_com_offset; }
  /// Constant unmodeled force along x, proportional to the offset deviation
  /// (the gravity moment of the misplaced mass in the pendulum linearization).
  double mismatch_force_x() const {
    return mismatch_force_gain * mass * gravity / z0 * offset_deviation();
  }
};

struct LipWalkerState {
  Eigen::Vector3d p_com = {0.0, 0.0, 0.8};
  Eigen::Vector3d v_com = Eigen::Vector3d::Zero();
  Eigen::Vector3d p_left = Eigen::Vector3d::Zero();
  Eigen::Vector3d p_right = Eigen::Vector3d::Zero();
  Stance stance = Stance::Right;
  double domain_clock = 0.0;                         // t0 of the domain
  Eigen::Vector2d swing_start = Eigen::Vector2d::Zero();  // post-impact xy

  const Eigen::Vector3d& stance_foot() const {
    return stance == Stance::Left ? p_left : p_right;
  }
  const Eigen::Vector3d& swing_foot() const {
    return stance == Stance::Left ? p_right : p_left;
  }
  Eigen::Vector3d& swing_foot() {
    return stance == Stance::Left ? p_right : p_left;
  }
};

/// Ramped external perturbation: force(t) = base + increment * floor(t/period)
/// along `direction`, applied from t = 0.
struct PerturbationSchedule {
  double base_force = 0.0;
  double increment = 0.0;
  double period = 3.0;
  Eigen::Vector3d direction = {-1.0, 0.0, 0.0};

  void validate() const;
  double force_at(double t) const;
  Eigen::Vector3d force_vector(double t) const { return force_at(t) * direction; }
};

/// Projection of a commanded world CoP onto the stance-foot support box.
Eigen::Vector2d clamp_cop(const WalkerParams& params,
                          const LipWalkerState& state,
                          const Eigen::Vector2d& cop_command);

/// Horizontal CoM acceleration under the applied CoP and external force.
/// Callers pass an already clamped CoP; the params' mismatch force is added
/// internally.
Eigen::Vector2d lip_dynamics(const WalkerParams& params,
                             const LipWalkerState& state,
                             const Eigen::Vector2d& cop_applied,
                             const Eigen::Vector3d& f_ext);

/// One RK4 step of the CoM under a zero-order-hold CoP command (clamped once
/// at entry).  Feet, stance, and clock are unchanged.
LipWalkerState integrate(const WalkerParams& params, const LipWalkerState& state,
                         const Eigen::Vector2d& cop_command,
                         const Eigen::Vector3d& f_ext, double dt);

/// Foot-strike reset: places the swing foot at the touchdown target, toggles
/// stance, resets the domain clock, and records the new swing start.  CoM
/// position and velocity are continuous.  Throws StepTooLong when the
/// touchdown exceeds the kinematic step limit in x.
LipWalkerState impact_swap(const WalkerParams& params,
                           const LipWalkerState& state,
                           const Eigen::Vector2d& touchdown_xy, double t_now);

struct Observation {
  Eigen::Matrix<double, 4, 1> mu;
  Eigen::Matrix<double, 6, 1> eta;
};

/// The stance-frame 2-block of a mu vector (entries 0-1 are the left frame,
/// 2-3 the right frame).
inline Eigen::Vector2d stance_block(const Eigen::Matrix<double, 4, 1>& mu,
                                    Stance stance) {
  return stance == Stance::Left ? mu.head<2>() : mu.tail<2>();
}

/// Redundant two-foot observation.  The sampled CoM offset deviation enters
/// as a bias on the CoM x estimate; optional Gaussian noise on eta.
Observation observe(const WalkerParams& params, const LipWalkerState& state,
                    const Eigen::Vector2d& applied_cop,
                    std::mt19937_64* noise_rng = nullptr);

struct RandomizationRanges {
  double offset_lo = -0.122;
  double offset_hi = -0.106;
  double height_lo = 0.94;
  double height_hi = 1.06;
};

/// Deterministic per-seed sample of the mismatch channel around `nominal`.
WalkerParams randomize_model(std::uint64_t seed, const WalkerParams& nominal,
                             const RandomizationRanges& ranges);

}  // namespace ddpc
