#include "ddpc/walker.hpp"

#include <cmath>

#include "ddpc/errors.hpp"

namespace ddpc {

void PerturbationSchedule::validate() const {
  if (period <= 0.0) {
    throw NegativeDuration("PerturbationSchedule: period must be positive");
  }
}

double PerturbationSchedule::force_at(double t) const {
  if (t < 0.0) return 0.0;
  return base_force + increment * std::floor(t / period);
}

Eigen::Vector2d clamp_cop(const WalkerParams& params,
                          const LipWalkerState& state,
                          const Eigen::Vector2d& cop_command) {
  const Eigen::Vector2d center = state.stance_foot().head<2>();
  Eigen::Vector2d cop = cop_command;
  cop.x() = std::clamp(cop.x(), center.x() - params.support.half_x,
                       center.x() + params.support.half_x);
  cop.y() = std::clamp(cop.y(), center.y() - params.support.half_y,
                       center.y() + params.support.half_y);
  return cop;
}

Eigen::Vector2d lip_dynamics(const WalkerParams& params,
                             const LipWalkerState& state,
                             const Eigen::Vector2d& cop_applied,
                             const Eigen::Vector3d& f_ext) {
  const double w2 = params.gravity / params.effective_height();
  Eigen::Vector2d accel =
      w2 * (state.p_com.head<2>() - cop_applied) + f_ext.head<2>() / params.mass;
  accel.x() += params.mismatch_force_x() / params.mass;
  return accel;
}

LipWalkerState integrate(const WalkerParams& params, const LipWalkerState& state,
                         const Eigen::Vector2d& cop_command,
                         const Eigen::Vector3d& f_ext, double dt) {
  if (dt <= 0.0) {
    throw NegativeDuration("integrate: dt must be positive");
  }
  const Eigen::Vector2d cop = clamp_cop(params, state, cop_command);

  // RK4 on (p_xy, v_xy); the CoP and external force are held over the step.
  auto accel = [&](const Eigen::Vector2d& p) {
    LipWalkerState probe = state;
    probe.p_com.head<2>() = p;
    return lip_dynamics(params, probe, cop, f_ext);
  };
  const Eigen::Vector2d p0 = state.p_com.head<2>();
  const Eigen::Vector2d v0 = state.v_com.head<2>();

  const Eigen::Vector2d k1p = v0;
  const Eigen::Vector2d k1v = accel(p0);
  const Eigen::Vector2d k2p = v0 + 0.5 * dt * k1v;
  const Eigen::Vector2d k2v = accel(p0 + 0.5 * dt * k1p);
  const Eigen::Vector2d k3p = v0 + 0.5 * dt * k2v;
  const Eigen::Vector2d k3v = accel(p0 + 0.5 * dt * k2p);
  const Eigen::Vector2d k4p = v0 + dt * k3v;
  const Eigen::Vector2d k4v = accel(p0 + dt * k3p);

  LipWalkerState next = state;
  next.p_com.head<2>() = p0 + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
  next.v_com.head<2>() = v0 + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  return next;
}

LipWalkerState impact_swap(const WalkerParams& params,
                           const LipWalkerState& state,
                           const Eigen::Vector2d& touchdown_xy, double t_now) {
  const double step_x = touchdown_xy.x() - state.stance_foot().x();
  if (std::abs(step_x) > params.max_step) {
    throw StepTooLong("impact_swap: touchdown " + std::to_string(step_x) +
                      " m exceeds the kinematic step limit");
  }
  LipWalkerState next = state;
  next.swing_foot() = Eigen::Vector3d(touchdown_xy.x(), touchdown_xy.y(), 0.0);
  next.stance = other(state.stance);
  next.domain_clock = t_now;
  next.swing_start = next.swing_foot().head<2>();
  return next;
}

Observation observe(const WalkerParams& params, const LipWalkerState& state,
                    const Eigen::Vector2d& applied_cop,
                    std::mt19937_64* noise_rng) {
  Eigen::Vector3d com_meas = state.p_com;
  com_meas.x() += params.obs_bias_gain * params.offset_deviation();

  Observation obs;
  obs.eta << com_meas - state.p_left, com_meas - state.p_right;
  obs.mu << applied_cop - state.p_left.head<2>(),
      applied_cop - state.p_right.head<2>();
  if (noise_rng != nullptr && params.noise_sigma > 0.0) {
    std::normal_distribution<double> gauss(0.0, params.noise_sigma);
    for (int i = 0; i < 6; ++i) obs.eta(i) += gauss(*noise_rng);
  }
  return obs;
}

WalkerParams randomize_model(std::uint64_t seed, const WalkerParams& nominal,
                             const RandomizationRanges& ranges) {
  std::mt19937_64 rng(seed);
  WalkerParams sampled = nominal;
  std::uniform_real_distribution<double> offset(ranges.offset_lo,
                                                ranges.offset_hi);
  std::uniform_real_distribution<double> height(ranges.height_lo,
                                                ranges.height_hi);
  sampled.com_offset = ranges.offset_lo == ranges.offset_hi
                           ? ranges.offset_lo
                           : offset(rng);
  sampled.height_mult =
      ranges.height_lo == ranges.height_hi ? ranges.height_lo : height(rng);
  return sampled;
}

}  // namespace ddpc
