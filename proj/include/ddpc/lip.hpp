#pragma once

#include <Eigen/Dense>

namespace ddpc {

/// One horizontal axis of the linear inverted pendulum.
struct LipAxisState {
  double pos = 0.0;
  double vel = 0.0;
};

/// Closed-form solution of x'' = omega^2 (x - u) + a at time t for constant
/// CoP u and constant extra acceleration a.
LipAxisState lip_closed_form(const LipAxisState& s0, double u, double a,
                             double omega, double t);

/// Exact zero-order-hold discretization of the LIP axis:
/// [p; v]_{k+1} = ad [p; v]_k + bd u_k.
void lip_discretize(double omega, double dt, Eigen::Matrix2d& ad,
                    Eigen::Vector2d& bd);

/// Orbital energy of the LIP about a fixed CoP; conserved along free motion.
inline double lip_orbital_energy(double pos, double vel, double u,
                                 double omega) {
  const double rel = pos - u;
  return 0.5 * vel * vel - 0.5 * omega * omega * rel * rel;
}

/// Initial velocity of the symmetric periodic orbit that carries the CoM
/// from -step/2 to +step/2 relative to the stance foot in one step.
inline double lip_periodic_velocity(double step, double omega, double t_d) {
  return 0.5 * omega * step / std::tanh(0.5 * omega * t_d);
}

}  // namespace ddpc
