#include "ddpc/lip.hpp"

#include <cmath>

namespace ddpc {

LipAxisState lip_closed_form(const LipAxisState& s0, double u, double a,
                             double omega, double t) {
  const double eq = u - a / (omega * omega);
  const double xi0 = s0.pos - eq;
  const double c = std::cosh(omega * t);
  const double s = std::sinh(omega * t);
  LipAxisState out;
  out.pos = eq + xi0 * c + s0.vel / omega * s;
  out.vel = xi0 * omega * s + s0.vel * c;
  return out;
}

void lip_discretize(double omega, double dt, Eigen::Matrix2d& ad,
                    Eigen::Vector2d& bd) {
  const double c = std::cosh(omega * dt);
  const double s = std::sinh(omega * dt);
  ad << c, s / omega, omega * s, c;
  bd << 1.0 - c, -omega * s;
}

}  // namespace ddpc
