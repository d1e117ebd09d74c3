#include "ddpc/gait.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ddpc/lip.hpp"

namespace ddpc {

void GaitParams::validate(double max_step) const {
  if (step_duration <= 0.0) {
    throw NegativeDuration("GaitParams: step_duration must be positive");
  }
  if (std::abs(step_target.x()) > max_step) {
    throw StepTooLong("GaitParams: step target exceeds the kinematic limit");
  }
}

namespace {

constexpr int kFitSamples = 65;

Eigen::VectorXd uniform_taus() {
  return Eigen::VectorXd::LinSpaced(kFitSamples, 0.0, 1.0);
}

double quintic_smoothstep(double tau) {
  return ((6.0 * tau - 15.0) * tau + 10.0) * tau * tau * tau;
}

BezierCurve fit_com_curve(const GaitDesign& d, Stance stance) {
  const double omega = std::sqrt(d.gravity / d.z0);
  const double v0 = lip_periodic_velocity(d.step_length, omega, d.t_d);
  const double y_mid =
      swing_side(stance) * 0.5 * d.step_width / std::cosh(0.5 * omega * d.t_d);

  const Eigen::VectorXd taus = uniform_taus();
  Eigen::MatrixXd samples(3, taus.size());
  Eigen::Vector3d v_start, v_end, s_start, s_end;
  auto orbit = [&](double tau, Eigen::Vector3d& pos, Eigen::Vector3d& vel) {
    const double t = tau * d.t_d;
    const LipAxisState x = lip_closed_form(
        {-0.5 * d.step_length, v0}, 0.0, 0.0, omega, t);
    // Lateral sway: symmetric about midstance, closest to the stance foot at
    // tau = 1/2.
    const double yc = std::cosh(omega * (t - 0.5 * d.t_d));
    const double ys = std::sinh(omega * (t - 0.5 * d.t_d));
    pos = {x.pos, y_mid * yc, d.z0};
    vel = {x.vel * d.t_d, y_mid * omega * ys * d.t_d, 0.0};  // d/dtau
  };
  for (Eigen::Index i = 0; i < taus.size(); ++i) {
    Eigen::Vector3d pos, vel;
    orbit(taus(i), pos, vel);
    samples.col(i) = pos;
  }
  orbit(0.0, v_start, s_start);
  orbit(1.0, v_end, s_end);
  return BezierCurve::fit_clamped(taus, samples, v_start, v_end, s_start, s_end);
}

BezierCurve fit_swing_curve(const GaitDesign& d, Stance stance) {
  const double side = swing_side(stance);
  const Eigen::VectorXd taus = uniform_taus();
  Eigen::MatrixXd samples(3, taus.size());
  for (Eigen::Index i = 0; i < taus.size(); ++i) {
    const double tau = taus(i);
    samples.col(i) = Eigen::Vector3d(
        -d.step_length + 2.0 * d.step_length * quintic_smoothstep(tau),
        side * d.step_width, d.swing_apex * std::sin(M_PI * tau));
  }
  const Eigen::Vector3d v_start(-d.step_length, side * d.step_width, 0.0);
  const Eigen::Vector3d v_end(d.step_length, side * d.step_width, 0.0);
  const Eigen::Vector3d s_start(0.0, 0.0, d.swing_apex * M_PI);
  const Eigen::Vector3d s_end(0.0, 0.0, -d.swing_apex * M_PI);
  return BezierCurve::fit_clamped(taus, samples, v_start, v_end, s_start, s_end);
}

nlohmann::json curve_to_json(const BezierCurve& c) {
  nlohmann::json rows = nlohmann::json::array();
  const Eigen::MatrixXd& m = c.control_points();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
  }
  return rows;
}

BezierCurve curve_from_json(const nlohmann::json& rows) {
  const auto data = rows.get<std::vector<std::vector<double>>>();
  Eigen::MatrixXd m(data.size(), BezierCurve::kPoints);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].size() != BezierCurve::kPoints) {
      throw DimensionMismatch("GaitLibrary: curve row without 8 control points");
    }
    for (int j = 0; j < BezierCurve::kPoints; ++j) {
      m(static_cast<Eigen::Index>(i), j) = data[i][j];
    }
  }
  return BezierCurve(std::move(m));
}

}  // namespace

GaitLibrary make_walker_gait(const GaitDesign& d) {
  return GaitLibrary{
      .com_left = fit_com_curve(d, Stance::Left),
      .com_right = fit_com_curve(d, Stance::Right),
      .swing_left = fit_swing_curve(d, Stance::Left),
      .swing_right = fit_swing_curve(d, Stance::Right),
      .t_d = d.t_d,
      .lambda_default = {d.step_length, d.step_width},
      .step_width = d.step_width,
      .z0 = d.z0,
      .swing_apex = d.swing_apex,
  };
}

void GaitLibrary::save_json(const std::string& path) const {
  nlohmann::json j;
  j["t_d"] = t_d;
  j["lambda"] = {lambda_default.x(), lambda_default.y()};
  j["step_width"] = step_width;
  j["z0"] = z0;
  j["swing_apex"] = swing_apex;
  j["curves"]["com_left"] = curve_to_json(com_left);
  j["curves"]["com_right"] = curve_to_json(com_right);
  j["curves"]["swing_left"] = curve_to_json(swing_left);
  j["curves"]["swing_right"] = curve_to_json(swing_right);
  std::ofstream out(path);
  if (!out) {
    throw Error("GaitLibrary: cannot open " + path + " for writing");
  }
  out << j.dump(2);
}

GaitLibrary GaitLibrary::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("GaitLibrary: cannot open " + path);
  }
  nlohmann::json j;
  in >> j;
  const auto& curves = j.at("curves");
  GaitLibrary lib{
      .com_left = curve_from_json(curves.at("com_left")),
      .com_right = curve_from_json(curves.at("com_right")),
      .swing_left = curve_from_json(curves.at("swing_left")),
      .swing_right = curve_from_json(curves.at("swing_right")),
      .t_d = j.at("t_d").get<double>(),
      .lambda_default = {j.at("lambda")[0].get<double>(),
                         j.at("lambda")[1].get<double>()},
      .step_width = j.at("step_width").get<double>(),
      .z0 = j.at("z0").get<double>(),
      .swing_apex = j.at("swing_apex").get<double>(),
  };
  if (lib.t_d <= 0.0) {
    throw NegativeDuration("GaitLibrary: nonpositive step duration");
  }
  return lib;
}

}  // namespace ddpc
