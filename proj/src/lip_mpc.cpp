#include "ddpc/lip_mpc.hpp"

#include <cmath>

#include "ddpc/lip.hpp"

namespace ddpc {

void LipMpcConfig::validate() const {
  if (z_model <= 0.0 || dt <= 0.0 || horizon < 1) {
    throw ConfigError("LipMpcConfig: needs z_model > 0, dt > 0, horizon >= 1");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(q_weight).info() != Eigen::Success ||
      Eigen::LLT<Eigen::MatrixXd>(r_weight).info() != Eigen::Success) {
    throw NotPositiveDefinite("LipMpcConfig: Q and R must be SPD");
  }
  if ((stance_cop_lower.array() > stance_cop_upper.array()).any() ||
      (eta_lower.array() > eta_upper.array()).any()) {
    throw ConfigError("LipMpcConfig: empty feasibility box");
  }
}

LipMpcPlanner::LipMpcPlanner(LipMpcConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  const int n = cfg_.horizon;
  Eigen::Matrix2d ad;
  Eigen::Vector2d bd;
  lip_discretize(cfg_.omega(), cfg_.dt, ad, bd);

  // Position row of Ad^(k+1) and of Ad^(k-j) Bd.
  s_state_.resize(n, 2);
  s_input_ = Eigen::MatrixXd::Zero(n, n);
  std::vector<Eigen::Matrix2d> ad_pow(n + 1);
  ad_pow[0].setIdentity();
  for (int k = 1; k <= n; ++k) ad_pow[k] = ad * ad_pow[k - 1];
  for (int k = 0; k < n; ++k) {
    s_state_.row(k) = ad_pow[k + 1].row(0);
    for (int j = 0; j <= k; ++j) {
      s_input_(k, j) = (ad_pow[k - j] * bd)(0);
    }
  }
}

PlanResult LipMpcPlanner::plan(const Eigen::Vector2d& com_xy,
                               const Eigen::Vector2d& vel_xy,
                               const HorizonRefs& refs,
                               double first_knot_time) {
  const int n = cfg_.horizon;
  if (refs.knots() != n) {
    throw DimensionMismatch("LipMpcPlanner: reference horizon disagrees");
  }

  // Predicted CoM positions: per axis, p = s_state * xi0 + s_input * u.
  const Eigen::Vector2d xi_x(com_xy.x(), vel_xy.x());
  const Eigen::Vector2d xi_y(com_xy.y(), vel_xy.y());
  const Eigen::VectorXd px0 = s_state_ * xi_x;
  const Eigen::VectorXd py0 = s_state_ * xi_y;

  // eta = E w + e0 and mu = M w + m0 with w = [u_x; u_y].
  Eigen::MatrixXd e_mat = Eigen::MatrixXd::Zero(6 * n, 2 * n);
  Eigen::VectorXd e0(6 * n);
  Eigen::MatrixXd m_mat = Eigen::MatrixXd::Zero(4 * n, 2 * n);
  Eigen::VectorXd m0(4 * n);
  for (int k = 0; k < n; ++k) {
    const Eigen::Vector3d pl = refs.p_left.col(k);
    const Eigen::Vector3d pr = refs.p_right.col(k);
    e_mat.block(6 * k + 0, 0, 1, n) = s_input_.row(k);
    e_mat.block(6 * k + 1, n, 1, n) = s_input_.row(k);
    e_mat.block(6 * k + 3, 0, 1, n) = s_input_.row(k);
    e_mat.block(6 * k + 4, n, 1, n) = s_input_.row(k);
    e0.segment<6>(6 * k) << px0(k) - pl.x(), py0(k) - pl.y(),
        cfg_.z_model - pl.z(), px0(k) - pr.x(), py0(k) - pr.y(),
        cfg_.z_model - pr.z();

    m_mat(4 * k + 0, k) = 1.0;
    m_mat(4 * k + 1, n + k) = 1.0;
    m_mat(4 * k + 2, k) = 1.0;
    m_mat(4 * k + 3, n + k) = 1.0;
    m0.segment<4>(4 * k) << -pl.x(), -pl.y(), -pr.x(), -pr.y();
  }

  Eigen::MatrixXd q_bar = Eigen::MatrixXd::Zero(6 * n, 6 * n);
  Eigen::MatrixXd r_bar = Eigen::MatrixXd::Zero(4 * n, 4 * n);
  for (int k = 0; k < n; ++k) {
    q_bar.block<6, 6>(6 * k, 6 * k) = cfg_.q_weight;
    r_bar.block<4, 4>(4 * k, 4 * k) = cfg_.r_weight;
  }

  const Eigen::Map<const Eigen::VectorXd> r_eta(refs.r_eta.data(), 6 * n);
  const Eigen::Map<const Eigen::VectorXd> r_mu(refs.r_mu.data(), 4 * n);

  QuadraticProgram qp;
  const Eigen::MatrixXd qe = q_bar * e_mat;
  const Eigen::MatrixXd rm = r_bar * m_mat;
  qp.H = 2.0 * (e_mat.transpose() * qe + m_mat.transpose() * rm);
  qp.H = 0.5 * (qp.H + qp.H.transpose());
  qp.f = 2.0 * (qe.transpose() * (e0 - r_eta) + rm.transpose() * (m0 - r_mu));

  // World CoP within the stance support box per knot.
  qp.lower.resize(2 * n);
  qp.upper.resize(2 * n);
  for (int k = 0; k < n; ++k) {
    const Eigen::Vector3d& p_stance =
        refs.stance[k] == Stance::Left ? refs.p_left.col(k) : refs.p_right.col(k);
    qp.lower(k) = p_stance.x() + cfg_.stance_cop_lower.x();
    qp.upper(k) = p_stance.x() + cfg_.stance_cop_upper.x();
    qp.lower(n + k) = p_stance.y() + cfg_.stance_cop_lower.y();
    qp.upper(n + k) = p_stance.y() + cfg_.stance_cop_upper.y();
  }

  if (cfg_.eta_box_enabled) {
    // Both eta blocks bound the same predicted CoM coordinate; intersect the
    // bands so only one affine row per axis and knot survives.
    qp.A.resize(2 * n, 2 * n);
    qp.A.setZero();
    qp.a_lower.resize(2 * n);
    qp.a_upper.resize(2 * n);
    for (int k = 0; k < n; ++k) {
      const Eigen::Vector3d pl = refs.p_left.col(k);
      const Eigen::Vector3d pr = refs.p_right.col(k);
      qp.A.block(k, 0, 1, n) = s_input_.row(k);
      qp.a_lower(k) = std::max(cfg_.eta_lower(0) + pl.x(),
                               cfg_.eta_lower(3) + pr.x()) -
                      px0(k);
      qp.a_upper(k) = std::min(cfg_.eta_upper(0) + pl.x(),
                               cfg_.eta_upper(3) + pr.x()) -
                      px0(k);
      qp.A.block(n + k, n, 1, n) = s_input_.row(k);
      qp.a_lower(n + k) = std::max(cfg_.eta_lower(1) + pl.y(),
                                   cfg_.eta_lower(4) + pr.y()) -
                          py0(k);
      qp.a_upper(n + k) = std::min(cfg_.eta_upper(1) + pl.y(),
                                   cfg_.eta_upper(4) + pr.y()) -
                          py0(k);
    }
  } else {
    qp.A.resize(0, 2 * n);
    qp.a_lower.resize(0);
    qp.a_upper.resize(0);
  }

  std::optional<Eigen::VectorXd> warm;
  if (have_prev_ && prev_solution_.size() == 2 * n) {
    const int shift = std::max(
        0,
        static_cast<int>(std::lround((first_knot_time - prev_first_knot_) / cfg_.dt)));
    Eigen::VectorXd shifted = prev_solution_;
    if (shift > 0 && shift < n) {
      for (int axis = 0; axis < 2; ++axis) {
        const int base = axis * n;
        shifted.segment(base, n - shift) =
            prev_solution_.segment(base + shift, n - shift);
        shifted.segment(base + n - shift, shift)
            .setConstant(prev_solution_(base + n - 1));
      }
    }
    warm = shifted;
  }

  const QpSolution sol = solver_.solve(qp, warm);

  PlanResult plan;
  plan.status = sol.status;
  plan.iterations = sol.iterations;
  const Eigen::VectorXd mu_stacked = m_mat * sol.z + m0;
  const Eigen::VectorXd eta_stacked = e_mat * sol.z + e0;
  plan.mu_plan = Eigen::Map<const Eigen::MatrixXd>(mu_stacked.data(), 4, n);
  plan.eta_plan = Eigen::Map<const Eigen::MatrixXd>(eta_stacked.data(), 6, n);
  plan.knot_times = Eigen::VectorXd::LinSpaced(
      n, first_knot_time, first_knot_time + (n - 1) * cfg_.dt);

  double cost = 0.0;
  for (int k = 0; k < n; ++k) {
    const Vector6d de = plan.eta_plan.col(k) - refs.r_eta.col(k);
    const Vector4d dm = plan.mu_plan.col(k) - refs.r_mu.col(k);
    cost += de.dot(cfg_.q_weight * de) + dm.dot(cfg_.r_weight * dm);
  }
  plan.objective = cost;

  prev_solution_ = sol.z;
  prev_first_knot_ = first_knot_time;
  have_prev_ = true;
  return plan;
}

}  // namespace ddpc
