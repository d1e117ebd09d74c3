#include "ddpc/bezier.hpp"

#include <cmath>

namespace ddpc {

namespace {

constexpr double kDomainTol = 1e-12;

void check_domain(double tau) {
  if (tau < -kDomainTol || tau > 1.0 + kDomainTol) {
    throw OutOfDomain("BezierCurve: tau outside [0, 1]");
  }
}

// de Casteljau over the columns of `points`.
Eigen::VectorXd de_casteljau(Eigen::MatrixXd points, double tau) {
  const Eigen::Index n = points.cols();
  for (Eigen::Index level = n - 1; level > 0; --level) {
    for (Eigen::Index i = 0; i < level; ++i) {
      points.col(i) = (1.0 - tau) * points.col(i) + tau * points.col(i + 1);
    }
  }
  return points.col(0);
}

}  // namespace

double bernstein(int i, int n, double tau) {
  if (i < 0 || i > n) return 0.0;
  double binom = 1.0;
  for (int k = 0; k < i; ++k) {
    binom *= static_cast<double>(n - k) / static_cast<double>(k + 1);
  }
  return binom * std::pow(tau, i) * std::pow(1.0 - tau, n - i);
}

BezierCurve::BezierCurve(Eigen::MatrixXd control_points)
    : ctrl_(std::move(control_points)) {
  if (ctrl_.cols() != kPoints) {
    throw DimensionMismatch("BezierCurve: expected exactly 8 control points");
  }
  if (ctrl_.rows() < 1) {
    throw DimensionMismatch("BezierCurve: needs at least one output row");
  }
}

Eigen::VectorXd BezierCurve::value(double tau) const {
  check_domain(tau);
  return de_casteljau(ctrl_, tau);
}

Eigen::VectorXd BezierCurve::derivative(double tau) const {
  check_domain(tau);
  const Eigen::MatrixXd diff =
      ctrl_.rightCols(kOrder) - ctrl_.leftCols(kOrder);
  return static_cast<double>(kOrder) * de_casteljau(diff, tau);
}

Eigen::VectorXd BezierCurve::second_derivative(double tau) const {
  check_domain(tau);
  const Eigen::MatrixXd d1 = ctrl_.rightCols(kOrder) - ctrl_.leftCols(kOrder);
  const Eigen::MatrixXd d2 = d1.rightCols(kOrder - 1) - d1.leftCols(kOrder - 1);
  return static_cast<double>(kOrder * (kOrder - 1)) * de_casteljau(d2, tau);
}

BezierCurve BezierCurve::fit_clamped(const Eigen::VectorXd& taus,
                                     const Eigen::MatrixXd& samples,
                                     const Eigen::VectorXd& value_start,
                                     const Eigen::VectorXd& value_end,
                                     const Eigen::VectorXd& slope_start,
                                     const Eigen::VectorXd& slope_end) {
  const int d = static_cast<int>(samples.rows());
  if (taus.size() != samples.cols() || value_start.size() != d ||
      value_end.size() != d || slope_start.size() != d ||
      slope_end.size() != d) {
    throw DimensionMismatch("BezierCurve::fit_clamped: shapes disagree");
  }
  if (taus.size() < 4) {
    throw SignalTooShort("BezierCurve::fit_clamped: needs >= 4 samples");
  }

  Eigen::MatrixXd ctrl(d, kPoints);
  ctrl.col(0) = value_start;
  ctrl.col(1) = value_start + slope_start / kOrder;
  ctrl.col(6) = value_end - slope_end / kOrder;
  ctrl.col(7) = value_end;

  // Residual after removing the pinned basis terms; solve for P2..P5.
  const Eigen::Index k = taus.size();
  Eigen::MatrixXd basis_free(k, 4);
  Eigen::MatrixXd target = samples.transpose();  // k x d
  for (Eigen::Index s = 0; s < k; ++s) {
    const double tau = taus(s);
    for (int j = 0; j < 4; ++j) {
      basis_free(s, j) = bernstein(2 + j, kOrder, tau);
    }
    target.row(s) -= bernstein(0, kOrder, tau) * ctrl.col(0).transpose() +
                     bernstein(1, kOrder, tau) * ctrl.col(1).transpose() +
                     bernstein(6, kOrder, tau) * ctrl.col(6).transpose() +
                     bernstein(7, kOrder, tau) * ctrl.col(7).transpose();
  }
  const Eigen::MatrixXd free_points =
      basis_free.colPivHouseholderQr().solve(target);  // 4 x d
  ctrl.middleCols(2, 4) = free_points.transpose();
  return BezierCurve(std::move(ctrl));
}

}  // namespace ddpc
