#pragma once

#include <Eigen/Dense>

#include "ddpc/errors.hpp"

namespace ddpc {

/// Order-7 Bezier curve: d rows of 8 control points, evaluated on tau in
/// [0, 1] by de Casteljau.  Derivatives come from control-point differences.
class BezierCurve {
 public:
  static constexpr int kOrder = 7;
  static constexpr int kPoints = kOrder + 1;

  explicit BezierCurve(Eigen::MatrixXd control_points);

  int dim() const { return static_cast<int>(ctrl_.rows()); }
  const Eigen::MatrixXd& control_points() const { return ctrl_; }

  Eigen::VectorXd value(double tau) const;
  Eigen::VectorXd derivative(double tau) const;
  Eigen::VectorXd second_derivative(double tau) const;

  /// Least-squares fit over samples with pinned endpoint values and slopes
  /// (P0, P1, P6, P7 fixed; P2..P5 free).  Reproduces any polynomial of
  /// degree <= 7 with consistent pins exactly.
  static BezierCurve fit_clamped(const Eigen::VectorXd& taus,
                                 const Eigen::MatrixXd& samples,
                                 const Eigen::VectorXd& value_start,
                                 const Eigen::VectorXd& value_end,
                                 const Eigen::VectorXd& slope_start,
                                 const Eigen::VectorXd& slope_end);

 private:
  Eigen::MatrixXd ctrl_;
};

/// Bernstein basis value b_{i,n}(tau).
double bernstein(int i, int n, double tau);

}  // namespace ddpc
