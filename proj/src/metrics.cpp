#include "ddpc/metrics.hpp"

#include <cmath>

#include "ddpc/errors.hpp"

namespace ddpc {

double cumulative_tracking_error(const Eigen::VectorXd& times,
                                 const Eigen::MatrixXd& y_act,
                                 const Eigen::MatrixXd& y_des) {
  const Eigen::Index n = times.size();
  if (y_act.cols() != n || y_des.cols() != n || y_act.rows() != y_des.rows()) {
    throw DimensionMismatch("cumulative_tracking_error: shapes disagree");
  }
  if (n < 2) return 0.0;
  double integral = 0.0;
  double prev = (y_act.col(0) - y_des.col(0)).squaredNorm();
  for (Eigen::Index k = 1; k < n; ++k) {
    const double cur = (y_act.col(k) - y_des.col(k)).squaredNorm();
    integral += 0.5 * (prev + cur) * (times(k) - times(k - 1));
    prev = cur;
  }
  return integral;
}

double MetricsReport::mean_abs_step_error() const {
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 2; i < steps.size(); ++i) {
    sum += std::abs(steps[i].achieved - steps[i].desired);
    ++count;
  }
  return count > 0 ? sum / count : 0.0;
}

}  // namespace ddpc
