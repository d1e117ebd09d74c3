#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ddpc {

/// Trapezoid-rule integral of the squared tracking deviation
/// int ||y_act(t) - y_des(t)||^2 dt over the logged samples.
double cumulative_tracking_error(const Eigen::VectorXd& times,
                                 const Eigen::MatrixXd& y_act,
                                 const Eigen::MatrixXd& y_des);

struct StepRecord {
  double time = 0.0;
  double desired = 0.0;   // commanded step length (x)
  double achieved = 0.0;  // realized stance-to-stance displacement (x)
};

struct MetricsReport {
  double cumulative_error = 0.0;
  double survival_time = 0.0;
  bool success = false;
  std::vector<StepRecord> steps;
  std::vector<double> fit_wall_ms;
  int qp_failures = 0;

  /// Mean |achieved - desired| over settled steps (the first two carry the
  /// start-up transient and are skipped).
  double mean_abs_step_error() const;
};

}  // namespace ddpc
