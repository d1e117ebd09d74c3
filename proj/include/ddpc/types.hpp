#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "ddpc/errors.hpp"

namespace ddpc {

/// A recorded input/output trajectory sampled at a fixed interval.
/// Inputs are stored as a kappa x T matrix, outputs as nu x T, one column per
/// sample.  Construction validates dimensions; instances are immutable.
class IoTrajectory {
 public:
  IoTrajectory(Eigen::MatrixXd inputs, Eigen::MatrixXd outputs,
               double sample_interval);

  /// Builds from per-sample vectors, rejecting ragged data.
  static IoTrajectory from_samples(const std::vector<Eigen::VectorXd>& inputs,
                                   const std::vector<Eigen::VectorXd>& outputs,
                                   double sample_interval);

  int length() const { return static_cast<int>(inputs_.cols()); }
  int input_dim() const { return static_cast<int>(inputs_.rows()); }
  int output_dim() const { return static_cast<int>(outputs_.rows()); }
  double sample_interval() const { return sample_interval_; }

  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const Eigen::MatrixXd& outputs() const { return outputs_; }

 private:
  Eigen::MatrixXd inputs_;
  Eigen::MatrixXd outputs_;
  double sample_interval_;
};

/// Horizon configuration for the data-driven model.  L is always derived as
/// T_ini + N and never stored separately.
struct DdpcHyperparams {
  int T = 0;        // total data length per trajectory
  int T_ini = 1;    // estimation horizon
  int N = 1;        // control horizon
  double delta_t = 0.02;
  std::optional<int> beta_hint;  // presumed state dim, PE-order checks only

  int L() const { return T_ini + N; }

  void validate() const {
    if (T_ini < 1 || N < 1) {
      throw ConfigError("DdpcHyperparams: T_ini and N must be >= 1");
    }
    if (L() < 2 || T <= L()) {
      throw ConfigError("DdpcHyperparams: requires T > L >= 2");
    }
    if (delta_t <= 0.0) {
      throw ConfigError("DdpcHyperparams: delta_t must be positive");
    }
  }
};

}  // namespace ddpc
