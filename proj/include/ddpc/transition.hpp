#pragma once

#include <Eigen/Dense>
#include <string>

#include "ddpc/hankel.hpp"

namespace ddpc {

/// Relative singular-value cutoff for the SVD pseudo-inverse behind the
/// least-squares fit (rank-revealing, minimum-norm solution).
inline constexpr double kPinvCutoff = 1e-10;

struct TransitionDims {
  int kappa = 0;
  int nu = 0;
  int t_ini = 0;
  int horizon = 0;  // N

  int rows() const { return nu * horizon; }
  int cols() const { return kappa * t_ini + nu * t_ini + kappa * horizon; }
  int past_cols() const { return (kappa + nu) * t_ini; }

  bool operator==(const TransitionDims&) const = default;
};

/// The N-step data-driven transition matrix G mapping stacked
/// (mu_ini, eta_ini, mu_future) to the predicted stacked eta_future.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  TransitionMatrix(Eigen::MatrixXd g, TransitionDims dims, double fit_residual,
                   double condition_estimate);

  const Eigen::MatrixXd& g() const { return g_; }
  const TransitionDims& dims() const { return dims_; }
  double fit_residual() const { return fit_residual_; }
  double condition_estimate() const { return condition_estimate_; }

  /// Column split of G acting on the past window (mu_ini; eta_ini).
  Eigen::Ref<const Eigen::MatrixXd> g_past() const {
    return g_.leftCols(dims_.past_cols());
  }
  /// Column split of G acting on the future inputs mu_future.
  Eigen::Ref<const Eigen::MatrixXd> g_future() const {
    return g_.rightCols(dims_.kappa * dims_.horizon);
  }

  void save_json(const std::string& path) const;
  static TransitionMatrix load_json(const std::string& path);

 private:
  Eigen::MatrixXd g_;
  TransitionDims dims_;
  double fit_residual_ = 0.0;
  double condition_estimate_ = 0.0;
};

/// Least-squares fit G = Y_f * pinv([U_p; Y_p; U_f]) via SVD with relative
/// cutoff.  Throws DegenerateData when every singular value of the stacked
/// regressor falls below the cutoff.
TransitionMatrix fit_transition_matrix(const PartitionedHankel& blocks,
                                       double sv_cutoff = kPinvCutoff);

/// Applies G to the stacked arguments.  Pure function.
Eigen::VectorXd predict(const TransitionMatrix& g,
                        const Eigen::VectorXd& mu_ini,
                        const Eigen::VectorXd& eta_ini,
                        const Eigen::VectorXd& mu_future);

}  // namespace ddpc
