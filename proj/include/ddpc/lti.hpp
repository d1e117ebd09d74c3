#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "ddpc/errors.hpp"

namespace ddpc {

/// Discrete-time LTI system theta(t+1) = A theta + B mu, eta = C theta + D mu.
/// step() computes the output at the pre-step state, then advances.
struct LtiSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::MatrixXd D;
  Eigen::VectorXd state;

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }
  int output_dim() const { return static_cast<int>(C.rows()); }

  void validate() const;

  /// Advances the state by one sample and returns the output at the
  /// pre-step state.
  Eigen::VectorXd step(const Eigen::VectorXd& mu);

  /// Outputs for a whole input sequence (columns are samples); the stored
  /// state is advanced past the end of the sequence.
  Eigen::MatrixXd rollout(const Eigen::MatrixXd& inputs);

  /// Random minimal (controllable + observable) system with spectral radius
  /// scaled to `radius`.  Deterministic per generator state.
  static LtiSystem random_stable(std::mt19937_64& rng, int beta, int kappa,
                                 int nu, double radius = 0.9);
};

}  // namespace ddpc
