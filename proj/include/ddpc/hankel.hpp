#pragma once

#include <Eigen/Dense>
#include <span>

#include "ddpc/types.hpp"

namespace ddpc {

/// Singular values below this fraction of the largest one count as zero when
/// ranking a Hankel matrix for persistent excitation.
inline constexpr double kPeRankCutoff = 1e-9;

/// Block-Hankel matrix of depth L from a d x T signal (columns are samples).
/// Block (i, j) is signal column i + j, so column j of the result is the
/// length-L window starting at sample j.  Result is (d*L) x (T-L+1).
Eigen::MatrixXd build_hankel(const Eigen::MatrixXd& signal, int depth);

struct PeReport {
  bool excited = false;
  int rank = 0;
  int required_rank = 0;
  double smallest_retained_sv = 0.0;
};

/// Checks persistent excitation of the given order: the depth-L Hankel matrix
/// of the signal must have full row rank d*L.
PeReport is_persistently_exciting(const Eigen::MatrixXd& signal, int order);

/// Past/future blocks of the mosaic input and output Hankel matrices.
struct PartitionedHankel {
  Eigen::MatrixXd u_past;    // kappa*T_ini x M
  Eigen::MatrixXd u_future;  // kappa*N x M
  Eigen::MatrixXd y_past;    // nu*T_ini x M
  Eigen::MatrixXd y_future;  // nu*N x M
  int kappa = 0;
  int nu = 0;
  int t_ini = 0;
  int horizon = 0;  // N

  int cols() const { return static_cast<int>(u_past.cols()); }
};

/// Builds the mosaic Hankel over one or more trajectories (per-trajectory
/// Hankels concatenated column-wise, so no window straddles a recording
/// boundary) and splits rows at the estimation horizon.
PartitionedHankel partition(std::span<const IoTrajectory> data,
                            const DdpcHyperparams& params);

PartitionedHankel partition(const IoTrajectory& data,
                            const DdpcHyperparams& params);

}  // namespace ddpc
