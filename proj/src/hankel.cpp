#include "ddpc/hankel.hpp"

#include <Eigen/SVD>

namespace ddpc {

Eigen::MatrixXd build_hankel(const Eigen::MatrixXd& signal, int depth) {
  const int d = static_cast<int>(signal.rows());
  const int T = static_cast<int>(signal.cols());
  if (depth < 1) {
    throw SignalTooShort("build_hankel: depth must be >= 1");
  }
  if (T < depth) {
    throw SignalTooShort("build_hankel: signal length " + std::to_string(T) +
                         " < depth " + std::to_string(depth));
  }
  const int m = T - depth + 1;
  Eigen::MatrixXd h(d * depth, m);
  for (int i = 0; i < depth; ++i) {
    h.middleRows(i * d, d) = signal.middleCols(i, m);
  }
  return h;
}

PeReport is_persistently_exciting(const Eigen::MatrixXd& signal, int order) {
  const Eigen::MatrixXd h = build_hankel(signal, order);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h);
  const Eigen::VectorXd& sv = svd.singularValues();

  PeReport report;
  report.required_rank = static_cast<int>(h.rows());
  const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  const double cutoff = kPeRankCutoff * sigma_max;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > 0.0) {
      report.rank = static_cast<int>(i) + 1;
      report.smallest_retained_sv = sv(i);
    } else {
      break;
    }
  }
  report.excited = report.rank == report.required_rank;
  return report;
}

PartitionedHankel partition(std::span<const IoTrajectory> data,
                            const DdpcHyperparams& params) {
  params.validate();
  if (data.empty()) {
    throw SignalTooShort("partition: no trajectories given");
  }
  const int L = params.L();
  const int kappa = data.front().input_dim();
  const int nu = data.front().output_dim();

  int total_cols = 0;
  for (const IoTrajectory& traj : data) {
    if (traj.input_dim() != kappa || traj.output_dim() != nu) {
      throw DimensionMismatch("partition: trajectories disagree on dimensions");
    }
    if (traj.length() <= L) {
      throw SignalTooShort("partition: trajectory of length " +
                           std::to_string(traj.length()) +
                           " too short for L = " + std::to_string(L));
    }
    total_cols += traj.length() - L + 1;
  }

  PartitionedHankel out;
  out.kappa = kappa;
  out.nu = nu;
  out.t_ini = params.T_ini;
  out.horizon = params.N;
  out.u_past.resize(kappa * params.T_ini, total_cols);
  out.u_future.resize(kappa * params.N, total_cols);
  out.y_past.resize(nu * params.T_ini, total_cols);
  out.y_future.resize(nu * params.N, total_cols);

  int col = 0;
  for (const IoTrajectory& traj : data) {
    const int m = traj.length() - L + 1;
    const Eigen::MatrixXd hu = build_hankel(traj.inputs(), L);
    const Eigen::MatrixXd hy = build_hankel(traj.outputs(), L);
    out.u_past.middleCols(col, m) = hu.topRows(kappa * params.T_ini);
    out.u_future.middleCols(col, m) = hu.bottomRows(kappa * params.N);
    out.y_past.middleCols(col, m) = hy.topRows(nu * params.T_ini);
    out.y_future.middleCols(col, m) = hy.bottomRows(nu * params.N);
    col += m;
  }
  return out;
}

PartitionedHankel partition(const IoTrajectory& data,
                            const DdpcHyperparams& params) {
  return partition(std::span<const IoTrajectory>(&data, 1), params);
}

}  // namespace ddpc
