#include "ddpc/transition.hpp"

#include <Eigen/SVD>
#include <fstream>

#include <nlohmann/json.hpp>

namespace ddpc {

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd g, TransitionDims dims,
                                   double fit_residual,
                                   double condition_estimate)
    : g_(std::move(g)),
      dims_(dims),
      fit_residual_(fit_residual),
      condition_estimate_(condition_estimate) {
  if (g_.rows() != dims_.rows() || g_.cols() != dims_.cols()) {
    throw DimensionMismatch("TransitionMatrix: G shape disagrees with dims");
  }
}

TransitionMatrix fit_transition_matrix(const PartitionedHankel& blocks,
                                       double sv_cutoff) {
  const int m = blocks.cols();
  if (m < 1) {
    throw DegenerateData("fit_transition_matrix: no Hankel columns");
  }

  TransitionDims dims;
  dims.kappa = blocks.kappa;
  dims.nu = blocks.nu;
  dims.t_ini = blocks.t_ini;
  dims.horizon = blocks.horizon;

  const int up_rows = static_cast<int>(blocks.u_past.rows());
  const int yp_rows = static_cast<int>(blocks.y_past.rows());
  const int uf_rows = static_cast<int>(blocks.u_future.rows());
  const int yf_rows = static_cast<int>(blocks.y_future.rows());
  if (up_rows != dims.kappa * dims.t_ini || uf_rows != dims.kappa * dims.horizon ||
      yp_rows != dims.nu * dims.t_ini || yf_rows != dims.nu * dims.horizon) {
    throw DimensionMismatch("fit_transition_matrix: block shapes disagree with dims");
  }

  Eigen::MatrixXd regressor(up_rows + yp_rows + uf_rows, m);
  regressor.topRows(up_rows) = blocks.u_past;
  regressor.middleRows(up_rows, yp_rows) = blocks.y_past;
  regressor.bottomRows(uf_rows) = blocks.u_future;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      regressor, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  const double cutoff = sv_cutoff * sigma_max;

  int rank = 0;
  double sigma_min_retained = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > 0.0) {
      rank = static_cast<int>(i) + 1;
      sigma_min_retained = sv(i);
    } else {
      break;
    }
  }
  if (rank == 0) {
    throw DegenerateData(
        "fit_transition_matrix: regressor has no singular value above cutoff");
  }

  // G = Y_f * V * S^+ * U^T, the minimum-norm least-squares solution per row.
  Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
  for (int i = 0; i < rank; ++i) {
    inv_sv(i) = 1.0 / sv(i);
  }
  Eigen::MatrixXd g = blocks.y_future * svd.matrixV() * inv_sv.asDiagonal() *
                      svd.matrixU().transpose();

  const double residual = (g * regressor - blocks.y_future).norm();
  const double condition = sigma_max / sigma_min_retained;

  return TransitionMatrix(std::move(g), dims, residual, condition);
}

Eigen::VectorXd predict(const TransitionMatrix& g,
                        const Eigen::VectorXd& mu_ini,
                        const Eigen::VectorXd& eta_ini,
                        const Eigen::VectorXd& mu_future) {
  const TransitionDims& d = g.dims();
  if (mu_ini.size() != d.kappa * d.t_ini ||
      eta_ini.size() != d.nu * d.t_ini ||
      mu_future.size() != d.kappa * d.horizon) {
    throw DimensionMismatch("predict: stacked argument lengths disagree with G");
  }
  Eigen::VectorXd stacked(d.cols());
  stacked << mu_ini, eta_ini, mu_future;
  return g.g() * stacked;
}

void TransitionMatrix::save_json(const std::string& path) const {
  nlohmann::json j;
  j["kappa"] = dims_.kappa;
  j["nu"] = dims_.nu;
  j["t_ini"] = dims_.t_ini;
  j["horizon"] = dims_.horizon;
  j["fit_residual"] = fit_residual_;
  j["condition_estimate"] = condition_estimate_;
  std::vector<double> data(g_.size());
  Eigen::Map<Eigen::MatrixXd>(data.data(), g_.rows(), g_.cols()) = g_;
  j["g"] = data;  // column-major
  std::ofstream out(path);
  if (!out) {
    throw Error("TransitionMatrix: cannot open " + path + " for writing");
  }
  out << j.dump();
}

TransitionMatrix TransitionMatrix::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("TransitionMatrix: cannot open " + path);
  }
  nlohmann::json j;
  in >> j;
  TransitionDims dims;
  dims.kappa = j.at("kappa").get<int>();
  dims.nu = j.at("nu").get<int>();
  dims.t_ini = j.at("t_ini").get<int>();
  dims.horizon = j.at("horizon").get<int>();
  const auto data = j.at("g").get<std::vector<double>>();
  if (static_cast<int>(data.size()) != dims.rows() * dims.cols()) {
    throw DimensionMismatch("TransitionMatrix: serialized size mismatch");
  }
  Eigen::MatrixXd g = Eigen::Map<const Eigen::MatrixXd>(
      data.data(), dims.rows(), dims.cols());
  return TransitionMatrix(std::move(g), dims,
                          j.at("fit_residual").get<double>(),
                          j.at("condition_estimate").get<double>());
}

}  // namespace ddpc
