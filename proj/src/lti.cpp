#include "ddpc/lti.hpp"

#include <Eigen/Eigenvalues>

namespace ddpc {

void LtiSystem::validate() const {
  const int beta = state_dim();
  if (A.cols() != beta || B.rows() != beta || C.cols() != beta ||
      D.rows() != C.rows() || D.cols() != B.cols() || state.size() != beta) {
    throw DimensionMismatch("LtiSystem: inconsistent matrix dimensions");
  }
}

Eigen::VectorXd LtiSystem::step(const Eigen::VectorXd& mu) {
  if (mu.size() != input_dim()) {
    throw DimensionMismatch("LtiSystem::step: input dimension mismatch");
  }
  Eigen::VectorXd eta = C * state + D * mu;
  state = A * state + B * mu;
  return eta;
}

Eigen::MatrixXd LtiSystem::rollout(const Eigen::MatrixXd& inputs) {
  if (inputs.rows() != input_dim()) {
    throw DimensionMismatch("LtiSystem::rollout: input dimension mismatch");
  }
  Eigen::MatrixXd outputs(output_dim(), inputs.cols());
  for (Eigen::Index t = 0; t < inputs.cols(); ++t) {
    outputs.col(t) = step(inputs.col(t));
  }
  return outputs;
}

namespace {

bool full_rank(const Eigen::MatrixXd& m, int want) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return want == 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-9 * sv(0)) ++rank;
  }
  return rank >= want;
}

bool is_minimal(const LtiSystem& sys) {
  const int beta = sys.state_dim();
  Eigen::MatrixXd ctrb(beta, beta * sys.input_dim());
  Eigen::MatrixXd obsv(beta * sys.output_dim(), beta);
  Eigen::MatrixXd apow = Eigen::MatrixXd::Identity(beta, beta);
  for (int i = 0; i < beta; ++i) {
    ctrb.middleCols(i * sys.input_dim(), sys.input_dim()) = apow * sys.B;
    obsv.middleRows(i * sys.output_dim(), sys.output_dim()) = sys.C * apow;
    apow = sys.A * apow;
  }
  return full_rank(ctrb, beta) && full_rank(obsv, beta);
}

}  // namespace

LtiSystem LtiSystem::random_stable(std::mt19937_64& rng, int beta, int kappa,
                                   int nu, double radius) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto randn = [&](int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = gauss(rng);
    return m;
  };

  for (int attempt = 0; attempt < 64; ++attempt) {
    LtiSystem sys;
    sys.A = randn(beta, beta);
    const double rho = sys.A.eigenvalues().cwiseAbs().maxCoeff();
    if (rho > 0.0) {
      sys.A *= radius / rho;
    }
    sys.B = randn(beta, kappa);
    sys.C = randn(nu, beta);
    sys.D = randn(nu, kappa);
    sys.state = Eigen::VectorXd::Zero(beta);
    if (is_minimal(sys)) {
      return sys;
    }
  }
  throw Error("LtiSystem::random_stable: failed to draw a minimal system");
}

}  // namespace ddpc
