#include <doctest.h>

#include <Eigen/Dense>
#include <cstdio>
#include <random>

#include "ddpc/lti.hpp"
#include "ddpc/transition.hpp"
#include "test_support.hpp"

using namespace ddpc;
using ddpc_test::uniform_matrix;

namespace {

IoTrajectory record_lti(LtiSystem sys, const Eigen::MatrixXd& inputs,
                        double dt = 0.02) {
  const Eigen::MatrixXd outputs = sys.rollout(inputs);
  return IoTrajectory(inputs, outputs, dt);
}

// Fresh window of a system rollout, split into (mu_ini, eta_ini, mu_f, eta_f).
struct Window {
  Eigen::VectorXd mu_ini, eta_ini, mu_future, eta_future;
};

Window fresh_window(LtiSystem sys, std::mt19937_64& rng, int t_ini, int n) {
  sys.state = ddpc_test::randn_vector(rng, sys.state_dim());
  const int kappa = sys.input_dim();
  const int nu = sys.output_dim();
  const Eigen::MatrixXd inputs = uniform_matrix(rng, kappa, t_ini + n);
  const Eigen::MatrixXd outputs = sys.rollout(inputs);
  Window w;
  w.mu_ini = Eigen::Map<const Eigen::VectorXd>(inputs.data(), kappa * t_ini);
  w.eta_ini = Eigen::Map<const Eigen::VectorXd>(outputs.data(), nu * t_ini);
  w.mu_future = Eigen::Map<const Eigen::VectorXd>(
      inputs.data() + kappa * t_ini, kappa * n);
  w.eta_future = Eigen::Map<const Eigen::VectorXd>(
      outputs.data() + nu * t_ini, nu * n);
  return w;
}

LtiSystem scalar_decay_system() {
  LtiSystem sys;
  sys.A = Eigen::MatrixXd::Constant(1, 1, 0.5);
  sys.B = Eigen::MatrixXd::Constant(1, 1, 1.0);
  sys.C = Eigen::MatrixXd::Constant(1, 1, 1.0);
  sys.D = Eigen::MatrixXd::Zero(1, 1);
  sys.state = Eigen::VectorXd::Zero(1);
  return sys;
}

}  // namespace

TEST_CASE("fit on scalar LTI data predicts true rollouts") {
  std::mt19937_64 rng(101);
  LtiSystem sys = scalar_decay_system();
  const IoTrajectory traj = record_lti(sys, uniform_matrix(rng, 1, 40));

  DdpcHyperparams p;
  p.T = 40;
  p.T_ini = 2;
  p.N = 3;
  const TransitionMatrix g = fit_transition_matrix(partition(traj, p));

  CHECK(g.fit_residual() <= 1e-8 * traj.outputs().norm());
  for (int trial = 0; trial < 20; ++trial) {
    const Window w = fresh_window(sys, rng, p.T_ini, p.N);
    const Eigen::VectorXd pred = predict(g, w.mu_ini, w.eta_ini, w.mu_future);
    CHECK((pred - w.eta_future).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("zero future outputs give the zero transition matrix") {
  std::mt19937_64 rng(7);
  PartitionedHankel blocks;
  blocks.kappa = 1;
  blocks.nu = 1;
  blocks.t_ini = 2;
  blocks.horizon = 2;
  blocks.u_past = uniform_matrix(rng, 2, 6);
  blocks.u_future = uniform_matrix(rng, 2, 6);
  blocks.y_past = uniform_matrix(rng, 2, 6);
  blocks.y_future = Eigen::MatrixXd::Zero(2, 6);
  const TransitionMatrix g = fit_transition_matrix(blocks);
  CHECK(g.g().cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.fit_residual() == 0.0);
}

TEST_CASE("rank-deficient regressor returns the minimum-norm solution") {
  // Duplicated columns: regressor [[1,1],[2,2]] padded into the block
  // structure with T_ini = N = 1, kappa = nu = 1.  Row 1 of the regressor is
  // u_past, row 2 is y_past, and u_future is forced to zero so the 2x2 core
  // is exactly [[1,1],[2,2]]; the min-norm G on the active rows solves
  // g1 + 2 g2 = 3 with min norm -> (0.6, 1.2).
  PartitionedHankel blocks;
  blocks.kappa = 1;
  blocks.nu = 1;
  blocks.t_ini = 1;
  blocks.horizon = 1;
  blocks.u_past = (Eigen::MatrixXd(1, 2) << 1, 1).finished();
  blocks.y_past = (Eigen::MatrixXd(1, 2) << 2, 2).finished();
  blocks.u_future = Eigen::MatrixXd::Zero(1, 2);
  blocks.y_future = (Eigen::MatrixXd(1, 2) << 3, 3).finished();

  const TransitionMatrix g = fit_transition_matrix(blocks);
  CHECK(g.g()(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(g.g()(0, 1) == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(g.g()(0, 2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(g.fit_residual() <= 1e-12);
  // Condition estimate flags the retained spectrum only (no infinities).
  CHECK(std::isfinite(g.condition_estimate()));
}

TEST_CASE("degenerate all-zero regressor throws") {
  PartitionedHankel blocks;
  blocks.kappa = 1;
  blocks.nu = 1;
  blocks.t_ini = 1;
  blocks.horizon = 1;
  blocks.u_past = Eigen::MatrixXd::Zero(1, 3);
  blocks.y_past = Eigen::MatrixXd::Zero(1, 3);
  blocks.u_future = Eigen::MatrixXd::Zero(1, 3);
  blocks.y_future = Eigen::MatrixXd::Zero(1, 3);
  CHECK_THROWS_AS(fit_transition_matrix(blocks), DegenerateData);
}

TEST_CASE("fit is invariant to identical column permutation of all blocks") {
  std::mt19937_64 rng(19);
  LtiSystem sys = LtiSystem::random_stable(rng, 2, 1, 1);
  const IoTrajectory traj = record_lti(sys, uniform_matrix(rng, 1, 30));
  DdpcHyperparams p;
  p.T = 30;
  p.T_ini = 2;
  p.N = 2;
  PartitionedHankel blocks = partition(traj, p);

  std::vector<int> perm(blocks.cols());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  PartitionedHankel shuffled = blocks;
  for (int j = 0; j < blocks.cols(); ++j) {
    shuffled.u_past.col(j) = blocks.u_past.col(perm[j]);
    shuffled.u_future.col(j) = blocks.u_future.col(perm[j]);
    shuffled.y_past.col(j) = blocks.y_past.col(perm[j]);
    shuffled.y_future.col(j) = blocks.y_future.col(perm[j]);
  }

  const TransitionMatrix a = fit_transition_matrix(blocks);
  const TransitionMatrix b = fit_transition_matrix(shuffled);
  CHECK((a.g() - b.g()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("predict is linear and rejects bad dimensions") {
  std::mt19937_64 rng(43);
  LtiSystem sys = LtiSystem::random_stable(rng, 3, 2, 2);
  const IoTrajectory traj = record_lti(sys, uniform_matrix(rng, 2, 80));
  DdpcHyperparams p;
  p.T = 80;
  p.T_ini = 4;
  p.N = 3;
  const TransitionMatrix g = fit_transition_matrix(partition(traj, p));

  // All-zero arguments map to zero.
  const Eigen::VectorXd zero_pred =
      predict(g, Eigen::VectorXd::Zero(8), Eigen::VectorXd::Zero(8),
              Eigen::VectorXd::Zero(6));
  CHECK(zero_pred.cwiseAbs().maxCoeff() == 0.0);

  // Linearity over stacked arguments.
  const Eigen::VectorXd x1 = ddpc_test::randn_vector(rng, 8);
  const Eigen::VectorXd y1 = ddpc_test::randn_vector(rng, 8);
  const Eigen::VectorXd u1 = ddpc_test::randn_vector(rng, 6);
  const Eigen::VectorXd x2 = ddpc_test::randn_vector(rng, 8);
  const Eigen::VectorXd y2 = ddpc_test::randn_vector(rng, 8);
  const Eigen::VectorXd u2 = ddpc_test::randn_vector(rng, 6);
  const double a = 1.7, b = -0.4;
  const Eigen::VectorXd combo =
      predict(g, a * x1 + b * x2, a * y1 + b * y2, a * u1 + b * u2);
  const Eigen::VectorXd parts =
      a * predict(g, x1, y1, u1) + b * predict(g, x2, y2, u2);
  CHECK((combo - parts).cwiseAbs().maxCoeff() <= 1e-10 * parts.cwiseAbs().maxCoeff());

  CHECK_THROWS_AS(predict(g, Eigen::VectorXd::Zero(7), Eigen::VectorXd::Zero(8),
                          Eigen::VectorXd::Zero(6)),
                  DimensionMismatch);
}

TEST_CASE("fitted G predicts unseen windows of a MIMO LTI system") {
  std::mt19937_64 rng(59);
  LtiSystem sys = LtiSystem::random_stable(rng, 4, 2, 2);
  DdpcHyperparams p;
  p.T = 200;
  p.T_ini = 5;
  p.N = 4;
  const IoTrajectory traj = record_lti(sys, uniform_matrix(rng, 2, p.T));
  const TransitionMatrix g = fit_transition_matrix(partition(traj, p));

  double max_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Window w = fresh_window(sys, rng, p.T_ini, p.N);
    const Eigen::VectorXd pred = predict(g, w.mu_ini, w.eta_ini, w.mu_future);
    max_err = std::max(max_err, (pred - w.eta_future).cwiseAbs().maxCoeff());
  }
  CHECK(max_err <= 1e-6);
}

TEST_CASE("fundamental lemma: fresh windows lie in the Hankel column space") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 8; ++trial) {
    const int beta = 1 + static_cast<int>(rng() % 5);
    const int kappa = 1 + static_cast<int>(rng() % 2);
    const int nu = 1 + static_cast<int>(rng() % 2);
    DdpcHyperparams p;
    p.T_ini = beta;  // >= observability index
    p.N = 4;
    const int L = p.L();
    p.T = std::max((kappa + 1) * (L + beta) - 1, 3 * L) + 20;

    LtiSystem sys = LtiSystem::random_stable(rng, beta, kappa, nu);
    const Eigen::MatrixXd inputs = uniform_matrix(rng, kappa, p.T);
    REQUIRE(is_persistently_exciting(inputs, L + beta).excited);
    const IoTrajectory traj = record_lti(sys, inputs);
    const PartitionedHankel blocks = partition(traj, p);

    Eigen::MatrixXd stacked(blocks.u_past.rows() + blocks.y_past.rows() +
                                blocks.u_future.rows() + blocks.y_future.rows(),
                            blocks.cols());
    stacked << blocks.u_past, blocks.y_past, blocks.u_future, blocks.y_future;

    const Window w = fresh_window(sys, rng, p.T_ini, p.N);
    Eigen::VectorXd window(stacked.rows());
    window << w.mu_ini, w.eta_ini, w.mu_future, w.eta_future;

    const Eigen::VectorXd gamma =
        stacked.completeOrthogonalDecomposition().solve(window);
    const double rel_residual = (stacked * gamma - window).norm() / window.norm();
    CHECK(rel_residual <= 1e-8);
  }
}

TEST_CASE("transition matrix JSON round trip") {
  std::mt19937_64 rng(71);
  LtiSystem sys = scalar_decay_system();
  const IoTrajectory traj = record_lti(sys, uniform_matrix(rng, 1, 40));
  DdpcHyperparams p;
  p.T = 40;
  p.T_ini = 2;
  p.N = 3;
  const TransitionMatrix g = fit_transition_matrix(partition(traj, p));

  const std::string path = "transition_roundtrip.json";
  g.save_json(path);
  const TransitionMatrix loaded = TransitionMatrix::load_json(path);
  CHECK((loaded.g() - g.g()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(loaded.dims() == g.dims());
  CHECK(loaded.fit_residual() == g.fit_residual());
  std::remove(path.c_str());
}
