#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "ddpc/lti.hpp"
#include "test_support.hpp"

using namespace ddpc;
using ddpc_test::randn_vector;
using ddpc_test::uniform_matrix;

TEST_CASE("pure feedthrough system returns its input") {
  LtiSystem sys;
  sys.A = Eigen::MatrixXd::Zero(2, 2);
  sys.B = Eigen::MatrixXd::Zero(2, 2);
  sys.C = Eigen::MatrixXd::Identity(2, 2);
  sys.D = Eigen::MatrixXd::Identity(2, 2);
  sys.state = Eigen::VectorXd::Zero(2);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) {
    const Eigen::VectorXd mu = randn_vector(rng, 2);
    CHECK((sys.step(mu) - mu).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("scalar decay emits geometric sequence") {
  LtiSystem sys;
  sys.A = Eigen::MatrixXd::Constant(1, 1, 0.5);
  sys.B = Eigen::MatrixXd::Constant(1, 1, 1.0);
  sys.C = Eigen::MatrixXd::Constant(1, 1, 1.0);
  sys.D = Eigen::MatrixXd::Zero(1, 1);
  sys.state = Eigen::VectorXd::Constant(1, 1.0);

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  double expected = 1.0;
  for (int i = 0; i < 6; ++i) {
    CHECK(sys.step(zero)(0) == doctest::Approx(expected).epsilon(1e-15));
    expected *= 0.5;
  }
}

TEST_CASE("rollout equals matrix-power convolution closed form") {
  std::mt19937_64 rng(13);
  LtiSystem sys = LtiSystem::random_stable(rng, 4, 2, 3);
  const Eigen::VectorXd theta0 = randn_vector(rng, 4);
  sys.state = theta0;
  const int steps = 200;
  const Eigen::MatrixXd inputs = uniform_matrix(rng, 2, steps);

  LtiSystem runner = sys;
  const Eigen::MatrixXd outputs = runner.rollout(inputs);

  // eta(t) = C A^t theta0 + sum_{i<t} C A^{t-1-i} B mu_i + D mu_t
  for (int t : {0, 1, 5, 50, 199}) {
    Eigen::MatrixXd apow = Eigen::MatrixXd::Identity(4, 4);
    Eigen::VectorXd conv = Eigen::VectorXd::Zero(3);
    for (int i = t - 1; i >= 0; --i) {
      conv += sys.C * apow * sys.B * inputs.col(i);
      apow = apow * sys.A;
    }
    const Eigen::VectorXd expected =
        sys.C * apow * theta0 + conv + sys.D * inputs.col(t);
    CHECK((outputs.col(t) - expected).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("random stable systems are stable and deterministic per seed") {
  std::mt19937_64 rng_a(99);
  std::mt19937_64 rng_b(99);
  const LtiSystem a = LtiSystem::random_stable(rng_a, 5, 2, 2);
  const LtiSystem b = LtiSystem::random_stable(rng_b, 5, 2, 2);
  CHECK((a.A - b.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.A.eigenvalues().cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
}

TEST_CASE("dimension mismatches are rejected") {
  LtiSystem sys;
  sys.A = Eigen::MatrixXd::Zero(2, 2);
  sys.B = Eigen::MatrixXd::Zero(2, 1);
  sys.C = Eigen::MatrixXd::Identity(1, 2);
  sys.D = Eigen::MatrixXd::Zero(1, 1);
  sys.state = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(sys.step(Eigen::VectorXd::Zero(3)), DimensionMismatch);
}
