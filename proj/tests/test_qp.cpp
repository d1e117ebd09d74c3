#include <doctest.h>

#include <Eigen/Dense>
#include <fstream>
#include <random>

#include "ddpc/qp.hpp"
#include "test_support.hpp"

using namespace ddpc;
using ddpc_test::random_spd;
using ddpc_test::randn_vector;
using ddpc_test::uniform_matrix;

namespace {

// Projection onto the feasible set {lb <= z <= ub, l <= Az <= u} via
// Dykstra's alternating projections (exact on the intersection).  Test-only
// machinery, fully independent of the ADMM implementation.
Eigen::VectorXd project_feasible(const QuadraticProgram& qp,
                                 const Eigen::VectorXd& v) {
  const int m = qp.num_ineq();
  const int sets = 1 + m;
  std::vector<Eigen::VectorXd> corrections(
      sets, Eigen::VectorXd::Zero(v.size()));
  Eigen::VectorXd p = v;
  for (int sweep = 0; sweep < 4000; ++sweep) {
    const Eigen::VectorXd before = p;
    {
      const Eigen::VectorXd w = p + corrections[0];
      const Eigen::VectorXd proj = w.cwiseMax(qp.lower).cwiseMin(qp.upper);
      corrections[0] = w - proj;
      p = proj;
    }
    for (int i = 0; i < m; ++i) {
      const Eigen::VectorXd w = p + corrections[1 + i];
      const Eigen::VectorXd a = qp.A.row(i).transpose();
      const double a2 = a.squaredNorm();
      Eigen::VectorXd proj = w;
      if (a2 > 0.0) {
        const double val = a.dot(w);
        if (val > qp.a_upper(i)) {
          proj = w - a * ((val - qp.a_upper(i)) / a2);
        } else if (val < qp.a_lower(i)) {
          proj = w - a * ((val - qp.a_lower(i)) / a2);
        }
      }
      corrections[1 + i] = w - proj;
      p = proj;
    }
    if ((p - before).cwiseAbs().maxCoeff() < 1e-14) break;
  }
  return p;
}

// Projected-gradient oracle: fixed step 1/lambda_max(H), run to convergence.
Eigen::VectorXd projected_gradient_solve(const QuadraticProgram& qp,
                                         int max_iters = 200000) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(qp.H);
  const double step = 1.0 / eig.eigenvalues().maxCoeff();
  Eigen::VectorXd z = project_feasible(qp, Eigen::VectorXd::Zero(qp.size()));
  double prev_obj = qp.objective(z);
  int stalled = 0;
  for (int i = 0; i < max_iters; ++i) {
    z = project_feasible(qp, z - step * (qp.H * z + qp.f));
    const double obj = qp.objective(z);
    if (std::abs(prev_obj - obj) <= 1e-14 * std::max(1.0, std::abs(obj))) {
      if (++stalled > 20) break;
    } else {
      stalled = 0;
    }
    prev_obj = obj;
  }
  return z;
}

QuadraticProgram box_only(const Eigen::MatrixXd& h, const Eigen::VectorXd& f,
                          const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  QuadraticProgram qp;
  qp.H = h;
  qp.f = f;
  qp.lower = lo;
  qp.upper = hi;
  qp.A.resize(0, h.rows());
  qp.a_lower.resize(0);
  qp.a_upper.resize(0);
  return qp;
}

QuadraticProgram random_instance(std::mt19937_64& rng, int n, int m) {
  QuadraticProgram qp;
  qp.H = random_spd(rng, n, 0.5, 8.0);
  qp.f = randn_vector(rng, n);
  qp.lower = Eigen::VectorXd::Constant(n, -kUnbounded);
  qp.upper = Eigen::VectorXd::Constant(n, kUnbounded);
  std::uniform_real_distribution<double> uni(0.2, 1.5);
  for (int i = 0; i < n; ++i) {
    const double center = uni(rng) - 0.85;
    qp.lower(i) = center - uni(rng);
    qp.upper(i) = center + uni(rng);
  }
  qp.A = uniform_matrix(rng, m, n);
  qp.a_lower.resize(m);
  qp.a_upper.resize(m);
  for (int i = 0; i < m; ++i) {
    // Band around the value at an interior point so instances stay feasible.
    const Eigen::VectorXd mid = 0.5 * (qp.lower + qp.upper);
    const double v = qp.A.row(i).dot(mid);
    qp.a_lower(i) = v - uni(rng);
    qp.a_upper(i) = v + uni(rng);
  }
  return qp;
}

}  // namespace

TEST_CASE("scalar clamp: min (z-1)^2 over [0, 0.5]") {
  const QuadraticProgram qp = box_only(
      Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Constant(1, -2.0),
      Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 0.5));
  const QpSolution sol = solve(qp);
  REQUIRE(sol.status == QpStatus::Optimal);
  CHECK(sol.z(0) == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("unconstrained diagonal QP solves exactly") {
  QuadraticProgram qp = box_only(
      (Eigen::MatrixXd(2, 2) << 2, 0, 0, 4).finished(),
      (Eigen::VectorXd(2) << -2, -4).finished(),
      Eigen::VectorXd::Constant(2, -kUnbounded),
      Eigen::VectorXd::Constant(2, kUnbounded));
  const QpSolution sol = solve(qp);
  REQUIRE(sol.status == QpStatus::Optimal);
  CHECK(sol.z(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sol.z(1) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("diagonal H with box equals exact clamping") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 8;
    Eigen::VectorXd d(n);
    std::uniform_real_distribution<double> uni(0.5, 5.0);
    for (int i = 0; i < n; ++i) d(i) = uni(rng);
    QuadraticProgram qp = box_only(d.asDiagonal().toDenseMatrix(),
                                   randn_vector(rng, n),
                                   randn_vector(rng, n),
                                   Eigen::VectorXd::Zero(n));
    qp.upper = qp.lower.array() + 1.0;
    const QpSolution sol = solve(qp);
    REQUIRE(sol.status == QpStatus::Optimal);
    const Eigen::VectorXd expected =
        (-qp.f.array() / d.array()).cwiseMax(qp.lower.array()).cwiseMin(qp.upper.array());
    CHECK((sol.z - expected.matrix()).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("randomized QPs agree with the projected-gradient oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    const QuadraticProgram qp = random_instance(rng, 20, 10);
    const QpSolution sol = solve(qp);
    REQUIRE(sol.status == QpStatus::Optimal);

    const auto [primal, dual] = kkt_residual(qp, sol.z, sol.duals);
    CHECK(primal <= 1e-6);
    CHECK(dual <= 1e-6);

    const Eigen::VectorXd oracle = projected_gradient_solve(qp);
    const double obj_oracle = qp.objective(oracle);
    CHECK(sol.objective <= obj_oracle + 1e-6 * std::max(1.0, std::abs(obj_oracle)));
    CHECK(std::abs(sol.objective - obj_oracle) <=
          1e-6 * std::max(1.0, std::abs(obj_oracle)));
  }
}

TEST_CASE("kkt residual at the analytic clamp optimum is tiny") {
  const QuadraticProgram qp = box_only(
      Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Constant(1, -2.0),
      Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 0.5));
  Eigen::VectorXd z(1), duals(1);
  z << 0.5;
  duals << 1.0;  // multiplier of the active upper bound
  const auto [primal, dual] = kkt_residual(qp, z, duals);
  CHECK(primal <= 1e-12);
  CHECK(dual <= 1e-12);
}

TEST_CASE("kkt dual residual at the origin equals the gradient norm") {
  const QuadraticProgram qp = box_only(
      (Eigen::MatrixXd(2, 2) << 2, 0, 0, 4).finished(),
      (Eigen::VectorXd(2) << -2, -4).finished(),
      Eigen::VectorXd::Constant(2, -kUnbounded),
      Eigen::VectorXd::Constant(2, kUnbounded));
  const auto [primal, dual] =
      kkt_residual(qp, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2));
  CHECK(primal == 0.0);
  CHECK(dual == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("kkt residual grows proportionally under perturbation") {
  std::mt19937_64 rng(31);
  const QuadraticProgram qp = random_instance(rng, 6, 0);
  const QpSolution sol = solve(qp);
  REQUIRE(sol.status == QpStatus::Optimal);

  const double delta = 1e-3;
  Eigen::VectorXd z = sol.z;
  z(2) += delta;
  const auto [primal, dual] = kkt_residual(qp, z, sol.duals);
  (void)primal;
  // Stationarity changes by H * delta e_2; finite-difference consistency.
  const double expected = delta * qp.H.col(2).cwiseAbs().maxCoeff();
  CHECK(dual == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("warm-started re-solve of an identical QP converges immediately") {
  std::mt19937_64 rng(55);
  const QuadraticProgram qp = random_instance(rng, 12, 4);
  QpSolver solver;
  const QpSolution first = solver.solve(qp);
  REQUIRE(first.status == QpStatus::Optimal);
  const QpSolution second = solver.solve(qp, first.z);
  REQUIRE(second.status == QpStatus::Optimal);
  CHECK(second.iterations <= 5);
  CHECK((second.z - first.z).cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("argmin is invariant to uniform positive scaling of H and f") {
  std::mt19937_64 rng(80);
  const QuadraticProgram qp = random_instance(rng, 10, 3);
  QuadraticProgram scaled = qp;
  const double c = 7.3;
  scaled.H *= c;
  scaled.f *= c;
  const QpSolution a = solve(qp);
  const QpSolution b = solve(scaled);
  REQUIRE(a.status == QpStatus::Optimal);
  REQUIRE(b.status == QpStatus::Optimal);
  CHECK((a.z - b.z).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("validation rejects malformed problems") {
  QuadraticProgram qp = box_only(
      (Eigen::MatrixXd(2, 2) << 1, 0.5, 0.4, 1).finished(),
      Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(2, -1.0),
      Eigen::VectorXd::Constant(2, 1.0));
  CHECK_THROWS_AS(qp.validate(), NotPositiveDefinite);  // asymmetric

  qp.H << 1, 2, 2, 1;  // symmetric, indefinite
  CHECK_THROWS_AS(qp.validate(), NotPositiveDefinite);

  qp.H = Eigen::MatrixXd::Identity(2, 2);
  qp.lower(0) = 2.0;  // lower > upper
  CHECK_THROWS_AS(qp.validate(), ConfigError);
}

TEST_CASE("disjoint box and affine band is flagged infeasible") {
  QuadraticProgram qp = box_only(Eigen::MatrixXd::Identity(1, 1),
                                 Eigen::VectorXd::Zero(1),
                                 Eigen::VectorXd::Constant(1, 2.0),
                                 Eigen::VectorXd::Constant(1, 3.0));
  qp.A = Eigen::MatrixXd::Identity(1, 1);
  qp.a_lower = Eigen::VectorXd::Constant(1, -1.0);
  qp.a_upper = Eigen::VectorXd::Constant(1, 0.0);
  QpSettings settings;
  settings.max_iters = 20000;
  const QpSolution sol = solve(qp, {}, settings);
  CHECK(sol.status == QpStatus::Infeasible);
}

TEST_CASE("qp dump writes a parseable JSON file") {
  std::mt19937_64 rng(4);
  const QuadraticProgram qp = random_instance(rng, 3, 1);
  const std::string path = "qp_dump_test.json";
  qp.dump_json(path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::remove(path.c_str());
}
