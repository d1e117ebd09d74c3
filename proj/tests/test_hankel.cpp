#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "ddpc/hankel.hpp"
#include "test_support.hpp"

using namespace ddpc;
using ddpc_test::uniform_matrix;

namespace {

// Brute-force double-loop construction, the oracle for build_hankel.
Eigen::MatrixXd hankel_oracle(const Eigen::MatrixXd& signal, int depth) {
  const int d = static_cast<int>(signal.rows());
  const int m = static_cast<int>(signal.cols()) - depth + 1;
  Eigen::MatrixXd h(d * depth, m);
  for (int i = 0; i < depth; ++i) {
    for (int j = 0; j < m; ++j) {
      h.block(i * d, j, d, 1) = signal.col(i + j);
    }
  }
  return h;
}

Eigen::MatrixXd scalar_signal(std::initializer_list<double> values) {
  Eigen::MatrixXd s(1, static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) s(0, i++) = v;
  return s;
}

int svd_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-9) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) ++rank;
  }
  return rank;
}

}  // namespace

TEST_CASE("build_hankel unrolls scalar signal") {
  const Eigen::MatrixXd h = build_hankel(scalar_signal({1, 2, 3, 4, 5}), 2);
  Eigen::MatrixXd expected(2, 4);
  expected << 1, 2, 3, 4, 2, 3, 4, 5;
  CHECK((h - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("build_hankel constant signal has identical columns") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Constant(2, 7, 3.25);
  const Eigen::MatrixXd h = build_hankel(s, 3);
  REQUIRE(h.cols() == 5);
  for (Eigen::Index j = 1; j < h.cols(); ++j) {
    CHECK((h.col(j) - h.col(0)).norm() == 0.0);
  }
  CHECK(svd_rank(h) == 1);
}

TEST_CASE("build_hankel impulse signal matches double-loop oracle") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(1, 6);
  s(0, 2) = 1.0;
  const Eigen::MatrixXd h = build_hankel(s, 2);
  CHECK((h - hankel_oracle(s, 2)).cwiseAbs().maxCoeff() == 0.0);
  // One nonzero column per window that covers the impulse sample.
  int nonzero_cols = 0;
  for (Eigen::Index j = 0; j < h.cols(); ++j) {
    if (h.col(j).cwiseAbs().maxCoeff() > 0.0) ++nonzero_cols;
  }
  CHECK(nonzero_cols == 2);  // windows starting at samples 1 and 2
}

TEST_CASE("build_hankel random multivariate matches oracle") {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd s = uniform_matrix(rng, 3, 24);
  const Eigen::MatrixXd h = build_hankel(s, 5);
  CHECK((h - hankel_oracle(s, 5)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("build_hankel shift property") {
  std::mt19937_64 rng(17);
  const Eigen::MatrixXd s = uniform_matrix(rng, 2, 15);
  const Eigen::MatrixXd h = build_hankel(s, 4);
  const Eigen::MatrixXd h_shifted = build_hankel(s.rightCols(14), 4);
  for (Eigen::Index j = 0; j + 1 < h.cols(); ++j) {
    CHECK((h.col(j + 1) - h_shifted.col(j)).norm() == 0.0);
  }
}

TEST_CASE("build_hankel rejects short signals") {
  CHECK_THROWS_AS(build_hankel(scalar_signal({1, 2}), 3), SignalTooShort);
  CHECK_THROWS_AS(build_hankel(scalar_signal({1}), 0), SignalTooShort);
}

TEST_CASE("persistent excitation of constant signal fails") {
  const auto report = is_persistently_exciting(scalar_signal({1, 1, 1, 1}), 2);
  CHECK_FALSE(report.excited);
  CHECK(report.rank == 1);
  CHECK(report.required_rank == 2);
}

TEST_CASE("persistent excitation of zero signal fails") {
  const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(1, 10);
  for (int order : {1, 2, 3}) {
    CHECK_FALSE(is_persistently_exciting(z, order).excited);
  }
}

TEST_CASE("persistent excitation of random signal holds, rank matches SVD oracle") {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd s = uniform_matrix(rng, 1, 50);
  const auto report = is_persistently_exciting(s, 5);
  CHECK(report.excited);
  CHECK(report.rank == 5);
  CHECK(report.rank == svd_rank(build_hankel(s, 5)));
  CHECK(report.smallest_retained_sv > 0.0);
}

TEST_CASE("persistent excitation is monotone in the order") {
  std::mt19937_64 rng(7);
  const Eigen::MatrixXd s = uniform_matrix(rng, 2, 60);
  const int max_order = 6;
  REQUIRE(is_persistently_exciting(s, max_order).excited);
  for (int order = 1; order < max_order; ++order) {
    CHECK(is_persistently_exciting(s, order).excited);
  }
}

TEST_CASE("partition of a single scalar trajectory, hand unrolled") {
  Eigen::MatrixXd u(1, 6), y(1, 6);
  u << 10, 11, 12, 13, 14, 15;
  y << 20, 21, 22, 23, 24, 25;
  const IoTrajectory traj(u, y, 0.1);
  DdpcHyperparams p;
  p.T = 6;
  p.T_ini = 1;
  p.N = 2;
  const PartitionedHankel blocks = partition(traj, p);

  REQUIRE(blocks.cols() == 4);
  Eigen::MatrixXd up_expected(1, 4);
  up_expected << 10, 11, 12, 13;
  Eigen::MatrixXd uf_expected(2, 4);
  uf_expected << 11, 12, 13, 14, 12, 13, 14, 15;
  CHECK((blocks.u_past - up_expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK((blocks.u_future - uf_expected).cwiseAbs().maxCoeff() == 0.0);
  Eigen::MatrixXd yp_expected(1, 4);
  yp_expected << 20, 21, 22, 23;
  CHECK((blocks.y_past - yp_expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("partition mosaic keeps trajectory order and never straddles") {
  std::mt19937_64 rng(23);
  const IoTrajectory a(uniform_matrix(rng, 1, 6), uniform_matrix(rng, 1, 6), 0.1);
  const IoTrajectory b(uniform_matrix(rng, 1, 6), uniform_matrix(rng, 1, 6), 0.1);
  DdpcHyperparams p;
  p.T = 6;
  p.T_ini = 1;
  p.N = 2;
  std::vector<IoTrajectory> both{a, b};
  const PartitionedHankel blocks = partition(std::span<const IoTrajectory>(both), p);
  REQUIRE(blocks.cols() == 8);
  const PartitionedHankel first = partition(a, p);
  const PartitionedHankel second = partition(b, p);
  CHECK((blocks.u_future.leftCols(4) - first.u_future).cwiseAbs().maxCoeff() == 0.0);
  CHECK((blocks.u_future.rightCols(4) - second.u_future).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("partition restack reproduces the full Hankel per trajectory") {
  std::mt19937_64 rng(31);
  const IoTrajectory traj(uniform_matrix(rng, 2, 25), uniform_matrix(rng, 3, 25), 0.1);
  DdpcHyperparams p;
  p.T = 25;
  p.T_ini = 3;
  p.N = 4;
  const PartitionedHankel blocks = partition(traj, p);

  Eigen::MatrixXd u_restacked(blocks.u_past.rows() + blocks.u_future.rows(),
                              blocks.cols());
  u_restacked << blocks.u_past, blocks.u_future;
  CHECK((u_restacked - build_hankel(traj.inputs(), p.L())).cwiseAbs().maxCoeff() == 0.0);

  Eigen::MatrixXd y_restacked(blocks.y_past.rows() + blocks.y_future.rows(),
                              blocks.cols());
  y_restacked << blocks.y_past, blocks.y_future;
  CHECK((y_restacked - build_hankel(traj.outputs(), p.L())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("partition rejects short trajectories and inconsistent dims") {
  std::mt19937_64 rng(37);
  DdpcHyperparams p;
  p.T = 6;
  p.T_ini = 2;
  p.N = 2;
  const IoTrajectory short_traj(uniform_matrix(rng, 1, 4), uniform_matrix(rng, 1, 4), 0.1);
  CHECK_THROWS_AS(partition(short_traj, p), SignalTooShort);

  const IoTrajectory a(uniform_matrix(rng, 1, 8), uniform_matrix(rng, 1, 8), 0.1);
  const IoTrajectory b(uniform_matrix(rng, 2, 8), uniform_matrix(rng, 1, 8), 0.1);
  std::vector<IoTrajectory> both{a, b};
  CHECK_THROWS_AS(partition(std::span<const IoTrajectory>(both), p), DimensionMismatch);
}

TEST_CASE("ragged samples are rejected at trajectory construction") {
  std::vector<Eigen::VectorXd> us{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3)};
  std::vector<Eigen::VectorXd> ys{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};
  CHECK_THROWS_AS(IoTrajectory::from_samples(us, ys, 0.1), DimensionMismatch);
}
