#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <string>

#include "ddpc/errors.hpp"

namespace ddpc {

/// Sentinel for unbounded box/inequality entries.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Strictly convex QP: min 1/2 z'Hz + f'z  s.t.  lower <= z <= upper and
/// a_lower <= A z <= a_upper.  A may have zero rows.
struct QuadraticProgram {
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::MatrixXd A;
  Eigen::VectorXd a_lower;
  Eigen::VectorXd a_upper;

  int size() const { return static_cast<int>(H.rows()); }
  int num_ineq() const { return static_cast<int>(A.rows()); }

  /// Checks symmetry and positive definiteness of H (by Cholesky) and bound
  /// ordering.  Throws NotPositiveDefinite / DimensionMismatch / ConfigError.
  void validate() const;

  double objective(const Eigen::VectorXd& z) const {
    return 0.5 * z.dot(H * z) + f.dot(z);
  }

  /// Debug dump for failure triage.
  void dump_json(const std::string& path) const;
};

enum class QpStatus { Optimal, MaxIters, Infeasible };

struct QpSolution {
  Eigen::VectorXd z;
  QpStatus status = QpStatus::MaxIters;
  int iterations = 0;
  double primal_residual = kUnbounded;
  double dual_residual = kUnbounded;
  double objective = 0.0;
  /// Stacked multipliers: first n entries for the box, then m for A-rows.
  Eigen::VectorXd duals;
};

struct QpSettings {
  double eps_abs = 1e-8;
  int max_iters = 20000;
  double rho = 1.0;        // ADMM penalty, adapted by residual balancing
  double sigma = 1e-6;     // proximal regularization
  double alpha = 1.6;      // over-relaxation
  int adapt_interval = 50;
};

/// Operator-splitting solver with a cached Cholesky factorization.  An
/// instance retains its last iterates, so re-solving the same (or a slightly
/// shifted) problem through one instance warm starts the duals.  Instances
/// are single-threaded; use one per concurrent solve.
class QpSolver {
 public:
  explicit QpSolver(QpSettings settings = {});

  QpSolution solve(const QuadraticProgram& qp,
                   const std::optional<Eigen::VectorXd>& warm_start = {});

  const QpSettings& settings() const { return settings_; }

 private:
  void factorize(const QuadraticProgram& qp);
  bool structure_matches(const QuadraticProgram& qp) const;

  QpSettings settings_;
  double rho_ = 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  // Fingerprint of the factorized (H, A) pair.
  Eigen::Index fp_n_ = -1;
  Eigen::Index fp_m_ = -1;
  double fp_h_sum_ = 0.0;
  double fp_a_sum_ = 0.0;
  // Retained iterates for warm starting consecutive solves.
  Eigen::VectorXd z_aux_;
  Eigen::VectorXd y_;
  bool have_state_ = false;
};

/// One-shot convenience solve with a fresh solver instance.
QpSolution solve(const QuadraticProgram& qp,
                 const std::optional<Eigen::VectorXd>& warm_start = {},
                 QpSettings settings = {});

/// Max-norm violation of (primal feasibility, stationarity) at z with the
/// given stacked duals (n box + m affine entries).
std::pair<double, double> kkt_residual(const QuadraticProgram& qp,
                                       const Eigen::VectorXd& z,
                                       const Eigen::VectorXd& duals);

}  // namespace ddpc
