#include "ddpc/qp.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace ddpc {

namespace {

Eigen::VectorXd clamp_to(const Eigen::VectorXd& v, const Eigen::VectorXd& lo,
                         const Eigen::VectorXd& hi) {
  return v.cwiseMax(lo).cwiseMin(hi);
}

// Violation of lo <= v <= hi in max norm; zero inside the band.
double band_violation(const Eigen::VectorXd& v, const Eigen::VectorXd& lo,
                      const Eigen::VectorXd& hi) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(lo(i))) worst = std::max(worst, lo(i) - v(i));
    if (std::isfinite(hi(i))) worst = std::max(worst, v(i) - hi(i));
  }
  return worst;
}

}  // namespace

void QuadraticProgram::validate() const {
  const int n = size();
  if (H.cols() != n || f.size() != n || lower.size() != n ||
      upper.size() != n) {
    throw DimensionMismatch("QuadraticProgram: H/f/box dimensions disagree");
  }
  if (A.rows() != a_lower.size() || A.rows() != a_upper.size() ||
      (A.rows() > 0 && A.cols() != n)) {
    throw DimensionMismatch("QuadraticProgram: inequality dimensions disagree");
  }
  const double asym = (H - H.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, H.cwiseAbs().maxCoeff())) {
    throw NotPositiveDefinite("QuadraticProgram: H is not symmetric");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(H).info() != Eigen::Success) {
    throw NotPositiveDefinite("QuadraticProgram: H is not positive definite");
  }
  if ((lower.array() > upper.array()).any()) {
    throw ConfigError("QuadraticProgram: box has lower > upper");
  }
  if (A.rows() > 0 && (a_lower.array() > a_upper.array()).any()) {
    throw ConfigError("QuadraticProgram: inequality has lower > upper");
  }
}

void QuadraticProgram::dump_json(const std::string& path) const {
  nlohmann::json j;
  auto mat = [](const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      rows.emplace_back(m.row(i).begin(), m.row(i).end());
    }
    return rows;
  };
  auto vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.begin(), v.end());
  };
  j["H"] = mat(H);
  j["f"] = vec(f);
  j["lower"] = vec(lower);
  j["upper"] = vec(upper);
  j["A"] = mat(A);
  j["a_lower"] = vec(a_lower);
  j["a_upper"] = vec(a_upper);
  std::ofstream out(path);
  if (!out) {
    throw Error("QuadraticProgram: cannot open " + path + " for writing");
  }
  out << j.dump();
}

QpSolver::QpSolver(QpSettings settings)
    : settings_(settings), rho_(settings.rho) {}

bool QpSolver::structure_matches(const QuadraticProgram& qp) const {
  return fp_n_ == qp.H.rows() && fp_m_ == qp.A.rows() &&
         fp_h_sum_ == qp.H.sum() && fp_a_sum_ == (qp.A.rows() > 0 ? qp.A.sum() : 0.0);
}

void QpSolver::factorize(const QuadraticProgram& qp) {
  const int n = qp.size();
  Eigen::MatrixXd k = qp.H;
  k.diagonal().array() += settings_.sigma + rho_;  // identity rows of the box
  if (qp.num_ineq() > 0) {
    k.noalias() += rho_ * qp.A.transpose() * qp.A;
  }
  llt_.compute(k);
  if (llt_.info() != Eigen::Success) {
    throw NotPositiveDefinite("QpSolver: KKT matrix factorization failed");
  }
  fp_n_ = n;
  fp_m_ = qp.A.rows();
  fp_h_sum_ = qp.H.sum();
  fp_a_sum_ = qp.A.rows() > 0 ? qp.A.sum() : 0.0;
}

QpSolution QpSolver::solve(const QuadraticProgram& qp,
                           const std::optional<Eigen::VectorXd>& warm_start) {
  qp.validate();
  const int n = qp.size();
  const int m = qp.num_ineq();
  const int rows = n + m;

  if (!structure_matches(qp)) {
    rho_ = settings_.rho;
    factorize(qp);
    have_state_ = false;
  }

  Eigen::VectorXd lo(rows), hi(rows);
  lo << qp.lower, qp.a_lower;
  hi << qp.upper, qp.a_upper;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (warm_start) {
    if (warm_start->size() != n) {
      throw DimensionMismatch("QpSolver: warm start has wrong length");
    }
    x = *warm_start;
  }
  Eigen::VectorXd z(rows), y(rows);
  if (have_state_ && z_aux_.size() == rows) {
    z = z_aux_;
    y = y_;
  } else {
    z.head(n) = clamp_to(x, qp.lower, qp.upper);
    if (m > 0) z.tail(m) = clamp_to(qp.A * x, qp.a_lower, qp.a_upper);
    y.setZero(rows);
  }

  auto stacked_apply = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(rows);
    out.head(n) = v;
    if (m > 0) out.tail(m).noalias() = qp.A * v;
    return out;
  };
  auto stacked_adjoint = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out = v.head(n);
    if (m > 0) out.noalias() += qp.A.transpose() * v.tail(m);
    return out;
  };

  QpSolution sol;
  sol.status = QpStatus::MaxIters;
  double best_primal = kUnbounded;
  int last_best_iter = 0;

  int iter = 0;
  for (iter = 1; iter <= settings_.max_iters; ++iter) {
    // x-update through the cached factorization.
    Eigen::VectorXd rhs = settings_.sigma * x - qp.f;
    rhs.noalias() += stacked_adjoint(rho_ * z - y);
    x = llt_.solve(rhs);

    const Eigen::VectorXd ax = stacked_apply(x);
    const Eigen::VectorXd relaxed =
        settings_.alpha * ax + (1.0 - settings_.alpha) * z;
    const Eigen::VectorXd z_prev = z;
    z = clamp_to(relaxed + y / rho_, lo, hi);
    y += rho_ * (relaxed - z);

    const double r_prim = (ax - z).cwiseAbs().maxCoeff();
    const double r_dual =
        (qp.H * x + qp.f + stacked_adjoint(y)).cwiseAbs().maxCoeff();

    if (r_prim <= settings_.eps_abs && r_dual <= settings_.eps_abs) {
      sol.status = QpStatus::Optimal;
      sol.primal_residual = r_prim;
      sol.dual_residual = r_dual;
      break;
    }
    sol.primal_residual = r_prim;
    sol.dual_residual = r_dual;

    if (r_prim < best_primal * (1.0 - 1e-10)) {
      best_primal = r_prim;
      last_best_iter = iter;
    }
    // Stagnating primal residual far from feasibility: the box and the
    // affine band do not intersect.
    if (iter - last_best_iter > 2000 && r_prim > 1e3 * settings_.eps_abs) {
      sol.status = QpStatus::Infeasible;
      break;
    }

    if (iter % settings_.adapt_interval == 0 && r_dual > 0.0 && r_prim > 0.0) {
      const double ratio = std::sqrt(r_prim / r_dual);
      if (ratio > 5.0 || ratio < 0.2) {
        rho_ = std::clamp(rho_ * ratio, 1e-6, 1e6);
        factorize(qp);
      }
    }
    (void)z_prev;
  }

  z_aux_ = z;
  y_ = y;
  have_state_ = true;

  sol.z = x;
  sol.iterations = std::min(iter, settings_.max_iters);
  sol.objective = qp.objective(x);
  sol.duals = y;
  return sol;
}

QpSolution solve(const QuadraticProgram& qp,
                 const std::optional<Eigen::VectorXd>& warm_start,
                 QpSettings settings) {
  QpSolver solver(settings);
  return solver.solve(qp, warm_start);
}

std::pair<double, double> kkt_residual(const QuadraticProgram& qp,
                                       const Eigen::VectorXd& z,
                                       const Eigen::VectorXd& duals) {
  const int n = qp.size();
  const int m = qp.num_ineq();
  if (z.size() != n || duals.size() != n + m) {
    throw DimensionMismatch("kkt_residual: dimensions disagree");
  }
  double primal = band_violation(z, qp.lower, qp.upper);
  if (m > 0) {
    primal = std::max(primal, band_violation(qp.A * z, qp.a_lower, qp.a_upper));
  }
  Eigen::VectorXd stat = qp.H * z + qp.f + duals.head(n);
  if (m > 0) stat.noalias() += qp.A.transpose() * duals.tail(m);
  return {primal, stat.cwiseAbs().maxCoeff()};
}

}  // namespace ddpc
