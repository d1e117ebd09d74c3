#include "ddpc/planner.hpp"

#include <chrono>
#include <cmath>

namespace ddpc {

void PlannerConfig::validate() const {
  hyper.validate();
  if (Eigen::LLT<Eigen::MatrixXd>(q_weight).info() != Eigen::Success ||
      Eigen::LLT<Eigen::MatrixXd>(r_weight).info() != Eigen::Success) {
    throw NotPositiveDefinite("PlannerConfig: Q and R must be SPD");
  }
  if ((stance_cop_lower.array() > stance_cop_upper.array()).any() ||
      (swing_cop_lower.array() > swing_cop_upper.array()).any() ||
      (eta_lower.array() > eta_upper.array()).any()) {
    throw ConfigError("PlannerConfig: empty feasibility box");
  }
  if (replan_hz <= 0.0) {
    throw ConfigError("PlannerConfig: replan_hz must be positive");
  }
}

FeedbackBuffer::FeedbackBuffer(int t_ini, double delta_t, double tick_tolerance)
    : t_ini_(t_ini),
      delta_t_(delta_t),
      tick_tolerance_(tick_tolerance > 0.0 ? tick_tolerance : delta_t / 100.0) {
  if (t_ini < 1 || delta_t <= 0.0) {
    throw ConfigError("FeedbackBuffer: needs t_ini >= 1 and delta_t > 0");
  }
}

bool FeedbackBuffer::update(const Vector4d& mu, const Vector6d& eta, double t) {
  if (t < last_seen_) {
    throw NonMonotonicTime("FeedbackBuffer: time went backwards");
  }
  last_seen_ = t;
  // Append at delta_t cadence; sub-interval calls replan against the same
  // buffer.
  if (!samples_.empty() &&
      t < samples_.back().t + delta_t_ - tick_tolerance_) {
    return false;
  }
  samples_.push_back({mu, eta, t});
  while (static_cast<int>(samples_.size()) > t_ini_) {
    samples_.pop_front();
  }
  return true;
}

double FeedbackBuffer::last_time() const {
  if (samples_.empty()) {
    throw BufferNotWarm("FeedbackBuffer: no samples yet");
  }
  return samples_.back().t;
}

Eigen::VectorXd FeedbackBuffer::stacked_mu() const {
  if (!warm()) {
    throw BufferNotWarm("FeedbackBuffer: not enough samples");
  }
  Eigen::VectorXd out(4 * t_ini_);
  for (int i = 0; i < t_ini_; ++i) {
    out.segment<4>(4 * i) = samples_[i].mu;
  }
  return out;
}

Eigen::VectorXd FeedbackBuffer::stacked_eta() const {
  if (!warm()) {
    throw BufferNotWarm("FeedbackBuffer: not enough samples");
  }
  Eigen::VectorXd out(6 * t_ini_);
  for (int i = 0; i < t_ini_; ++i) {
    out.segment<6>(6 * i) = samples_[i].eta;
  }
  return out;
}

QuadraticProgram assemble_qp(const TransitionMatrix& g,
                             const Eigen::MatrixXd& r_eta,
                             const Eigen::MatrixXd& r_mu,
                             const Eigen::VectorXd& mu_ini,
                             const Eigen::VectorXd& eta_ini,
                             const Eigen::MatrixXd& q_weight,
                             const Eigen::MatrixXd& r_weight,
                             const Eigen::MatrixXd& mu_lower,
                             const Eigen::MatrixXd& mu_upper,
                             const Eigen::MatrixXd& eta_lower,
                             const Eigen::MatrixXd& eta_upper) {
  const TransitionDims& dims = g.dims();
  const int n_knots = dims.horizon;
  const int kappa = dims.kappa;
  const int nu = dims.nu;
  if (r_eta.rows() != nu || r_eta.cols() != n_knots || r_mu.rows() != kappa ||
      r_mu.cols() != n_knots || q_weight.rows() != nu ||
      q_weight.cols() != nu || r_weight.rows() != kappa ||
      r_weight.cols() != kappa || mu_lower.rows() != kappa ||
      mu_lower.cols() != n_knots || mu_upper.rows() != kappa ||
      mu_upper.cols() != n_knots) {
    throw DimensionMismatch("assemble_qp: shapes disagree with G dims");
  }
  if (mu_ini.size() != kappa * dims.t_ini || eta_ini.size() != nu * dims.t_ini) {
    throw DimensionMismatch("assemble_qp: history lengths disagree with G");
  }

  Eigen::VectorXd past(dims.past_cols());
  past << mu_ini, eta_ini;

  const Eigen::MatrixXd g_fut = g.g_future();
  const Eigen::VectorXd eta_bias = g.g_past() * past;  // nu*N

  const Eigen::Map<const Eigen::VectorXd> r_eta_v(r_eta.data(), nu * n_knots);
  const Eigen::Map<const Eigen::VectorXd> r_mu_v(r_mu.data(), kappa * n_knots);

  // Block-diagonal weight repeats.
  Eigen::MatrixXd q_bar = Eigen::MatrixXd::Zero(nu * n_knots, nu * n_knots);
  Eigen::MatrixXd r_bar =
      Eigen::MatrixXd::Zero(kappa * n_knots, kappa * n_knots);
  for (int k = 0; k < n_knots; ++k) {
    q_bar.block(nu * k, nu * k, nu, nu) = q_weight;
    r_bar.block(kappa * k, kappa * k, kappa, kappa) = r_weight;
  }

  QuadraticProgram qp;
  const Eigen::MatrixXd qgf = q_bar * g_fut;
  qp.H = 2.0 * (g_fut.transpose() * qgf + r_bar);
  qp.H = 0.5 * (qp.H + qp.H.transpose());  // symmetrize roundoff
  qp.f = 2.0 * (qgf.transpose() * (eta_bias - r_eta_v) - r_bar * r_mu_v);

  qp.lower = Eigen::Map<const Eigen::VectorXd>(mu_lower.data(), kappa * n_knots);
  qp.upper = Eigen::Map<const Eigen::VectorXd>(mu_upper.data(), kappa * n_knots);

  if (eta_lower.size() > 0) {
    if (eta_lower.rows() != nu || eta_lower.cols() != n_knots ||
        eta_upper.rows() != nu || eta_upper.cols() != n_knots) {
      throw DimensionMismatch("assemble_qp: eta bound shapes disagree");
    }
    qp.A = g_fut;
    qp.a_lower =
        Eigen::Map<const Eigen::VectorXd>(eta_lower.data(), nu * n_knots) -
        eta_bias;
    qp.a_upper =
        Eigen::Map<const Eigen::VectorXd>(eta_upper.data(), nu * n_knots) -
        eta_bias;
  } else {
    qp.A.resize(0, kappa * n_knots);
    qp.a_lower.resize(0);
    qp.a_upper.resize(0);
  }
  return qp;
}

QuadraticProgram assemble_qp(const TransitionMatrix& g, const HorizonRefs& refs,
                             const FeedbackBuffer& buffer,
                             const PlannerConfig& cfg) {
  cfg.validate();
  const TransitionDims& dims = g.dims();
  const int n_knots = dims.horizon;
  if (dims.kappa != 4 || dims.nu != 6) {
    throw DimensionMismatch("assemble_qp: expects the 4-input/6-output model");
  }
  if (refs.knots() != n_knots) {
    throw DimensionMismatch("assemble_qp: reference horizon disagrees with G");
  }
  if (!buffer.warm()) {
    throw BufferNotWarm("assemble_qp: feedback buffer is not warm");
  }

  // CoP box per knot, mapped by the stance timeline.
  Eigen::MatrixXd mu_lower(4, n_knots);
  Eigen::MatrixXd mu_upper(4, n_knots);
  for (int k = 0; k < n_knots; ++k) {
    const bool left_stance = refs.stance[k] == Stance::Left;
    const int stance_block = left_stance ? 0 : 2;
    const int swing_block = left_stance ? 2 : 0;
    mu_lower.col(k).segment<2>(stance_block) = cfg.stance_cop_lower;
    mu_upper.col(k).segment<2>(stance_block) = cfg.stance_cop_upper;
    mu_lower.col(k).segment<2>(swing_block) = cfg.swing_cop_lower;
    mu_upper.col(k).segment<2>(swing_block) = cfg.swing_cop_upper;
  }

  Eigen::MatrixXd eta_lower(0, 0), eta_upper(0, 0);
  if (cfg.eta_box_enabled) {
    eta_lower = cfg.eta_lower.replicate(1, n_knots);
    eta_upper = cfg.eta_upper.replicate(1, n_knots);
  }
  return assemble_qp(g, refs.r_eta, refs.r_mu, buffer.stacked_mu(),
                     buffer.stacked_eta(), cfg.q_weight, cfg.r_weight,
                     mu_lower, mu_upper, eta_lower, eta_upper);
}

double tracking_cost(const Eigen::MatrixXd& mu, const Eigen::MatrixXd& eta,
                     const HorizonRefs& refs, const PlannerConfig& cfg) {
  double cost = 0.0;
  for (int k = 0; k < refs.knots(); ++k) {
    const Vector6d de = eta.col(k) - refs.r_eta.col(k);
    const Vector4d dm = mu.col(k) - refs.r_mu.col(k);
    cost += de.dot(cfg.q_weight * de) + dm.dot(cfg.r_weight * dm);
  }
  return cost;
}

DdpcPlanner::DdpcPlanner(PlannerConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
}

void DdpcPlanner::set_transition(std::shared_ptr<const TransitionMatrix> g) {
  std::lock_guard lock(g_mutex_);
  g_ = std::move(g);
}

std::shared_ptr<const TransitionMatrix> DdpcPlanner::transition() const {
  std::lock_guard lock(g_mutex_);
  return g_;
}

PlanResult DdpcPlanner::plan(const HorizonRefs& refs,
                             const FeedbackBuffer& buffer,
                             double first_knot_time) {
  const std::shared_ptr<const TransitionMatrix> g = transition();
  if (!g) {
    throw ConfigError("DdpcPlanner: no transition matrix set");
  }
  const int n_knots = g->dims().horizon;
  const double dt = cfg_.hyper.delta_t;

  const QuadraticProgram qp = assemble_qp(*g, refs, buffer, cfg_);

  std::optional<Eigen::VectorXd> warm;
  if (have_prev_ && prev_solution_.size() == 4 * n_knots) {
    // Shift the previous plan by the number of knots that elapsed.
    const int shift = std::max(
        0, static_cast<int>(std::lround((first_knot_time - prev_first_knot_) / dt)));
    Eigen::VectorXd shifted = prev_solution_;
    if (shift > 0 && shift < n_knots) {
      shifted.head(4 * (n_knots - shift)) =
          prev_solution_.tail(4 * (n_knots - shift));
      for (int k = n_knots - shift; k < n_knots; ++k) {
        shifted.segment<4>(4 * k) = prev_solution_.tail<4>();
      }
    }
    warm = shifted;
  }

  const QpSolution sol = solver_.solve(qp, warm);

  PlanResult plan;
  plan.status = sol.status;
  plan.iterations = sol.iterations;
  plan.mu_plan = Eigen::Map<const Eigen::MatrixXd>(sol.z.data(), 4, n_knots);
  const Eigen::VectorXd eta_stacked =
      predict(*g, buffer.stacked_mu(), buffer.stacked_eta(), sol.z);
  plan.eta_plan =
      Eigen::Map<const Eigen::MatrixXd>(eta_stacked.data(), 6, n_knots);
  plan.objective = tracking_cost(plan.mu_plan, plan.eta_plan, refs, cfg_);
  plan.knot_times =
      Eigen::VectorXd::LinSpaced(n_knots, first_knot_time,
                                 first_knot_time + (n_knots - 1) * dt);

  prev_solution_ = sol.z;
  prev_first_knot_ = first_knot_time;
  have_prev_ = true;
  return plan;
}

Vector4d interpolate_plan(const PlanResult& plan, double t) {
  const int n = static_cast<int>(plan.knot_times.size());
  if (n == 0) {
    throw SolverNotOptimal("interpolate_plan: empty plan");
  }
  if (t <= plan.knot_times(0)) return plan.mu_plan.col(0);
  if (t >= plan.knot_times(n - 1)) return plan.mu_plan.col(n - 1);
  int k = 0;
  while (k + 1 < n && plan.knot_times(k + 1) < t) ++k;
  const double t0 = plan.knot_times(k);
  const double t1 = plan.knot_times(k + 1);
  const double w = (t - t0) / (t1 - t0);
  return (1.0 - w) * plan.mu_plan.col(k) + w * plan.mu_plan.col(k + 1);
}

OnlineUpdatePolicy::OnlineUpdatePolicy(OnlineUpdateConfig cfg,
                                       DdpcHyperparams hyper)
    : cfg_(cfg), hyper_(hyper) {
  hyper_.T = cfg_.window_length;
  hyper_.validate();
}

void OnlineUpdatePolicy::push_sample(const Vector4d& mu, const Vector6d& eta,
                                     double t) {
  if (t < last_sample_time_) {
    throw NonMonotonicTime("OnlineUpdatePolicy: time went backwards");
  }
  last_sample_time_ = t;
  window_.emplace_back(mu, eta);
  while (static_cast<int>(window_.size()) > cfg_.window_length) {
    window_.pop_front();
  }
}

std::optional<TransitionMatrix> OnlineUpdatePolicy::maybe_rebuild(double t) {
  if (!cfg_.enabled) return std::nullopt;
  if (t < cfg_.collect_time) return std::nullopt;
  if (static_cast<int>(window_.size()) < cfg_.window_length) return std::nullopt;
  if (last_rebuild_ > -kUnbounded && t < last_rebuild_ + cfg_.rebuild_period) {
    return std::nullopt;
  }

  Eigen::MatrixXd mu(4, window_.size());
  Eigen::MatrixXd eta(6, window_.size());
  for (std::size_t i = 0; i < window_.size(); ++i) {
    mu.col(static_cast<Eigen::Index>(i)) = window_[i].first;
    eta.col(static_cast<Eigen::Index>(i)) = window_[i].second;
  }

  last_rebuild_ = t;
  RebuildEvent event;
  event.time = t;
  const auto start = std::chrono::steady_clock::now();
  try {
    const IoTrajectory traj(mu, eta, hyper_.delta_t);
    TransitionMatrix g = fit_transition_matrix(partition(traj, hyper_));
    event.fit_wall_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - start)
            .count();
    event.success = true;
    events_.push_back(event);
    return g;
  } catch (const DegenerateData&) {
    event.fit_wall_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - start)
            .count();
    event.success = false;
    events_.push_back(event);
    return std::nullopt;
  }
}

}  // namespace ddpc
