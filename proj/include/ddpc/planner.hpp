#pragma once

#include <Eigen/Dense>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "ddpc/qp.hpp"
#include "ddpc/reference.hpp"
#include "ddpc/transition.hpp"
#include "ddpc/types.hpp"

namespace ddpc {

/// Planner weights, horizons, and feasibility boxes.  The CoP box is
/// expressed by role (stance-frame entries bounded by the support geometry,
/// swing-frame entries free) and mapped onto the left/right mu blocks per
/// knot using the reference stance timeline.
struct PlannerConfig {
  DdpcHyperparams hyper;
  Eigen::Matrix<double, 6, 6> q_weight =
      10.0 * Eigen::Matrix<double, 6, 6>::Identity();
  Eigen::Matrix<double, 4, 4> r_weight =
      0.1 * Eigen::Matrix<double, 4, 4>::Identity();
  // CoP bounds in the stance-foot frame (support box) and the swing frame.
  Eigen::Vector2d stance_cop_lower = {-0.09, -0.05};
  Eigen::Vector2d stance_cop_upper = {0.09, 0.05};
  Eigen::Vector2d swing_cop_lower = {-kUnbounded, -kUnbounded};
  Eigen::Vector2d swing_cop_upper = {kUnbounded, kUnbounded};
  // CoM excursion box per eta entry (x, y, z relative to either foot).
  Vector6d eta_lower = (Vector6d() << -0.3, -0.3, 0.6, -0.3, -0.3, 0.6).finished();
  Vector6d eta_upper = (Vector6d() << 0.3, 0.3, 1.0, 0.3, 0.3, 1.0).finished();
  bool eta_box_enabled = true;
  double replan_hz = 100.0;

  void validate() const;
};

/// Ring buffer of the last T_ini (mu, eta) samples at delta_t spacing.
/// Sub-interval calls do not append; time must advance monotonically.
class FeedbackBuffer {
 public:
  /// tick_tolerance absorbs control-loop jitter when deciding whether a full
  /// delta_t has elapsed; it must stay below half a control tick.
  FeedbackBuffer(int t_ini, double delta_t, double tick_tolerance = -1.0);

  /// Returns true when the sample was stored (a full delta_t elapsed).
  bool update(const Vector4d& mu, const Vector6d& eta, double t);

  bool warm() const { return static_cast<int>(samples_.size()) == t_ini_; }
  int size() const { return static_cast<int>(samples_.size()); }
  double last_time() const;
  double delta_t() const { return delta_t_; }

  /// Stacked histories, oldest sample first.  Throw BufferNotWarm until
  /// t_ini samples have been collected.
  Eigen::VectorXd stacked_mu() const;
  Eigen::VectorXd stacked_eta() const;

 private:
  struct Sample {
    Vector4d mu;
    Vector6d eta;
    double t;
  };
  int t_ini_;
  double delta_t_;
  double tick_tolerance_;
  std::deque<Sample> samples_;
  double last_seen_ = -kUnbounded;
};

struct PlanResult {
  Eigen::MatrixXd mu_plan;   // 4 x N
  Eigen::MatrixXd eta_plan;  // 6 x N, predict() applied to mu_plan
  double objective = 0.0;    // tracking cost of the returned plan
  QpStatus status = QpStatus::MaxIters;
  int iterations = 0;
  Eigen::VectorXd knot_times;

  bool usable() const { return status == QpStatus::Optimal; }
};

/// Condensed QP over the stacked future inputs: the data-driven equality is
/// eliminated by substituting eta = G_past [mu_ini; eta_ini] + G_future mu.
/// Bounds are per entry and per knot (kappa x N and nu x N); pass empty
/// eta bound matrices to drop the output rows entirely.
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
                             const Eigen::MatrixXd& eta_upper);

/// Walker-facing assembly: derives the per-knot CoP boxes from the stance
/// timeline and the config's role-based bounds.
QuadraticProgram assemble_qp(const TransitionMatrix& g, const HorizonRefs& refs,
                             const FeedbackBuffer& buffer,
                             const PlannerConfig& cfg);

/// Receding-horizon planner around a swappable transition matrix.  plan()
/// snapshots G once per call; set_transition replaces it wholesale, so a
/// refit running on another thread never exposes a half-updated model.
class DdpcPlanner {
 public:
  explicit DdpcPlanner(PlannerConfig cfg);

  void set_transition(std::shared_ptr<const TransitionMatrix> g);
  std::shared_ptr<const TransitionMatrix> transition() const;

  PlanResult plan(const HorizonRefs& refs, const FeedbackBuffer& buffer,
                  double first_knot_time);

  const PlannerConfig& config() const { return cfg_; }

 private:
  PlannerConfig cfg_;
  mutable std::mutex g_mutex_;
  std::shared_ptr<const TransitionMatrix> g_;
  QpSolver solver_;
  Eigen::VectorXd prev_solution_;
  double prev_first_knot_ = 0.0;
  bool have_prev_ = false;
};

/// Linear interpolation of the planned inputs between knots, clamped to the
/// plan's time span.
Vector4d interpolate_plan(const PlanResult& plan, double t);

/// Tracking cost of a (mu, eta) trajectory pair against references.
double tracking_cost(const Eigen::MatrixXd& mu, const Eigen::MatrixXd& eta,
                     const HorizonRefs& refs, const PlannerConfig& cfg);

struct OnlineUpdateConfig {
  bool enabled = false;
  double rebuild_period = 1.5;
  int window_length = 250;  // trailing samples per refit
  double collect_time = 5.0;
};

struct RebuildEvent {
  double time = 0.0;
  double fit_wall_ms = 0.0;
  bool success = false;
};

/// Trailing-window refit policy for the perturbation scenarios: no updates
/// during the initial collection window, then a refit every rebuild period.
/// Degenerate windows keep the previous matrix and log a failed event.
class OnlineUpdatePolicy {
 public:
  OnlineUpdatePolicy(OnlineUpdateConfig cfg, DdpcHyperparams hyper);

  void push_sample(const Vector4d& mu, const Vector6d& eta, double t);
  std::optional<TransitionMatrix> maybe_rebuild(double t);

  const std::vector<RebuildEvent>& events() const { return events_; }
  int window_size() const { return static_cast<int>(window_.size()); }

 private:
  OnlineUpdateConfig cfg_;
  DdpcHyperparams hyper_;
  std::deque<std::pair<Vector4d, Vector6d>> window_;
  double last_sample_time_ = -kUnbounded;
  double last_rebuild_ = -kUnbounded;
  std::vector<RebuildEvent> events_;
};

}  // namespace ddpc
