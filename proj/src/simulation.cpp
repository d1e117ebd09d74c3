#include "ddpc/simulation.hpp"

#include <cmath>

#include "ddpc/reference.hpp"

namespace ddpc {

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::Nominal:
      return "nominal";
    case ControllerKind::Ddpc:
      return "ddpc";
    case ControllerKind::LipMpc:
      return "lip_mpc";
  }
  return "unknown";
}

ControllerKind controller_from_string(const std::string& name) {
  if (name == "nominal") return ControllerKind::Nominal;
  if (name == "ddpc") return ControllerKind::Ddpc;
  if (name == "lip_mpc" || name == "mpc") return ControllerKind::LipMpc;
  throw ConfigError("unknown controller: " + name);
}

namespace {

Eigen::Vector3d measured_com(const WalkerParams& plant,
                             const LipWalkerState& state,
                             const Observation& obs) {
  // Reconstruct the (biased) CoM estimate from the stance block, the way a
  // state estimator anchored at the known stance foot would.
  if (state.stance == Stance::Left) {
    return state.p_left + obs.eta.head<3>();
  }
  return state.p_right + obs.eta.tail<3>();
}

// Ankle-strategy inversion of the nominal pendulum: place the CoP so the
// measured CoM tracks the gait reference with PD error dynamics.
Eigen::Vector2d ankle_law(const Eigen::Vector2d& com_meas,
                          const Eigen::Vector2d& vel_meas,
                          const ComWorldRef& ref, const NominalGains& gains,
                          double omega_sq) {
  const Eigen::Vector2d e = com_meas - ref.pos.head<2>();
  const Eigen::Vector2d de = vel_meas - ref.vel.head<2>();
  const Eigen::Vector2d acc_des =
      ref.acc.head<2>() - gains.kp * e - gains.kd * de;
  return com_meas - acc_des / omega_sq;
}

}  // namespace

RunLog simulate_run(const SimConfig& cfg, const TransitionMatrix* g_init) {
  const GaitLibrary lib = make_walker_gait(cfg.gait);
  const Eigen::Vector2d lambda(cfg.gait.step_length, cfg.gait.step_width);
  const double t_d = cfg.gait.t_d;
  const double delta_t = cfg.planner.hyper.delta_t;
  const double omega_sq_nominal =
      cfg.nominal_model.gravity / cfg.nominal_model.z0;

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> dither(-cfg.cop_dither,
                                                cfg.cop_dither);
  std::uniform_real_distribution<double> jitter(-cfg.switch_jitter_ms / 1000.0,
                                                cfg.switch_jitter_ms / 1000.0);

  // Start on the right-stance periodic orbit.
  LipWalkerState state;
  state.p_right = Eigen::Vector3d::Zero();
  state.p_left =
      Eigen::Vector3d(-cfg.gait.step_length, cfg.gait.step_width, 0.0);
  state.stance = Stance::Right;
  state.domain_clock = 0.0;
  state.swing_start = state.p_left.head<2>();
  {
    const Eigen::Vector3d com0 = lib.com_curve(Stance::Right).value(0.0);
    const Eigen::Vector3d vel0 =
        lib.com_curve(Stance::Right).derivative(0.0) / t_d;
    state.p_com = {com0.x(), com0.y(), cfg.plant.effective_height()};
    state.v_com = {vel0.x(), vel0.y(), 0.0};
  }

  FeedbackBuffer buffer(cfg.planner.hyper.T_ini, delta_t);
  OnlineUpdatePolicy online(cfg.online, cfg.planner.hyper);

  std::unique_ptr<DdpcPlanner> ddpc;
  std::unique_ptr<LipMpcPlanner> mpc;
  if (cfg.controller == ControllerKind::Ddpc) {
    ddpc = std::make_unique<DdpcPlanner>(cfg.planner);
    if (g_init != nullptr) {
      ddpc->set_transition(std::make_shared<TransitionMatrix>(*g_init));
    }
  } else if (cfg.controller == ControllerKind::LipMpc) {
    mpc = std::make_unique<LipMpcPlanner>(cfg.mpc);
  }

  const int ticks = static_cast<int>(std::round(cfg.duration / cfg.sim_dt));
  const int sample_every =
      std::max(1, static_cast<int>(std::round(delta_t / cfg.sim_dt)));
  const int control_every = std::max(
      1, static_cast<int>(std::round(1.0 / (cfg.replan_hz * cfg.sim_dt))));

  RunLog log;
  const int max_samples = ticks / sample_every + 2;
  log.times.resize(max_samples);
  log.mu_log.resize(4, max_samples);
  log.eta_log.resize(6, max_samples);
  log.r_eta_log.resize(6, max_samples);
  int n_samples = 0;

  std::optional<PlanResult> current_plan;
  Eigen::Vector2d u_cmd = state.stance_foot().head<2>();
  double switch_offset = cfg.switch_jitter_ms > 0.0 ? jitter(rng) : 0.0;
  bool failed = false;
  double fail_time = cfg.duration;

  for (int k = 0; k < ticks && !failed; ++k) {
    const double t = k * cfg.sim_dt;
    double tau = phase_variable(t, state.domain_clock, t_d);

    // Scripted swing foot: blend toward the commanded touchdown, shifted by
    // the tracking drift of the body the leg is anchored to.
    Observation obs = observe(cfg.plant, state, clamp_cop(cfg.plant, state, u_cmd),
                              cfg.plant.noise_sigma > 0.0 ? &rng : nullptr);
    const Eigen::Vector3d com_meas = measured_com(cfg.plant, state, obs);
    const ComWorldRef com_ref = com_world_reference(
        lib, state.stance, state.stance_foot(), tau);
    const Eigen::Vector2d drift =
        cfg.foothold_drift_gain * (com_meas.head<2>() - com_ref.pos.head<2>());
    Eigen::Vector2d target =
        state.stance_foot().head<2>() +
        Eigen::Vector2d(lambda.x(), swing_side(state.stance) * lambda.y()) +
        drift;
    // The leg cannot overreach: commanded touchdowns are capped at the
    // kinematic step limit, so steps saturate instead of faulting.
    const double reach = cfg.plant.max_step - 1e-3;
    target.x() = std::clamp(target.x(), state.stance_foot().x() - reach,
                            state.stance_foot().x() + reach);
    {
      const Eigen::Vector2d sw = swing_blend(state.swing_start, target, tau);
      state.swing_foot() =
          Eigen::Vector3d(sw.x(), sw.y(), cfg.gait.swing_apex * std::sin(M_PI * tau));
    }

    // Foot strike: time-based switch with optional jitter.
    if (t - state.domain_clock >= t_d + switch_offset) {
      const double old_stance_x = state.stance_foot().x();
      try {
        state = impact_swap(cfg.plant, state, state.swing_foot().head<2>(), t);
      } catch (const StepTooLong&) {
        failed = true;
        fail_time = t;
        log.failure_reason = "step_too_long";
        log.events.push_back({"failure", t, 0.0});
        break;
      }
      StepRecord rec;
      rec.time = t;
      rec.desired = lambda.x();
      rec.achieved = state.stance_foot().x() - old_stance_x;
      log.metrics.steps.push_back(rec);
      log.events.push_back({"impact", t, rec.achieved});
      switch_offset = cfg.switch_jitter_ms > 0.0 ? jitter(rng) : 0.0;
      tau = phase_variable(t, state.domain_clock, t_d);
      obs = observe(cfg.plant, state, clamp_cop(cfg.plant, state, u_cmd),
                    nullptr);
    }

    // Control update.
    if (k % control_every == 0) {
      const Eigen::Vector2d vel_meas = state.v_com.head<2>();
      const Eigen::Vector3d com_now = measured_com(cfg.plant, state, obs);
      const ComWorldRef ref_now = com_world_reference(
          lib, state.stance, state.stance_foot(), tau);

      auto nominal_command = [&]() {
        return ankle_law(com_now.head<2>(), vel_meas, ref_now, cfg.gains,
                         omega_sq_nominal);
      };

      switch (cfg.controller) {
        case ControllerKind::Nominal:
          u_cmd = nominal_command();
          break;
        case ControllerKind::Ddpc: {
          if (ddpc->transition() && buffer.warm()) {
            const double first_knot = buffer.last_time() + delta_t;
            const HorizonRefs refs = horizon_references(
                lib, state.stance, state.domain_clock, state.p_left,
                state.p_right, lambda, first_knot, delta_t,
                cfg.planner.hyper.N);
            const PlanResult plan = ddpc->plan(refs, buffer, first_knot);
            if (!plan.usable()) {
              ++log.metrics.qp_failures;
              failed = true;
              fail_time = t;
              log.failure_reason = "qp_failure";
              log.events.push_back({"failure", t, 1.0});
              break;
            }
            current_plan = plan;
          }
          if (current_plan) {
            u_cmd = state.stance_foot().head<2>() +
                    stance_block(interpolate_plan(*current_plan, t),
                                 state.stance);
          } else {
            u_cmd = nominal_command();  // collection / warm-up behavior
          }
          break;
        }
        case ControllerKind::LipMpc: {
          const double first_knot = t + cfg.mpc.dt;
          const HorizonRefs refs = horizon_references(
              lib, state.stance, state.domain_clock, state.p_left,
              state.p_right, lambda, first_knot, cfg.mpc.dt, cfg.mpc.horizon);
          const PlanResult plan =
              mpc->plan(com_now.head<2>(), vel_meas, refs, first_knot);
          if (!plan.usable()) {
            ++log.metrics.qp_failures;
            failed = true;
            fail_time = t;
            log.failure_reason = "qp_failure";
            log.events.push_back({"failure", t, 1.0});
            break;
          }
          current_plan = plan;
          u_cmd = state.stance_foot().head<2>() +
                  stance_block(interpolate_plan(*current_plan, t), state.stance);
          break;
        }
      }
      if (failed) break;
      // Seeded CoP excitation, applied identically to every controller so
      // collected and online-refit data stay persistently exciting.
      if (cfg.cop_dither > 0.0) {
        u_cmd += Eigen::Vector2d(dither(rng), dither(rng));
      }
    } else if (current_plan && cfg.controller != ControllerKind::Nominal) {
      u_cmd = state.stance_foot().head<2>() +
              stance_block(interpolate_plan(*current_plan, t), state.stance);
    }

    // Sample, log, and feed the buffers at the delta_t cadence.
    if (k % sample_every == 0) {
      const Eigen::Vector2d applied = clamp_cop(cfg.plant, state, u_cmd);
      const Observation sample = observe(cfg.plant, state, applied, nullptr);
      const HorizonRefs ref_here = horizon_references(
          lib, state.stance, state.domain_clock, state.p_left, state.p_right,
          lambda, t, delta_t, 1);
      log.times(n_samples) = t;
      log.mu_log.col(n_samples) = sample.mu;
      log.eta_log.col(n_samples) = sample.eta;
      log.r_eta_log.col(n_samples) = ref_here.r_eta.col(0);
      ++n_samples;

      buffer.update(sample.mu, sample.eta, t);
      if (cfg.online.enabled) {
        online.push_sample(sample.mu, sample.eta, t);
        if (auto g = online.maybe_rebuild(t)) {
          if (ddpc) {
            ddpc->set_transition(
                std::make_shared<TransitionMatrix>(std::move(*g)));
          }
          log.events.push_back(
              {"rebuild", t, online.events().back().fit_wall_ms});
          log.metrics.fit_wall_ms.push_back(online.events().back().fit_wall_ms);
        }
      }

      // Fall checks.
      const double dist =
          (state.p_com.head<2>() - state.stance_foot().head<2>()).norm();
      if (state.p_com.z() <
              cfg.success.min_height_fraction * cfg.plant.effective_height() ||
          dist > cfg.success.max_com_stance_dist) {
        failed = true;
        fail_time = t;
        log.failure_reason = "fell";
        log.events.push_back({"failure", t, 2.0});
        break;
      }
    }

    const Eigen::Vector3d f_ext = cfg.perturbation.force_vector(t);
    state = integrate(cfg.plant, state, u_cmd, f_ext, cfg.sim_dt);
  }

  log.times.conservativeResize(n_samples);
  log.mu_log.conservativeResize(4, n_samples);
  log.eta_log.conservativeResize(6, n_samples);
  log.r_eta_log.conservativeResize(6, n_samples);

  log.metrics.survival_time = failed ? fail_time : cfg.duration;
  log.metrics.success = !failed;
  log.metrics.cumulative_error =
      cumulative_tracking_error(log.times, log.eta_log, log.r_eta_log);
  return log;
}

}  // namespace ddpc
