#pragma once

#include "juggle/flight.hpp"
#include "juggle/lqr.hpp"
#include "juggle/poincare.hpp"
#include "juggle/steady_state.hpp"
#include "juggle/types.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace juggle {

/// Multiplicative disturbance bounds for robustness runs. Measurement noise
/// is symmetric; impulse loss is one-sided (actuation only ever loses
/// magnitude).
struct NoiseSpec {
  double impulse_loss_max = 0.025;
  double position_noise_max = 0.01;
  double velocity_noise_max = 0.025;

  void validate() const {
    auto ok = [](double x) { return x >= 0.0 && x < 1.0; };
    if (!ok(impulse_loss_max) || !ok(position_noise_max) ||
        !ok(velocity_noise_max))
      throw std::invalid_argument("NoiseSpec: fractions must lie in [0, 1)");
  }
};

struct SimConfig {
  StickParamsd params = StickParamsd::reference();
  JuggleSpecd spec;
  double h_bar_z_star = 1.6;
  SectionStateJugglerd initial_state;
  int n_steps = 20;
  Vec8<double> q_diag = Vec8<double>::Ones();
  Vec3d r_diag = Vec3d(2.0, 0.5, 1.0);
  std::optional<NoiseSpec> noise;
  std::uint64_t rng_seed = 0;
  int render_samples_per_flight = 0;

  void validate() const {
    params.validate();
    spec.validate();
    if (n_steps < 1) throw std::invalid_argument("SimConfig: n_steps >= 1");
    if (noise) noise->validate();
    if ((q_diag.array() < 0).any() || (r_diag.array() <= 0).any())
      throw std::invalid_argument("SimConfig: Q diag >= 0 and R diag > 0");
  }
};

/// One closed-loop step: the true pre-state, what the controller saw, what
/// was commanded, what the plant received, and the resulting crossing.
struct SimStep {
  int k = 0;
  SectionStateJugglerd pre;       ///< true state at t_k^-
  SectionStateJugglerd measured;  ///< state seen by the controller
  ControlInputd commanded;        ///< feedback output after saturation
  ControlInputd applied;          ///< after actuation loss
  bool impulse_saturated = false;
  bool offset_saturated = false;
  SectionVelocitiesd post_impulse;
  FlightConstantsd flight;
  double delta_alpha = 0.0;
  double alpha_k = 0.0;  ///< cumulative inertial precession at t_k
  SectionStateJugglerd next;
};

struct SimSummary {
  int convergence_step = -1;  ///< first k with all errors under 1% of initial
  Vec8<double> initial_error = Vec8<double>::Zero();
  Vec8<double> max_abs_error = Vec8<double>::Zero();
  double max_error_norm = 0.0;
  int impulse_saturation_count = 0;
  int offset_saturation_count = 0;
};

struct SimLog {
  SimConfig config;
  FixedPointd fixed_point;
  LinearizedMapd linearization;
  GainMatrixd gain;
  std::vector<SimStep> steps;
  std::vector<FlightSampled> trajectory;  ///< dense inertial-frame samples
  SimSummary summary;
};

/// Multiplicative symmetric noise x * (1 + u), u ~ Uniform(-max, +max).
inline double inject_noise(double value, double max_fraction,
                           std::mt19937_64& rng) {
  if (max_fraction == 0.0) return value;
  std::uniform_real_distribution<double> dist(-max_fraction, max_fraction);
  return value * (1.0 + dist(rng));
}

inline Vec3d inject_noise(const Vec3d& value, double max_fraction,
                          std::mt19937_64& rng) {
  Vec3d out;
  for (int i = 0; i < 3; ++i) out[i] = inject_noise(value[i], max_fraction, rng);
  return out;
}

/// One-sided actuation loss I * (1 - u), u ~ Uniform(0, max).
inline double apply_impulse_loss(double impulse, double max_fraction,
                                 std::mt19937_64& rng) {
  if (max_fraction == 0.0) return impulse;
  std::uniform_real_distribution<double> dist(0.0, max_fraction);
  return impulse * (1.0 - dist(rng));
}

/// Full closed-loop run: fixed point, linearization, LQR synthesis, then
/// n_steps of measure -> feedback -> actuate -> return map.
inline SimLog run_closed_loop(const SimConfig& cfg) {
  cfg.validate();
  SimLog log;
  log.config = cfg;
  log.fixed_point =
      solve_fixed_point(cfg.spec, cfg.params, cfg.h_bar_z_star);
  const PoincareSectiond section(log.fixed_point.beta_star, cfg.params);
  log.linearization = linearize(section, log.fixed_point);
  log.gain = lqr_gain(log.linearization, Mat8<double>(cfg.q_diag.asDiagonal()),
                      Mat3d(cfg.r_diag.asDiagonal()));

  std::mt19937_64 rng(cfg.rng_seed);
  const Vec8<double> y_star = log.fixed_point.y_star.to_vector();

  SectionStateJugglerd y = cfg.initial_state;
  double alpha_cum = 0.0;
  double t_cum = 0.0;
  log.summary.initial_error = y.to_vector() - y_star;

  for (int k = 1; k <= cfg.n_steps; ++k) {
    SimStep step;
    step.k = k;
    step.pre = y;
    step.alpha_k = alpha_cum;

    step.measured = y;
    if (cfg.noise) {
      step.measured.h = inject_noise(y.h, cfg.noise->position_noise_max, rng);
      step.measured.v = inject_noise(y.v, cfg.noise->velocity_noise_max, rng);
      step.measured.alpha_dot =
          inject_noise(y.alpha_dot, cfg.noise->velocity_noise_max, rng);
      step.measured.beta_dot =
          inject_noise(y.beta_dot, cfg.noise->velocity_noise_max, rng);
    }

    const FeedbackResult<double> fb =
        feedback(step.measured, log.fixed_point, log.gain, cfg.params);
    step.commanded = fb.u;
    step.impulse_saturated = fb.impulse_saturated;
    step.offset_saturated = fb.offset_saturated;
    step.applied = fb.u;
    if (cfg.noise)
      step.applied.impulse = apply_impulse_loss(
          fb.u.impulse, cfg.noise->impulse_loss_max, rng);

    StepRecordJuggler<double> rec;
    try {
      rec = section.map_juggler(y, step.applied);
    } catch (const NonDescendingPostImpulse& e) {
      throw NonDescendingPostImpulse(std::string(e.what()) + " at step k=" +
                                     std::to_string(k));
    }
    step.post_impulse = rec.post_impulse;
    step.flight = rec.flight;
    step.delta_alpha = rec.delta_alpha;
    step.next = rec.next;

    if (cfg.render_samples_per_flight > 0) {
      // Flight in the frame of crossing k, rotated to the inertial frame.
      auto samples = render_flight(
          y.h, rec.post_impulse.v, 0.0, rec.post_impulse.alpha_dot,
          rec.post_impulse.beta_dot, log.fixed_point.beta_star, rec.flight,
          cfg.params, cfg.render_samples_per_flight);
      const Mat3d rot = rot_z(alpha_cum);
      for (auto& s : samples) {
        s.t += t_cum;
        s.h = rot * s.h;
        s.v = rot * s.v;
        s.alpha += alpha_cum;
        log.trajectory.push_back(s);
      }
    }

    if (step.impulse_saturated) ++log.summary.impulse_saturation_count;
    if (step.offset_saturated) ++log.summary.offset_saturation_count;

    const Vec8<double> err = y.to_vector() - y_star;
    log.summary.max_abs_error =
        log.summary.max_abs_error.cwiseMax(err.cwiseAbs());
    log.summary.max_error_norm =
        std::max(log.summary.max_error_norm, err.norm());
    if (log.summary.convergence_step < 0) {
      bool converged = true;
      for (int i = 0; i < 8; ++i) {
        const double ref = std::abs(log.summary.initial_error[i]);
        if (ref < 1e-9) continue;  // component started converged
        if (std::abs(err[i]) > 0.01 * ref) converged = false;
      }
      if (converged) log.summary.convergence_step = k;
    }

    log.steps.push_back(step);
    alpha_cum += rec.delta_alpha;
    t_cum += rec.flight.delta;
    y = rec.next;
  }
  return log;
}

/// Full off-section inertial state for pre-section initialization.
struct FreeState {
  Vec3d h;
  Vec3d v;
  double alpha;
  double beta;
  double alpha_dot;
  double beta_dot;
};

/// Integrate torque-free flight until the trajectory crosses beta = beta*
/// ascending, and return the section state there. A state already on the
/// section with beta_dot > 0 is returned unchanged.
inline SectionStateInertiald settle_to_section(const FreeState& x0,
                                               const StickParamsd& p,
                                               double beta_star,
                                               double horizon = 10.0) {
  if (std::abs(x0.beta - beta_star) < 1e-12 && x0.beta_dot > 0.0)
    return SectionStateInertiald{x0.h, x0.v, x0.alpha, x0.alpha_dot,
                                 x0.beta_dot};

  const double sb0 = std::sin(x0.beta);
  const double c = x0.alpha_dot * sb0 * sb0;  // Hz / J, conserved
  const double k1 = c * c;

  const double dt = 1e-4;
  double t = 0.0, alpha = x0.alpha, beta = x0.beta, beta_dot = x0.beta_dot;
  while (t < horizon) {
    const double beta_prev = beta, alpha_prev = alpha, bd_prev = beta_dot;
    detail::attitude_rk4_step(c, k1, dt, alpha, beta, beta_dot);
    t += dt;
    // planar trajectories reflect at beta = 0
    if (k1 == 0.0 && beta <= 0.0) {
      beta = -beta;
      beta_dot = -beta_dot;
      alpha += M_PI;
    }
    if (beta_prev < beta_star && beta >= beta_star && beta_dot > 0.0) {
      // bisection in time over the last step; one RK4 substep per probe
      double lo = 0.0, hi = dt;
      for (int it = 0; it < 80 && (hi - lo) > 1e-10; ++it) {
        const double mid = 0.5 * (lo + hi);
        double a = alpha_prev, b = beta_prev, bd = bd_prev;
        detail::attitude_rk4_step(c, k1, mid, a, b, bd);
        (b < beta_star ? lo : hi) = mid;
      }
      const double t_cross = (t - dt) + hi;
      double a = alpha_prev, b = beta_prev, bd = bd_prev;
      detail::attitude_rk4_step(c, k1, hi, a, b, bd);
      Vec3d h, v;
      ballistic(x0.h, x0.v, t_cross, p.g, h, v);
      const double s = std::sin(b);
      return SectionStateInertiald{h, v, a, c / (s * s), bd};
    }
  }
  throw NoSectionCrossing("no ascending beta = beta* crossing within horizon");
}

}  // namespace juggle
