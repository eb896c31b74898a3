#pragma once

#include "juggle/poincare.hpp"
#include "juggle/types.hpp"

#include <cmath>
#include <optional>

namespace juggle {

/// Closed-form fixed point of the juggler-frame return map together with
/// the intermediate quantities of the flight-time constraint.
template <typename T>
struct FixedPoint {
  SectionStateJuggler<T> y_star;
  ControlInput<T> u_star;
  T beta_star;
  T delta_star;
  T delta_alpha_star;
  T psi;
  T xi;
  T delta_min;
};

using FixedPointd = FixedPoint<double>;

/// The pair (Psi, xi) entering the flight-time constraint. delta_alpha = pi
/// is evaluated on an exact branch (xi = 1, Psi = 4 beta*) so the planar
/// reduction is reproduced to machine precision.
template <typename T>
std::pair<T, T> flight_time_shape(T beta_star, T delta_alpha_star) {
  const T pi = T(M_PI);
  const T cotb = std::cos(beta_star) / std::sin(beta_star);
  if (delta_alpha_star == pi) return {T(4) * beta_star, T(1)};
  // cot(delta_alpha/2) = sin / (1 - cos), in stable half-angle form
  const T cot_half = T(1) / std::tan(delta_alpha_star / T(2));
  const T sec = T(1) / std::cos(beta_star);
  const T xi = std::sqrt(T(1) + sec * sec * cot_half * cot_half);
  const T psi = (T(2) / xi) * (pi - T(2) * std::atan(xi * cotb));
  return {psi, xi};
}

/// Smallest feasible time of flight: below it the required application
/// offset leaves the stick.
template <typename T>
T min_flight_time(T beta_star, T delta_alpha_star, const StickParams<T>& p) {
  const auto [psi, xi] = flight_time_shape(beta_star, delta_alpha_star);
  (void)xi;
  return std::sqrt(T(2) * p.J * psi * std::sin(beta_star) / (p.m * p.g * p.ell));
}

/// Closed-form steady-juggling fixed point. h_bar_z is a free coordinate of
/// the orbit (the map is neutral in it) and is taken as a parameter.
template <typename T>
FixedPoint<T> solve_fixed_point(const JuggleSpec<T>& spec,
                                const StickParams<T>& p,
                                T h_bar_z = T(1.6)) {
  spec.validate();
  p.validate();

  const T beta = spec.beta_star;
  const T da = spec.delta_alpha_star;
  const auto [psi, xi] = flight_time_shape(beta, da);
  const T delta_min =
      std::sqrt(T(2) * p.J * psi * std::sin(beta) / (p.m * p.g * p.ell));

  T delta;
  if (spec.delta_star && spec.p) {
    delta = *spec.delta_star;
    if (std::abs(delta - *spec.p * delta_min) > T(1e-9))
      throw std::invalid_argument(
          "JuggleSpec: delta_star and p*delta_min disagree");
  } else if (spec.delta_star) {
    delta = *spec.delta_star;
  } else {
    delta = *spec.p * delta_min;
  }
  if (delta < delta_min * (T(1) - T(1e-12)))
    throw InfeasibleFlightTime(
        "delta_star below the minimum flight time: offset would leave the stick");

  const T sb = std::sin(beta), cb = std::cos(beta);
  const T cotb = cb / sb;
  // Exact planar branch keeps sin(da) = 0, cos(da) = -1 at da = pi.
  const T sin_da = (da == T(M_PI)) ? T(0) : std::sin(da);
  const T one_minus_cos = (da == T(M_PI)) ? T(2) : T(1) - std::cos(da);

  FixedPoint<T> fp;
  fp.beta_star = beta;
  fp.delta_star = delta;
  fp.delta_alpha_star = da;
  fp.psi = psi;
  fp.xi = xi;
  fp.delta_min = delta_min;

  fp.y_star.h = Vec3<T>(p.g * delta * delta * cotb / (T(2) * one_minus_cos),
                        T(0), h_bar_z);
  fp.y_star.v =
      Vec3<T>(p.g * delta * cotb / T(2),
              p.g * delta * cotb * sin_da / (T(2) * one_minus_cos),
              -p.g * delta / T(2));
  fp.y_star.alpha_dot =
      psi * sin_da / (delta * T(2) * sb * cb * one_minus_cos);
  fp.y_star.beta_dot = psi / (T(2) * delta);

  fp.u_star.impulse = p.m * p.g * delta / sb;
  fp.u_star.offset = p.J * psi * sb / (p.m * p.g * delta * delta);
  fp.u_star.phi = T(0);
  return fp;
}

/// Steady precession of the stick on a hoop: the limit in which the
/// impulses merge into a continuous normal force.
template <typename T>
struct PrecessionState {
  T h_bar_x;    ///< radius of the center-of-mass circle, m
  T v_bar_y;    ///< tangential speed of the center-of-mass, m/s
  T alpha_dot;  ///< precession rate, rad/s
  T force;      ///< continuous normal force F*, N
  T offset;     ///< hoop contact offset r*, m
};

using PrecessionStated = PrecessionState<double>;

template <typename T>
PrecessionState<T> precession_limit(T beta_star, T p_free,
                                    const StickParams<T>& p) {
  const T pi = T(M_PI);
  if (!(beta_star > T(0)) || !(beta_star < pi / T(2)))
    throw std::invalid_argument("precession_limit: beta_star outside (0, pi/2)");
  if (!(p_free >= T(1)))
    throw std::invalid_argument("precession_limit: p must be >= 1");
  p.validate();

  const T sb = std::sin(beta_star), cb = std::cos(beta_star);
  PrecessionState<T> s;
  s.h_bar_x = T(2) * p_free * p_free * p.J * sb * cb * cb / (p.m * p.ell);
  s.v_bar_y = p_free * std::sqrt(T(2) * p.J * p.g * cb * cb * cb / (p.m * p.ell));
  s.alpha_dot =
      std::sqrt(p.m * p.g * p.ell / (T(2) * p.J * sb * sb * cb)) / p_free;
  s.force = p.m * p.g / sb;
  s.offset = p.ell / (T(2) * p_free * p_free);
  return s;
}

}  // namespace juggle
