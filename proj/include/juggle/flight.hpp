#pragma once

#include "juggle/impulse.hpp"
#include "juggle/rotations.hpp"
#include "juggle/types.hpp"

#include <cmath>
#include <vector>

namespace juggle {

/// First integrals of the torque-free flight and the derived quantities.
/// k1 and k2 satisfy beta_dot^2 = k2 - k1 cot^2(beta) along the flight,
/// with k2 - k1 cot^2(beta*) = (post-impulse beta_dot)^2.
template <typename T>
struct FlightConstants {
  T k1;        ///< rad^2/s^2, >= 0; zero exactly in the planar case
  T k2;        ///< rad^2/s^2, > 0
  T beta_min;  ///< lowest beta reached during flight, rad (0 when k1 = 0)
  T delta;     ///< time of flight, s
};

using FlightConstantsd = FlightConstants<double>;

inline constexpr double kGrazingRateTolSq = 1e-12;

/// Flight invariants from the post-impulse Euler rates. The flight must
/// start descending in beta: the section is re-entered from below.
template <typename T>
FlightConstants<T> flight_constants(T alpha_dot_plus, T beta_dot_plus,
                                    T beta_star) {
  if (!(beta_dot_plus < T(0)))
    throw NonDescendingPostImpulse(
        "flight requires beta_dot < 0 immediately after the impulse");
  if (!(beta_dot_plus * beta_dot_plus > T(kGrazingRateTolSq)))
    throw NonDescendingPostImpulse("grazing flight: |beta_dot| too small");
  const T sb = std::sin(beta_star), cb = std::cos(beta_star);
  if (!(sb > T(kDegenerateSectionTol)))
    throw DegenerateSection("sin(beta*) too small for the flight map");

  FlightConstants<T> fc;
  const T a2 = alpha_dot_plus * alpha_dot_plus;
  fc.k1 = sb * sb * sb * sb * a2;
  fc.k2 = sb * sb * cb * cb * a2 + beta_dot_plus * beta_dot_plus;

  if (fc.k1 == T(0)) {
    // Planar flight: beta moves at constant rate, symmetric about beta = 0.
    fc.beta_min = T(0);
    fc.delta = T(2) * beta_star / std::abs(beta_dot_plus);
  } else {
    fc.beta_min = std::atan(std::sqrt(fc.k1 / fc.k2));
    // k2 - k1 cot^2(beta*) equals beta_dot_plus^2 identically; using the
    // rate directly avoids cancellation near grazing flights.
    const T root = std::sqrt(fc.k1 + fc.k2);
    fc.delta = (T(M_PI) - T(2) * std::atan(root * (cb / sb) /
                                           std::abs(beta_dot_plus))) /
               root;
  }
  return fc;
}

/// Precession accumulated over one flight. With beta_dot_plus < 0 enforced,
/// the arctan argument carries the sign of -alpha_dot_plus, so the
/// principal branch lands the result in (0, 2*pi) with no case analysis;
/// alpha_dot_plus = 0 gives exactly pi (planar flip).
template <typename T>
T precession_increment(T alpha_dot_plus, T beta_dot_plus, T beta_star) {
  if (!(beta_dot_plus < T(0)))
    throw NonDescendingPostImpulse(
        "precession increment requires beta_dot < 0 after the impulse");
  const T sb = std::sin(beta_star), cb = std::cos(beta_star);
  return T(M_PI) +
         T(2) * std::atan(sb * cb * alpha_dot_plus / beta_dot_plus);
}

/// Ballistic center-of-mass motion over a time span.
template <typename T>
void ballistic(const Vec3<T>& h0, const Vec3<T>& v0, T t, T g, Vec3<T>& h,
               Vec3<T>& v) {
  h = h0 + v0 * t - Vec3<T>(T(0), T(0), T(0.5) * g * t * t);
  v = v0 - Vec3<T>(T(0), T(0), g * t);
}

/// State of the stick at the end of the flight, same frame as the input.
/// Positions and velocities follow the ballistic solution; the Euler rates
/// come from the closed-form section-to-section relations: alpha_dot is
/// conserved at equal beta and beta_dot flips sign.
template <typename T>
struct FlightEnd {
  Vec3<T> h;
  Vec3<T> v;
  T alpha_dot;
  T beta_dot;
};

template <typename T>
FlightEnd<T> propagate_flight(const Vec3<T>& h, const Vec3<T>& v_plus,
                              T alpha_dot_plus, T beta_dot_plus,
                              const FlightConstants<T>& fc,
                              const StickParams<T>& p) {
  FlightEnd<T> end;
  ballistic(h, v_plus, fc.delta, p.g, end.h, end.v);
  end.alpha_dot = alpha_dot_plus;
  end.beta_dot = -beta_dot_plus;
  return end;
}

/// One dense sample along a flight.
template <typename T>
struct FlightSample {
  T t;
  Vec3<T> h;
  Vec3<T> v;
  T alpha;
  T beta;
  T alpha_dot;
  T beta_dot;
};

using FlightSampled = FlightSample<double>;

namespace detail {

// Torque-free attitude dynamics reduced to (alpha, beta, beta_dot):
//   alpha_dot = c / sin^2(beta),  beta_ddot = k1 * cot(beta) / sin^2(beta)
// with c = alpha_dot_plus * sin^2(beta*) (conserved Hz over J).
template <typename T>
void attitude_rk4_step(T c, T k1, T dt, T& alpha, T& beta, T& beta_dot) {
  auto deriv = [&](T b, T bd, T& da, T& db, T& dbd) {
    const T s = std::sin(b);
    da = c / (s * s);
    db = bd;
    dbd = k1 * std::cos(b) / (s * s * s);
  };
  T da1, db1, dbd1, da2, db2, dbd2, da3, db3, dbd3, da4, db4, dbd4;
  deriv(beta, beta_dot, da1, db1, dbd1);
  deriv(beta + T(0.5) * dt * db1, beta_dot + T(0.5) * dt * dbd1, da2, db2,
        dbd2);
  deriv(beta + T(0.5) * dt * db2, beta_dot + T(0.5) * dt * dbd2, da3, db3,
        dbd3);
  deriv(beta + dt * db3, beta_dot + dt * dbd3, da4, db4, dbd4);
  alpha += dt / T(6) * (da1 + T(2) * da2 + T(2) * da3 + da4);
  beta += dt / T(6) * (db1 + T(2) * db2 + T(2) * db3 + db4);
  beta_dot += dt / T(6) * (dbd1 + T(2) * dbd2 + T(2) * dbd3 + dbd4);
}

}  // namespace detail

/// Dense trajectory of one flight at n_samples uniform times in [0, delta].
/// The center-of-mass is closed-form; the attitude is integrated with RK4
/// at substeps fine enough that the endpoint matches the closed-form maps
/// well below 1e-8. Planar flights (k1 = 0) are rendered exactly.
template <typename T>
std::vector<FlightSample<T>> render_flight(const Vec3<T>& h,
                                           const Vec3<T>& v_plus, T alpha0,
                                           T alpha_dot_plus, T beta_dot_plus,
                                           T beta_star,
                                           const FlightConstants<T>& fc,
                                           const StickParams<T>& p,
                                           int n_samples) {
  if (n_samples < 2)
    throw std::invalid_argument("render_flight: need at least 2 samples");

  std::vector<FlightSample<T>> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  const T sb = std::sin(beta_star);
  const T c = alpha_dot_plus * sb * sb;
  const T dt_sample = fc.delta / T(n_samples - 1);
  // Substep the attitude integration at ~0.1 ms.
  const int substeps =
      std::max(1, static_cast<int>(std::ceil(dt_sample / T(1e-4))));
  const T dt = dt_sample / T(substeps);

  T alpha = alpha0, beta = beta_star, beta_dot = beta_dot_plus;
  for (int i = 0; i < n_samples; ++i) {
    const T t = (i == n_samples - 1) ? fc.delta : T(i) * dt_sample;
    FlightSample<T> s;
    s.t = t;
    ballistic(h, v_plus, t, p.g, s.h, s.v);
    if (fc.k1 == T(0)) {
      // Exact planar branch: |beta| falls then rises linearly; alpha jumps
      // by pi at the flip through beta = 0 but is constant elsewhere.
      const T b = beta_star + beta_dot_plus * t;
      s.beta = std::abs(b);
      s.beta_dot = (b >= T(0)) ? beta_dot_plus : -beta_dot_plus;
      s.alpha = (b >= T(0)) ? alpha0 : alpha0 + T(M_PI);
      s.alpha_dot = T(0);
    } else {
      s.alpha = alpha;
      s.beta = beta;
      s.alpha_dot = c / (std::sin(beta) * std::sin(beta));
      s.beta_dot = beta_dot;
      if (i + 1 < n_samples)
        for (int k = 0; k < substeps; ++k)
          detail::attitude_rk4_step(c, fc.k1, dt, alpha, beta, beta_dot);
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace juggle
