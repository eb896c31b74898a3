#pragma once

#include "juggle/rotations.hpp"
#include "juggle/types.hpp"

#include <cmath>
#include <limits>

namespace juggle {

/// Velocities carried across a section crossing. The frame tag is implicit:
/// the center-of-mass velocity is in whatever frame the caller works in,
/// the Euler rates are frame-independent.
template <typename T>
struct SectionVelocities {
  Vec3<T> v;
  T alpha_dot;
  T beta_dot;
};

using SectionVelocitiesd = SectionVelocities<double>;

inline constexpr double kDegenerateSectionTol = 1e-9;

/// Unit direction of the impulsive force in the inertial frame,
/// Rz(alpha_k) Ry(beta*) (-cos phi, -sin phi, 0)^T.
template <typename T>
Vec3<T> impulse_direction_inertial(T alpha_k, T beta_star, T phi) {
  const T ca = std::cos(alpha_k), sa = std::sin(alpha_k);
  const T cb = std::cos(beta_star), sb = std::sin(beta_star);
  const T cp = std::cos(phi), sp = std::sin(phi);
  return Vec3<T>(sa * sp - ca * cb * cp,
                 -ca * sp - sa * cb * cp,
                 sb * cp);
}

/// Same direction expressed in the juggler frame; independent of alpha_k.
template <typename T>
Vec3<T> impulse_direction_juggler(T beta_star, T phi) {
  const T cb = std::cos(beta_star), sb = std::sin(beta_star);
  return Vec3<T>(-cb * std::cos(phi), -std::sin(phi), sb * std::cos(phi));
}

/// Vector from the center-of-mass to the point of application of the
/// impulsive force, inertial frame. The point must lie on the stick.
namespace detail {

// The stick end r = ell/2 is a legal application point; admit it even when
// a closed-form r* lands an ulp past it.
template <typename T>
bool offset_in_range(T r, T ell) {
  const T half = ell / T(2);
  return r >= T(0) && r <= half * (T(1) + T(8) * std::numeric_limits<T>::epsilon());
}

}  // namespace detail

template <typename T>
Vec3<T> application_point_inertial(T alpha_k, T beta_star, T r, T ell) {
  if (!detail::offset_in_range(r, ell))
    throw OffsetOutOfRange("application point offset outside [0, ell/2]");
  const T sb = std::sin(beta_star);
  return Vec3<T>(r * std::cos(alpha_k) * sb, r * std::sin(alpha_k) * sb,
                 r * std::cos(beta_star));
}

/// Impulse-momentum jump at a section crossing. Positions are untouched by
/// contract; only velocities and Euler rates change. Saturation of the
/// inputs is the controller's job; out-of-range inputs are errors here.
template <typename T>
SectionVelocities<T> apply_impulse(const SectionVelocities<T>& pre,
                                   const ControlInput<T>& u, T alpha_k,
                                   T beta_star, const StickParams<T>& p,
                                   Frame frame) {
  const T sb = std::sin(beta_star);
  if (!(sb > T(kDegenerateSectionTol)))
    throw DegenerateSection("sin(beta*) too small for the impulse map");
  if (!(u.impulse >= T(0)))
    throw std::invalid_argument("apply_impulse: impulse magnitude must be >= 0");
  if (!detail::offset_in_range(u.offset, p.ell))
    throw OffsetOutOfRange("apply_impulse: offset outside [0, ell/2]");

  const Vec3<T> f = (frame == Frame::inertial)
                        ? impulse_direction_inertial(alpha_k, beta_star, u.phi)
                        : impulse_direction_juggler(beta_star, u.phi);

  SectionVelocities<T> post;
  post.v = pre.v + (u.impulse / p.m) * f;
  post.alpha_dot =
      pre.alpha_dot - u.impulse * u.offset * std::sin(u.phi) / (p.J * sb);
  post.beta_dot = pre.beta_dot - u.impulse * u.offset * std::cos(u.phi) / p.J;
  return post;
}

/// Kinetic energy of the stick on the section (beta = beta*).
template <typename T>
T kinetic_energy(const SectionVelocities<T>& vel, T beta_star,
                 const StickParams<T>& p) {
  return T(0.5) * p.m * vel.v.squaredNorm() +
         rotational_energy(beta_star, vel.alpha_dot, vel.beta_dot, p.J);
}

}  // namespace juggle
