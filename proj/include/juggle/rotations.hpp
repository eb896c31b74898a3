#pragma once

#include "juggle/types.hpp"

#include <cmath>

namespace juggle {

/// Elementary rotation about the y axis.
template <typename T>
Mat3<T> rot_y(T theta) {
  const T c = std::cos(theta), s = std::sin(theta);
  Mat3<T> r;
  r << c, T(0), s,
      T(0), T(1), T(0),
      -s, T(0), c;
  return r;
}

/// Elementary rotation about the z axis.
template <typename T>
Mat3<T> rot_z(T theta) {
  const T c = std::cos(theta), s = std::sin(theta);
  Mat3<T> r;
  r << c, -s, T(0),
      s, c, T(0),
      T(0), T(0), T(1);
  return r;
}

/// zyz Euler-angle rotation Rz(alpha) Ry(beta) Rz(gamma). The stick is
/// axisymmetric, so all callers use gamma = 0.
template <typename T>
Mat3<T> euler_to_rotation(T alpha, T beta, T gamma = T(0)) {
  return Mat3<T>(rot_z(alpha) * rot_y(beta) * rot_z(gamma));
}

/// Euler-rate matrix S mapping (alpha_dot, beta_dot, gamma_dot) to the
/// angular velocity in the inertial frame. Singular at sin(beta) = 0.
template <typename T>
Mat3<T> euler_rate_matrix(T alpha, T beta) {
  const T ca = std::cos(alpha), sa = std::sin(alpha);
  const T cb = std::cos(beta), sb = std::sin(beta);
  Mat3<T> s;
  s << T(0), -sa, ca * sb,
      T(0), ca, sa * sb,
      T(1), T(0), cb;
  return s;
}

/// Body inertia of the slender stick: diag(J, J, 0).
template <typename T>
Mat3<T> body_inertia(T J) {
  return Vec3<T>(J, J, T(0)).asDiagonal();
}

/// Inertia matrix in the inertial frame, R Jb R^T. Independent of gamma.
template <typename T>
Mat3<T> inertia_inertial(T alpha, T beta, T J) {
  const Mat3<T> r = euler_to_rotation(alpha, beta);
  return Mat3<T>(r * body_inertia(J) * r.transpose());
}

/// Closed form of the product (inertia in inertial frame) * (Euler-rate
/// matrix). Rank 2 for beta in (0, pi): the third column is zero, so the
/// angular momentum never depends on gamma_dot.
template <typename T>
Mat3<T> momentum_matrix(T alpha, T beta, T J) {
  const T ca = std::cos(alpha), sa = std::sin(alpha);
  const T cb = std::cos(beta), sb = std::sin(beta);
  Mat3<T> js;
  js << -ca * sb * cb, -sa, T(0),
      -sa * sb * cb, ca, T(0),
      sb * sb, T(0), T(0);
  return Mat3<T>(J * js);
}

/// Angular momentum of the stick about its center-of-mass, inertial frame.
template <typename T>
Vec3<T> angular_momentum(T alpha, T beta, T alpha_dot, T beta_dot, T J) {
  return Vec3<T>(momentum_matrix(alpha, beta, J) *
                 Vec3<T>(alpha_dot, beta_dot, T(0)));
}

/// Rotational kinetic energy of the axisymmetric stick.
template <typename T>
T rotational_energy(T beta, T alpha_dot, T beta_dot, T J) {
  const T sb = std::sin(beta);
  return T(0.5) * J * (alpha_dot * alpha_dot * sb * sb + beta_dot * beta_dot);
}

}  // namespace juggle
