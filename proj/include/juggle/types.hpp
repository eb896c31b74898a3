#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace juggle {

template <typename T>
using Vec3 = Eigen::Matrix<T, 3, 1>;
template <typename T>
using Mat3 = Eigen::Matrix<T, 3, 3>;
template <typename T>
using Vec8 = Eigen::Matrix<T, 8, 1>;
template <typename T>
using Mat8 = Eigen::Matrix<T, 8, 8>;

using Vec3d = Vec3<double>;
using Mat3d = Mat3<double>;

/// Frame in which section states and velocities are expressed.
enum class Frame { inertial, juggler };

// Error hierarchy: every contract violation that depends on runtime data
// throws one of these; plain std::invalid_argument is reserved for
// malformed parameters (non-positive mass and the like).
struct OffsetOutOfRange : std::domain_error {
  using std::domain_error::domain_error;
};
struct DegenerateSection : std::domain_error {
  using std::domain_error::domain_error;
};
struct NonDescendingPostImpulse : std::domain_error {
  using std::domain_error::domain_error;
};
struct InfeasibleFlightTime : std::domain_error {
  using std::domain_error::domain_error;
};
struct FixedPointDrift : std::domain_error {
  using std::domain_error::domain_error;
};
struct RiccatiDivergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotStabilizable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoSectionCrossing : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Physical constants of the stick and gravity.
template <typename T>
struct StickParams {
  T m;    ///< mass, kg
  T ell;  ///< length, m
  T J;    ///< transverse moment of inertia about the center-of-mass, kg m^2
  T g;    ///< gravitational acceleration, m/s^2

  /// Uniform slender stick: J = m ell^2 / 12.
  static StickParams uniform(T m, T ell, T g = T(9.81)) {
    return StickParams{m, ell, m * ell * ell / T(12), g};
  }

  /// The reference stick used throughout: m = 0.1 kg, ell = 0.5 m.
  static StickParams reference() { return uniform(T(0.1), T(0.5)); }

  void validate() const {
    if (!(m > T(0)) || !(ell > T(0)) || !(g > T(0)))
      throw std::invalid_argument("StickParams: m, ell, g must be positive");
    if (!(J > T(0)) || !(J <= m * ell * ell / T(4)))
      throw std::invalid_argument("StickParams: J must satisfy 0 < J <= m*ell^2/4");
  }
};

using StickParamsd = StickParams<double>;

/// Control input triplet: impulse magnitude, application offset along the
/// stick axis, and in-plane direction angle.
template <typename T>
struct ControlInput {
  T impulse;  ///< I, N s (must be >= 0)
  T offset;   ///< r, m (must lie on the stick: [0, ell/2])
  T phi;      ///< direction in the x2-y2 plane, rad

  Eigen::Matrix<T, 3, 1> to_vector() const {
    return Eigen::Matrix<T, 3, 1>(impulse, offset, phi);
  }
  static ControlInput from_vector(const Eigen::Matrix<T, 3, 1>& u) {
    return ControlInput{u[0], u[1], u[2]};
  }
};

using ControlInputd = ControlInput<double>;

/// Design targets defining the desired juggling orbit. Either delta_star or
/// the multiplier p (delta_star = p * delta_min) must be given; if both are
/// present they must agree.
template <typename T>
struct JuggleSpec {
  T beta_star;                  ///< section angle, (0, pi/2)
  T delta_alpha_star;           ///< precession per flight, (0, pi]
  std::optional<T> delta_star;  ///< time of flight, s
  std::optional<T> p;           ///< flight-time multiplier, >= 1

  void validate() const {
    const T pi = T(M_PI);
    if (!(beta_star > T(0)) || !(beta_star < pi / T(2)))
      throw std::invalid_argument("JuggleSpec: beta_star must lie in (0, pi/2)");
    if (!(delta_alpha_star > T(0)) || !(delta_alpha_star <= pi))
      throw std::invalid_argument("JuggleSpec: delta_alpha_star must lie in (0, pi]");
    if (!delta_star && !p)
      throw std::invalid_argument("JuggleSpec: need delta_star or p");
    if (delta_star && !(*delta_star > T(0)))
      throw std::invalid_argument("JuggleSpec: delta_star must be positive");
    if (p && !(*p >= T(1)))
      throw std::invalid_argument("JuggleSpec: p must be >= 1");
  }
};

using JuggleSpecd = JuggleSpec<double>;

}  // namespace juggle
