#pragma once

#include "juggle/flight.hpp"
#include "juggle/impulse.hpp"
#include "juggle/rotations.hpp"
#include "juggle/types.hpp"

#include <utility>

namespace juggle {

/// Point on the section S in the inertial frame (beta = beta* implicit).
template <typename T>
struct SectionStateInertial {
  Vec3<T> h;
  Vec3<T> v;
  T alpha;
  T alpha_dot;
  T beta_dot;
};

using SectionStateInertiald = SectionStateInertial<double>;

/// Point on the section in the juggler frame; the cyclic coordinates
/// {hx, hy, vx, vy, alpha} of the inertial description collapse into the
/// rotated h, v.
template <typename T>
struct SectionStateJuggler {
  Vec3<T> h;
  Vec3<T> v;
  T alpha_dot;
  T beta_dot;

  Vec8<T> to_vector() const {
    Vec8<T> y;
    y << h, v, alpha_dot, beta_dot;
    return y;
  }
  static SectionStateJuggler from_vector(const Vec8<T>& y) {
    return SectionStateJuggler{y.template segment<3>(0),
                               y.template segment<3>(3), y[6], y[7]};
  }
};

using SectionStateJugglerd = SectionStateJuggler<double>;

/// Log row for one application of the return map.
template <typename State, typename T>
struct StepRecord {
  State pre;
  ControlInput<T> input;
  SectionVelocities<T> post_impulse;
  FlightConstants<T> flight;
  T delta_alpha;
  State next;
};

template <typename T>
using StepRecordInertial = StepRecord<SectionStateInertial<T>, T>;
template <typename T>
using StepRecordJuggler = StepRecord<SectionStateJuggler<T>, T>;

/// The Poincare section beta = beta* and its one-step return maps in both
/// frames. Immutable after construction so the section angle cannot drift
/// between the formulas that share it.
template <typename T>
class PoincareSection {
 public:
  PoincareSection(T beta_star, const StickParams<T>& params)
      : beta_star_(beta_star), params_(params) {
    params_.validate();
    if (!(std::sin(beta_star) > T(kDegenerateSectionTol)))
      throw DegenerateSection("PoincareSection: sin(beta*) too small");
  }

  T beta_star() const { return beta_star_; }
  const StickParams<T>& params() const { return params_; }

  /// Return map in the inertial frame.
  StepRecordInertial<T> map_inertial(const SectionStateInertial<T>& y,
                                     const ControlInput<T>& u) const {
    StepRecordInertial<T> rec;
    rec.pre = y;
    rec.input = u;
    const SectionVelocities<T> pre{y.v, y.alpha_dot, y.beta_dot};
    rec.post_impulse =
        apply_impulse(pre, u, y.alpha, beta_star_, params_, Frame::inertial);
    rec.flight = flight_constants(rec.post_impulse.alpha_dot,
                                  rec.post_impulse.beta_dot, beta_star_);
    rec.delta_alpha = precession_increment(
        rec.post_impulse.alpha_dot, rec.post_impulse.beta_dot, beta_star_);
    const FlightEnd<T> end =
        propagate_flight(y.h, rec.post_impulse.v, rec.post_impulse.alpha_dot,
                         rec.post_impulse.beta_dot, rec.flight, params_);
    rec.next = SectionStateInertial<T>{end.h, end.v, y.alpha + rec.delta_alpha,
                                       end.alpha_dot, end.beta_dot};
    return rec;
  }

  /// Return map in the juggler frame: impulse and flight in the frame of
  /// the current crossing, then the position/velocity blocks rotated back
  /// by the precession increment.
  StepRecordJuggler<T> map_juggler(const SectionStateJuggler<T>& y,
                                   const ControlInput<T>& u) const {
    StepRecordJuggler<T> rec;
    rec.pre = y;
    rec.input = u;
    const SectionVelocities<T> pre{y.v, y.alpha_dot, y.beta_dot};
    rec.post_impulse =
        apply_impulse(pre, u, T(0), beta_star_, params_, Frame::juggler);
    rec.flight = flight_constants(rec.post_impulse.alpha_dot,
                                  rec.post_impulse.beta_dot, beta_star_);
    rec.delta_alpha = precession_increment(
        rec.post_impulse.alpha_dot, rec.post_impulse.beta_dot, beta_star_);
    const FlightEnd<T> end =
        propagate_flight(y.h, rec.post_impulse.v, rec.post_impulse.alpha_dot,
                         rec.post_impulse.beta_dot, rec.flight, params_);
    const Mat3<T> rt = rot_z(-rec.delta_alpha);
    rec.next = SectionStateJuggler<T>{Vec3<T>(rt * end.h), Vec3<T>(rt * end.v),
                                      end.alpha_dot, end.beta_dot};
    return rec;
  }

 private:
  T beta_star_;
  StickParams<T> params_;
};

using PoincareSectiond = PoincareSection<double>;

/// Inertial -> juggler frame change at crossing angle alpha_k.
template <typename T>
SectionStateJuggler<T> to_juggler(const SectionStateInertial<T>& y) {
  const Mat3<T> rt = rot_z(-y.alpha);
  return SectionStateJuggler<T>{Vec3<T>(rt * y.h), Vec3<T>(rt * y.v),
                                y.alpha_dot, y.beta_dot};
}

/// Juggler -> inertial frame change; alpha_k restores the lost coordinate.
template <typename T>
SectionStateInertial<T> to_inertial(const SectionStateJuggler<T>& y,
                                    T alpha_k) {
  const Mat3<T> r = rot_z(alpha_k);
  return SectionStateInertial<T>{Vec3<T>(r * y.h), Vec3<T>(r * y.v), alpha_k,
                                 y.alpha_dot, y.beta_dot};
}

}  // namespace juggle
