#pragma once

#include "juggle/poincare.hpp"
#include "juggle/steady_state.hpp"
#include "juggle/types.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace juggle {

/// Linearization of the juggler-frame return map about a fixed point.
/// State order: (hx, hy, hz, vx, vy, vz, alpha_dot, beta_dot); input order
/// (impulse, offset, phi).
template <typename T>
struct LinearizedMap {
  Mat8<T> A;
  Eigen::Matrix<T, 8, 3> B;
  FixedPoint<T> fixed_point;
  T step_scale;
};

using LinearizedMapd = LinearizedMap<double>;

/// Stabilizing feedback gain in the convention u = K e.
template <typename T>
struct GainMatrix {
  Eigen::Matrix<T, 3, 8> K;
  T closed_loop_spectral_radius;
};

using GainMatrixd = GainMatrix<double>;

template <typename T>
T spectral_radius(const Eigen::Ref<const Eigen::Matrix<T, Eigen::Dynamic,
                                                       Eigen::Dynamic>>& m) {
  return m.eigenvalues().cwiseAbs().maxCoeff();
}

/// Central finite differences of the juggler-frame map at the fixed point.
/// The step for column j is step_scale * max(1, |x_j|).
template <typename T>
LinearizedMap<T> linearize(const PoincareSection<T>& section,
                           const FixedPoint<T>& fp,
                           T step_scale = T(1e-6)) {
  const Vec8<T> y0 = fp.y_star.to_vector();
  const Eigen::Matrix<T, 3, 1> u0 = fp.u_star.to_vector();

  const Vec8<T> residual =
      section.map_juggler(fp.y_star, fp.u_star).next.to_vector() - y0;
  if (residual.template lpNorm<Eigen::Infinity>() > T(1e-6))
    throw FixedPointDrift(
        "linearize: fixed-point residual too large for unbiased differences");

  auto eval = [&](const Vec8<T>& y, const Eigen::Matrix<T, 3, 1>& u) {
    return section
        .map_juggler(SectionStateJuggler<T>::from_vector(y),
                     ControlInput<T>::from_vector(u))
        .next.to_vector();
  };

  LinearizedMap<T> lm;
  lm.fixed_point = fp;
  lm.step_scale = step_scale;
  for (int j = 0; j < 8; ++j) {
    const T h = step_scale * std::max(T(1), std::abs(y0[j]));
    Vec8<T> yp = y0, ym = y0;
    yp[j] += h;
    ym[j] -= h;
    lm.A.col(j) = (eval(yp, u0) - eval(ym, u0)) / (T(2) * h);
  }
  for (int j = 0; j < 3; ++j) {
    const T h = step_scale * std::max(T(1), std::abs(u0[j]));
    Eigen::Matrix<T, 3, 1> up = u0, um = u0;
    up[j] += h;
    um[j] -= h;
    lm.B.col(j) = (eval(y0, up) - eval(y0, um)) / (T(2) * h);
  }
  return lm;
}

/// Rank of [B, AB, ..., A^7 B] via singular values.
template <typename T>
int controllability_rank(const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& A,
                         const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& B,
                         T rel_tol = T(1e-8)) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> ctrb(n, n * m);
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> block = B;
  for (int i = 0; i < n; ++i) {
    ctrb.middleCols(i * m, m) = block;
    block = A * block;
  }
  Eigen::JacobiSVD<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>> svd(ctrb);
  const auto& sv = svd.singularValues();
  const T thresh = rel_tol * sv.maxCoeff();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > thresh) ++rank;
  return rank;
}

template <typename T>
int controllability_rank(const LinearizedMap<T>& lm) {
  return controllability_rank<T>(lm.A, lm.B);
}

/// Solve the discrete algebraic Riccati equation by fixed-point iteration
/// of the Riccati difference equation from P0 = Q.
template <typename T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> solve_dare(
    const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& A,
    const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& B,
    const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& Q,
    const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& R,
    int max_iterations = 100000, T rel_tol = T(1e-12)) {
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  Mat P = Q;
  for (int i = 0; i < max_iterations; ++i) {
    const Mat BtP = B.transpose() * P;
    const Mat gain_term =
        (R + BtP * B).ldlt().solve(BtP * A);
    const Mat next =
        Q + A.transpose() * P * A - (A.transpose() * BtP.transpose()) * gain_term;
    const T diff = (next - P).template lpNorm<Eigen::Infinity>();
    const T scale = P.template lpNorm<Eigen::Infinity>();
    P = next;
    if (diff < rel_tol * scale) return P;
  }
  throw RiccatiDivergence("solve_dare: iteration cap reached");
}

/// LQR gain for the linearized return map, u = K e with K stabilizing.
template <typename T>
GainMatrix<T> lqr_gain(const LinearizedMap<T>& lm, const Mat8<T>& Q,
                       const Mat3<T>& R) {
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  const Mat A = lm.A, B = lm.B;
  const Mat P = solve_dare<T>(A, B, Mat(Q), Mat(R));
  const Mat K = -(Mat(R) + B.transpose() * P * B)
                     .ldlt()
                     .solve(B.transpose() * P * A);
  GainMatrix<T> g;
  g.K = K;
  g.closed_loop_spectral_radius = spectral_radius<T>(Mat(A + B * K));
  if (!(g.closed_loop_spectral_radius < T(1)))
    throw NotStabilizable("lqr_gain: closed loop not inside the unit circle");
  return g;
}

/// Result of the feedback law, with saturation reported rather than hidden.
template <typename T>
struct FeedbackResult {
  ControlInput<T> u;
  bool impulse_saturated = false;
  bool offset_saturated = false;
};

/// u = U* + K (y - Y*), clamped to the physical input ranges.
template <typename T>
FeedbackResult<T> feedback(const SectionStateJuggler<T>& y,
                           const FixedPoint<T>& fp, const GainMatrix<T>& gain,
                           const StickParams<T>& p) {
  const Vec8<T> e = y.to_vector() - fp.y_star.to_vector();
  Eigen::Matrix<T, 3, 1> u = fp.u_star.to_vector() + gain.K * e;
  FeedbackResult<T> out;
  if (u[0] < T(0)) {
    u[0] = T(0);
    out.impulse_saturated = true;
  }
  if (u[1] < T(0)) {
    u[1] = T(0);
    out.offset_saturated = true;
  } else if (u[1] > p.ell / T(2)) {
    u[1] = p.ell / T(2);
    out.offset_saturated = true;
  }
  out.u = ControlInput<T>::from_vector(u);
  return out;
}

}  // namespace juggle
