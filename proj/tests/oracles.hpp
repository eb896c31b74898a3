// Independent numerical oracles used by the test suites. Nothing here may
// call the closed-form flight or Riccati code paths it is used to check.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace oracle {

struct FlightResult {
  double delta;       // time of flight
  double delta_alpha; // precession over the flight
  double alpha_dot_end;
  double beta_dot_end;
  double beta_min;
};

namespace detail {

// d/dt (alpha, beta, beta_dot) for torque-free attitude motion with
// conserved Hz/J = c: alpha_dot = c / sin^2(beta),
// beta_ddot = c^2 cos(beta) / sin^3(beta).
inline void rhs(double c, double beta, double beta_dot, double& d_alpha,
                double& d_beta, double& d_beta_dot) {
  const double s = std::sin(beta);
  d_alpha = c / (s * s);
  d_beta = beta_dot;
  d_beta_dot = c * c * std::cos(beta) / (s * s * s);
}

inline void rk4(double c, double dt, double& alpha, double& beta,
                double& beta_dot) {
  double a1, b1, d1, a2, b2, d2, a3, b3, d3, a4, b4, d4;
  rhs(c, beta, beta_dot, a1, b1, d1);
  rhs(c, beta + 0.5 * dt * b1, beta_dot + 0.5 * dt * d1, a2, b2, d2);
  rhs(c, beta + 0.5 * dt * b2, beta_dot + 0.5 * dt * d2, a3, b3, d3);
  rhs(c, beta + dt * b3, beta_dot + dt * d3, a4, b4, d4);
  alpha += dt / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
  beta += dt / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4);
  beta_dot += dt / 6.0 * (d1 + 2 * d2 + 2 * d3 + d4);
}

inline FlightResult integrate_once(double alpha_dot_plus, double beta_dot_plus,
                                   double beta_star, double h) {
  const double sb = std::sin(beta_star);
  const double c = alpha_dot_plus * sb * sb;

  double alpha = 0.0, beta = beta_star, beta_dot = beta_dot_plus, t = 0.0;
  double beta_min = beta_star;

  if (c == 0.0) {
    // Planar: beta falls linearly to 0, reflects, rises back to beta_star.
    FlightResult r;
    r.delta = 2.0 * beta_star / std::abs(beta_dot_plus);
    r.delta_alpha = M_PI;
    r.alpha_dot_end = 0.0;
    r.beta_dot_end = -beta_dot_plus;
    r.beta_min = 0.0;
    return r;
  }

  const double horizon = 100.0;
  while (t < horizon) {
    const double a_prev = alpha, b_prev = beta, bd_prev = beta_dot;
    rk4(c, h, alpha, beta, beta_dot);
    t += h;
    beta_min = std::min(beta_min, beta);
    // ascending crossing only; beta == beta_star holds at t = 0 too
    if (b_prev < beta_star && beta >= beta_star && beta_dot > 0.0) {
      double lo = 0.0, hi = h;
      for (int i = 0; i < 100 && (hi - lo) > 1e-14; ++i) {
        const double mid = 0.5 * (lo + hi);
        double a = a_prev, b = b_prev, bd = bd_prev;
        rk4(c, mid, a, b, bd);
        (b < beta_star ? lo : hi) = mid;
      }
      double a = a_prev, b = b_prev, bd = bd_prev;
      rk4(c, hi, a, b, bd);
      FlightResult r;
      r.delta = (t - h) + hi;
      r.delta_alpha = a;
      r.alpha_dot_end = c / (std::sin(b) * std::sin(b));
      r.beta_dot_end = bd;
      r.beta_min = beta_min;
      return r;
    }
  }
  throw std::runtime_error("flight oracle: no section return within horizon");
}

}  // namespace detail

// RK4 integration of the flight, step-halved until two refinements agree on
// the flight time to 1e-9.
inline FlightResult integrate_flight(double alpha_dot_plus,
                                     double beta_dot_plus, double beta_star) {
  double h = 1e-3;
  FlightResult prev =
      detail::integrate_once(alpha_dot_plus, beta_dot_plus, beta_star, h);
  for (int i = 0; i < 12; ++i) {
    h *= 0.5;
    FlightResult next =
        detail::integrate_once(alpha_dot_plus, beta_dot_plus, beta_star, h);
    if (std::abs(next.delta - prev.delta) < 1e-9 &&
        std::abs(next.delta_alpha - prev.delta_alpha) < 1e-9)
      return next;
    prev = next;
  }
  return prev;
}

// Structure-preserving doubling algorithm for the DARE; independent of the
// fixed-point iteration in the library.
inline Eigen::MatrixXd dare_doubling(const Eigen::MatrixXd& A,
                                     const Eigen::MatrixXd& B,
                                     const Eigen::MatrixXd& Q,
                                     const Eigen::MatrixXd& R) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd Ak = A;
  Eigen::MatrixXd Gk = B * R.ldlt().solve(B.transpose());
  Eigen::MatrixXd Hk = Q;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < 200; ++i) {
    const Eigen::MatrixXd W = I + Gk * Hk;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(W);
    const Eigen::MatrixXd WiA = lu.solve(Ak);
    const Eigen::MatrixXd WiG = lu.solve(Gk);
    const Eigen::MatrixXd A1 = Ak * WiA;
    const Eigen::MatrixXd G1 = Gk + Ak * WiG * Ak.transpose();
    const Eigen::MatrixXd H1 = Hk + WiA.transpose() * Hk * Ak;
    const double diff = (H1 - Hk).lpNorm<Eigen::Infinity>();
    Ak = A1;
    Gk = G1;
    Hk = H1;
    if (diff < 1e-14 * std::max(1.0, Hk.lpNorm<Eigen::Infinity>())) break;
  }
  return Hk;
}

}  // namespace oracle
