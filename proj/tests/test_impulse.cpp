#include "juggle/impulse.hpp"

#include "juggle/rotations.hpp"
#include "juggle/steady_state.hpp"

#include "doctest.h"

#include <random>

using namespace juggle;

TEST_CASE("impulse direction") {
  const double beta = M_PI / 3;
  const Vec3d f = impulse_direction_inertial(0.0, beta, 0.0);
  CHECK(f.isApprox(Vec3d(-std::cos(beta), 0.0, std::sin(beta)), 1e-12));

  // equals Rz(alpha) Ry(beta*) (-cos phi, -sin phi, 0)
  const double alpha = 2 * M_PI / 3, phi = 0.1;
  const Vec3d via_matrices =
      rot_z(alpha) * rot_y(beta) *
      Vec3d(-std::cos(phi), -std::sin(phi), 0.0);
  CHECK(impulse_direction_inertial(alpha, beta, phi).isApprox(via_matrices,
                                                              1e-12));

  // always a unit vector, always normal to the stick axis
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = std::abs(u(rng)) + 0.1, p = u(rng);
    const Vec3d fk = impulse_direction_inertial(a, b, p);
    CHECK(fk.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const Vec3d axis = application_point_inertial(a, b, 0.01, 0.5) / 0.01;
    CHECK(std::abs(fk.dot(axis)) < 1e-12);
  }
}

TEST_CASE("application point") {
  CHECK(application_point_inertial(0.3, 0.9, 0.0, 0.5).norm() == 0.0);

  const double beta = M_PI / 3;
  CHECK(application_point_inertial(0.0, beta, 0.01, 0.5)
            .isApprox(Vec3d(0.01 * std::sin(beta), 0.0, 0.01 * std::cos(beta)),
                      1e-12));
  CHECK(application_point_inertial(1.1, 0.7, 0.13, 0.5).norm() ==
        doctest::Approx(0.13).epsilon(1e-12));

  CHECK_THROWS_AS(application_point_inertial(0.0, beta, -0.01, 0.5),
                  OffsetOutOfRange);
  CHECK_THROWS_AS(application_point_inertial(0.0, beta, 0.26, 0.5),
                  OffsetOutOfRange);
}

TEST_CASE("apply_impulse basics") {
  const auto p = StickParamsd::reference();
  const SectionVelocitiesd pre{Vec3d(0.4, -0.3, 1.0), 1.2, 0.7};
  const double beta = M_PI / 3;

  SUBCASE("zero impulse is the identity") {
    const auto post = apply_impulse(pre, ControlInputd{0.0, 0.01, 0.3}, 0.7,
                                    beta, p, Frame::inertial);
    CHECK(post.v == pre.v);
    CHECK(post.alpha_dot == pre.alpha_dot);
    CHECK(post.beta_dot == pre.beta_dot);
  }

  SUBCASE("phi = 0 leaves alpha_dot untouched") {
    const auto post = apply_impulse(pre, ControlInputd{0.5, 0.02, 0.0}, 0.7,
                                    beta, p, Frame::inertial);
    CHECK(post.alpha_dot == pre.alpha_dot);
    CHECK(post.beta_dot != pre.beta_dot);
  }

  SUBCASE("degenerate section is rejected") {
    CHECK_THROWS_AS(apply_impulse(pre, ControlInputd{0.5, 0.02, 0.0}, 0.7,
                                  1e-10, p, Frame::inertial),
                    DegenerateSection);
  }

  SUBCASE("input range violations are errors") {
    CHECK_THROWS_AS(apply_impulse(pre, ControlInputd{-0.1, 0.02, 0.0}, 0.7,
                                  beta, p, Frame::inertial),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_impulse(pre, ControlInputd{0.1, 0.5, 0.0}, 0.7,
                                  beta, p, Frame::inertial),
                    OffsetOutOfRange);
  }
}

TEST_CASE("fixed-point impulse flips beta_dot") {
  const auto p = StickParamsd::reference();
  const JuggleSpecd spec{M_PI / 3, 2 * M_PI / 3, 0.6, std::nullopt};
  const auto fp = solve_fixed_point(spec, p);
  const SectionVelocitiesd pre{fp.y_star.v, fp.y_star.alpha_dot,
                               fp.y_star.beta_dot};
  const auto post =
      apply_impulse(pre, fp.u_star, 0.0, fp.beta_star, p, Frame::juggler);
  CHECK(post.beta_dot == doctest::Approx(-fp.y_star.beta_dot).epsilon(1e-10));
  CHECK(post.alpha_dot == doctest::Approx(fp.y_star.alpha_dot).epsilon(1e-12));
}

TEST_CASE("momentum bookkeeping invariants") {
  const auto p = StickParamsd::reference();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> beta_dist(0.3, 1.4);
  std::uniform_real_distribution<double> imp(0.0, 1.5);
  std::uniform_real_distribution<double> off(0.0, 0.25);

  for (int i = 0; i < 200; ++i) {
    const double alpha_k = u(rng) * 2, beta = beta_dist(rng);
    const SectionVelocitiesd pre{Vec3d(u(rng), u(rng), u(rng)), u(rng),
                                 u(rng)};
    const ControlInputd in{imp(rng), off(rng), u(rng)};
    const auto post = apply_impulse(pre, in, alpha_k, beta, p, Frame::inertial);

    // linear momentum: m dv = I f
    const Vec3d f = impulse_direction_inertial(alpha_k, beta, in.phi);
    CHECK((p.m * (post.v - pre.v) - in.impulse * f).cwiseAbs().maxCoeff() <
          1e-12);

    // angular momentum: H+ = H- + r x (I f)
    const Vec3d h_pre =
        angular_momentum(alpha_k, beta, pre.alpha_dot, pre.beta_dot, p.J);
    const Vec3d h_post =
        angular_momentum(alpha_k, beta, post.alpha_dot, post.beta_dot, p.J);
    const Vec3d torque =
        application_point_inertial(alpha_k, beta, in.offset, p.ell)
            .cross(in.impulse * f);
    CHECK((h_post - h_pre - torque).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("frame equivariance of the impulse map") {
  const auto p = StickParamsd::reference();
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const double alpha_k = 3 * u(rng), beta = 0.9;
    const SectionVelocitiesd pre{Vec3d(u(rng), u(rng), u(rng)), u(rng),
                                 u(rng)};
    const ControlInputd in{std::abs(u(rng)), 0.1, u(rng)};

    const auto inertial =
        apply_impulse(pre, in, alpha_k, beta, p, Frame::inertial);
    const SectionVelocitiesd pre_rot{rot_z(-alpha_k) * pre.v, pre.alpha_dot,
                                     pre.beta_dot};
    const auto juggler =
        apply_impulse(pre_rot, in, alpha_k, beta, p, Frame::juggler);

    CHECK((Vec3d(rot_z(-alpha_k) * inertial.v) - juggler.v)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK(inertial.alpha_dot == doctest::Approx(juggler.alpha_dot));
    CHECK(inertial.beta_dot == doctest::Approx(juggler.beta_dot));
  }
}

TEST_CASE("impulsive forces do no work at the fixed point") {
  const auto p = StickParamsd::reference();
  for (double da : {M_PI / 4, 2 * M_PI / 3, M_PI}) {
    const JuggleSpecd spec{M_PI / 3, da, std::nullopt, 1.5};
    const auto fp = solve_fixed_point(spec, p);
    const SectionVelocitiesd pre{fp.y_star.v, fp.y_star.alpha_dot,
                                 fp.y_star.beta_dot};
    const auto post =
        apply_impulse(pre, fp.u_star, 0.0, fp.beta_star, p, Frame::juggler);
    const double e_pre = kinetic_energy(pre, fp.beta_star, p);
    const double e_post = kinetic_energy(post, fp.beta_star, p);
    CHECK(e_post == doctest::Approx(e_pre).epsilon(1e-9));
  }
}
