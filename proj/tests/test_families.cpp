#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracle.hpp"
#include "qlflow/families.hpp"

using namespace qlflow;

namespace {

constexpr double kPi = std::numbers::pi;

// Time part of A, with the rotation M(theta(t)) stripped off.
Mat2xK unrotated(const Solution& sol, double angle, double t) {
  return rotation(-angle) * sol.time_matrix().sample(t).value;
}

}  // namespace

TEST_CASE("quadrature") {
  CHECK(quadrature(parse("1"), 0, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(quadrature(parse("sin(t)"), 0, kPi) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(quadrature(parse("exp(t)"), 0, 1) == doctest::Approx(std::exp(1.0) - 1).epsilon(1e-10));
  CHECK(quadrature(parse("t"), 1, 0) == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("k2: a(t) from the gauge equation") {
  // r = 1, theta = 1 - cos t, e = 1, c = 0: a' = 2 sin t, a(0) = -2 gives a = -2 cos t.
  const Solution sol = make_k2({parse("1"), parse("1 - cos(t)"), 1.0, 0.0, -2.0});
  oracle::Sampler s(31);
  for (int i = 0; i < 50; ++i) {
    const double t = s.uniform(0, 6);
    const Mat2xK a = unrotated(sol, 1 - std::cos(t), t);
    CHECK(a(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a(0, 1) == doctest::Approx(-2 * std::cos(t)).epsilon(1e-8));
    CHECK(std::fabs(a(1, 0)) < 1e-12);
    CHECK(a(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Q12 is constant on a nontrivial r.
  const Solution k2 = make_k2({parse("1 + sin(t)^2"), parse("t/2"), 0.7, -1.3, 0.4});
  for (int i = 0; i < 50; ++i) {
    const double t = s.uniform(0, 6);
    CHECK(time_minors_Q(k2.time_matrix(), t).at(1, 2) == doctest::Approx(-1.3).epsilon(1e-8));
    CHECK(time_minors_p(k2.time_matrix(), t).at(1, 2) == doctest::Approx(0.7).epsilon(1e-12));
  }
}

TEST_CASE("k2 and k3 reject bad parameters") {
  CHECK_THROWS_AS(make_k2({parse("1"), parse("t"), 0.0, 1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_k2({parse("cos(t)"), parse("t"), 1.0, 1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_k3({parse("1"), parse("t"), parse("z1"), 0.0, 0.0}), std::invalid_argument);
  CHECK_NOTHROW(make_k2({parse("cos(t)"), parse("t"), 1.0, 1.0, 0.0}, TimeRange{0.0, 1.0}));
}

TEST_CASE("k3: linear f gives constant vorticity") {
  const Solution sol = make_k3({parse("1"), parse("t"), parse("3*z2"), 0.0, 0.0});
  oracle::Sampler s(32);
  for (int i = 0; i < 20; ++i) {
    const Vec2 z{s.uniform(-1, 1), s.uniform(-1, 1)};
    const double t = s.uniform(0, 3);
    CHECK(vorticity(sol, z, t) == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(sol.predicted_vorticity(z) == doctest::Approx(3.0));
  }
}

TEST_CASE("elliptic: zero map is the identity") {
  const Solution sol = make_elliptic({make_anticr(parse("0"), parse("0")), 2.0});
  for (double t : {0.0, 0.5, 3.0}) {
    const Vec2 x = phi(sol, {0.3, -0.4}, t);
    CHECK(x.x == 0.3);
    CHECK(x.y == -0.4);
    CHECK(vorticity(sol, {0.3, -0.4}, t) == 0.0);
  }
}

TEST_CASE("elliptic: the Cauchy-Riemann map is rejected") {
  CHECK_THROWS_AS(make_anticr(parse("z1^2 - z2^2"), parse("2*z1*z2")), AntiCRViolation);
  try {
    make_elliptic({AntiCRMap{parse("z1^2 - z2^2"), parse("2*z1*z2")}, 1.0});
    FAIL("accepted");
  } catch (const AntiCRViolation& e) {
    CHECK(e.residual() > 1e-3);
  }
  CHECK_NOTHROW(make_anticr(parse("z1^2 - z2^2"), parse("-2*z1*z2")));
}

TEST_CASE("gerstner: closed forms and limits") {
  const Solution g = make_gerstner(1.0, 1.0);
  CHECK(phi_jacobian(g, {0.4, -1.0}, 0.7).det() == doctest::Approx(0.8646647167633873).epsilon(1e-12));
  // Deep water: vorticity vanishes; near the surface it diverges.
  CHECK(std::fabs(vorticity(g, {0.0, -20.0}, 1.0)) < 1e-15);
  CHECK(std::fabs(vorticity(g, {0.0, -1e-4}, 1.0)) > 1e3);
  oracle::Sampler s(33);
  for (int i = 0; i < 50; ++i) {
    const Vec2 z{s.uniform(-3, 3), s.uniform(-2, -0.1)};
    const double e2 = std::exp(2 * z.y);
    CHECK(vorticity(g, z, s.uniform(0, 6)) == doctest::Approx(-2 * e2 / (1 - e2)).epsilon(1e-10));
  }
}

TEST_CASE("gerstner equals the elliptic family on the same map") {
  const Solution g = make_gerstner(1.3, 0.8);
  const Solution e = make_elliptic({gerstner_map(1.3), 0.8});
  oracle::Sampler s(34);
  for (int i = 0; i < 50; ++i) {
    const Vec2 z{s.uniform(-2, 2), s.uniform(-2, -0.1)};
    const double t = s.uniform(-3, 3);
    CHECK(phi(g, z, t) == phi(e, z, t));
    CHECK(phi_jacobian(g, z, t).det() == phi_jacobian(e, z, t).det());
  }
}

TEST_CASE("anti-CR maps have harmonic components") {
  const AntiCRMap f = gerstner_map(1.0);
  const Expr lap = f.f1.derivative(Var::Z1).derivative(Var::Z1) + f.f1.derivative(Var::Z2).derivative(Var::Z2);
  oracle::Sampler s(35);
  for (int i = 0; i < 200; ++i) {
    const Env env{0, s.uniform(-3, 3), s.uniform(-2, 1)};
    CHECK(std::fabs(lap.evaluate(env)) < 1e-12);
  }
}

TEST_CASE("hyperbolic degenerate parameters") {
  const Solution zero = make_hyperbolic({1.0, parse("0"), parse("0")});
  CHECK(vorticity(zero, {0.2, 0.3}, 1.0) == 0.0);
  const Solution still = make_hyperbolic({0.0, parse("sin(z1)/5"), parse("sin(z2)/4")});
  CHECK(phi(still, {0.2, 0.3}, 0.0) == phi(still, {0.2, 0.3}, 2.5));
  CHECK(vorticity(still, {0.2, 0.3}, 1.0) == 0.0);
  CHECK_THROWS_AS(make_hyperbolic({1.0, parse("z2"), parse("0")}), std::invalid_argument);
}

TEST_CASE("hyperbolic vorticity matches the corrected closed form") {
  const double c = 0.7;
  const Solution h = make_hyperbolic({c, parse("sin(z1)/5"), parse("sin(z2)/4")});
  oracle::Sampler s(36);
  for (int i = 0; i < 50; ++i) {
    const Vec2 z{s.uniform(-2, 2), s.uniform(-2, 2)};
    const double a = std::cos(z.x) / 5, b = std::cos(z.y) / 4;
    CHECK(vorticity(h, z, s.uniform(-1, 1)) == doctest::Approx(2 * c * (a + b) / (1 - a * b)).epsilon(1e-9));
  }
}

TEST_CASE("parabolic vorticity") {
  // f1 constant: zeta = -1 / f2'.
  const Solution p0 = make_parabolic({parse("2"), parse("3*z1 + z1^2")});
  CHECK(vorticity(p0, {0.5, 0.1}, 0.3) == doctest::Approx(-1.0 / 4.0).epsilon(1e-12));
  // f1 = z1, f2 = -z1 gives a constant 2.
  const Solution p1 = make_parabolic({parse("z1"), parse("-z1")});
  CHECK(vorticity(p1, {0.5, 0.1}, 0.3) == doctest::Approx(2.0).epsilon(1e-12));
  const Solution p = make_parabolic({parse("cos(z1)"), parse("z1^2 - 20*z1")});
  oracle::Sampler s(37);
  for (int i = 0; i < 50; ++i) {
    const Vec2 z{s.uniform(2, 8), s.uniform(-1, 1)};
    const double f1p = -std::sin(z.x), f1pp = -std::cos(z.x), f2p = 2 * z.x - 20;
    CHECK(vorticity(p, z, s.uniform(-5, 5)) ==
          doctest::Approx(-(1 + f1p * f1p) / (z.y * f1pp + f2p)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(make_parabolic({parse("z2"), parse("z1")}), std::invalid_argument);
}

TEST_CASE("rotation shifts vorticity by twice the rate") {
  const Solution h = make_hyperbolic({1.0, parse("sin(z1)/5"), parse("sin(z2)/4")});
  const Vec2 z{0.2, -0.3};
  CHECK(phi(with_rotation(h, 0.0), z, 1.2) == phi(h, z, 1.2));
  const double base = vorticity(h, z, 1.2);
  CHECK(vorticity(with_rotation(h, 0.5), z, 1.2) == doctest::Approx(base + 1.0).epsilon(1e-10));
  const Solution twice = with_rotation(with_rotation(h, 0.2), 0.3);
  CHECK(twice.theta0() == doctest::Approx(0.5));
  CHECK(norm_inf(phi(twice, z, 1.2) - phi(with_rotation(h, 0.5), z, 1.2)) < 1e-14);
  CHECK(with_rotation(h, 0.5).predicted_vorticity(z) == doctest::Approx(h.predicted_vorticity(z) + 1.0));
}
