#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracle.hpp"
#include "qlflow/families.hpp"
#include "qlflow/kernel.hpp"

using namespace qlflow;

namespace {

constexpr double kPi = std::numbers::pi;

Solution gerstner() { return make_gerstner(1.0, 1.0); }

Solution hyperbolic() {
  return make_hyperbolic({1.0, parse("sin(z1)/5"), parse("sin(z2)/4")});
}

Solution k3() {
  return make_k3({parse("1"), parse("sin(t)"), parse("z2^2/2 - z2^3/3 - z2^4/5"), 0.0, 0.0});
}

double polygon_area(const std::vector<Vec2>& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) a += cross(p[i], p[(i + 1) % p.size()]);
  return 0.5 * a;
}

}  // namespace

TEST_CASE("rotation and reflection") {
  oracle::Sampler s(21);
  for (int i = 0; i < 20; ++i) {
    const double th = s.uniform(-10, 10);
    CHECK(rotation(th).det() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(reflection(th).det() == doctest::Approx(-1.0).epsilon(1e-15));
    const Mat2 rr = rotation(th) * rotation(-th);
    CHECK(std::fabs(rr.a11 - 1) + std::fabs(rr.a12) + std::fabs(rr.a21) + std::fabs(rr.a22 - 1) < 1e-14);
  }
  const Vec2 e1 = rotation(kPi / 2) * Vec2{1, 0};
  CHECK(std::fabs(e1.x) < 1e-16);
  CHECK(e1.y == 1.0);
}

TEST_CASE("flow map: direct values") {
  const Vec2 g = phi(gerstner(), {0, 0}, 0);
  CHECK(std::fabs(g.x) < 1e-15);
  CHECK(g.y == doctest::Approx(-1.0).epsilon(1e-15));

  // At t = 0 the hyperbolic map is (z1 + f2(z2), z2 + f1(z1)).
  const Vec2 z{0.3, -0.7};
  const Vec2 h = phi(hyperbolic(), z, 0);
  CHECK(h.x == doctest::Approx(0.3 + std::sin(-0.7) / 4).epsilon(1e-15));
  CHECK(h.y == doctest::Approx(-0.7 + std::sin(0.3) / 5).epsilon(1e-15));
}

TEST_CASE("jacobian determinant against closed forms") {
  oracle::Sampler s(22);
  const Solution g = gerstner();
  const Solution k = k3();
  for (int i = 0; i < 50; ++i) {
    const Vec2 z{s.uniform(-1, 1), s.uniform(-2, -0.1)};
    const double t = s.uniform(0, 6);
    CHECK(phi_jacobian(k, z, t).det() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(phi_jacobian(g, z, t).det() == doctest::Approx(1.0 - std::exp(2 * z.y)).epsilon(1e-12));
  }
}

TEST_CASE("spatial minors of the constrained maps") {
  // Case 2 form: v = (z1, z2, z2 f1' + f2, f1) gives g14 = 0 and g13 = -g24 = f1'.
  const Solution p = make_parabolic({parse("cos(z1)"), parse("z1^2")});
  oracle::Sampler s(23);
  for (int i = 0; i < 20; ++i) {
    const Vec2 z{s.uniform(-1, 1), s.uniform(-1, 1)};
    const Minors g = spatial_minors(p.spatial_map(), z);
    CHECK(g.at(1, 2) == 1.0);
    CHECK(g.at(1, 4) == 0.0);
    CHECK(g.at(1, 3) == doctest::Approx(-std::sin(z.x)).epsilon(1e-14));
    CHECK(std::fabs(g.at(2, 4) + g.at(1, 3)) < 1e-14);
  }
  // Case 1 form: v = (z1, z2, f1(z1), f2(z2)) gives g13 = g24 = 0.
  const Minors g = spatial_minors(hyperbolic().spatial_map(), {0.2, 0.4});
  CHECK(g.at(1, 3) == 0.0);
  CHECK(g.at(2, 4) == 0.0);
  CHECK(g.at(3, 4) == doctest::Approx(std::cos(0.2) / 5 * std::cos(0.4) / 4).epsilon(1e-14));
}

TEST_CASE("time minors") {
  const Solution k2 = make_k2({parse("1 + t^2/4"), parse("t"), 1.5, 2.0, 0.0});
  const Solution h = hyperbolic();
  for (double t : {0.0, 0.4, 1.3, 2.0}) {
    CHECK(time_minors_p(k2.time_matrix(), t).at(1, 2) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(time_minors_Q(k2.time_matrix(), t).at(1, 2) == doctest::Approx(2.0).epsilon(1e-9));
    const Minors p = time_minors_p(h.time_matrix(), t);
    CHECK(p.at(1, 2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.at(3, 4) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(p.at(2, 3) == 0.0);
    CHECK(p.at(1, 4) == 0.0);
  }
}

TEST_CASE("pluecker relation") {
  oracle::Sampler s(24);
  for (int i = 0; i < 200; ++i) {
    Mat2xK a;
    a.k = 4;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 4; ++c) a(r, c) = s.uniform(-3, 3);
    CHECK(pluecker_residual(time_minors_p(a)) < 1e-12);
  }
  Mat2xK rank1;
  rank1.k = 4;
  for (int c = 0; c < 4; ++c) {
    rank1(0, c) = c + 1.0;
    rank1(1, c) = 2.0 * (c + 1.0);
  }
  CHECK(pluecker_residual(time_minors_p(rank1)) == 0.0);

  // Generic 6-tuples are not minors of any 2x4 matrix.
  int nonzero = 0;
  for (int i = 0; i < 100; ++i) {
    Minors m;
    m.k = 4;
    for (int a = 1; a <= 4; ++a)
      for (int b = a + 1; b <= 4; ++b) m.set(a, b, s.uniform(-1, 1));
    if (pluecker_residual(m) > 1e-6) ++nonzero;
  }
  CHECK(nonzero > 95);

  Minors k3m;
  k3m.k = 3;
  CHECK_THROWS_AS((void)pluecker_residual(k3m), std::invalid_argument);
}

TEST_CASE("cauchy-binet on every family") {
  oracle::Sampler s(25);
  const std::vector<Solution> sols{
      k3(), gerstner(), hyperbolic(), make_parabolic({parse("cos(z1)"), parse("z1^2 - 20*z1")}),
      make_k2({parse("1"), parse("t"), 1.0, 2.0, 0.0}), with_rotation(hyperbolic(), 0.5)};
  for (const Solution& sol : sols)
    for (int i = 0; i < 100; ++i) {
      const Vec2 z{s.uniform(-1, 1), s.uniform(-1, -0.1)};
      const double t = s.uniform(-2, 2);
      CHECK(cauchy_binet_residual(sol, z, t) < 1e-10 * (1 + std::fabs(phi_jacobian(sol, z, t).det())));
    }
}

TEST_CASE("h and vorticity") {
  const Solution still = make_hyperbolic({0.0, parse("sin(z1)/5"), parse("sin(z2)/4")});
  CHECK(h_value(still, {0.3, 0.2}, 1.0) == 0.0);

  const Solution k = k3();
  oracle::Sampler s(26);
  for (int i = 0; i < 20; ++i) {
    const Vec2 z{s.uniform(-1, 1), s.uniform(-1, 1)};
    const double t = s.uniform(0, 6);
    const double fp = z.y - z.y * z.y - 0.8 * z.y * z.y * z.y;
    CHECK(h_value(k, z, t) == doctest::Approx(fp).epsilon(1e-9));
    const Vec2 zg{z.x, s.uniform(-2, -0.2)};
    CHECK(h_value(gerstner(), zg, t) == doctest::Approx(-2 * std::exp(2 * zg.y)).epsilon(1e-12));
  }
  const Solution k2 = make_k2({parse("1 + t^2/4"), parse("t"), 1.5, 2.0, 0.0});
  CHECK(vorticity(k2, {0.3, 0.1}, 0.7) == doctest::Approx(2.0 / 1.5).epsilon(1e-9));
  CHECK_THROWS_AS((void)vorticity(gerstner(), {0.1, 0.0}, 0.3), NearSingular);
}

TEST_CASE("lagrangian velocity") {
  const Solution p = make_parabolic({parse("cos(z1)"), parse("z1^2")});
  const Vec2 u = lagrangian_velocity(p, {0.4, -0.3}, 1.7);
  CHECK(u.x == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(u.y == doctest::Approx(std::cos(0.4)).epsilon(1e-15));

  // Gerstner: u = M(t + pi/2) f(z).
  const Vec2 z{0.3, -0.8};
  const double t = 1.1;
  const Vec2 f{std::exp(z.y) * std::sin(z.x), -std::exp(z.y) * std::cos(z.x)};
  const Vec2 expect = rotation(t + kPi / 2) * f;
  const Vec2 ug = lagrangian_velocity(gerstner(), z, t);
  CHECK(norm_inf(ug - expect) < 1e-14);

  // Against a central difference of phi in t.
  const Solution h = with_rotation(hyperbolic(), 0.5);
  const Vec2 fd = 1.0 / 2e-5 * (phi(h, z, t + 1e-5) - phi(h, z, t - 1e-5));
  CHECK(norm_inf(lagrangian_velocity(h, z, t) - fd) < 1e-8);
}

TEST_CASE("newton inversion") {
  const Solution g = gerstner();
  oracle::Sampler s(27);
  for (int i = 0; i < 50; ++i) {
    const Vec2 z{s.uniform(-1, 1), s.uniform(-2, -0.5)};
    const double t = s.uniform(0, 6);
    const Vec2 x = phi(g, z, t);
    const Vec2 back = invert(g, x, t, z + Vec2{0.05, 0.05});
    CHECK(norm_inf(back - z) < 1e-10);
  }
  const Solution id = make_hyperbolic({1.0, parse("0"), parse("0")});
  const Vec2 x{0.3, -0.2};
  CHECK(norm_inf(invert(id, x, 0.0) - x) == 0.0);
  CHECK_THROWS((void)invert(g, {0.0, -1.0}, 0.0, {0.0, 0.0}));
}

TEST_CASE("eulerian velocity of rigid rotation") {
  const Solution k2 = make_k2({parse("1"), parse("t"), 1.0, 2.0, 0.0});
  oracle::Sampler s(28);
  for (int i = 0; i < 20; ++i) {
    const Vec2 x{s.uniform(-1, 1), s.uniform(-1, 1)};
    const Vec2 u = eulerian_velocity(k2, x, s.uniform(0, 3));
    CHECK(norm_inf(u - Vec2{-x.y, x.x}) < 1e-10);
  }
}

TEST_CASE("lagrangian map") {
  const Solution g = gerstner();
  const Vec2 x0 = phi(g, {0.2, -1.0}, 0.0);
  CHECK(norm_inf(lagrangian_map(g, x0, 0.0) - x0) < 1e-12);
  CHECK(norm_inf(lagrangian_map(g, x0, 2 * kPi) - x0) < 1e-10);

  // Area preservation on the det = 1 family.
  const Solution k = k3();
  const std::vector<Vec2> tri{{0.0, 0.0}, {0.1, 0.0}, {0.0, 0.1}};
  std::vector<Vec2> moved;
  for (Vec2 p : tri) moved.push_back(lagrangian_map(k, p, 1.3));
  // A small triangle maps to a near-triangle; compare areas to first order.
  CHECK(polygon_area(moved) == doctest::Approx(polygon_area(tri)).epsilon(2e-2));
}
