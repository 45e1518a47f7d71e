#include "qlflow/families.hpp"

#include <cmath>
#include <random>
#include <utility>

namespace qlflow {

namespace {

const Expr kZ1 = Expr::variable(Var::Z1);
const Expr kZ2 = Expr::variable(Var::Z2);

void require_only(const Expr& e, Var allowed, const char* what) {
  for (Var v : {Var::T, Var::Z1, Var::Z2}) {
    if (v != allowed && e.depends_on(v))
      throw std::invalid_argument(std::string(what) + " may only depend on " + std::string(var_name(allowed)) +
                                  ": " + e.to_string());
  }
}

void require_positive_on(const Expr& r, const TimeRange& range) {
  constexpr int kSamples = 201;
  for (int i = 0; i < kSamples; ++i) {
    const double t = range.t0 + (range.t1 - range.t0) * i / (kSamples - 1);
    const double value = r.evaluate(Env{t, 0.0, 0.0});
    if (!(value >= 1e-9))
      throw std::invalid_argument("r(t) must stay >= 1e-9; r(" + std::to_string(t) + ") = " + std::to_string(value));
  }
}

struct SimpsonPanel {
  double a, b, fa, fm, fb, whole;
};

double simpson_recurse(const Expr& f, const SimpsonPanel& p, double tol, int depth, const QuadratureOptions& opts) {
  const double m = 0.5 * (p.a + p.b);
  const double lm = 0.5 * (p.a + m), rm = 0.5 * (m + p.b);
  const double flm = f.evaluate(Env{lm, 0.0, 0.0});
  const double frm = f.evaluate(Env{rm, 0.0, 0.0});
  const double left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
  const double right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
  const double delta = left + right - p.whole;
  // Three forced levels so a coincidentally flat first estimate is not accepted.
  if (depth >= 3 && std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth >= opts.max_depth)
    throw QuadratureError("adaptive Simpson did not reach tolerance within depth " + std::to_string(opts.max_depth) +
                          " on [" + std::to_string(p.a) + ", " + std::to_string(p.b) + "]");
  return simpson_recurse(f, {p.a, m, p.fa, flm, p.fm, left}, 0.5 * tol, depth + 1, opts) +
         simpson_recurse(f, {m, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth + 1, opts);
}

Jet exp_rate(double c, double t) { return exp(Jet{c * t, c, 0.0}); }

}  // namespace

AntiCRViolation::AntiCRViolation(double residual, Vec2 at)
    : std::invalid_argument("map is not anti-CR: residual " + std::to_string(residual) + " at z = (" +
                            std::to_string(at.x) + ", " + std::to_string(at.y) + ")"),
      residual_(residual),
      at_(at) {}

double quadrature(const Expr& integrand, double t0, double t1, const QuadratureOptions& opts) {
  if (t0 == t1) return 0.0;
  const double fa = integrand.evaluate(Env{t0, 0.0, 0.0});
  const double fb = integrand.evaluate(Env{t1, 0.0, 0.0});
  const double m = 0.5 * (t0 + t1);
  const double fm = integrand.evaluate(Env{m, 0.0, 0.0});
  const double whole = (t1 - t0) / 6.0 * (fa + 4.0 * fm + fb);
  const double tol = std::fmax(opts.abs_tol, opts.rel_tol * std::fabs(whole));
  return simpson_recurse(integrand, {t0, t1, fa, fm, fb, whole}, tol, 0, opts);
}

TimeMatrix::Entry integral_entry(const Expr& integrand, double a0) {
  require_only(integrand, Var::T, "integrand");
  Expr d = integrand.derivative(Var::T);
  return [integrand, d = std::move(d), a0](double t) {
    const Env env{t, 0.0, 0.0};
    return Jet{a0 + quadrature(integrand, 0.0, t), integrand.evaluate(env), d.evaluate(env)};
  };
}

double anticr_residual(const AntiCRMap& f, const LabelBox& box, Vec2* at) {
  const Expr e1 = f.f1.derivative(Var::Z1) + f.f2.derivative(Var::Z2);
  const Expr e2 = f.f1.derivative(Var::Z2) - f.f2.derivative(Var::Z1);
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> u1(box.z1_lo, box.z1_hi), u2(box.z2_lo, box.z2_hi);
  double worst = 0.0;
  Vec2 where{};
  for (int i = 0; i < 200; ++i) {
    const Vec2 z{u1(rng), u2(rng)};
    double r = 0.0;
    try {
      const Env env{0.0, z.x, z.y};
      r = std::fmax(std::fabs(e1.evaluate(env)), std::fabs(e2.evaluate(env)));
    } catch (const EvalError&) {
      continue;
    }
    if (!(r <= worst)) {
      worst = r;
      where = z;
    }
  }
  if (at) *at = where;
  return worst;
}

AntiCRMap make_anticr(Expr f1, Expr f2, const LabelBox& box) {
  AntiCRMap f{std::move(f1), std::move(f2)};
  if (f.f1.depends_on(Var::T) || f.f2.depends_on(Var::T))
    throw std::invalid_argument("anti-CR map may not depend on t");
  Vec2 at;
  const double r = anticr_residual(f, box, &at);
  if (!(r <= 1e-9)) throw AntiCRViolation(r, at);
  return f;
}

Solution make_k2(const K2Params& p, const TimeRange& valid_on) {
  require_only(p.r, Var::T, "r");
  require_only(p.theta, Var::T, "theta");
  if (p.e == 0.0) throw std::invalid_argument("k2: e must be nonzero");
  require_positive_on(p.r, valid_on);

  // a' = (2 e theta' - c) / r^2
  const Expr da = (Expr(2.0 * p.e) * p.theta.derivative(Var::T) - Expr(p.c)) / pow(p.r, 2.0);
  auto r = TimeMatrix::from_expr(p.r);
  auto a = integral_entry(da, p.a0);
  const double e = p.e;
  std::vector<TimeMatrix::Entry> rows{
      r,
      [r, a](double t) { return r(t) * a(t); },
      TimeMatrix::constant(0.0),
      [r, e](double t) { return Jet::constant(e) / r(t); },
  };
  TimeMatrix A(2, std::move(rows), TimeMatrix::from_expr(p.theta));
  SpatialMap v({kZ1, kZ2});
  return Solution(Family::K2, std::move(A), std::move(v), Expr(p.e), Expr(p.c) / Expr(p.e), p);
}

Solution make_k3(const K3Params& p, const TimeRange& valid_on) {
  require_only(p.r, Var::T, "r");
  require_only(p.theta, Var::T, "theta");
  require_only(p.f, Var::Z2, "f");
  require_positive_on(p.r, valid_on);

  const Expr r2 = pow(p.r, 2.0);
  auto r = TimeMatrix::from_expr(p.r);
  auto a1 = integral_entry(Expr(2.0) * p.theta.derivative(Var::T) / r2, p.a1_0);
  auto a2 = integral_entry(Expr(-1.0) / r2, p.a2_0);
  std::vector<TimeMatrix::Entry> rows{
      r,
      [r, a1](double t) { return r(t) * a1(t); },
      [r, a2](double t) { return r(t) * a2(t); },
      TimeMatrix::constant(0.0),
      [r](double t) { return Jet::constant(1.0) / r(t); },
      TimeMatrix::constant(0.0),
  };
  TimeMatrix A(3, std::move(rows), TimeMatrix::from_expr(p.theta));
  SpatialMap v({kZ1, kZ2, p.f});
  return Solution(Family::K3, std::move(A), std::move(v), Expr(1.0), p.f.derivative(Var::Z2), p);
}

namespace {

Solution elliptic_from(const AntiCRMap& f, double mu, FamilyParams params) {
  std::vector<TimeMatrix::Entry> rows{
      TimeMatrix::constant(1.0),
      TimeMatrix::constant(0.0),
      [mu](double t) { return cos(Jet{mu * t, mu, 0.0}); },
      [mu](double t) { return -sin(Jet{mu * t, mu, 0.0}); },
      TimeMatrix::constant(0.0),
      TimeMatrix::constant(1.0),
      [mu](double t) { return sin(Jet{mu * t, mu, 0.0}); },
      [mu](double t) { return cos(Jet{mu * t, mu, 0.0}); },
  };
  TimeMatrix A(4, std::move(rows));
  SpatialMap v({kZ1, kZ2, f.f1, f.f2});
  // |grad f1|^2; vorticity of z + M(mu t) f is -2 mu g / (1 - g).
  const Expr g = pow(f.f1.derivative(Var::Z1), 2.0) + pow(f.f1.derivative(Var::Z2), 2.0);
  const Expr det = Expr(1.0) - g;
  return Solution(Family::Elliptic, std::move(A), std::move(v), det, Expr(-2.0 * mu) * g / det, std::move(params));
}

}  // namespace

Solution make_elliptic(const EllipticParams& p, const LabelBox& anticr_box) {
  if (p.f.f1.depends_on(Var::T) || p.f.f2.depends_on(Var::T))
    throw std::invalid_argument("anti-CR map may not depend on t");
  Vec2 at;
  const double r = anticr_residual(p.f, anticr_box, &at);
  if (!(r <= 1e-9)) throw AntiCRViolation(r, at);
  return elliptic_from(p.f, p.mu, p);
}

AntiCRMap gerstner_map(double kappa) {
  const Expr amp = exp(Expr(kappa) * kZ2) / Expr(kappa);
  return {amp * sin(Expr(kappa) * kZ1), -(amp * cos(Expr(kappa) * kZ1))};
}

Solution make_gerstner(double kappa, double mu) {
  if (kappa == 0.0 || !std::isfinite(kappa)) throw std::invalid_argument("gerstner: kappa must be nonzero");
  const Solution base = make_elliptic(EllipticParams{gerstner_map(kappa), mu});
  const Expr e2 = exp(Expr(2.0 * kappa) * kZ2);
  const Expr det = Expr(1.0) - e2;
  return Solution(Family::Elliptic, base.time_matrix(), base.spatial_map(), det, Expr(-2.0 * mu) * e2 / det,
                  GerstnerParams{kappa, mu});
}

Solution make_hyperbolic(const HyperbolicParams& p) {
  require_only(p.f1, Var::Z1, "f1");
  require_only(p.f2, Var::Z2, "f2");
  const double c = p.c;
  std::vector<TimeMatrix::Entry> rows{
      [c](double t) { return exp_rate(c, t); },
      TimeMatrix::constant(0.0),
      TimeMatrix::constant(0.0),
      [c](double t) { return exp_rate(-c, t); },
      TimeMatrix::constant(0.0),
      [c](double t) { return exp_rate(-c, t); },
      [c](double t) { return exp_rate(c, t); },
      TimeMatrix::constant(0.0),
  };
  TimeMatrix A(4, std::move(rows));
  SpatialMap v({kZ1, kZ2, p.f1, p.f2});
  const Expr d1 = p.f1.derivative(Var::Z1);
  const Expr d2 = p.f2.derivative(Var::Z2);
  const Expr det = Expr(1.0) - d1 * d2;
  return Solution(Family::Hyperbolic, std::move(A), std::move(v), det, Expr(2.0 * c) * (d1 + d2) / det, p);
}

Solution make_parabolic(const ParabolicParams& p) {
  require_only(p.f1, Var::Z1, "f1");
  require_only(p.f2, Var::Z1, "f2");
  std::vector<TimeMatrix::Entry> rows{
      [](double t) { return Jet{t, 1.0, 0.0}; },
      TimeMatrix::constant(1.0),
      TimeMatrix::constant(0.0),
      TimeMatrix::constant(0.0),
      TimeMatrix::constant(0.0),
      TimeMatrix::constant(0.0),
      TimeMatrix::constant(1.0),
      [](double t) { return Jet{t, 1.0, 0.0}; },
  };
  TimeMatrix A(4, std::move(rows));
  const Expr d1 = p.f1.derivative(Var::Z1);
  const Expr dd1 = d1.derivative(Var::Z1);
  const Expr d2 = p.f2.derivative(Var::Z1);
  SpatialMap v({kZ1, kZ2, kZ2 * d1 + p.f2, p.f1});
  const Expr den = kZ2 * dd1 + d2;  // det = -den
  return Solution(Family::Parabolic, std::move(A), std::move(v), -den,
                  -(Expr(1.0) + pow(d1, 2.0)) / den, p);
}

Solution with_rotation(const Solution& sol, double theta0) { return sol.with_theta0(sol.theta0() + theta0); }

}  // namespace qlflow
