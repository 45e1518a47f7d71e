#include "qlflow/verify.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace qlflow {
namespace {

double lerp(double lo, double hi, int i, int n) { return lo + (hi - lo) * i / (n - 1); }

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

std::vector<Frame> frames_for(const Solution& sol, const std::vector<double>& times) {
  std::vector<Frame> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(frame_at(sol, t));
  return out;
}

void bump(Cell& c, double v, double t) {
  v = std::fabs(v);
  if (v != v) {
    c.value = v;
  } else if (c.value == c.value && v > c.value) {
    c = {v, t};
  }
}

template <std::size_t M>
Row<M> zero_row(double t) {
  Row<M> r;
  for (Cell& c : r) c = {0.0, t};
  return r;
}

template <std::size_t M, class Where>
ResidualReport make_report(std::string check, const Reduction<M>& red, const std::array<const char*, M>& names,
                           const std::array<double, M>& tols, const Where& where) {
  ResidualReport rep;
  rep.check = std::move(check);
  rep.excluded_fraction = red.excluded_fraction();
  for (std::size_t m = 0; m < M; ++m) {
    SamplePoint at;
    if (red.max[m].value == red.max[m].value) {
      const Vec2 z = where(red.max[m].index);
      at = {z.x, z.y, red.max[m].t};
    }
    rep.add(names[m], red.max[m].value, at, tols[m]);
  }
  return rep;
}

// Combination of minors held constant by a family, e.g. p13 - p24.
struct Combo {
  int i1, j1;
  double sign;  // 0 for a single minor
  int i2, j2;

  [[nodiscard]] double operator()(const Minors& m) const {
    return sign == 0.0 ? m.at(i1, j1) : m.at(i1, j1) + sign * m.at(i2, j2);
  }
  [[nodiscard]] std::string name(char letter) const {
    std::string s = letter + std::to_string(i1) + std::to_string(j1);
    if (sign != 0.0) s += (sign > 0 ? "+" : "-") + std::string(1, letter) + std::to_string(i2) + std::to_string(j2);
    return s;
  }
};

std::vector<Combo> family_combos(Family f) {
  switch (f) {
    case Family::K2:
      return {{1, 2, 0, 0, 0}};
    case Family::K3:
      return {{1, 2, 0, 0, 0}, {1, 3, 0, 0, 0}};
    case Family::Elliptic:
      return {{1, 2, 0, 0, 0}, {3, 4, 0, 0, 0}, {1, 3, -1, 2, 4}, {1, 4, 1, 2, 3}};
    case Family::Hyperbolic:
      return {{1, 2, 0, 0, 0}, {3, 4, 0, 0, 0}, {2, 3, 0, 0, 0}, {1, 4, 0, 0, 0}};
    case Family::Parabolic:
      return {{1, 2, 0, 0, 0}, {3, 4, 0, 0, 0}, {1, 3, -1, 2, 4}, {2, 3, 0, 0, 0}};
  }
  return {};
}

// 3x3 stencil values f(z + (a h, b h)), a, b in {-1, 0, 1}; s[a + 1][b + 1].
using Stencil = std::array<std::array<double, 3>, 3>;

template <class F>
Stencil stencil(const F& f, Vec2 z, double h) {
  Stencil s{};
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) s[a + 1][b + 1] = f(Vec2{z.x + a * h, z.y + b * h});
  return s;
}

struct Derivs {
  double v, d1, d2, d11, d22, d12;
};

Derivs differences(const Stencil& s, double h) {
  return {s[1][1],
          (s[2][1] - s[0][1]) / (2.0 * h),
          (s[1][2] - s[1][0]) / (2.0 * h),
          (s[2][1] - 2.0 * s[1][1] + s[0][1]) / (h * h),
          (s[1][2] - 2.0 * s[1][1] + s[1][0]) / (h * h),
          (s[2][2] - s[2][0] - s[0][2] + s[0][0]) / (4.0 * h * h)};
}

double pde_residual(PdeKind kind, double param, const Derivs& d) {
  const double z = d.v;
  switch (kind) {
    case PdeKind::Elliptic:
      return z * (2.0 * param + z) * (d.d11 + d.d22) - 2.0 * (param + z) * (d.d1 * d.d1 + d.d2 * d.d2);
    case PdeKind::Hyperbolic:
      return (z * z + 4.0 * param * param) * d.d12 - 2.0 * z * d.d1 * d.d2;
    case PdeKind::Parabolic:
      return z * d.d22 - 2.0 * d.d2 * d.d2;
  }
  return 0.0;
}

const char* pde_name(PdeKind k) {
  switch (k) {
    case PdeKind::Elliptic:
      return "elliptic_pde";
    case PdeKind::Hyperbolic:
      return "hyperbolic_pde";
    case PdeKind::Parabolic:
      return "parabolic_pde";
  }
  return "pde";
}

// Interior grid points, row-major.
std::vector<Vec2> interior_points(const GridSpec& g) {
  std::vector<Vec2> out;
  for (int i = 1; i + 1 < g.n1; ++i)
    for (int j = 1; j + 1 < g.n2; ++j) out.push_back(g.point(static_cast<std::size_t>(i) * g.n2 + j));
  return out;
}

struct PdeSample {
  Derivs d;
  double w = 0.0;    // 1 / zeta
  double w22 = 0.0;  // (1 / zeta)_22
};

// `sample` returns nullopt for points that are not evaluable.
template <class Sampler>
ResidualReport pde_report(PdeKind kind, double param, const GridSpec& grid, const Tolerances& tol, Exec exec,
                          const Sampler& sample) {
  grid.validate();
  const std::vector<Vec2> pts = interior_points(grid);
  const auto rows = sweep_points<2>(pts.size(), [&](std::size_t p) {
    const std::optional<PdeSample> s = sample(pts[p]);
    if (!s) return Row<2>{};
    Row<2> row = zero_row<2>(0.0);
    bump(row[0], pde_residual(kind, param, s->d) / (1.0 + std::pow(std::fabs(s->d.v), 3)), 0.0);
    if (kind == PdeKind::Parabolic) bump(row[1], s->w22 / (1.0 + std::fabs(s->w)), 0.0);
    return row;
  }, exec);
  ResidualReport rep = make_report("vorticity_pde", reduce_max(rows), {pde_name(kind), "inverse_affine"},
                                   {tol.pde, tol.inverse_affine}, [&](std::size_t p) { return pts[p]; });
  if (kind != PdeKind::Parabolic) rep.entries.pop_back();
  return rep;
}

double mu_of(const Solution& sol) {
  if (const auto* e = std::get_if<EllipticParams>(&sol.params())) return e->mu;
  if (const auto* g = std::get_if<GerstnerParams>(&sol.params())) return g->mu;
  throw std::invalid_argument("elliptic solution without a rotation rate");
}

}  // namespace

void GridSpec::validate() const {
  require(n1 >= 3 && n2 >= 3, "grid needs at least 3 points per label axis");
  require(nt >= 3, "grid needs at least 3 time samples");
  require(z1_hi > z1_lo && z2_hi > z2_lo, "label ranges must be nondegenerate");
  require(t1 > t0, "time range must be nondegenerate");
  require(det_floor >= 0.0, "det_floor must be nonnegative");
}

Vec2 GridSpec::point(std::size_t p) const {
  const int i = static_cast<int>(p / n2), j = static_cast<int>(p % n2);
  return {lerp(z1_lo, z1_hi, i, n1), lerp(z2_lo, z2_hi, j, n2)};
}

double GridSpec::time(int k) const { return lerp(t0, t1, k, nt); }

std::vector<double> GridSpec::times() const {
  std::vector<double> out;
  for (int k = 0; k < nt; ++k) out.push_back(time(k));
  return out;
}

void XGrid::validate() const {
  require(n1 >= 3 && n2 >= 3, "x-grid needs at least 3 points per axis");
  require(x1_hi > x1_lo && x2_hi > x2_lo, "x-grid ranges must be nondegenerate");
}

Vec2 XGrid::point(std::size_t p) const {
  const int i = static_cast<int>(p / n2), j = static_cast<int>(p % n2);
  return {lerp(x1_lo, x1_hi, i, n1), lerp(x2_lo, x2_hi, j, n2)};
}

ResidualReport check_time_invariance(const Solution& sol, const GridSpec& grid, const Tolerances& tol, Exec exec) {
  grid.validate();
  const std::vector<Frame> frames = frames_for(sol, grid.times());
  const SpatialMap& v = sol.spatial_map();
  const auto rows = sweep_points<4>(grid.points(), [&](std::size_t p) {
    const SpatialSample s = v.sample(grid.point(p));
    const Minors g = spatial_minors(s);
    const double det0 = phi_jacobian(frames[0], s).det();
    const double h0 = h_value(frames[0], s);
    Row<4> row = zero_row<4>(grid.t0);
    if (!(std::fabs(det0) > grid.det_floor)) return Row<4>{};
    for (const Frame& f : frames) {
      const double det = phi_jacobian(f, s).det();
      const double h = h_value(f, s);
      bump(row[0], det - det0, f.t);
      bump(row[1], h - h0, f.t);
      bump(row[2], minor_pairing(time_minors_q(f.b, f.ddb), g), f.t);
      bump(row[3], h / det - h0 / det0, f.t);
    }
    return row;
  }, exec);
  return make_report("time_invariance", reduce_max(rows), {"det_drift", "h_drift", "h_rate", "zeta_drift"},
                     {tol.drift, tol.drift, tol.drift, tol.drift}, [&](std::size_t p) { return grid.point(p); });
}

ResidualReport check_constraints(const SpatialMap& v, ConstraintCase c, const GridSpec& grid, const Tolerances& tol,
                                 Exec exec) {
  grid.validate();
  require(v.k() == 4, "constraint systems need k = 4, got k = " + std::to_string(v.k()));
  const auto rows = sweep_points<2>(grid.points(), [&](std::size_t p) {
    const Minors g = spatial_minors(v, grid.point(p));
    Row<2> row = zero_row<2>(0.0);
    switch (c) {
      case ConstraintCase::Case1:
        bump(row[0], g.at(1, 3), 0.0);
        bump(row[1], g.at(2, 4), 0.0);
        break;
      case ConstraintCase::Case2:
        bump(row[0], g.at(1, 4), 0.0);
        bump(row[1], g.at(2, 4) + g.at(1, 3), 0.0);
        break;
      case ConstraintCase::Case3:
        bump(row[0], g.at(2, 4) + g.at(1, 3), 0.0);
        bump(row[1], g.at(1, 4) - g.at(2, 3), 0.0);
        break;
    }
    return row;
  }, exec);
  std::array<const char*, 2> names{};
  switch (c) {
    case ConstraintCase::Case1:
      names = {"g13", "g24"};
      break;
    case ConstraintCase::Case2:
      names = {"g14", "g24+g13"};
      break;
    case ConstraintCase::Case3:
      names = {"g24+g13", "g14-g23"};
      break;
  }
  return make_report("constraints", reduce_max(rows), names, {tol.constraint, tol.constraint},
                     [&](std::size_t p) { return grid.point(p); });
}

ResidualReport check_minor_constancy(const Solution& sol, const std::vector<double>& times, const Tolerances& tol) {
  require(!times.empty(), "minor constancy needs at least one time");
  const std::vector<Combo> combos = family_combos(sol.family());
  const std::vector<Frame> frames = frames_for(sol, times);
  const Minors p0 = time_minors_p(frames[0].b);
  const Minors Q0 = time_minors_Q(frames[0].b, frames[0].db);
  ResidualReport rep;
  rep.check = "minor_constancy";
  for (char letter : {'p', 'Q'}) {
    for (const Combo& c : combos) {
      const double ref = letter == 'p' ? c(p0) : c(Q0);
      Cell worst{0.0, times[0]};
      for (const Frame& f : frames) {
        const Minors m = letter == 'p' ? time_minors_p(f.b) : time_minors_Q(f.b, f.db);
        bump(worst, c(m) - ref, f.t);
      }
      rep.add(c.name(letter), worst.value, {0.0, 0.0, worst.t}, tol.minor_constancy);
    }
  }
  return rep;
}

ResidualReport check_vorticity_closed_form(const Solution& sol, const GridSpec& grid, const Tolerances& tol,
                                           Exec exec) {
  grid.validate();
  const std::vector<Frame> frames = frames_for(sol, grid.times());
  const SpatialMap& v = sol.spatial_map();
  const auto rows = sweep_points<2>(grid.points(), [&](std::size_t p) {
    const Vec2 z = grid.point(p);
    const SpatialSample s = v.sample(z);
    const double det_pred = sol.predicted_det(z);
    const double zeta_pred = sol.predicted_vorticity(z);
    Row<2> row = zero_row<2>(grid.t0);
    for (const Frame& f : frames) {
      const double det = phi_jacobian(f, s).det();
      if (!(std::fabs(det) > grid.det_floor)) return Row<2>{};
      bump(row[0], det - det_pred, f.t);
      bump(row[1], h_value(f, s) / det - zeta_pred, f.t);
    }
    return row;
  }, exec);
  return make_report("vorticity_closed_form", reduce_max(rows), {"det_closed_form", "zeta_closed_form"},
                     {tol.det_closed, tol.zeta_closed}, [&](std::size_t p) { return grid.point(p); });
}

ResidualReport check_vorticity_pde(PdeKind kind, double param, const ScalarField& zeta, const GridSpec& grid,
                                   double fd_step, const Tolerances& tol, Exec exec) {
  require(fd_step > 0.0, "fd_step must be positive");
  return pde_report(kind, param, grid, tol, exec, [&](Vec2 z) -> std::optional<PdeSample> {
    const Stencil s = stencil(zeta, z, fd_step);
    for (const auto& col : s)
      for (double x : col)
        if (!std::isfinite(x)) return std::nullopt;
    const double w = 1.0 / s[1][1];
    return PdeSample{differences(s, fd_step), w, (1.0 / s[1][2] - 2.0 * w + 1.0 / s[1][0]) / (fd_step * fd_step)};
  });
}

ResidualReport check_vorticity_pde(const Solution& sol, const GridSpec& grid, PdeDerivatives how, double fd_step,
                                   const Tolerances& tol, Exec exec) {
  PdeKind kind{};
  double param = 0.0;
  switch (sol.family()) {
    case Family::Elliptic:
      // The flow's zeta solves the elliptic equation with nu = -mu.
      kind = PdeKind::Elliptic;
      param = -mu_of(sol);
      break;
    case Family::Hyperbolic:
      kind = PdeKind::Hyperbolic;
      param = std::get<HyperbolicParams>(sol.params()).c;
      break;
    case Family::Parabolic:
      kind = PdeKind::Parabolic;
      break;
    default:
      throw std::invalid_argument(std::string("no vorticity PDE for family ") + family_name(sol.family()));
  }
  const Expr& zc = sol.zeta_closed();
  const Expr& dc = sol.det_closed();
  auto det_at = [&](Vec2 y) { return dc.evaluate(Env{0.0, y.x, y.y}); };

  if (how == PdeDerivatives::FiniteDifference) {
    require(fd_step > 0.0, "fd_step must be positive");
    const ScalarField zeta = [&](Vec2 z) { return zc.evaluate(Env{0.0, z.x, z.y}); };
    return pde_report(kind, param, grid, tol, exec, [&](Vec2 z) -> std::optional<PdeSample> {
      // Stencils that touch or straddle the singular set are excluded.
      const Stencil d = stencil(det_at, z, fd_step);
      for (const auto& col : d)
        for (double x : col)
          if (!(std::fabs(x) > grid.det_floor) || (x > 0) != (d[1][1] > 0)) return std::nullopt;
      const Stencil s = stencil(zeta, z, fd_step);
      const double w = 1.0 / s[1][1];
      return PdeSample{differences(s, fd_step), w, (1.0 / s[1][2] - 2.0 * w + 1.0 / s[1][0]) / (fd_step * fd_step)};
    });
  }

  const Expr z_1 = zc.derivative(Var::Z1), z_2 = zc.derivative(Var::Z2);
  const Expr z_11 = z_1.derivative(Var::Z1), z_22 = z_2.derivative(Var::Z2), z_12 = z_1.derivative(Var::Z2);
  const Expr w = Expr(1.0) / zc;
  const Expr w_22 = w.derivative(Var::Z2).derivative(Var::Z2);
  return pde_report(kind, param, grid, tol, exec, [&](Vec2 z) -> std::optional<PdeSample> {
    if (!(std::fabs(det_at(z)) > grid.det_floor)) return std::nullopt;
    const Env env{0.0, z.x, z.y};
    const Derivs d{zc.evaluate(env),    z_1.evaluate(env),  z_2.evaluate(env),
                   z_11.evaluate(env),  z_22.evaluate(env), z_12.evaluate(env)};
    PdeSample s{d, 0.0, 0.0};
    if (kind == PdeKind::Parabolic) s = {d, w.evaluate(env), w_22.evaluate(env)};
    return s;
  });
}

std::vector<std::optional<Vec2>> invert_grid(const Solution& sol, const Frame& frame, const XGrid& grid,
                                             std::optional<Vec2> seed) {
  grid.validate();
  const std::size_t n = grid.points();
  const std::size_t n2 = static_cast<std::size_t>(grid.n2);
  std::vector<std::optional<Vec2>> labels(n);
  std::optional<Vec2> last = seed;
  for (std::size_t p = 0; p < n; ++p) {
    const Vec2 x = grid.point(p);
    std::optional<Vec2> guess = last;
    if (p % n2 != 0 && labels[p - 1]) guess = labels[p - 1];
    else if (p >= n2 && labels[p - n2]) guess = labels[p - n2];
    try {
      labels[p] = invert(sol, frame, x, guess.value_or(x)).z;
      last = labels[p];
    } catch (const std::exception&) {
    }
  }
  return labels;
}

ResidualReport check_euler_eulerian(const Solution& sol, const XGrid& xgrid, const EulerOptions& opts,
                                    const Tolerances& tol, Exec exec) {
  xgrid.validate();
  require(opts.fd_x > 0.0 && opts.fd_t > 0.0, "finite-difference steps must be positive");
  const SpatialMap& v = sol.spatial_map();
  const double h = opts.fd_x, ht = opts.fd_t;
  const Frame now = frame_at(sol, opts.t);
  const Frame before = frame_at(sol, opts.t - ht);
  const Frame after = frame_at(sol, opts.t + ht);

  const std::size_t n = xgrid.points();
  const std::vector<std::optional<Vec2>> labels = invert_grid(sol, now, xgrid, opts.seed);

  struct State {
    Vec2 u;
    double zeta;
  };
  const auto rows = sweep_points<4>(n, [&](std::size_t p) {
    if (!labels[p]) return Row<4>{};
    const Vec2 z0 = *labels[p];
    auto state = [&](const Frame& f, Vec2 y) {
      const SpatialSample s = v.sample(invert(sol, f, y, z0).z);
      const double det = phi_jacobian(f, s).det();
      if (!(std::fabs(det) > kDetFloor)) throw NearSingular("stencil point near the singular set");
      return State{lagrangian_velocity(f, s), h_value(f, s) / det};
    };
    const Vec2 e1{h, 0.0}, e2{0.0, h};
    auto momentum = [&](Vec2 y) {
      const Vec2 u = state(now, y).u;
      const Vec2 ut = (1.0 / (2.0 * ht)) * (state(after, y).u - state(before, y).u);
      const Vec2 du1 = (1.0 / (2.0 * h)) * (state(now, y + e1).u - state(now, y - e1).u);
      const Vec2 du2 = (1.0 / (2.0 * h)) * (state(now, y + e2).u - state(now, y - e2).u);
      return ut + u.x * du1 + u.y * du2;
    };
    const Vec2 x = xgrid.point(p);
    const State c = state(now, x);
    const State px = state(now, x + e1), mx = state(now, x - e1);
    const State py = state(now, x + e2), my = state(now, x - e2);
    const double div = (px.u.x - mx.u.x + py.u.y - my.u.y) / (2.0 * h);
    const Vec2 mpx = momentum(x + e1), mmx = momentum(x - e1);
    const Vec2 mpy = momentum(x + e2), mmy = momentum(x - e2);
    const double curl_m = (mpx.y - mmx.y - mpy.x + mmy.x) / (2.0 * h);
    const double zt = (state(after, x).zeta - state(before, x).zeta) / (2.0 * ht);
    const double transport = zt + c.u.x * (px.zeta - mx.zeta) / (2.0 * h) + c.u.y * (py.zeta - my.zeta) / (2.0 * h);
    const double curl_u = (px.u.y - mx.u.y - py.u.x + my.u.x) / (2.0 * h);
    Row<4> row = zero_row<4>(opts.t);
    bump(row[0], div, opts.t);
    bump(row[1], curl_m, opts.t);
    bump(row[2], transport, opts.t);
    bump(row[3], curl_u - c.zeta, opts.t);
    return row;
  }, exec);
  return make_report("euler_eulerian", reduce_max(rows),
                     {"div_u", "curl_momentum", "vorticity_transport", "curl_u_minus_zeta"},
                     {tol.euler, tol.euler, tol.euler, tol.euler}, [&](std::size_t p) { return xgrid.point(p); });
}

ResidualReport check_rotation_shift(const Solution& sol, double theta0, const GridSpec& grid, const Tolerances& tol,
                                    Exec exec) {
  grid.validate();
  const Solution rotated = with_rotation(sol, theta0);
  const std::vector<Frame> base = frames_for(sol, grid.times());
  const std::vector<Frame> rot = frames_for(rotated, grid.times());
  const SpatialMap& v = sol.spatial_map();
  const auto rows = sweep_points<1>(grid.points(), [&](std::size_t p) {
    const SpatialSample s = v.sample(grid.point(p));
    Row<1> row = zero_row<1>(grid.t0);
    for (std::size_t k = 0; k < base.size(); ++k) {
      const double d0 = phi_jacobian(base[k], s).det();
      const double d1 = phi_jacobian(rot[k], s).det();
      if (!(std::fabs(d0) > grid.det_floor) || !(std::fabs(d1) > grid.det_floor)) return Row<1>{};
      bump(row[0], h_value(rot[k], s) / d1 - h_value(base[k], s) / d0 - 2.0 * theta0, base[k].t);
    }
    return row;
  }, exec);
  return make_report("rotation_shift", reduce_max(rows), {"zeta_shift"}, {tol.rotation},
                     [&](std::size_t p) { return grid.point(p); });
}

ResidualReport check_anticr(const AntiCRMap& f, const GridSpec& grid, const Tolerances& tol, Exec exec) {
  grid.validate();
  const Expr f1_1 = f.f1.derivative(Var::Z1), f1_2 = f.f1.derivative(Var::Z2);
  const Expr f2_1 = f.f2.derivative(Var::Z1), f2_2 = f.f2.derivative(Var::Z2);
  const auto rows = sweep_points<2>(grid.points(), [&](std::size_t p) {
    const Vec2 z = grid.point(p);
    const Env env{0.0, z.x, z.y};
    Row<2> row = zero_row<2>(0.0);
    bump(row[0], f1_1.evaluate(env) + f2_2.evaluate(env), 0.0);
    bump(row[1], f1_2.evaluate(env) - f2_1.evaluate(env), 0.0);
    return row;
  }, exec);
  return make_report("anticr", reduce_max(rows), {"f1_z1+f2_z2", "f1_z2-f2_z1"}, {tol.anticr, tol.anticr},
                     [&](std::size_t p) { return grid.point(p); });
}

ResidualReport check_identities(const Solution& sol, const GridSpec& grid, const Tolerances& tol, Exec exec) {
  grid.validate();
  const std::vector<Frame> frames = frames_for(sol, grid.times());
  std::vector<Minors> p;
  for (const Frame& f : frames) p.push_back(time_minors_p(f.b));
  const bool k4 = sol.time_matrix().k() == 4;
  const SpatialMap& v = sol.spatial_map();
  const auto rows = sweep_points<2>(grid.points(), [&](std::size_t q) {
    const SpatialSample s = v.sample(grid.point(q));
    const Minors g = spatial_minors(s);
    Row<2> row = zero_row<2>(grid.t0);
    for (std::size_t k = 0; k < frames.size(); ++k) {
      bump(row[0], phi_jacobian(frames[k], s).det() - minor_pairing(p[k], g), frames[k].t);
      if (k4) bump(row[1], pluecker_residual(p[k]), frames[k].t);
    }
    return row;
  }, exec);
  ResidualReport rep = make_report("identities", reduce_max(rows), {"cauchy_binet", "pluecker"},
                                   {tol.cauchy_binet, tol.pluecker}, [&](std::size_t q) { return grid.point(q); });
  if (!k4) rep.entries.pop_back();
  return rep;
}

ResidualReport check_inversion(const Solution& sol, const GridSpec& grid, double offset, const Tolerances& tol,
                               Exec exec) {
  grid.validate();
  const std::vector<Frame> frames = frames_for(sol, grid.times());
  const SpatialMap& v = sol.spatial_map();
  const NewtonOptions newton{1e-12, 50, grid.det_floor};
  const auto rows = sweep_points<1>(grid.points(), [&](std::size_t p) {
    const Vec2 z = grid.point(p);
    const SpatialSample s = v.sample(z);
    Row<1> row = zero_row<1>(grid.t0);
    for (const Frame& f : frames) {
      const double det = std::fabs(phi_jacobian(f, s).det());
      if (!(det > grid.det_floor)) return Row<1>{};
      // Near a fold the guess moves closer so Newton stays on the same sheet.
      const double off = offset * std::fmin(1.0, det);
      const Vec2 back = invert(sol, f, phi(f, s), z + Vec2{off, off}, newton).z;
      bump(row[0], norm_inf(back - z), f.t);
    }
    return row;
  }, exec);
  return make_report("inversion", reduce_max(rows), {"round_trip"}, {tol.inversion},
                     [&](std::size_t p) { return grid.point(p); });
}

Solution broken_hyperbolic(const HyperbolicParams& p) {
  const Solution base = make_hyperbolic(p);
  const double c = p.c;
  auto grow = [c](double t) { return exp(Jet{c * t * t, 2.0 * c * t, 2.0 * c}); };
  auto decay = [c](double t) { return exp(Jet{-c * t, -c, 0.0}); };
  std::vector<TimeMatrix::Entry> rows{
      grow, TimeMatrix::constant(0.0), TimeMatrix::constant(0.0), decay,
      TimeMatrix::constant(0.0), decay, grow, TimeMatrix::constant(0.0),
  };
  return Solution(Family::Hyperbolic, TimeMatrix(4, std::move(rows)), base.spatial_map(), base.det_closed(),
                  base.zeta_closed(), base.params(), base.theta0());
}

std::vector<ResidualReport> run_suite(const Solution& sol, const SuiteOptions& opts) {
  const GridSpec& g = opts.grid;
  const Tolerances& tol = opts.tol;
  std::vector<ResidualReport> out;
  out.push_back(check_time_invariance(sol, g, tol, opts.exec));
  out.push_back(check_vorticity_closed_form(sol, g, tol, opts.exec));
  out.push_back(check_identities(sol, g, tol, opts.exec));
  out.push_back(check_minor_constancy(sol, g.times(), tol));
  out.push_back(check_rotation_shift(sol.with_theta0(0.0), sol.theta0(), g, tol, opts.exec));
  out.push_back(check_inversion(sol, g, 1e-2, tol, opts.exec));
  switch (sol.family()) {
    case Family::Elliptic:
      out.push_back(check_constraints(sol.spatial_map(), ConstraintCase::Case3, g, tol, opts.exec));
      if (const auto* e = std::get_if<EllipticParams>(&sol.params()))
        out.push_back(check_anticr(e->f, g, tol, opts.exec));
      else if (const auto* gp = std::get_if<GerstnerParams>(&sol.params()))
        out.push_back(check_anticr(gerstner_map(gp->kappa), g, tol, opts.exec));
      break;
    case Family::Hyperbolic:
      out.push_back(check_constraints(sol.spatial_map(), ConstraintCase::Case1, g, tol, opts.exec));
      break;
    case Family::Parabolic:
      out.push_back(check_constraints(sol.spatial_map(), ConstraintCase::Case2, g, tol, opts.exec));
      break;
    default:
      break;
  }
  if (sol.time_matrix().k() == 4)
    out.push_back(check_vorticity_pde(sol, g, opts.pde_derivatives, opts.pde_fd_step, tol, opts.exec));
  if (opts.euler_grid) out.push_back(check_euler_eulerian(sol, *opts.euler_grid, opts.euler, tol, opts.exec));
  return out;
}

bool all_passed(const std::vector<ResidualReport>& reports) {
  for (const auto& r : reports)
    if (!r.passed()) return false;
  return true;
}

}  // namespace qlflow
