#include "qlflow/kernel.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace qlflow {

const char* family_name(Family f) {
  switch (f) {
    case Family::K2: return "k2";
    case Family::K3: return "k3";
    case Family::Elliptic: return "elliptic";
    case Family::Hyperbolic: return "hyperbolic";
    case Family::Parabolic: return "parabolic";
  }
  return "?";
}

// TimeMatrix -----------------------------------------------------------------

TimeMatrix::TimeMatrix(int k, std::vector<Entry> rows, Entry angle)
    : k_(k), rows_(std::move(rows)), angle_(std::move(angle)) {
  if (k < 2 || k > 4) throw std::invalid_argument("TimeMatrix: k must be 2, 3 or 4");
  if (static_cast<int>(rows_.size()) != 2 * k)
    throw std::invalid_argument("TimeMatrix: expected " + std::to_string(2 * k) + " entries");
}

TimeMatrix::Entry TimeMatrix::constant(double c) {
  return [c](double) { return Jet::constant(c); };
}

TimeMatrix::Entry TimeMatrix::from_expr(const Expr& e) {
  if (e.depends_on(Var::Z1) || e.depends_on(Var::Z2))
    throw std::invalid_argument("time entry depends on z: " + e.to_string());
  Expr d1 = e.derivative(Var::T);
  Expr d2 = d1.derivative(Var::T);
  return [e, d1 = std::move(d1), d2 = std::move(d2)](double t) {
    const Env env{t, 0.0, 0.0};
    return Jet{e.evaluate(env), d1.evaluate(env), d2.evaluate(env)};
  };
}

TimeSample TimeMatrix::sample(double t) const {
  std::array<std::array<Jet, 4>, 2> r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < k_; ++j) r[i][j] = rows_[i * k_ + j](t);

  if (angle_) {
    const Jet th = angle_(t);
    const Jet c = cos(th), s = sin(th);
    for (int j = 0; j < k_; ++j) {
      const Jet top = c * r[0][j] - s * r[1][j];
      const Jet bottom = s * r[0][j] + c * r[1][j];
      r[0][j] = top;
      r[1][j] = bottom;
    }
  }

  TimeSample out;
  out.value.k = out.d1.k = out.d2.k = k_;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < k_; ++j) {
      out.value(i, j) = r[i][j].v;
      out.d1(i, j) = r[i][j].d1;
      out.d2(i, j) = r[i][j].d2;
    }
  }
  return out;
}

double TimeMatrix::largest_minor(double t) const {
  const Minors p = time_minors_p(sample(t).value);
  double best = 0.0;
  for (int i = 1; i <= k_; ++i)
    for (int j = i + 1; j <= k_; ++j) best = std::fmax(best, std::fabs(p.at(i, j)));
  return best;
}

// SpatialMap -----------------------------------------------------------------

SpatialMap::SpatialMap(std::vector<Expr> components) : components_(std::move(components)) {
  if (components_.size() < 2 || components_.size() > 4)
    throw std::invalid_argument("SpatialMap: k must be 2, 3 or 4");
  for (const Expr& c : components_) {
    if (c.depends_on(Var::T))
      throw std::invalid_argument("spatial component depends on t: " + c.to_string());
    Expr d1 = c.derivative(Var::Z1);
    Expr d2 = c.derivative(Var::Z2);
    hess_.push_back({d1.derivative(Var::Z1), d1.derivative(Var::Z2), d2.derivative(Var::Z2)});
    grad_.push_back({std::move(d1), std::move(d2)});
  }
}

const Expr& SpatialMap::partial(int i, Var v) const {
  return grad_[i][v == Var::Z1 ? 0 : 1];
}

const Expr& SpatialMap::partial2(int i, Var a, Var b) const {
  if (a == Var::Z1 && b == Var::Z1) return hess_[i][0];
  if (a == Var::Z2 && b == Var::Z2) return hess_[i][2];
  return hess_[i][1];
}

SpatialSample SpatialMap::sample(Vec2 z) const {
  const Env env{0.0, z.x, z.y};
  SpatialSample s;
  s.k = k();
  for (int i = 0; i < s.k; ++i) {
    s.value[i] = components_[i].evaluate(env);
    s.grad[i] = {grad_[i][0].evaluate(env), grad_[i][1].evaluate(env)};
  }
  return s;
}

// Solution -------------------------------------------------------------------

Solution::Solution(Family family, TimeMatrix a, SpatialMap v, Expr det_closed, Expr zeta_closed,
                   FamilyParams params, double theta0)
    : family_(family),
      a_(std::move(a)),
      v_(std::move(v)),
      det_closed_(std::move(det_closed)),
      zeta_closed_(std::move(zeta_closed)),
      params_(std::move(params)),
      theta0_(theta0) {
  if (a_.k() != v_.k())
    throw InvalidSolution("A has " + std::to_string(a_.k()) + " columns but v has " +
                          std::to_string(v_.k()) + " components");
}

double Solution::predicted_vorticity(Vec2 z) const {
  return zeta_closed_.evaluate(Env{0.0, z.x, z.y}) + 2.0 * theta0_;
}

double Solution::predicted_det(Vec2 z) const { return det_closed_.evaluate(Env{0.0, z.x, z.y}); }

Solution Solution::with_theta0(double theta0) const {
  Solution out = *this;
  out.theta0_ = theta0;
  return out;
}

// Frames and point kernels -----------------------------------------------------

Frame frame_at(const Solution& sol, double t) {
  const TimeSample a = sol.time_matrix().sample(t);
  Frame f;
  f.t = t;
  const double w = sol.theta0();
  if (w == 0.0) {
    f.b = a.value;
    f.db = a.d1;
    f.ddb = a.d2;
    return f;
  }
  // B = M A, B' = M' A + M A', B'' = M'' A + 2 M' A' + M A'' with
  // M' = w M(wt + pi/2), M'' = -w^2 M.
  const Mat2 m = rotation(w * t);
  const Mat2 dm{-w * m.a21, -w * m.a22, w * m.a11, w * m.a12};
  const Mat2 ddm{-w * w * m.a11, -w * w * m.a12, -w * w * m.a21, -w * w * m.a22};
  f.b = m * a.value;
  f.db = dm * a.value + m * a.d1;
  f.ddb = ddm * a.value + 2.0 * (dm * a.d1) + m * a.d2;
  return f;
}

Vec2 phi(const Frame& f, const SpatialSample& s) {
  Vec2 out;
  for (int j = 0; j < s.k; ++j) {
    out.x += f.b(0, j) * s.value[j];
    out.y += f.b(1, j) * s.value[j];
  }
  return out;
}

namespace {

Mat2 times_gradient(const Mat2xK& b, const SpatialSample& s) {
  Mat2 j;
  for (int c = 0; c < s.k; ++c) {
    j.a11 += b(0, c) * s.grad[c].x;
    j.a12 += b(0, c) * s.grad[c].y;
    j.a21 += b(1, c) * s.grad[c].x;
    j.a22 += b(1, c) * s.grad[c].y;
  }
  return j;
}

// sum over rows of the bilinear 2x2 minors of (da, a); shared by Q and q.
Minors rate_minors(const Mat2xK& a, const Mat2xK& da) {
  Minors q;
  q.k = a.k;
  for (int i = 0; i < a.k; ++i) {
    for (int j = i + 1; j < a.k; ++j) {
      const double v = da(0, i) * a(0, j) - da(0, j) * a(0, i) + da(1, i) * a(1, j) - da(1, j) * a(1, i);
      q.set(i + 1, j + 1, v);
    }
  }
  return q;
}

}  // namespace

Mat2 phi_jacobian(const Frame& f, const SpatialSample& s) { return times_gradient(f.b, s); }

Mat2 phi_jacobian_rate(const Frame& f, const SpatialSample& s) { return times_gradient(f.db, s); }

double h_value(const Frame& f, const SpatialSample& s) {
  const Mat2 j = phi_jacobian(f, s);
  const Mat2 dj = phi_jacobian_rate(f, s);
  // det P1 + det P2, P_i = [[(phi^i_10)', (phi^i_01)'], [phi^i_10, phi^i_01]]
  return (dj.a11 * j.a12 - dj.a12 * j.a11) + (dj.a21 * j.a22 - dj.a22 * j.a21);
}

Vec2 lagrangian_velocity(const Frame& f, const SpatialSample& s) {
  Vec2 out;
  for (int j = 0; j < s.k; ++j) {
    out.x += f.db(0, j) * s.value[j];
    out.y += f.db(1, j) * s.value[j];
  }
  return out;
}

Minors time_minors_p(const Mat2xK& a) {
  Minors p;
  p.k = a.k;
  for (int i = 0; i < a.k; ++i)
    for (int j = i + 1; j < a.k; ++j) p.set(i + 1, j + 1, a(0, i) * a(1, j) - a(0, j) * a(1, i));
  return p;
}

Minors time_minors_Q(const Mat2xK& a, const Mat2xK& da) { return rate_minors(a, da); }

Minors time_minors_q(const Mat2xK& a, const Mat2xK& dda) { return rate_minors(a, dda); }

Minors spatial_minors(const SpatialSample& s) {
  Minors g;
  g.k = s.k;
  for (int i = 0; i < s.k; ++i)
    for (int j = i + 1; j < s.k; ++j) g.set(i + 1, j + 1, cross(s.grad[i], s.grad[j]));
  return g;
}

double minor_pairing(const Minors& p, const Minors& g) {
  double sum = 0.0;
  for (int i = 1; i <= p.k; ++i)
    for (int j = i + 1; j <= p.k; ++j) sum += p.at(i, j) * g.at(i, j);
  return sum;
}

// Public API -------------------------------------------------------------------

Vec2 phi(const Solution& sol, Vec2 z, double t) {
  return phi(frame_at(sol, t), sol.spatial_map().sample(z));
}

Mat2 phi_jacobian(const Solution& sol, Vec2 z, double t) {
  return phi_jacobian(frame_at(sol, t), sol.spatial_map().sample(z));
}

Minors spatial_minors(const SpatialMap& v, Vec2 z) { return spatial_minors(v.sample(z)); }

Minors time_minors_p(const TimeMatrix& a, double t) { return time_minors_p(a.sample(t).value); }

Minors time_minors_Q(const TimeMatrix& a, double t) {
  const TimeSample s = a.sample(t);
  return time_minors_Q(s.value, s.d1);
}

Minors time_minors_q(const TimeMatrix& a, double t) {
  const TimeSample s = a.sample(t);
  return time_minors_q(s.value, s.d2);
}

double pluecker_residual(const Minors& p) {
  if (p.k != 4) throw std::invalid_argument("pluecker_residual needs k = 4, got " + std::to_string(p.k));
  return std::fabs(p.at(1, 2) * p.at(3, 4) - p.at(1, 3) * p.at(2, 4) + p.at(1, 4) * p.at(2, 3));
}

double cauchy_binet_residual(const Solution& sol, Vec2 z, double t) {
  const Frame f = frame_at(sol, t);
  const SpatialSample s = sol.spatial_map().sample(z);
  const double det = phi_jacobian(f, s).det();
  return std::fabs(det - minor_pairing(time_minors_p(f.b), spatial_minors(s)));
}

double h_value(const Solution& sol, Vec2 z, double t) {
  return h_value(frame_at(sol, t), sol.spatial_map().sample(z));
}

double vorticity(const Solution& sol, Vec2 z, double t) {
  const Frame f = frame_at(sol, t);
  const SpatialSample s = sol.spatial_map().sample(z);
  const double det = phi_jacobian(f, s).det();
  if (!(std::fabs(det) > kDetFloor))
    throw NearSingular("det(dphi) = " + std::to_string(det) + " at z = (" + std::to_string(z.x) + ", " +
                       std::to_string(z.y) + ")");
  return h_value(f, s) / det;
}

Vec2 lagrangian_velocity(const Solution& sol, Vec2 z, double t) {
  return lagrangian_velocity(frame_at(sol, t), sol.spatial_map().sample(z));
}

InvertResult invert(const Solution& sol, const Frame& frame, Vec2 x, Vec2 guess, const NewtonOptions& opts) {
  const SpatialMap& v = sol.spatial_map();
  InvertResult out{guess, 0, 0.0};
  for (;;) {
    const SpatialSample s = v.sample(out.z);
    const Vec2 r = phi(frame, s) - x;
    out.residual = norm_inf(r);
    const Mat2 j = phi_jacobian(frame, s);
    if (!(std::fabs(j.det()) > opts.det_floor))
      throw NearSingular("Newton hit |det(dphi)| <= " + std::to_string(opts.det_floor));
    if (out.residual <= opts.tolerance) {
      // One polishing step past the tolerance; kept only if it does not hurt, so
      // FD stencils built on inverted points see round-off rather than tolerance noise.
      const Vec2 z2 = out.z - j.inverse() * r;
      const double r2 = norm_inf(phi(frame, v.sample(z2)) - x);
      if (r2 <= out.residual) {
        out.z = z2;
        out.residual = r2;
      }
      return out;
    }
    if (out.iterations == opts.max_iter)
      throw NoConvergence("Newton did not converge in " + std::to_string(opts.max_iter) +
                          " iterations (residual " + std::to_string(out.residual) + ")");
    out.z = out.z - j.inverse() * r;
    if (!std::isfinite(out.z.x) || !std::isfinite(out.z.y)) throw NoConvergence("Newton iterate diverged");
    ++out.iterations;
  }
}

Vec2 invert(const Solution& sol, Vec2 x, double t, Vec2 guess, const NewtonOptions& opts) {
  return invert(sol, frame_at(sol, t), x, guess, opts).z;
}

Vec2 eulerian_velocity(const Solution& sol, Vec2 x, double t, Vec2 guess) {
  const Frame f = frame_at(sol, t);
  const Vec2 z = invert(sol, f, x, guess).z;
  return lagrangian_velocity(f, sol.spatial_map().sample(z));
}

Vec2 lagrangian_map(const Solution& sol, Vec2 x0, double t) {
  const Vec2 z = invert(sol, x0, 0.0, x0);
  return phi(sol, z, t);
}

}  // namespace qlflow
