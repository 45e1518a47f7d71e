#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlflow/expr.hpp"
#include "qlflow/linalg.hpp"
#include "qlflow/params.hpp"

namespace qlflow {

/// Points with |det(dphi)| at or below this are excluded from vorticity and inversion.
inline constexpr double kDetFloor = 1e-6;

class NearSingular : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidSolution : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A(t) and its first two time derivatives at one instant.
struct TimeSample {
  Mat2xK value;
  Mat2xK d1;
  Mat2xK d2;
};

/// The 2 x k time factor A(t) of phi(z, t) = A(t) v(z).
///
/// Each entry is a jet-valued function of t so derivatives are analytic
/// (symbolic or, for quadrature-defined gauge functions, the integrand itself).
/// An optional angle theta(t) premultiplies the entries by M(theta(t)).
class TimeMatrix {
 public:
  using Entry = std::function<Jet(double)>;

  /// `rows` holds 2*k entries in row-major order.
  TimeMatrix(int k, std::vector<Entry> rows, Entry angle = {});

  [[nodiscard]] int k() const { return k_; }
  [[nodiscard]] TimeSample sample(double t) const;

  /// Largest |p_ij| at t; rank(A) = 2 requires this to be nonzero.
  [[nodiscard]] double largest_minor(double t) const;

  static Entry constant(double c);
  /// Entry from a t-expression; derivatives are taken symbolically once.
  static Entry from_expr(const Expr& e);

 private:
  int k_;
  std::vector<Entry> rows_;
  Entry angle_;
};

/// Values and gradients of v at one label point.
struct SpatialSample {
  int k = 0;
  std::array<double, 4> value{};
  std::array<Vec2, 4> grad{};
};

/// v : D -> R^k with symbolic first and second partials cached at construction.
class SpatialMap {
 public:
  explicit SpatialMap(std::vector<Expr> components);

  [[nodiscard]] int k() const { return static_cast<int>(components_.size()); }
  [[nodiscard]] const Expr& component(int i) const { return components_[i]; }
  [[nodiscard]] const Expr& partial(int i, Var v) const;
  /// Second partial of component i; a and b are Z1 or Z2.
  [[nodiscard]] const Expr& partial2(int i, Var a, Var b) const;

  [[nodiscard]] SpatialSample sample(Vec2 z) const;

 private:
  std::vector<Expr> components_;
  std::vector<std::array<Expr, 2>> grad_;
  std::vector<std::array<Expr, 3>> hess_;  // zz11, zz12, zz22
};

/// 2x2 minors indexed with 1-based column numbers, i < j. Stored antisymmetric.
struct Minors {
  int k = 0;
  std::array<std::array<double, 4>, 4> m{};

  [[nodiscard]] double at(int i, int j) const { return m[i - 1][j - 1]; }
  void set(int i, int j, double value) {
    m[i - 1][j - 1] = value;
    m[j - 1][i - 1] = -value;
  }
};

/// A separated-variables flow phi(z, t) = M(theta0 t) A(t) v(z).
class Solution {
 public:
  Solution(Family family, TimeMatrix a, SpatialMap v, Expr det_closed, Expr zeta_closed,
           FamilyParams params, double theta0 = 0.0);

  [[nodiscard]] Family family() const { return family_; }
  [[nodiscard]] const TimeMatrix& time_matrix() const { return a_; }
  [[nodiscard]] const SpatialMap& spatial_map() const { return v_; }
  [[nodiscard]] double theta0() const { return theta0_; }
  [[nodiscard]] const Expr& det_closed() const { return det_closed_; }
  /// Closed-form vorticity of the unrotated flow.
  [[nodiscard]] const Expr& zeta_closed() const { return zeta_closed_; }
  [[nodiscard]] const FamilyParams& params() const { return params_; }

  /// zeta_closed(z) + 2 theta0.
  [[nodiscard]] double predicted_vorticity(Vec2 z) const;
  [[nodiscard]] double predicted_det(Vec2 z) const;

  [[nodiscard]] Solution with_theta0(double theta0) const;

 private:
  Family family_;
  TimeMatrix a_;
  SpatialMap v_;
  Expr det_closed_;
  Expr zeta_closed_;
  FamilyParams params_;
  double theta0_;
};

/// B(t) = M(theta0 t) A(t) with first and second derivatives; everything the
/// point kernels need at a fixed time.
struct Frame {
  double t = 0.0;
  Mat2xK b;
  Mat2xK db;
  Mat2xK ddb;
};

Frame frame_at(const Solution& sol, double t);

// Point kernels on a precomputed frame. Grid sweeps use these directly.
Vec2 phi(const Frame& f, const SpatialSample& s);
Mat2 phi_jacobian(const Frame& f, const SpatialSample& s);
Mat2 phi_jacobian_rate(const Frame& f, const SpatialSample& s);
double h_value(const Frame& f, const SpatialSample& s);
Vec2 lagrangian_velocity(const Frame& f, const SpatialSample& s);

Minors time_minors_p(const Mat2xK& a);
Minors time_minors_Q(const Mat2xK& a, const Mat2xK& da);
Minors time_minors_q(const Mat2xK& a, const Mat2xK& dda);
Minors spatial_minors(const SpatialSample& s);

/// sum_{i<j} p_ij g_ij.
double minor_pairing(const Minors& p, const Minors& g);

// Public API on (solution, label, time).
Vec2 phi(const Solution& sol, Vec2 z, double t);
Mat2 phi_jacobian(const Solution& sol, Vec2 z, double t);
Minors spatial_minors(const SpatialMap& v, Vec2 z);
Minors time_minors_p(const TimeMatrix& a, double t);
Minors time_minors_Q(const TimeMatrix& a, double t);
Minors time_minors_q(const TimeMatrix& a, double t);

/// |p12 p34 - p13 p24 + p14 p23|; throws std::invalid_argument unless k == 4.
double pluecker_residual(const Minors& p);

/// |det(dphi) - sum p_ij g_ij| with p_ij taken from M(theta0 t) A(t).
double cauchy_binet_residual(const Solution& sol, Vec2 z, double t);

double h_value(const Solution& sol, Vec2 z, double t);

/// h / det(dphi); throws NearSingular when |det| <= kDetFloor.
double vorticity(const Solution& sol, Vec2 z, double t);

Vec2 lagrangian_velocity(const Solution& sol, Vec2 z, double t);

struct NewtonOptions {
  double tolerance = 1e-12;  // on |phi(z) - x|_inf
  int max_iter = 50;
  double det_floor = kDetFloor;
};

struct InvertResult {
  Vec2 z;
  int iterations = 0;
  double residual = 0.0;
};

/// Solves phi(z, t) = x by Newton iteration from `guess`.
/// Throws NoConvergence or NearSingular.
InvertResult invert(const Solution& sol, const Frame& frame, Vec2 x, Vec2 guess,
                    const NewtonOptions& opts = {});
Vec2 invert(const Solution& sol, Vec2 x, double t, Vec2 guess, const NewtonOptions& opts = {});
inline Vec2 invert(const Solution& sol, Vec2 x, double t) { return invert(sol, x, t, x); }

Vec2 eulerian_velocity(const Solution& sol, Vec2 x, double t, Vec2 guess);
inline Vec2 eulerian_velocity(const Solution& sol, Vec2 x, double t) {
  return eulerian_velocity(sol, x, t, x);
}

/// Phi^t = phi^t o (phi^0)^-1.
Vec2 lagrangian_map(const Solution& sol, Vec2 x0, double t);

}  // namespace qlflow
