#pragma once

#include <stdexcept>
#include <string>

#include "qlflow/kernel.hpp"

namespace qlflow {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Construction-time rejection of a map that does not solve the anti-CR system.
class AntiCRViolation : public std::invalid_argument {
 public:
  AntiCRViolation(double residual, Vec2 at);
  [[nodiscard]] double residual() const { return residual_; }
  [[nodiscard]] Vec2 at() const { return at_; }

 private:
  double residual_;
  Vec2 at_;
};

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_depth = 40;
};

/// Adaptive Simpson integral of a t-expression over [t0, t1].
double quadrature(const Expr& integrand, double t0, double t1, const QuadratureOptions& opts = {});

/// a(t) = a0 + int_0^t integrand; first derivative is the integrand, second its symbolic derivative.
TimeMatrix::Entry integral_entry(const Expr& integrand, double a0);

struct TimeRange {
  double t0 = 0.0;
  double t1 = 6.283185307179586;
};

struct LabelBox {
  double z1_lo = -1.0, z1_hi = 1.0;
  double z2_lo = -1.0, z2_hi = 1.0;
};

/// Validates the anti-CR system at 200 pseudo-random points of `box` (tolerance 1e-9).
AntiCRMap make_anticr(Expr f1, Expr f2, const LabelBox& box = {});

/// Largest anti-CR residual over the 200 validation points; the location goes to `at`.
double anticr_residual(const AntiCRMap& f, const LabelBox& box, Vec2* at = nullptr);

// `valid_on` is the time range on which r(t) >= 1e-9 is enforced.
Solution make_k2(const K2Params& p, const TimeRange& valid_on = {});
Solution make_k3(const K3Params& p, const TimeRange& valid_on = {});
Solution make_elliptic(const EllipticParams& p, const LabelBox& anticr_box = {});
Solution make_gerstner(double kappa, double mu);
Solution make_hyperbolic(const HyperbolicParams& p);
Solution make_parabolic(const ParabolicParams& p);

/// Premultiplies by M(theta0 t); rotations compose additively.
Solution with_rotation(const Solution& sol, double theta0);

/// The Gerstner anti-CR pair (e^{kappa z2}/kappa)(sin(kappa z1), -cos(kappa z1)).
AntiCRMap gerstner_map(double kappa);

}  // namespace qlflow
