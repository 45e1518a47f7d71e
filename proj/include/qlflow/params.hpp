#pragma once

#include <variant>

#include "qlflow/expr.hpp"

namespace qlflow {

enum class Family { K2, K3, Elliptic, Hyperbolic, Parabolic };

const char* family_name(Family f);

/// Kirchhoff-type rank-2 flow, A = M(theta)[[r, r a], [0, e/r]].
struct K2Params {
  Expr r = Expr(1.0);      // r(t) > 0
  Expr theta = Expr(0.0);  // theta(t)
  double e = 1.0;          // det(dphi), nonzero
  double c = 0.0;          // Q_12
  double a0 = 0.0;         // a(0)
};

/// Three-column family, A = M(theta)[[r, r a1, r a2], [0, 1/r, 0]], v = (z1, z2, f(z2)).
struct K3Params {
  Expr r = Expr(1.0);
  Expr theta = Expr(0.0);
  Expr f = Expr(0.0);  // f(z2)
  double a1_0 = 0.0;
  double a2_0 = 0.0;
};

/// Plane map (f1, f2) solving f1_z1 + f2_z2 = 0, f1_z2 - f2_z1 = 0.
/// Build through make_anticr(), which validates the system.
struct AntiCRMap {
  Expr f1;
  Expr f2;
};

struct EllipticParams {
  AntiCRMap f;
  double mu = 1.0;
};

struct HyperbolicParams {
  double c = 1.0;
  Expr f1 = Expr(0.0);  // f1(z1)
  Expr f2 = Expr(0.0);  // f2(z2)
};

struct ParabolicParams {
  Expr f1 = Expr(0.0);  // f1(z1)
  Expr f2 = Expr(0.0);  // f2(z1)
};

struct GerstnerParams {
  double kappa = 1.0;
  double mu = 1.0;
};

using FamilyParams =
    std::variant<K2Params, K3Params, EllipticParams, GerstnerParams, HyperbolicParams, ParabolicParams>;

}  // namespace qlflow
