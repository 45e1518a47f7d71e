#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qlflow/families.hpp"
#include "qlflow/kernel.hpp"
#include "qlflow/report.hpp"
#include "qlflow/sweep.hpp"

namespace qlflow {

/// Label grid z in [z1_lo, z1_hi] x [z2_lo, z2_hi] (n1 x n2 points) and nt times in [t0, t1].
struct GridSpec {
  double z1_lo = -1.0, z1_hi = 1.0;
  double z2_lo = -1.0, z2_hi = 1.0;
  int n1 = 21, n2 = 21;
  double t0 = 0.0, t1 = 2.0;
  int nt = 11;
  double det_floor = kDetFloor;

  /// Throws std::invalid_argument unless n1, n2, nt >= 3 and the ranges are nondegenerate.
  void validate() const;
  [[nodiscard]] std::size_t points() const { return static_cast<std::size_t>(n1) * n2; }
  /// Point index p = i * n2 + j.
  [[nodiscard]] Vec2 point(std::size_t p) const;
  [[nodiscard]] double time(int k) const;
  [[nodiscard]] std::vector<double> times() const;
};

/// Eulerian sample grid in physical coordinates.
struct XGrid {
  double x1_lo = -1.0, x1_hi = 1.0;
  double x2_lo = -1.0, x2_hi = 1.0;
  int n1 = 15, n2 = 15;

  void validate() const;
  [[nodiscard]] std::size_t points() const { return static_cast<std::size_t>(n1) * n2; }
  [[nodiscard]] Vec2 point(std::size_t p) const;
};

struct Tolerances {
  double drift = 1e-8;
  double zeta_closed = 1e-8;
  double det_closed = 1e-9;
  double cauchy_binet = 1e-10;
  double pluecker = 1e-12;
  double constraint = 1e-10;
  double minor_constancy = 1e-9;
  double pde = 1e-5;
  double inverse_affine = 1e-8;
  double euler = 1e-4;
  double rotation = 1e-10;
  double anticr = 1e-9;
  double inversion = 1e-10;
};

ResidualReport check_time_invariance(const Solution& sol, const GridSpec& grid,
                                     const Tolerances& tol = {}, Exec exec = Exec::Parallel);

enum class ConstraintCase { Case1, Case2, Case3 };

/// Throws std::invalid_argument unless v has four components.
ResidualReport check_constraints(const SpatialMap& v, ConstraintCase c, const GridSpec& grid,
                                 const Tolerances& tol = {}, Exec exec = Exec::Parallel);

/// The family's constant p/Q combinations, sampled at `times` at the origin label.
ResidualReport check_minor_constancy(const Solution& sol, const std::vector<double>& times,
                                     const Tolerances& tol = {});

ResidualReport check_vorticity_closed_form(const Solution& sol, const GridSpec& grid,
                                           const Tolerances& tol = {}, Exec exec = Exec::Parallel);

enum class PdeKind { Elliptic, Hyperbolic, Parabolic };
using ScalarField = std::function<double(Vec2)>;

/// Residual of
///   elliptic:   zeta (2 nu + zeta) lap zeta - 2 (nu + zeta) |grad zeta|^2
///   hyperbolic: (zeta^2 + 4 c^2) zeta_12 - 2 zeta zeta_1 zeta_2
///   parabolic:  zeta zeta_22 - 2 zeta_2^2, plus the z2 second difference of 1/zeta
/// with central differences of step fd_step at interior grid points, normalized by
/// (1 + |zeta|^3). `param` is nu or c; unused for parabolic.
ResidualReport check_vorticity_pde(PdeKind kind, double param, const ScalarField& zeta,
                                   const GridSpec& grid, double fd_step = 1e-3,
                                   const Tolerances& tol = {}, Exec exec = Exec::Parallel);

enum class PdeDerivatives { FiniteDifference, Symbolic };

/// Same, on the family's closed-form zeta, with either central differences (stencils touching
/// or straddling |det| <= det_floor are excluded) or exact derivatives of the expression.
/// Throws std::invalid_argument for K2/K3.
ResidualReport check_vorticity_pde(const Solution& sol, const GridSpec& grid,
                                   PdeDerivatives how = PdeDerivatives::Symbolic, double fd_step = 1e-3,
                                   const Tolerances& tol = {}, Exec exec = Exec::Parallel);

struct EulerOptions {
  double t = 0.0;
  double fd_x = 1e-4;
  double fd_t = 1e-4;
  /// Initial guess for the first grid point; later points warm-start from a solved neighbor.
  std::optional<Vec2> seed;
};

/// Labels of every x-grid point at `frame`, warm-started from a solved neighbour (the first
/// point starts from `seed`, or from x itself). nullopt where inversion fails.
std::vector<std::optional<Vec2>> invert_grid(const Solution& sol, const Frame& frame, const XGrid& grid,
                                             std::optional<Vec2> seed = std::nullopt);

/// div u, curl(u_t + (u.grad)u), zeta_t + u.grad zeta and curl u - zeta, all by central
/// differences on inverted labels.
ResidualReport check_euler_eulerian(const Solution& sol, const XGrid& xgrid, const EulerOptions& opts = {},
                                    const Tolerances& tol = {}, Exec exec = Exec::Parallel);

/// vorticity(with_rotation(sol, theta0)) - vorticity(sol) - 2 theta0.
ResidualReport check_rotation_shift(const Solution& sol, double theta0, const GridSpec& grid,
                                    const Tolerances& tol = {}, Exec exec = Exec::Parallel);

ResidualReport check_anticr(const AntiCRMap& f, const GridSpec& grid, const Tolerances& tol = {},
                            Exec exec = Exec::Parallel);

/// Cauchy-Binet on every family; Pluecker when k = 4.
ResidualReport check_identities(const Solution& sol, const GridSpec& grid, const Tolerances& tol = {},
                                Exec exec = Exec::Parallel);

/// |invert(phi(z, t)) - z| from a guess offset by offset * min(1, |det|) in both components.
ResidualReport check_inversion(const Solution& sol, const GridSpec& grid, double offset = 1e-2,
                               const Tolerances& tol = {}, Exec exec = Exec::Parallel);

/// Hyperbolic A with c t^2 in place of c t in the e^{+ct} entries. Not a solution.
Solution broken_hyperbolic(const HyperbolicParams& p);

struct SuiteOptions {
  GridSpec grid;
  std::optional<XGrid> euler_grid;
  EulerOptions euler;
  PdeDerivatives pde_derivatives = PdeDerivatives::Symbolic;
  double pde_fd_step = 1e-3;
  Tolerances tol;
  Exec exec = Exec::Parallel;
};

/// Every check that applies to the solution's family.
std::vector<ResidualReport> run_suite(const Solution& sol, const SuiteOptions& opts);

bool all_passed(const std::vector<ResidualReport>& reports);

}  // namespace qlflow
