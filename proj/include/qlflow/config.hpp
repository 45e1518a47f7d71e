#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qlflow/kernel.hpp"
#include "qlflow/verify.hpp"

namespace qlflow {

/// Unreadable, malformed or inconsistent configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrajectorySpec {
  std::vector<Vec2> seeds;
  double t0 = 0.0;
  double t1 = 6.283185307179586;
  int samples = 201;

  [[nodiscard]] double time(int k) const;
};

struct FieldSpec {
  XGrid grid;
  double t = 0.0;
  std::optional<Vec2> seed;
};

/// A family tag, its parameters and the sampling set-up for every command.
///
/// JSON schema:
///   name          string, stem of the output files (defaults to the file stem)
///   family        "k2" | "k3" | "elliptic" | "gerstner" | "hyperbolic" | "parabolic"
///                 | "broken-hyperbolic" (negative control)
///   params        k2: r, theta (t-expressions), e, c, a0
///                 k3: r, theta, f (z2-expression), a1_0, a2_0
///                 elliptic: f1, f2 (z1, z2-expressions), mu
///                 gerstner: kappa, mu
///                 hyperbolic, broken-hyperbolic: c, f1 (z1), f2 (z2)
///                 parabolic: f1 (z1), f2 (z1)
///   theta0        rotation rate, default 0
///   grid          {z1: [lo, hi], z2: [lo, hi], n: [n1, n2], t: [t0, t1], nt, det_floor}
///   trajectories  {seeds: [[z1, z2], ...] or lattice: {z1, z2, n}, t: [t0, t1], samples}
///   field         {x1: [lo, hi], x2: [lo, hi], n: [n1, n2], t, seed: [z1, z2]}
///   output        {directory, formats: ["csv", "json"]}
/// Expressions are strings in the expression grammar; reals may be numbers or strings.
struct Config {
  std::string name = "run";
  std::string family;
  nlohmann::json params = nlohmann::json::object();
  double theta0 = 0.0;
  GridSpec grid;
  TrajectorySpec trajectories;
  std::optional<FieldSpec> field;
  std::string output_dir = ".";
  bool write_csv = true;
  bool write_json = true;

  /// Builds the Solution; throws ConfigError for parse errors, AntiCRViolation for
  /// non-anti-CR maps and InvalidSolution / std::invalid_argument for bad parameters.
  [[nodiscard]] Solution build() const;
  [[nodiscard]] SuiteOptions suite() const;
};

/// Throws ConfigError.
Config parse_config(const nlohmann::json& j, const std::string& default_name = "run");
Config load_config(const std::string& path);

/// Built-in configurations for Figures 1-4.
Config figure_config(int n);

/// n1 x n2 lattice over [z1_lo, z1_hi] x [z2_lo, z2_hi], row-major.
std::vector<Vec2> seed_lattice(double z1_lo, double z1_hi, double z2_lo, double z2_hi, int n1, int n2);

}  // namespace qlflow
