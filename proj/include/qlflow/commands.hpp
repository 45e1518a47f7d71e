#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "qlflow/config.hpp"

namespace qlflow {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;  // check or runtime failure
inline constexpr int kExitConfig = 2;   // usage or configuration error

struct Invocation {
  std::string command;  // verify | trajectories | field | figure
  std::optional<std::string> config_path;
  std::optional<double> t;
  std::optional<std::string> out_dir;
  std::optional<int> figure;
};

/// Dispatches an invocation; exceptions are mapped to exit codes.
int run(const Invocation& inv, std::ostream& out, std::ostream& err);

int cmd_verify(const Config& cfg, const std::string& out_dir, std::ostream& out, std::ostream& err);
int cmd_trajectories(const Config& cfg, const std::string& out_dir, std::ostream& out, std::ostream& err);
int cmd_field(const Config& cfg, std::optional<double> t, const std::string& out_dir, std::ostream& out,
              std::ostream& err);
/// Verifies the built-in configuration first and writes trajectories only if it passes.
int cmd_figure(int n, const std::string& out_dir, std::ostream& out, std::ostream& err);

/// 17 significant digits.
std::string format_real(double v);

/// particle_id,t,z1,z2,x1,x2 with one row per (seed, time sample).
std::string trajectories_csv(const Solution& sol, const TrajectorySpec& spec);

/// x1,x2,u1,u2,zeta; rows that fail to invert keep x and leave the rest empty.
std::string field_csv(const Solution& sol, const FieldSpec& spec, double t, double* excluded_fraction = nullptr);

}  // namespace qlflow
