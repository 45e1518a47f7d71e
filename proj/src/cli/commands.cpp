#include "qlflow/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>

#include "qlflow/families.hpp"

namespace qlflow {
namespace {

namespace fs = std::filesystem;

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const ParseError& e) {
    err << "parse error at position " << e.position() << ": " << e.what() << '\n';
  } catch (const AntiCRViolation& e) {
    err << "rejected: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitConfig;
}

std::string write_file(const std::string& dir, const std::string& name, const std::string& body) {
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream f(path, std::ios::binary);
  f << body;
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  return path.string();
}

nlohmann::json report_document(const Config& cfg, const std::vector<ResidualReport>& reports) {
  return {{"name", cfg.name}, {"family", cfg.family}, {"pass", all_passed(reports)}, {"reports", to_json(reports)}};
}

void summarize(const std::vector<ResidualReport>& reports, std::ostream& out) {
  for (const auto& r : reports) {
    out << (r.passed() ? "PASS " : "FAIL ") << r.check;
    for (const auto& name : r.failures()) out << ' ' << name;
    out << '\n';
  }
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectories_csv(const Solution& sol, const TrajectorySpec& spec) {
  std::vector<Frame> frames;
  for (int k = 0; k < spec.samples; ++k) frames.push_back(frame_at(sol, spec.time(k)));
  std::string out = "particle_id,t,z1,z2,x1,x2\n";
  for (std::size_t id = 0; id < spec.seeds.size(); ++id) {
    const Vec2 z = spec.seeds[id];
    const SpatialSample s = sol.spatial_map().sample(z);
    for (const Frame& f : frames) {
      const Vec2 x = phi(f, s);
      out += std::to_string(id) + ',' + format_real(f.t) + ',' + format_real(z.x) + ',' + format_real(z.y) + ',' +
             format_real(x.x) + ',' + format_real(x.y) + '\n';
    }
  }
  return out;
}

std::string field_csv(const Solution& sol, const FieldSpec& spec, double t, double* excluded_fraction) {
  const Frame frame = frame_at(sol, t);
  const auto labels = invert_grid(sol, frame, spec.grid, spec.seed);
  std::string out = "x1,x2,u1,u2,zeta\n";
  std::size_t excluded = 0;
  for (std::size_t p = 0; p < labels.size(); ++p) {
    const Vec2 x = spec.grid.point(p);
    out += format_real(x.x) + ',' + format_real(x.y) + ',';
    if (labels[p]) {
      const SpatialSample s = sol.spatial_map().sample(*labels[p]);
      const double det = phi_jacobian(frame, s).det();
      if (std::fabs(det) > kDetFloor) {
        const Vec2 u = lagrangian_velocity(frame, s);
        out += format_real(u.x) + ',' + format_real(u.y) + ',' + format_real(h_value(frame, s) / det) + '\n';
        continue;
      }
    }
    ++excluded;
    out += ",,\n";
  }
  if (excluded_fraction) *excluded_fraction = static_cast<double>(excluded) / static_cast<double>(labels.size());
  return out;
}

int cmd_verify(const Config& cfg, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  return guarded([&] {
    const Solution sol = cfg.build();
    const auto reports = run_suite(sol, cfg.suite());
    summarize(reports, out);
    if (cfg.write_json)
      out << "report: " << write_file(out_dir, cfg.name + "_report.json", report_document(cfg, reports).dump(2) + "\n")
          << '\n';
    return all_passed(reports) ? kExitPass : kExitFailure;
  }, err);
}

int cmd_trajectories(const Config& cfg, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  return guarded([&] {
    const std::string csv = trajectories_csv(cfg.build(), cfg.trajectories);
    if (cfg.write_csv)
      out << "trajectories: " << write_file(out_dir, cfg.name + "_trajectories.csv", csv) << '\n';
    return kExitPass;
  }, err);
}

int cmd_field(const Config& cfg, std::optional<double> t, const std::string& out_dir, std::ostream& out,
              std::ostream& err) {
  return guarded([&] {
    if (!cfg.field) throw ConfigError("the field command needs a 'field' section");
    double excluded = 0.0;
    const std::string csv = field_csv(cfg.build(), *cfg.field, t.value_or(cfg.field->t), &excluded);
    if (cfg.write_csv) out << "field: " << write_file(out_dir, cfg.name + "_field.csv", csv) << '\n';
    if (excluded > ResidualReport::kMaxExcludedFraction) {
      err << "field: " << format_real(excluded) << " of the points could not be inverted\n";
      return kExitFailure;
    }
    return kExitPass;
  }, err);
}

int cmd_figure(int n, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  return guarded([&] {
    const Config cfg = figure_config(n);
    const Solution sol = cfg.build();
    const auto reports = run_suite(sol, cfg.suite());
    summarize(reports, out);
    out << "report: " << write_file(out_dir, cfg.name + "_report.json", report_document(cfg, reports).dump(2) + "\n")
        << '\n';
    if (!all_passed(reports)) {
      err << cfg.name << ": verification failed, no trajectory data written\n";
      return kExitFailure;
    }
    const std::string csv = trajectories_csv(sol, cfg.trajectories);
    out << "trajectories: " << write_file(out_dir, cfg.name + "_trajectories.csv", csv) << '\n';
    return kExitPass;
  }, err);
}

int run(const Invocation& inv, std::ostream& out, std::ostream& err) {
  if (inv.command == "figure") {
    if (!inv.figure) {
      err << "figure needs --figure N\n";
      return kExitConfig;
    }
    return cmd_figure(*inv.figure, inv.out_dir.value_or("."), out, err);
  }
  if (inv.command != "verify" && inv.command != "trajectories" && inv.command != "field") {
    err << "unknown command '" << inv.command << "'\n";
    return kExitConfig;
  }
  if (!inv.config_path) {
    err << inv.command << " needs --config PATH\n";
    return kExitConfig;
  }
  Config cfg;
  try {
    cfg = load_config(*inv.config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  const std::string dir = inv.out_dir.value_or(cfg.output_dir);
  if (inv.command == "verify") return cmd_verify(cfg, dir, out, err);
  if (inv.command == "trajectories") return cmd_trajectories(cfg, dir, out, err);
  return cmd_field(cfg, inv.t, dir, out, err);
}

}  // namespace qlflow
