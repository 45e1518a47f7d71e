#include "qlflow/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "qlflow/families.hpp"

namespace qlflow {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

double real_at(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      const Expr e = parse(v.get<std::string>());
      if (e.depends_on(Var::T) || e.depends_on(Var::Z1) || e.depends_on(Var::Z2))
        fail(std::string("'") + key + "' must be a constant");
      return e.evaluate(Env{});
    } catch (const ParseError& err) {
      fail(std::string("'") + key + "': " + err.what());
    } catch (const EvalError& err) {
      fail(std::string("'") + key + "': " + err.what());
    }
  }
  fail(std::string("'") + key + "' must be a number or a constant expression");
}

double required_real(const json& j, const char* key) {
  if (!j.contains(key)) fail(std::string("missing parameter '") + key + "'");
  return real_at(j, key, 0.0);
}

Expr expr_at(const json& j, const char* key, const char* fallback = nullptr) {
  if (!j.contains(key)) {
    if (fallback) return parse(fallback);
    fail(std::string("missing parameter '") + key + "'");
  }
  const json& v = j.at(key);
  if (v.is_number()) return Expr(v.get<double>());
  if (!v.is_string()) fail(std::string("'") + key + "' must be an expression string");
  try {
    return parse(v.get<std::string>());
  } catch (const ParseError& err) {
    fail(std::string("'") + key + "': " + err.what());
  }
}

std::pair<double, double> range_at(const json& j, const char* key, std::pair<double, double> fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail(std::string("'") + key + "' must be [lo, hi]");
  return {v[0].get<double>(), v[1].get<double>()};
}

std::pair<int, int> counts_at(const json& j, const char* key, std::pair<int, int> fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
    fail(std::string("'") + key + "' must be [n1, n2]");
  return {v[0].get<int>(), v[1].get<int>()};
}

Vec2 point_of(const json& v) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) fail("points must be [z1, z2]");
  return {v[0].get<double>(), v[1].get<double>()};
}

const std::vector<std::string> kFamilies{"k2",         "k3",        "elliptic",         "gerstner",
                                         "hyperbolic", "parabolic", "broken-hyperbolic"};

// Parses every expression and constant of the family's schema.
void check_params(const std::string& family, const json& p) {
  if (!p.is_object()) fail("'params' must be an object");
  auto exprs = [&](std::initializer_list<std::pair<const char*, const char*>> keys) {
    for (const auto& [key, fallback] : keys) expr_at(p, key, fallback);
  };
  auto reals = [&](std::initializer_list<const char*> required, std::initializer_list<const char*> optional) {
    for (const char* key : required) required_real(p, key);
    for (const char* key : optional) real_at(p, key, 0.0);
  };
  if (family == "k2") {
    exprs({{"r", "1"}, {"theta", "0"}});
    reals({"e"}, {"c", "a0"});
  } else if (family == "k3") {
    exprs({{"r", "1"}, {"theta", "0"}, {"f", nullptr}});
    reals({}, {"a1_0", "a2_0"});
  } else if (family == "elliptic") {
    exprs({{"f1", nullptr}, {"f2", nullptr}});
    reals({"mu"}, {});
  } else if (family == "gerstner") {
    reals({"kappa", "mu"}, {});
  } else if (family == "hyperbolic" || family == "broken-hyperbolic") {
    exprs({{"f1", "0"}, {"f2", "0"}});
    reals({"c"}, {});
  } else if (family == "parabolic") {
    exprs({{"f1", nullptr}, {"f2", nullptr}});
  }
}

}  // namespace

double TrajectorySpec::time(int k) const { return samples == 1 ? t0 : t0 + (t1 - t0) * k / (samples - 1); }

std::vector<Vec2> seed_lattice(double z1_lo, double z1_hi, double z2_lo, double z2_hi, int n1, int n2) {
  std::vector<Vec2> out;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      out.push_back({n1 == 1 ? z1_lo : z1_lo + (z1_hi - z1_lo) * i / (n1 - 1),
                     n2 == 1 ? z2_lo : z2_lo + (z2_hi - z2_lo) * j / (n2 - 1)});
  return out;
}

Solution Config::build() const {
  const json& p = params;
  Solution sol = [&]() -> Solution {
    if (family == "k2" || family == "k3") {
      TimeRange range{std::min(grid.t0, trajectories.t0), std::max(grid.t1, trajectories.t1)};
      if (field) range = {std::min(range.t0, field->t - 1e-3), std::max(range.t1, field->t + 1e-3)};
      if (family == "k2")
        return make_k2({expr_at(p, "r", "1"), expr_at(p, "theta", "0"), required_real(p, "e"), real_at(p, "c", 0.0),
                        real_at(p, "a0", 0.0)},
                       range);
      return make_k3({expr_at(p, "r", "1"), expr_at(p, "theta", "0"), expr_at(p, "f"), real_at(p, "a1_0", 0.0),
                      real_at(p, "a2_0", 0.0)},
                     range);
    }
    if (family == "elliptic") {
      const LabelBox box{grid.z1_lo, grid.z1_hi, grid.z2_lo, grid.z2_hi};
      return make_elliptic({make_anticr(expr_at(p, "f1"), expr_at(p, "f2"), box), required_real(p, "mu")}, box);
    }
    if (family == "gerstner") return make_gerstner(required_real(p, "kappa"), required_real(p, "mu"));
    if (family == "parabolic") return make_parabolic({expr_at(p, "f1"), expr_at(p, "f2")});
    if (family != "hyperbolic" && family != "broken-hyperbolic") fail("unknown family '" + family + "'");
    const HyperbolicParams hp{required_real(p, "c"), expr_at(p, "f1", "0"), expr_at(p, "f2", "0")};
    return family == "hyperbolic" ? make_hyperbolic(hp) : broken_hyperbolic(hp);
  }();
  return theta0 == 0.0 ? sol : with_rotation(sol, theta0);
}

SuiteOptions Config::suite() const {
  SuiteOptions o;
  o.grid = grid;
  if (field) {
    o.euler_grid = field->grid;
    o.euler.t = field->t;
    o.euler.seed = field->seed;
  }
  return o;
}

Config parse_config(const json& j, const std::string& default_name) {
  if (!j.is_object()) fail("configuration must be a JSON object");
  Config c;
  try {
    c.name = j.value("name", default_name);
    if (!j.contains("family") || !j.at("family").is_string()) fail("missing 'family'");
    c.family = j.at("family").get<std::string>();
    if (std::find(kFamilies.begin(), kFamilies.end(), c.family) == kFamilies.end())
      fail("unknown family '" + c.family + "'");
    c.params = j.value("params", json::object());
    check_params(c.family, c.params);
    c.theta0 = real_at(j, "theta0", 0.0);

    if (j.contains("grid")) {
      const json& g = j.at("grid");
      std::tie(c.grid.z1_lo, c.grid.z1_hi) = range_at(g, "z1", {c.grid.z1_lo, c.grid.z1_hi});
      std::tie(c.grid.z2_lo, c.grid.z2_hi) = range_at(g, "z2", {c.grid.z2_lo, c.grid.z2_hi});
      std::tie(c.grid.n1, c.grid.n2) = counts_at(g, "n", {c.grid.n1, c.grid.n2});
      std::tie(c.grid.t0, c.grid.t1) = range_at(g, "t", {c.grid.t0, c.grid.t1});
      c.grid.nt = g.value("nt", c.grid.nt);
      c.grid.det_floor = g.value("det_floor", c.grid.det_floor);
    }
    c.grid.validate();

    // Default trajectory seeds: 5 x 5 lattice over the label grid.
    c.trajectories.seeds = seed_lattice(c.grid.z1_lo, c.grid.z1_hi, c.grid.z2_lo, c.grid.z2_hi, 5, 5);
    if (j.contains("trajectories")) {
      const json& t = j.at("trajectories");
      if (t.contains("seeds")) {
        c.trajectories.seeds.clear();
        for (const json& s : t.at("seeds")) c.trajectories.seeds.push_back(point_of(s));
      } else if (t.contains("lattice")) {
        const json& l = t.at("lattice");
        const auto [a0, a1] = range_at(l, "z1", {c.grid.z1_lo, c.grid.z1_hi});
        const auto [b0, b1] = range_at(l, "z2", {c.grid.z2_lo, c.grid.z2_hi});
        const auto [n1, n2] = counts_at(l, "n", {5, 5});
        if (n1 < 1 || n2 < 1) fail("lattice counts must be positive");
        c.trajectories.seeds = seed_lattice(a0, a1, b0, b1, n1, n2);
      }
      std::tie(c.trajectories.t0, c.trajectories.t1) = range_at(t, "t", {c.trajectories.t0, c.trajectories.t1});
      c.trajectories.samples = t.value("samples", c.trajectories.samples);
    }
    if (c.trajectories.samples < 1) fail("trajectories.samples must be at least 1");
    if (c.trajectories.seeds.empty()) fail("trajectories need at least one seed");

    if (j.contains("field")) {
      const json& f = j.at("field");
      FieldSpec fs;
      std::tie(fs.grid.x1_lo, fs.grid.x1_hi) = range_at(f, "x1", {fs.grid.x1_lo, fs.grid.x1_hi});
      std::tie(fs.grid.x2_lo, fs.grid.x2_hi) = range_at(f, "x2", {fs.grid.x2_lo, fs.grid.x2_hi});
      std::tie(fs.grid.n1, fs.grid.n2) = counts_at(f, "n", {fs.grid.n1, fs.grid.n2});
      fs.t = real_at(f, "t", 0.0);
      if (f.contains("seed")) fs.seed = point_of(f.at("seed"));
      fs.grid.validate();
      c.field = fs;
    }

    if (j.contains("output")) {
      const json& o = j.at("output");
      c.output_dir = o.value("directory", c.output_dir);
      if (o.contains("formats")) {
        const auto formats = o.at("formats").get<std::vector<std::string>>();
        for (const auto& f : formats)
          if (f != "csv" && f != "json") fail("unknown output format '" + f + "'");
        c.write_csv = std::find(formats.begin(), formats.end(), "csv") != formats.end();
        c.write_json = std::find(formats.begin(), formats.end(), "json") != formats.end();
      }
    }
  } catch (const json::exception& e) {
    fail(std::string("configuration: ") + e.what());
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open configuration '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("'" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j, std::filesystem::path(path).stem().string());
}

Config figure_config(int n) {
  json j;
  switch (n) {
    case 1:
      j = {{"family", "k3"},
           {"params", {{"r", "1"}, {"theta", "sin(t)"}, {"f", "z2^2/2 - z2^3/3 - z2^4/5"}}},
           {"grid", {{"z1", {-1, 1}}, {"z2", {-1, 1}}}},
           {"trajectories", {{"t", {0, 6.283185307179586}}}}};
      break;
    case 2:
      j = {{"family", "elliptic"},
           {"params", {{"f1", "z1^2 - z2^2 + 1/20"}, {"f2", "-2*z1*z2"}, {"mu", 1}}},
           {"theta0", 0.5},
           {"grid", {{"z1", {-0.6, 0.6}}, {"z2", {-0.6, 0.6}}}},
           {"trajectories", {{"t", {0, 6.283185307179586}}}}};
      break;
    case 3:
      j = {{"family", "hyperbolic"},
           {"params", {{"c", 1}, {"f1", "3*cos(3*z1)/(2+2*z1^2)"}, {"f2", "-sin(3*z2/2)/4 + sin(4*z2)/2"}}},
           {"theta0", 0.5},
           {"grid", {{"z1", {-2, 2}}, {"z2", {-2, 2}}}},
           {"trajectories", {{"t", {-2, 2}}}},
           // Preimage lies in z1 in [0.37, 0.54], z2 in [1.47, 1.74], where det(dphi) > 1.
           {"field", {{"x1", {0.1, 0.6}}, {"x2", {1.6, 2.1}}, {"t", 0}, {"seed", {0.45, 1.6}}}}};
      break;
    case 4:
      j = {{"family", "parabolic"},
           {"params", {{"f1", "cos(z1)"}, {"f2", "z1^2 - 20*z1"}}},
           {"theta0", -0.025},
           {"grid", {{"z1", {2, 8}}, {"z2", {-1, 1}}}},
           {"trajectories", {{"t", {-10, 10}}}}};
      break;
    default:
      fail("figure must be 1, 2, 3 or 4, got " + std::to_string(n));
  }
  j["trajectories"]["samples"] = 201;
  return parse_config(j, "figure" + std::to_string(n));
}

}  // namespace qlflow
