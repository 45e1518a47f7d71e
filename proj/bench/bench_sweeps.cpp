// Serial reference vs OpenMP sweeps on the figure configurations.
// Usage: qlflow_bench [grid points per axis] [repetitions]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "qlflow/config.hpp"

using namespace qlflow;

namespace {

double seconds(const std::function<void()>& f, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

bool same(const ResidualReport& a, const ResidualReport& b) {
  if (a.entries.size() != b.entries.size() || a.excluded_fraction != b.excluded_fraction) return false;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    const auto &x = a.entries[i], &y = b.entries[i];
    if (x.max_abs != y.max_abs || x.at.z1 != y.at.z1 || x.at.z2 != y.at.z2 || x.at.t != y.at.t) return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 101;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 3;
  std::printf("threads=%d grid=%dx%d nt=11 reps=%d\n", worker_count(), n, n, reps);
  std::printf("%-10s %-22s %12s %12s %8s %s\n", "config", "check", "serial[s]", "parallel[s]", "speedup", "identical");

  bool all_same = true;
  for (int fig = 1; fig <= 4; ++fig) {
    Config cfg = figure_config(fig);
    cfg.grid.n1 = cfg.grid.n2 = n;
    const Solution sol = cfg.build();
    const GridSpec g = cfg.grid;

    using Check = std::function<ResidualReport(Exec)>;
    const std::pair<const char*, Check> checks[] = {
        {"time_invariance", [&](Exec e) { return check_time_invariance(sol, g, {}, e); }},
        {"closed_form", [&](Exec e) { return check_vorticity_closed_form(sol, g, {}, e); }},
        {"inversion", [&](Exec e) { return check_inversion(sol, g, 1e-2, {}, e); }},
    };
    for (const auto& [name, check] : checks) {
      ResidualReport rs, rp;
      const double ts = seconds([&] { rs = check(Exec::Serial); }, reps);
      const double tp = seconds([&] { rp = check(Exec::Parallel); }, reps);
      const bool ok = same(rs, rp);
      all_same = all_same && ok;
      std::printf("%-10s %-22s %12.4f %12.4f %8.2f %s\n", cfg.name.c_str(), name, ts, tp, ts / tp, ok ? "yes" : "NO");
    }
  }
  return all_same ? 0 : 1;
}
