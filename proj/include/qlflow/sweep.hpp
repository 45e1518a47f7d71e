#pragma once

// Per-point grid kernels. The parallel path distributes points over OpenMP
// threads; the serial path is the reference the tests compare against. Both
// write into a per-point buffer that is reduced serially afterwards, so the
// two produce bit-identical reports.

#include <array>
#include <cstddef>
#include <exception>
#include <limits>
#include <vector>

namespace qlflow {

enum class Exec { Serial, Parallel };

const char* exec_name(Exec e);
int worker_count();

/// One residual at one point, tagged with the time it was observed at.
/// A NaN value marks the point as excluded.
struct Cell {
  double value = std::numeric_limits<double>::quiet_NaN();
  double t = 0.0;
};

template <std::size_t M>
using Row = std::array<Cell, M>;

/// Evaluates fn(i) for i in [0, n). A throwing point is recorded as excluded.
template <std::size_t M, class Fn>
std::vector<Row<M>> sweep_points(std::size_t n, const Fn& fn, Exec exec) {
  std::vector<Row<M>> out(n);
  auto body = [&](std::size_t i) {
    try {
      out[i] = fn(i);
    } catch (const std::exception&) {
      out[i] = Row<M>{};
    }
  };
#ifdef QLFLOW_HAVE_OPENMP
  if (exec == Exec::Parallel) {
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
    return out;
  }
#else
  (void)exec;
#endif
  for (std::size_t i = 0; i < n; ++i) body(i);
  return out;
}

struct MaxAbs {
  double value = std::numeric_limits<double>::quiet_NaN();
  std::size_t index = 0;
  double t = 0.0;
};

template <std::size_t M>
struct Reduction {
  std::array<MaxAbs, M> max{};
  std::size_t excluded = 0;
  std::size_t total = 0;

  [[nodiscard]] double excluded_fraction() const {
    return total == 0 ? 1.0 : static_cast<double>(excluded) / static_cast<double>(total);
  }
};

/// Max |value| per column over rows with no NaN; ties keep the lowest index.
template <std::size_t M>
Reduction<M> reduce_max(const std::vector<Row<M>>& rows) {
  Reduction<M> r;
  r.total = rows.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    bool valid = true;
    for (const Cell& c : rows[i])
      if (c.value != c.value) valid = false;
    if (!valid) {
      ++r.excluded;
      continue;
    }
    for (std::size_t m = 0; m < M; ++m) {
      const double v = rows[i][m].value < 0 ? -rows[i][m].value : rows[i][m].value;
      MaxAbs& best = r.max[m];
      if (best.value != best.value || v > best.value) best = {v, i, rows[i][m].t};
    }
  }
  return r;
}

}  // namespace qlflow
