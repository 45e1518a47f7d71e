#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace qlflow {

struct SamplePoint {
  double z1 = 0.0;
  double z2 = 0.0;
  double t = 0.0;
};

struct ResidualEntry {
  std::string name;
  double max_abs = 0.0;
  SamplePoint at;
  double tolerance = 0.0;
  bool pass = false;  // max_abs <= tolerance; NaN never passes
};

/// Named max-abs residuals of one check. A report passes when every entry does
/// and at least 90% of the sampled points were evaluable.
struct ResidualReport {
  static constexpr double kMaxExcludedFraction = 0.1;

  std::string check;
  std::vector<ResidualEntry> entries;
  double excluded_fraction = 0.0;

  void add(std::string name, double max_abs, SamplePoint at, double tolerance);
  [[nodiscard]] bool passed() const;
  [[nodiscard]] const ResidualEntry& entry(std::string_view name) const;  // throws std::out_of_range
  [[nodiscard]] std::vector<std::string> failures() const;
};

nlohmann::json to_json(const ResidualReport& r);
nlohmann::json to_json(const std::vector<ResidualReport>& reports);

}  // namespace qlflow
