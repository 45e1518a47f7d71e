#include "qlflow/report.hpp"

#include <cmath>
#include <stdexcept>

namespace qlflow {

void ResidualReport::add(std::string name, double max_abs, SamplePoint at, double tolerance) {
  const bool pass = max_abs <= tolerance;
  entries.push_back({std::move(name), max_abs, at, tolerance, pass});
}

bool ResidualReport::passed() const {
  if (!(excluded_fraction <= kMaxExcludedFraction)) return false;
  for (const auto& e : entries)
    if (!e.pass) return false;
  return true;
}

const ResidualEntry& ResidualReport::entry(std::string_view name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw std::out_of_range(check + ": no entry named '" + std::string(name) + "'");
}

std::vector<std::string> ResidualReport::failures() const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (!e.pass) out.push_back(check + "." + e.name);
  if (!(excluded_fraction <= kMaxExcludedFraction)) out.push_back(check + ".excluded_fraction");
  return out;
}

nlohmann::json to_json(const ResidualReport& r) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : r.entries) {
    entries.push_back({
        {"name", e.name},
        {"max_abs", std::isfinite(e.max_abs) ? nlohmann::json(e.max_abs) : nlohmann::json(nullptr)},
        {"at", {{"z1", e.at.z1}, {"z2", e.at.z2}, {"t", e.at.t}}},
        {"tol", e.tolerance},
        {"pass", e.pass},
    });
  }
  return {{"check", r.check}, {"entries", std::move(entries)}, {"excluded_fraction", r.excluded_fraction}};
}

nlohmann::json to_json(const std::vector<ResidualReport>& reports) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : reports) out.push_back(to_json(r));
  return out;
}

}  // namespace qlflow
