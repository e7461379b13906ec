#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace statloc::experiments {

/// How `observed` is compared with `expected`.
enum class Comparison {
  absolute,     // |observed - expected| <= tolerance
  relative,     // |observed - expected| <= tolerance * max(1, |expected|)
  lower_bound,  // observed >= expected - tolerance
};

inline const char* to_string(Comparison c) {
  switch (c) {
    case Comparison::absolute: return "abs";
    case Comparison::relative: return "rel";
    case Comparison::lower_bound: return "min";
  }
  return "?";
}

struct CheckRecord {
  std::string id;
  double expected = 0.0;
  double observed = 0.0;
  double tolerance = 0.0;
  Comparison comparison = Comparison::absolute;
  bool pass = false;
};

inline CheckRecord make_check(std::string id, double expected, double observed, double tolerance,
                              Comparison comparison = Comparison::absolute) {
  CheckRecord r{std::move(id), expected, observed, tolerance, comparison, false};
  const double dev = std::abs(observed - expected);
  switch (comparison) {
    case Comparison::absolute: r.pass = dev <= tolerance; break;
    case Comparison::relative: r.pass = dev <= tolerance * std::max(1.0, std::abs(expected)); break;
    case Comparison::lower_bound: r.pass = observed >= expected - tolerance; break;
  }
  return r;
}

/// A reported quantity that has no pass/fail bound.
struct Metric {
  std::string name;
  double value = 0.0;
};

struct CampaignReport {
  CampaignReport() = default;
  CampaignReport(std::string name, std::uint64_t seed_value) : campaign(std::move(name)), seed(seed_value) {}

  std::string campaign;
  std::uint64_t seed = 0;
  std::vector<CheckRecord> checks;
  std::vector<Metric> metrics;
  double runtime_seconds = 0.0;  // shown in the summary only; serialized output stays reproducible

  bool passed() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& c : checks) n += !c.pass;
    return n;
  }
  void add(CheckRecord r) { checks.push_back(std::move(r)); }
  void metric(std::string name, double value) { metrics.push_back({std::move(name), value}); }
};

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline constexpr const char* kCsvHeader = "campaign,check,kind,expected,observed,tolerance,pass";

/// Frozen column order (kCsvHeader). Metrics appear as kind "metric" with
/// the value in `observed` and the other numeric columns empty.
inline void write_csv(std::ostream& out, const CampaignReport& report, bool header = true) {
  if (header) out << kCsvHeader << '\n';
  for (const auto& c : report.checks) {
    out << report.campaign << ',' << c.id << ',' << to_string(c.comparison) << ',' << format_number(c.expected) << ','
        << format_number(c.observed) << ',' << format_number(c.tolerance) << ',' << (c.pass ? "true" : "false")
        << '\n';
  }
  for (const auto& m : report.metrics) {
    out << report.campaign << ',' << m.name << ",metric,," << format_number(m.value) << ",,\n";
  }
}

inline nlohmann::ordered_json to_json(const CampaignReport& report) {
  nlohmann::ordered_json j;
  j["campaign"] = report.campaign;
  j["seed"] = report.seed;
  j["passed"] = report.passed();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    j["checks"].push_back({{"check", c.id},
                           {"kind", to_string(c.comparison)},
                           {"expected", c.expected},
                           {"observed", c.observed},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass}});
  }
  j["metrics"] = nlohmann::ordered_json::array();
  for (const auto& m : report.metrics) j["metrics"].push_back({{"name", m.name}, {"value", m.value}});
  return j;
}

inline void write_json(std::ostream& out, const CampaignReport& report) { out << to_json(report).dump(2) << '\n'; }

/// Human-readable table; failing rows are listed first-come.
inline void write_summary(std::ostream& out, const CampaignReport& report) {
  char line[256];
  std::snprintf(line, sizeof line, "campaign %s  seed %llu  checks %zu  failed %zu  runtime %.3f s\n",
                report.campaign.c_str(), static_cast<unsigned long long>(report.seed), report.checks.size(),
                report.failures(), report.runtime_seconds);
  out << line;
  for (const auto& c : report.checks) {
    std::snprintf(line, sizeof line, "  %-4s %-40s expected %-22.15g observed %-22.15g tol %.1e (%s)\n",
                  c.pass ? "ok" : "FAIL", c.id.c_str(), c.expected, c.observed, c.tolerance, to_string(c.comparison));
    out << line;
  }
  for (const auto& m : report.metrics) {
    std::snprintf(line, sizeof line, "  %-4s %-40s value %.15g\n", "--", m.name.c_str(), m.value);
    out << line;
  }
}

}  // namespace statloc::experiments
