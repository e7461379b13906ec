// One line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "oracles/label_sum.hpp"
#include "statloc/bell/factor_encoding.hpp"
#include "statloc/bell/scene.hpp"
#include "statloc/experiments/campaigns.hpp"

namespace {

using namespace statloc;
namespace ex = statloc::experiments;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bell::ExperimentSpec extent(int n) {
  bell::ExperimentSpec spec;
  spec.lattice = bell::DiamondLattice::light_cone(n);
  return spec;
}

Outcome singlet_law() {
  constexpr double tol = 1e-12;
  double worst = 0.0;
  for (const auto& base : {bell::minimal_spec(), extent(8)}) {
    for (int k = 0; k < 12; ++k) {
      const double theta = k * std::numbers::pi / 12;
      const auto d = bell::outcome_distribution(base.with_settings(bell::kZAxis, bell::setting_in_xz_plane(theta)));
      for (auto [a, b] : bell::kOutcomes) worst = std::max(worst, std::abs(d(a, b) - (1 - a * b * std::cos(theta)) / 4));
    }
  }
  return {worst < tol, "max |P - (1 - ab a.b)/4| = " + fmt("%.2e", worst) + " over 2 lattices x 12 angles, tol 1e-12"};
}

Outcome correlation_curve() {
  const auto report = ex::run_chsh_scan(extent(8), ex::angle_grid(19, 0.0, 10.0));
  double worst_e = 0.0;
  double s = 0.0;
  std::size_t curve = 0;
  for (const auto& c : report.checks) {
    if (c.id.starts_with("E[")) {
      worst_e = std::max(worst_e, std::abs(c.observed - c.expected));
      ++curve;
    } else {
      s = c.observed;
    }
  }
  return {report.passed() && curve == 19,
          std::to_string(curve) + " points, max |E + cos| = " + fmt("%.2e", worst_e) + "; |S| = " + fmt("%.15f", s) +
              " vs 2 sqrt2, tol 1e-9"};
}

Outcome locality() {
  const auto ising = ex::run_locality_audit(ising::IsingModel(4, 4, 0.4), 100, kDefaultSeed);
  const auto bell_report =
      ex::run_locality_audit(extent(6).with_settings(bell::kZAxis, bell::setting_from_degrees(50)), 100, kDefaultSeed);
  const auto passed = [](const ex::CampaignReport& r) { return r.checks.size() - r.failures(); };
  return {ising.passed() && bell_report.passed() && ising.checks.size() == 100 && bell_report.checks.size() == 100,
          "Ising 4x4 " + std::to_string(passed(ising)) + "/100, trajectory lattice " +
              std::to_string(passed(bell_report)) + "/100 within 1e-12 (relative)"};
}

Outcome free_will() {
  double worst = 0.0;
  bool ok = true;
  for (const auto& base : {bell::minimal_spec(), extent(8)}) {
    const auto r = ex::run_free_will_suite(base, ex::chsh_settings(), kDefaultSeed);
    ok = ok && r.passed() && r.checks.size() == 6;
    for (const auto& c : r.checks) worst = std::max(worst, c.observed);
  }
  return {ok, "max pairwise record difference " + fmt("%.2e", worst) + " across 4 CHSH settings, tol 1e-12"};
}

Outcome no_signalling() {
  const auto grid = ex::settings_grid(ex::angle_grid(12));
  const auto canonical = ex::run_no_signalling_suite(extent(6), grid);
  auto spec = extent(6);
  spec.weight = bell::AnnihilationWeight::signalling(0.5);
  const auto signalling = ex::run_no_signalling_suite(spec, grid);
  double observed = 0.0;
  for (const auto& c : signalling.checks) {
    if (c.id == "P_left(+)[a=0,b=0]") observed = c.observed;
  }
  const double expected = oracle::signalling_left_plus(0.5, 1.0);
  const bool ok = canonical.passed() && !signalling.passed() && std::abs(observed - expected) < 1e-12 &&
                  std::abs(expected - 0.75) < 1e-15;
  return {ok, "canonical " + std::to_string(canonical.checks.size()) + " marginals = 1/2 (tol 1e-12); signalling suite " +
                  (signalling.passed() ? "passed" : "failed") + " with P_left(+) = " + fmt("%.15f", observed) +
                  " vs label-sum oracle " + fmt("%.2f", expected)};
}

Outcome signalling_demo() {
  const auto r = ex::run_signalling_demo(extent(6), 0.5,
                                         {ex::settings_from_degrees(0, 0), ex::settings_from_degrees(0, 90),
                                          ex::settings_from_degrees(30, 180)});
  double worst_total = 0.0;
  double min_weight = 1.0;
  for (const auto& c : r.checks) {
    if (c.id.starts_with("total")) worst_total = std::max(worst_total, std::abs(c.observed - 1.0));
    if (c.id.starts_with("min-weight")) min_weight = std::min(min_weight, c.observed);
  }
  return {r.passed(), "lambda 0.5: max |sum P - 1| = " + fmt("%.2e", worst_total) + " (tol 1e-12), min weight " +
                          fmt("%.3e", min_weight) + " >= 0"};
}

Outcome sampler() {
  const auto start = std::chrono::steady_clock::now();
  const ising::IsingModel lattice(3, 3, 0.3);
  const auto first = ex::run_sampler_check(lattice, 1000000, kDefaultSeed, 4, {.workers = 1});
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto second = ex::run_sampler_check(lattice, 1000000, kDefaultSeed, 4, {.workers = 4});
  std::ostringstream a;
  std::ostringstream b;
  ex::write_csv(a, first);
  ex::write_csv(b, second);
  const bool same = a.str() == b.str();
  const double tv = first.checks.front().observed;
  return {first.passed() && same && seconds < 60.0,
          "3x3 C=0.3, 10^6 sweeps: TV = " + fmt("%.5f", tv) + " < 0.01, rerun " + (same ? "identical" : "DIFFERENT") +
              ", runtime " + fmt("%.1f", seconds) + " s < 60 s"};
}

Outcome survival() {
  int cases = 0;
  int wrong = 0;
  for (double eps : {1e-6, 1e-4, 1e-3, 5e-3, 0.01, 0.02, 0.1, 0.5}) {
    for (long n : {0L, 1L, 2L, 5L, 10L, 100L, 1000L}) {
      auto spec = bell::minimal_spec();
      spec.epsilon = eps;
      const bool warned = bell::validate(spec, n).survival_warning;
      double survive = 1.0;
      for (long k = 0; k < n; ++k) survive *= 1.0 - eps;
      // Includes the boundary eps 0.01, N 1 where survival is exactly 0.99.
      const bool expect = survive < 0.99;
      wrong += warned != expect;
      ++cases;
    }
  }
  const double s = bell::survival_probability(1e-6, 1000);
  return {wrong == 0 && s >= 0.999, std::to_string(cases - wrong) + "/" + std::to_string(cases) +
                                        " warnings correct; survival(1e-6, 1000) = " + fmt("%.9f", s) + " >= 0.999"};
}

Outcome forced_annihilation() {
  // Single pair: decoded terminations from the local factor encoding.
  std::size_t positive = 0;
  std::size_t bad = 0;
  const auto spec = extent(6).with_settings(bell::kZAxis, bell::setting_from_degrees(70));
  const bell::TrajectoryFactorModel encoded(spec);
  for (const auto& c : bell::enumerate_trajectories(spec)) {
    const auto config = encoded.encode(c);
    if (config_weight(encoded.model(), config) == 0.0) continue;
    ++positive;
    const auto left = encoded.termination_vertices(config, 0);
    const auto right = encoded.termination_vertices(config, 1);
    bad += !(left.size() == 1 && right.size() == 1 && left.front() == right.front());
  }
  // Two sources: every cross-pair matching must carry zero weight.
  const auto scene = bell::two_source_scene(bell::kZAxis, bell::setting_from_degrees(45), bell::setting_from_degrees(90),
                                            bell::kZAxis);
  std::size_t cross = 0;
  std::size_t cross_positive = 0;
  std::size_t scene_configs = 0;
  for (const auto& c : bell::enumerate_scene(scene)) {
    ++scene_configs;
    bool crossed = false;
    for (const auto& e : c.events) {
      crossed = crossed || scene.photons[e.first].pair_label != scene.photons[e.second].pair_label;
      bad += e.first_path.end() != e.second_path.end();
    }
    if (crossed) {
      ++cross;
      cross_positive += bell::scene_weight(c, scene) != 0.0;
    }
  }
  return {bad == 0 && cross_positive == 0 && positive > 0 && cross > 0,
          std::to_string(positive) + " positive configs with one shared annihilation vertex; " +
              std::to_string(cross_positive) + "/" + std::to_string(cross) + " cross-pair configs of " +
              std::to_string(scene_configs) + " have nonzero weight"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double time_limit;  // seconds; 0 = none
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"singlet-law", 10.0, singlet_law},
      {"correlation-curve-and-chsh", 10.0, correlation_curve},
      {"statistical-locality", 0.0, locality},
      {"free-will", 0.0, free_will},
      {"no-signalling", 0.0, no_signalling},
      {"signalling-demo-consistency", 0.0, signalling_demo},
      {"ising-sampler", 60.0, sampler},
      {"survival-bound", 0.0, survival},
      {"forced-annihilation-and-pair-labels", 0.0, forced_annihilation},
  };
  int failed = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt("%.2f s", seconds);
    if (c.time_limit > 0.0) {
      timing += fmt(" (limit %.0f s)", c.time_limit);
      out.pass = out.pass && seconds < c.time_limit;
    }
    std::printf("%s %d %-36s %s; %s\n", out.pass ? "PASS" : "FAIL", index, c.name, out.detail.c_str(), timing.c_str());
    failed += !out.pass;
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
