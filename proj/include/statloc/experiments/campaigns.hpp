#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "statloc/bell/factor_encoding.hpp"
#include "statloc/bell/model.hpp"
#include "statloc/experiments/report.hpp"
#include "statloc/ising.hpp"
#include "statloc/metropolis.hpp"
#include "statloc/parallel.hpp"
#include "statloc/rng.hpp"

namespace statloc::experiments {

inline constexpr double kExactTolerance = 1e-12;
inline constexpr double kTrigTolerance = 1e-9;
inline constexpr double kSamplerTolerance = 0.01;

struct CampaignOptions {
  std::uint64_t cap = kDefaultEnumerationCap;
  std::size_t workers = 1;
};

struct SettingsPair {
  bell::Vec3 a;
  bell::Vec3 b;
  std::string label;
};

inline std::string format_angle(double degrees) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", degrees);
  return buf;
}

inline SettingsPair settings_from_degrees(double a_deg, double b_deg) {
  return {bell::setting_from_degrees(a_deg), bell::setting_from_degrees(b_deg),
          "a=" + format_angle(a_deg) + ",b=" + format_angle(b_deg)};
}

/// The four (a, b) combinations of the optimal coplanar CHSH angles 0/90 and 45/135 degrees.
inline std::vector<SettingsPair> chsh_settings() {
  return {settings_from_degrees(0, 45), settings_from_degrees(0, 135), settings_from_degrees(90, 45),
          settings_from_degrees(90, 135)};
}

/// count angles from `start` in steps of `step` degrees.
inline std::vector<double> angle_grid(std::size_t count, double start = 0.0, double step = 15.0) {
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = start + step * static_cast<double>(k);
  return out;
}

/// Every (a, b) pair drawn from the angle list.
inline std::vector<SettingsPair> settings_grid(const std::vector<double>& angles) {
  std::vector<SettingsPair> out;
  for (double a : angles) {
    for (double b : angles) out.push_back(settings_from_degrees(a, b));
  }
  return out;
}

namespace detail {

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); }
};

inline CampaignReport locality_ising(const ising::IsingModel& lattice, std::size_t trials, std::uint64_t seed,
                                     const CampaignOptions& options) {
  CampaignReport report{"locality-ising", seed};
  if (trials == 0) return report;
  const auto model = ising::as_factor_model(lattice);
  const auto exact = ising::exact_distribution(lattice, {options.cap, options.workers});
  Rng rng(seed);
  const std::size_t w = lattice.width();
  const std::size_t h = lattice.height();
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Configuration b(lattice.site_count());
    for (auto& s : b) s = rng.below(2) ? 1 : -1;
    // Random rectangle of at most 2x2 sites; flip a nonempty subset of it.
    const std::size_t rw = std::min<std::size_t>(1 + rng.below(2), w);
    const std::size_t rh = std::min<std::size_t>(1 + rng.below(2), h);
    const std::size_t c0 = rng.below(w - rw + 1);
    const std::size_t r0 = rng.below(h - rh + 1);
    Region region;
    for (std::size_t r = r0; r < r0 + rh; ++r) {
      for (std::size_t c = c0; c < c0 + rw; ++c) region.sites.push_back(lattice.site(r, c));
    }
    Configuration a = b;
    bool changed = false;
    for (SiteIndex s : region.sites) {
      if (rng.below(2)) {
        a[s] = -a[s];
        changed = true;
      }
    }
    if (!changed) a[region.sites.front()] = -a[region.sites.front()];

    const double global = exact.probability(ising::SpinConfig(a)) / exact.probability(ising::SpinConfig(b));
    const double local = local_ratio(model, a, b, region);
    char id[32];
    std::snprintf(id, sizeof id, "trial-%04zu", trial);
    report.add(make_check(id, global, local, kExactTolerance, Comparison::relative));
  }
  return report;
}

inline CampaignReport locality_bell(const bell::ExperimentSpec& spec, std::size_t trials, std::uint64_t seed,
                                    const CampaignOptions& options) {
  CampaignReport report{"locality-bell", seed};
  if (trials == 0) return report;
  const bell::TrajectoryFactorModel encoded(spec);
  const auto configs = bell::enumerate_trajectories(spec, {options.cap, options.workers});
  std::vector<double> weight(configs.size());
  double z = 0.0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    weight[i] = bell::trajectory_weight(configs[i], spec);
    z += weight[i];
  }
  if (!(z > 0.0)) throw DegenerateModelError("every trajectory configuration has weight 0");
  std::vector<std::size_t> positive;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (weight[i] > 0.0) positive.push_back(i);
  }
  // Partners share the left photon's path and label, so only the right wing differs.
  std::map<std::pair<std::string, int>, std::vector<std::size_t>> by_left;
  for (std::size_t i = 0; i < configs.size(); ++i) by_left[{configs[i].left.moves, configs[i].alpha}].push_back(i);

  Rng rng(seed);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t ib = positive[rng.below(positive.size())];
    const auto& group = by_left.at({configs[ib].left.moves, configs[ib].alpha});
    std::size_t ia = group[rng.below(group.size())];
    if (ia == ib && group.size() > 1) ia = group[(std::find(group.begin(), group.end(), ib) - group.begin() + 1) % group.size()];

    const auto ea = encoded.encode(configs[ia]);
    const auto eb = encoded.encode(configs[ib]);
    const double global = (weight[ia] / z) / (weight[ib] / z);
    const double local = local_ratio(encoded.model(), ea, eb, Region::difference(ea, eb));
    char id[32];
    std::snprintf(id, sizeof id, "trial-%04zu", trial);
    report.add(make_check(id, global, local, kExactTolerance, Comparison::relative));
  }
  return report;
}

}  // namespace detail

using LocalityTarget = std::variant<ising::IsingModel, bell::ExperimentSpec>;

/// `trials` random pairs of configurations that differ on a small region;
/// each local_ratio is compared with the ratio of exact probabilities.
inline CampaignReport run_locality_audit(const LocalityTarget& target, std::size_t trials, std::uint64_t seed,
                                         const CampaignOptions& options = {}) {
  detail::Stopwatch clock;
  auto report = std::visit(
      [&](const auto& t) {
        if constexpr (std::is_same_v<std::decay_t<decltype(t)>, ising::IsingModel>) {
          return detail::locality_ising(t, trials, seed, options);
        } else {
          return detail::locality_bell(t, trials, seed, options);
        }
      },
      target);
  report.runtime_seconds = clock.seconds();
  return report;
}

/// Pairwise comparison of the exact pre-measurement record distributions.
/// All specs must share their geometry; only settings and weight may differ.
inline CampaignReport run_free_will_suite(const std::vector<bell::ExperimentSpec>& specs,
                                          const std::vector<std::string>& labels, std::uint64_t seed,
                                          const CampaignOptions& options = {}) {
  detail::Stopwatch clock;
  CampaignReport report{"free-will", seed};
  for (const auto& s : specs) {
    if (!bell::same_geometry(s, specs.front())) {
      throw SpecError("free-will suite needs every settings pair on the same lattice geometry");
    }
  }
  const auto dists = parallel_map(specs.size(), options.workers, [&](std::size_t k) {
    return bell::pre_measurement_distribution(specs[k], {options.cap, 1});
  });
  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (std::size_t j = i + 1; j < specs.size(); ++j) {
      report.add(make_check("records[" + labels[i] + "]~records[" + labels[j] + "]", 0.0,
                            bell::max_difference(dists[i], dists[j]), kExactTolerance));
    }
  }
  if (!dists.empty()) report.metric("record-count", static_cast<double>(dists.front().size()));
  report.runtime_seconds = clock.seconds();
  return report;
}

inline CampaignReport run_free_will_suite(const bell::ExperimentSpec& base, const std::vector<SettingsPair>& settings,
                                          std::uint64_t seed, const CampaignOptions& options = {}) {
  std::vector<bell::ExperimentSpec> specs;
  std::vector<std::string> labels;
  for (const auto& s : settings) {
    specs.push_back(base.with_settings(s.a, s.b));
    labels.push_back(s.label);
  }
  return run_free_will_suite(specs, labels, seed, options);
}

/// Each single-wing marginal must be 1/2 for every settings pair. Run with a
/// signalling weight the suite is expected to fail.
inline CampaignReport run_no_signalling_suite(const bell::ExperimentSpec& base,
                                              const std::vector<SettingsPair>& settings,
                                              const CampaignOptions& options = {}) {
  detail::Stopwatch clock;
  CampaignReport report{"no-signalling", 0};
  const auto dists = parallel_map(settings.size(), options.workers, [&](std::size_t k) {
    return bell::outcome_distribution(base.with_settings(settings[k].a, settings[k].b), {options.cap, 1});
  });
  for (std::size_t k = 0; k < settings.size(); ++k) {
    report.add(make_check("P_left(+)[" + settings[k].label + "]", 0.5, dists[k].left_marginal(1), kExactTolerance));
    report.add(make_check("P_right(+)[" + settings[k].label + "]", 0.5, dists[k].right_marginal(1), kExactTolerance));
  }
  report.runtime_seconds = clock.seconds();
  return report;
}

/// The signalling annihilation weight delta_ij (1 + lambda alpha b.z) / 4:
/// a normalized, nonnegative global law whose left marginal (1 + lambda b.z) / 2
/// follows the right-hand setting.
inline CampaignReport run_signalling_demo(const bell::ExperimentSpec& base, double lambda,
                                          const std::vector<SettingsPair>& settings,
                                          const CampaignOptions& options = {}) {
  detail::Stopwatch clock;
  CampaignReport report{"signalling-demo", 0};
  bell::ExperimentSpec spec = base;
  spec.weight = bell::AnnihilationWeight::signalling(lambda);

  struct Result {
    double total = 0.0;
    double min_weight = 0.0;
    double left_plus = 0.0;
  };
  auto evaluate = [&](const bell::Vec3& a, const bell::Vec3& b) {
    const auto s = spec.with_settings(a, b);
    const auto configs = bell::enumerate_trajectories(s, {options.cap, 1});
    std::vector<double> w(configs.size());
    double z = 0.0;
    Result r;
    r.min_weight = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < configs.size(); ++i) {
      w[i] = bell::trajectory_weight(configs[i], s);
      r.min_weight = std::min(r.min_weight, w[i]);
      z += w[i];
    }
    if (!(z > 0.0)) throw DegenerateModelError("signalling model has zero partition sum");
    for (std::size_t i = 0; i < configs.size(); ++i) {
      r.total += w[i] / z;
      if (configs[i].alpha > 0) r.left_plus += w[i] / z;
    }
    return r;
  };

  const auto results =
      parallel_map(settings.size(), options.workers, [&](std::size_t k) { return evaluate(settings[k].a, settings[k].b); });
  for (std::size_t k = 0; k < settings.size(); ++k) {
    const auto& label = settings[k].label;
    report.add(make_check("total[" + label + "]", 1.0, results[k].total, kExactTolerance));
    report.add(make_check("min-weight[" + label + "]", 0.0, results[k].min_weight, 0.0, Comparison::lower_bound));
    const double expected = (1.0 + lambda * bell::dot(settings[k].b, bell::kZAxis)) / 2.0;
    report.add(make_check("P_left(+)[" + label + "]", expected, results[k].left_plus, kExactTolerance));
    report.metric("marginal-shift[" + label + "]", results[k].left_plus - 0.5);
  }
  // Right side encodes a bit as b = +z or b = -z; left guesses it from alpha.
  if (!settings.empty()) {
    const auto up = evaluate(settings.front().a, bell::kZAxis);
    const auto down = evaluate(settings.front().a, -1.0 * bell::kZAxis);
    report.metric("signalling-success-probability", 0.5 * up.left_plus + 0.5 * (1.0 - down.left_plus));
  }
  report.runtime_seconds = clock.seconds();
  return report;
}

/// E(theta) for a = z and b at each grid angle against -cos(theta), plus S at
/// the optimal CHSH angles. The largest |S| over grid quadruples is reported
/// as a metric.
inline CampaignReport run_chsh_scan(const bell::ExperimentSpec& base, const std::vector<double>& angles_deg,
                                    const CampaignOptions& options = {}) {
  detail::Stopwatch clock;
  CampaignReport report{"chsh-scan", 0};
  if (angles_deg.empty()) return report;
  const std::size_t n = angles_deg.size();
  const auto e = parallel_map(n * n, options.workers, [&](std::size_t k) {
    return bell::correlation(
        base.with_settings(bell::setting_from_degrees(angles_deg[k / n]), bell::setting_from_degrees(angles_deg[k % n])),
        {options.cap, 1});
  });
  for (std::size_t k = 0; k < n; ++k) {
    const double theta = bell::degrees_to_radians(angles_deg[k]);
    const double observed = bell::correlation(base.with_settings(bell::kZAxis, bell::setting_in_xz_plane(theta)),
                                              {options.cap, options.workers});
    report.add(make_check("E[theta=" + format_angle(angles_deg[k]) + "]", -std::cos(theta), observed, kTrigTolerance));
  }
  const auto deg = bell::setting_from_degrees;
  const double s = bell::chsh(base, deg(0), deg(90), deg(45), deg(135), {options.cap, options.workers});
  report.add(make_check("|S|[a=0,a'=90,b=45,b'=135]", 2.0 * std::numbers::sqrt2, std::abs(s), kTrigTolerance));

  double best = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t a2 = 0; a2 < n; ++a2) {
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t b2 = 0; b2 < n; ++b2) {
          best = std::max(best, std::abs(e[a * n + b] - e[a * n + b2] + e[a2 * n + b] + e[a2 * n + b2]));
        }
      }
    }
  }
  report.metric("max|S|-over-grid", best);
  report.runtime_seconds = clock.seconds();
  return report;
}

/// Pooled single-site Metropolis histogram against the exact distribution.
/// `sweeps` samples in total (one sweep each), split across `chains`.
inline CampaignReport run_sampler_check(const ising::IsingModel& lattice, std::uint64_t sweeps, std::uint64_t seed,
                                        std::size_t chains = 1, const CampaignOptions& options = {}) {
  detail::Stopwatch clock;
  CampaignReport report{"sampler-ising", seed};
  if (sweeps < 1) throw InputError("sampler check needs at least one sweep");
  chains = std::clamp<std::size_t>(chains, 1, sweeps);
  const auto model = ising::as_factor_model(lattice);
  const auto exact = ising::exact_distribution(lattice, {options.cap, options.workers});
  const std::size_t count = exact.size();

  struct ChainResult {
    std::vector<std::uint64_t> histogram;
    double pair_sum = 0.0;
  };
  const auto e0 = lattice.edges().front();
  auto per_chain = parallel_map(chains, options.workers, [&](std::size_t k) {
    ChainResult r;
    r.histogram.assign(count, 0);
    const std::uint64_t n = sweeps / chains + (k < sweeps % chains ? 1 : 0);
    metropolis_sample(
        model, SingleSiteMove{}, Configuration(lattice.site_count(), 1), n, seed,
        [&](const Configuration& c) {
          ++r.histogram[model.index_of(c)];
          r.pair_sum += c[e0.first] * c[e0.second];
        },
        {}, k);
    return r;
  });
  std::vector<std::uint64_t> total(count, 0);
  double pair_sum = 0.0;
  for (const auto& r : per_chain) {
    for (std::size_t i = 0; i < count; ++i) total[i] += r.histogram[i];
    pair_sum += r.pair_sum;
  }
  report.add(make_check("total-variation", 0.0, total_variation(total, exact.probabilities()), kSamplerTolerance));
  report.metric("nn-correlation-exact", ising::two_point_correlation(lattice, exact, e0.first, e0.second));
  report.metric("nn-correlation-sampled", pair_sum / static_cast<double>(sweeps));
  report.runtime_seconds = clock.seconds();
  return report;
}

}  // namespace statloc::experiments
