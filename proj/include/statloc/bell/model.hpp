#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "statloc/bell/annihilation.hpp"
#include "statloc/bell/experiment.hpp"
#include "statloc/bell/lattice.hpp"
#include "statloc/bell/trajectory.hpp"
#include "statloc/error.hpp"
#include "statloc/factor_model.hpp"

namespace statloc::bell {

/// P(alpha, beta) over the four outcome sign pairs.
struct JointDistribution {
  std::array<double, 4> p{};

  static std::size_t index(int alpha, int beta) { return (alpha > 0 ? 0u : 2u) + (beta > 0 ? 0u : 1u); }

  double operator()(int alpha, int beta) const { return p[index(alpha, beta)]; }
  double& at(int alpha, int beta) { return p[index(alpha, beta)]; }

  double left_marginal(int alpha) const { return (*this)(alpha, 1) + (*this)(alpha, -1); }
  double right_marginal(int beta) const { return (*this)(1, beta) + (*this)(-1, beta); }
  double total() const { return p[0] + p[1] + p[2] + p[3]; }
  /// E = sum over outcomes of alpha beta P(alpha, beta).
  double correlation() const { return p[0] - p[1] - p[2] + p[3]; }
};

inline constexpr std::array<std::pair<int, int>, 4> kOutcomes{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

/// Measured photon paths (detector crossed strictly before the final vertex),
/// grouped by final vertex, each group sorted.
using PathsByEnd = std::map<Vertex, std::vector<std::string>>;

namespace detail {

struct PathSearch {
  const PhotonSpec& photon;
  const DiamondLattice& lattice;
  std::uint64_t cap;
  PathsByEnd out;
  std::uint64_t count = 0;
  std::string moves;

  void extend(const Vertex& at, bool detected) {
    for (Move m : {Move::left, Move::right}) {
      if (moves.empty() && m != photon.first_move) continue;
      const Vertex next = at.step(m);
      if (!lattice.contains(next)) continue;
      moves.push_back(to_char(m));
      if (detected) {
        if (++count > cap) {
          throw CapacityError("photon path count exceeds the enumeration cap of " + std::to_string(cap));
        }
        out[next].push_back(moves);
      }
      extend(next, detected || next.x() == photon.detector_x);
      moves.pop_back();
    }
  }
};

/// Propagation factor of one path: (1 - eps) per straight interior vertex and
/// eps per switch vertex. The source and the final vertex carry no propagation weight.
inline double propagation_weight(const PathAnalysis& path, double epsilon) {
  double w = 1.0;
  for (int k = 0; k < path.straight; ++k) w *= 1.0 - epsilon;
  for (int k = 0; k < path.switches; ++k) w *= epsilon;
  return w;
}

/// Every pair of measured paths that share a final vertex, sorted by moves,
/// with its propagation weight.
struct Geometry {
  PhotonPath left;
  PhotonPath right;
  double propagation = 0.0;
};

}  // namespace detail

inline PathsByEnd measured_paths(const PhotonSpec& photon, const DiamondLattice& lattice,
                                 std::uint64_t cap = kDefaultEnumerationCap) {
  detail::PathSearch search{photon, lattice, cap, {}, 0, {}};
  search.extend(photon.source, false);
  for (auto& [end, list] : search.out) std::sort(list.begin(), list.end());
  return std::move(search.out);
}

namespace detail {

/// Geometries for a pair of photons from possibly different sources, each
/// annihilating at a common vertex after both were measured.
inline std::vector<Geometry> pair_geometries(const PhotonSpec& first, const PhotonSpec& second,
                                             const DiamondLattice& lattice, double epsilon, std::uint64_t cap,
                                             std::uint64_t labelings) {
  const auto a = measured_paths(first, lattice, cap);
  const auto b = measured_paths(second, lattice, cap);
  std::uint64_t count = 0;
  for (const auto& [end, list] : a) {
    auto it = b.find(end);
    if (it == b.end()) continue;
    count += static_cast<std::uint64_t>(list.size()) * it->second.size() * labelings;
    if (count > cap) {
      throw CapacityError("trajectory configuration count exceeds the enumeration cap of " + std::to_string(cap));
    }
  }
  std::vector<Geometry> out;
  out.reserve(count / std::max<std::uint64_t>(labelings, 1));
  for (const auto& [end, list] : a) {
    auto it = b.find(end);
    if (it == b.end()) continue;
    for (const auto& ma : list) {
      const PhotonPath pa{first.source, ma};
      const double wa = propagation_weight(analyze(pa, first.detector_x), epsilon);
      for (const auto& mb : it->second) {
        const PhotonPath pb{second.source, mb};
        out.push_back({pa, pb, wa * propagation_weight(analyze(pb, second.detector_x), epsilon)});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Geometry& x, const Geometry& y) {
    return std::tie(x.left.moves, x.right.moves) < std::tie(y.left.moves, y.right.moves);
  });
  return out;
}

inline std::vector<Geometry> geometries(const ExperimentSpec& spec, std::uint64_t cap) {
  check_spec(spec);
  return pair_geometries(spec.left_photon(), spec.right_photon(), spec.lattice, spec.epsilon, cap, kOutcomes.size());
}

inline AnnihilationEvent event(const ExperimentSpec& spec, int alpha, int beta) {
  return {spec.pair_left, spec.pair_right, alpha, beta, spec.a_meas, spec.b_meas};
}

inline void check_path(const PhotonPath& path, const PhotonSpec& photon, const DiamondLattice& lattice,
                       const char* wing) {
  if (path.start != photon.source) throw InputError(std::string(wing) + " path does not start at the source");
  if (path.moves.empty()) throw InputError(std::string(wing) + " path is empty");
  if (move_from_char(path.moves.front()) != photon.first_move) {
    throw InputError(std::string(wing) + " path leaves the source in the wrong direction");
  }
  for (const auto& w : path.vertices()) {
    if (!lattice.contains(w)) throw InputError(std::string(wing) + " path leaves the lattice at " + to_string(w));
  }
}

}  // namespace detail

/// Every valid configuration in lexicographic order of its text form: each
/// pair of measured paths meeting at a common vertex, crossed with the four
/// outcome labelings.
inline std::vector<TrajectoryConfig> enumerate_trajectories(const ExperimentSpec& spec,
                                                            const EnumerationOptions& options = {}) {
  const auto geoms = detail::geometries(spec, options.cap);
  std::vector<TrajectoryConfig> out;
  out.reserve(geoms.size() * kOutcomes.size());
  for (const auto& g : geoms) {
    for (auto [alpha, beta] : kOutcomes) out.push_back({g.left, g.right, spec.pair_left, spec.pair_right, alpha, beta});
  }
  std::sort(out.begin(), out.end(),
            [](const TrajectoryConfig& a, const TrajectoryConfig& b) { return a.to_string() < b.to_string(); });
  return out;
}

/// Product of vertex weights for one configuration. Zero when the paths do
/// not share a final vertex or a photon is not measured before it.
inline double trajectory_weight(const TrajectoryConfig& config, const ExperimentSpec& spec) {
  detail::check_path(config.left, spec.left_photon(), spec.lattice, "left");
  detail::check_path(config.right, spec.right_photon(), spec.lattice, "right");
  if ((config.alpha != 1 && config.alpha != -1) || (config.beta != 1 && config.beta != -1)) {
    throw InputError("outcome labels must be +1 or -1");
  }
  const auto left = analyze(config.left, spec.left_detector);
  const auto right = analyze(config.right, spec.right_detector);
  if (left.vertices.back() != right.vertices.back()) return 0.0;
  if (!left.measured_before_end() || !right.measured_before_end()) return 0.0;
  const AnnihilationEvent e{config.pair_left, config.pair_right, config.alpha, config.beta, spec.a_meas, spec.b_meas};
  return detail::propagation_weight(left, spec.epsilon) * detail::propagation_weight(right, spec.epsilon) *
         spec.weight(e);
}

/// Normalized outcome law, summed over every enumerated configuration.
inline JointDistribution outcome_distribution(const ExperimentSpec& spec, const EnumerationOptions& options = {}) {
  const auto geoms = detail::geometries(spec, options.cap);
  std::array<double, 4> label_weight{};
  for (auto [alpha, beta] : kOutcomes) label_weight[JointDistribution::index(alpha, beta)] = spec.weight(detail::event(spec, alpha, beta));
  JointDistribution d;
  double z = 0.0;
  for (const auto& g : geoms) {
    for (std::size_t k = 0; k < 4; ++k) {
      const double w = g.propagation * label_weight[k];
      d.p[k] += w;
      z += w;
    }
  }
  if (!(z > 0.0)) {
    throw DegenerateModelError("every trajectory configuration has weight 0 (no annihilation possible)");
  }
  for (double& x : d.p) x /= z;
  return d;
}

/// Geometry and label sums; the partition sum is their product because the
/// propagation weights never read the labels.
struct LabelFactorization {
  double geometry_sum = 0.0;
  double label_sum = 0.0;
  double partition_sum = 0.0;
  JointDistribution label_law;
};

inline LabelFactorization label_factorization(const ExperimentSpec& spec, const EnumerationOptions& options = {}) {
  LabelFactorization out;
  for (const auto& g : detail::geometries(spec, options.cap)) out.geometry_sum += g.propagation;
  for (auto [alpha, beta] : kOutcomes) {
    const double w = spec.weight(detail::event(spec, alpha, beta));
    out.label_law.at(alpha, beta) = w;
    out.label_sum += w;
  }
  for (const auto& c : enumerate_trajectories(spec, options)) out.partition_sum += trajectory_weight(c, spec);
  if (out.label_sum > 0.0) {
    for (double& x : out.label_law.p) x /= out.label_sum;
  }
  return out;
}

inline double correlation(const ExperimentSpec& spec, const EnumerationOptions& options = {}) {
  return outcome_distribution(spec, options).correlation();
}

/// S = E(a,b) - E(a,b') + E(a',b) + E(a',b') on the experiment's geometry.
inline double chsh(const ExperimentSpec& spec, const Vec3& a, const Vec3& a2, const Vec3& b, const Vec3& b2,
                   const EnumerationOptions& options = {}) {
  return correlation(spec.with_settings(a, b), options) - correlation(spec.with_settings(a, b2), options) +
         correlation(spec.with_settings(a2, b), options) + correlation(spec.with_settings(a2, b2), options);
}

/// Projection onto hidden variables located before each detector crossing.
inline PreMeasurementRecord pre_measurement_view(const TrajectoryConfig& config, const ExperimentSpec& spec) {
  detail::check_path(config.left, spec.left_photon(), spec.lattice, "left");
  detail::check_path(config.right, spec.right_photon(), spec.lattice, "right");
  const auto left = analyze(config.left, spec.left_detector);
  const auto right = analyze(config.right, spec.right_detector);
  if (!left.measured_before_end() || !right.measured_before_end() || left.vertices.back() != right.vertices.back()) {
    throw InputError("configuration '" + config.to_string() + "' is not valid for this experiment");
  }
  return {config.left.moves.substr(0, *left.detection), config.right.moves.substr(0, *right.detection),
          config.pair_left, config.pair_right};
}

/// Normalized distribution of pre-measurement records.
inline std::map<PreMeasurementRecord, double> pre_measurement_distribution(const ExperimentSpec& spec,
                                                                          const EnumerationOptions& options = {}) {
  std::map<PreMeasurementRecord, double> out;
  double z = 0.0;
  for (const auto& c : enumerate_trajectories(spec, options)) {
    const double w = trajectory_weight(c, spec);
    out[pre_measurement_view(c, spec)] += w;
    z += w;
  }
  if (!(z > 0.0)) throw DegenerateModelError("every trajectory configuration has weight 0");
  for (auto& [record, p] : out) p /= z;
  return out;
}

/// Largest absolute difference between two record distributions (missing keys count as 0).
inline double max_difference(const std::map<PreMeasurementRecord, double>& a,
                             const std::map<PreMeasurementRecord, double>& b) {
  double worst = 0.0;
  for (const auto& [r, p] : a) {
    auto it = b.find(r);
    worst = std::max(worst, std::abs(p - (it == b.end() ? 0.0 : it->second)));
  }
  for (const auto& [r, p] : b) {
    if (!a.contains(r)) worst = std::max(worst, std::abs(p));
  }
  return worst;
}

}  // namespace statloc::bell
