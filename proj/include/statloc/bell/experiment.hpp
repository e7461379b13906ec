#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "statloc/bell/annihilation.hpp"
#include "statloc/bell/lattice.hpp"
#include "statloc/bell/trajectory.hpp"
#include "statloc/bell/vec3.hpp"
#include "statloc/error.hpp"

namespace statloc::bell {

inline constexpr double kSurvivalThreshold = 0.99;

/// Bell experiment on the lightlike lattice: one source emitting a left-moving
/// and a right-moving photon, two detector lines at fixed x, and the
/// annihilation rule.
struct ExperimentSpec {
  DiamondLattice lattice = DiamondLattice::light_cone(4);
  Vertex source{0, 0};
  int left_detector = -1;
  int right_detector = 1;
  Vec3 a_meas = kZAxis;
  Vec3 b_meas = kZAxis;
  double epsilon = 0.01;
  AnnihilationWeight weight = AnnihilationWeight::canonical();
  int pair_left = 0;
  int pair_right = 0;

  PhotonSpec left_photon() const { return {source, Move::left, left_detector, a_meas, pair_left}; }
  PhotonSpec right_photon() const { return {source, Move::right, right_detector, b_meas, pair_right}; }

  ExperimentSpec with_settings(const Vec3& a, const Vec3& b) const {
    ExperimentSpec out = *this;
    out.a_meas = a;
    out.b_meas = b;
    return out;
  }
};

/// Smallest lattice (extent 2) with a measured geometry: one path per photon,
/// four configurations.
inline ExperimentSpec minimal_spec() {
  ExperimentSpec spec;
  spec.lattice = DiamondLattice::light_cone(2);
  return spec;
}

/// Everything except the settings and the annihilation rule.
inline bool same_geometry(const ExperimentSpec& a, const ExperimentSpec& b) {
  return a.lattice == b.lattice && a.source == b.source && a.left_detector == b.left_detector &&
         a.right_detector == b.right_detector && a.epsilon == b.epsilon && a.pair_left == b.pair_left &&
         a.pair_right == b.pair_right;
}

/// (1 - epsilon)^N: chance that a photon crosses N links without switching.
inline double survival_probability(double epsilon, long links) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("epsilon must lie in (0, 1)");
  if (links < 0) throw InputError("link count must be >= 0");
  return std::pow(1.0 - epsilon, static_cast<double>(links));
}

namespace detail {

/// Largest number of links on any lattice path from the photon's source to
/// its first detector crossing; nullopt if the detector line is unreachable.
inline std::optional<int> longest_path_to_detector(const PhotonSpec& photon, const DiamondLattice& lattice) {
  std::vector<Vertex> frontier;
  const Vertex first = photon.source.step(photon.first_move);
  if (!lattice.contains(first)) return std::nullopt;
  frontier.push_back(first);
  std::optional<int> longest;
  while (!frontier.empty()) {
    std::vector<Vertex> next;
    for (const auto& w : frontier) {
      if (w.x() == photon.detector_x) {
        longest = w.t() - photon.source.t();
        continue;
      }
      for (Move m : {Move::left, Move::right}) {
        const Vertex n = w.step(m);
        if (lattice.contains(n)) next.push_back(n);
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
  }
  return longest;
}

}  // namespace detail

/// Structural checks: epsilon range, unit settings, source inside the
/// lattice, detectors on the correct sides and inside the source's causal future.
inline void check_spec(const ExperimentSpec& spec) {
  if (!(spec.epsilon > 0.0 && spec.epsilon < 1.0)) throw SpecError("epsilon must lie in (0, 1)");
  for (const auto* v : {&spec.a_meas, &spec.b_meas}) {
    if (!(std::abs(norm(*v) - 1.0) < 1e-9)) throw SpecError("measurement directions must be unit vectors");
  }
  if (!spec.lattice.contains(spec.source)) throw SpecError("source " + to_string(spec.source) + " is outside the lattice");
  if (!(spec.left_detector < spec.source.x() && spec.source.x() < spec.right_detector)) {
    throw SpecError("detectors must satisfy left_detector < source x < right_detector");
  }
  if (!detail::longest_path_to_detector(spec.left_photon(), spec.lattice)) {
    throw SpecError("left detector at x=" + std::to_string(spec.left_detector) +
                    " is outside the source's future light cone within the lattice");
  }
  if (!detail::longest_path_to_detector(spec.right_photon(), spec.lattice)) {
    throw SpecError("right detector at x=" + std::to_string(spec.right_detector) +
                    " is outside the source's future light cone within the lattice");
  }
}

struct SpecValidation {
  long link_count = 0;
  double survival = 1.0;
  bool survival_warning = false;
  std::vector<std::string> warnings;
};

/// Runs check_spec and evaluates the epsilon bound. N defaults to the longest
/// source-to-detector path in the lattice; callers can supply the link count
/// of a real experiment instead.
inline SpecValidation validate(const ExperimentSpec& spec, std::optional<long> link_count = std::nullopt) {
  check_spec(spec);
  SpecValidation out;
  out.link_count = link_count.value_or(std::max(*detail::longest_path_to_detector(spec.left_photon(), spec.lattice),
                                                *detail::longest_path_to_detector(spec.right_photon(), spec.lattice)));
  out.survival = survival_probability(spec.epsilon, out.link_count);
  out.survival_warning = out.survival < kSurvivalThreshold;
  if (out.survival_warning) {
    out.warnings.push_back("(1 - epsilon)^N = " + std::to_string(out.survival) + " < 0.99 for N = " +
                           std::to_string(out.link_count) + "; switches before measurement are not negligible");
  }
  return out;
}

}  // namespace statloc::bell
