#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "statloc/bell/annihilation.hpp"
#include "statloc/bell/lattice.hpp"
#include "statloc/bell/model.hpp"
#include "statloc/bell/trajectory.hpp"
#include "statloc/factor_model.hpp"

namespace statloc::bell {

/// Several photons, possibly from different sources, each measured on its
/// own detector line. Used to check that the pair label restricts
/// annihilation to photons from the same source.
struct Scene {
  DiamondLattice lattice;
  std::vector<PhotonSpec> photons;
  double epsilon = 0.01;
  AnnihilationWeight weight = AnnihilationWeight::canonical();
};

/// One annihilation event: photons `first` and `second` meet at the common
/// final vertex of their paths.
struct Annihilation {
  std::size_t first = 0;
  std::size_t second = 0;
  PhotonPath first_path;
  PhotonPath second_path;
  int first_label = 1;
  int second_label = 1;
};

/// Every photon annihilates exactly once: a perfect matching of the photons
/// together with the paths and outcome labels of each matched pair.
struct SceneConfig {
  std::vector<Annihilation> events;
};

/// Two sources, each emitting one left- and one right-moving photon with its
/// own pair label: source 0 at x=0, t=0 (detectors at x=-1, x=1) and
/// source 1 at x=3, t=3 (detectors at x=2, x=4).
inline Scene two_source_scene(const Vec3& a0, const Vec3& b0, const Vec3& a1, const Vec3& b1, int extent = 7) {
  Scene scene;
  scene.lattice = {extent, extent, extent};
  const Vertex s0{0, 0};
  const Vertex s1{3, 0};
  scene.photons = {{s0, Move::left, -1, a0, 0},
                   {s0, Move::right, 1, b0, 0},
                   {s1, Move::left, 2, a1, 1},
                   {s1, Move::right, 4, b1, 1}};
  return scene;
}

namespace detail {

inline void perfect_matchings(std::vector<std::size_t>& remaining, std::vector<std::pair<std::size_t, std::size_t>>& current,
                              std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& out) {
  if (remaining.empty()) {
    out.push_back(current);
    return;
  }
  const std::size_t head = remaining.front();
  for (std::size_t k = 1; k < remaining.size(); ++k) {
    const std::size_t partner = remaining[k];
    std::vector<std::size_t> rest;
    for (std::size_t j = 1; j < remaining.size(); ++j) {
      if (j != k) rest.push_back(remaining[j]);
    }
    current.emplace_back(head, partner);
    perfect_matchings(rest, current, out);
    current.pop_back();
  }
}

}  // namespace detail

/// All perfect matchings of the photon indices, each pair as (lower, higher).
inline std::vector<std::vector<std::pair<std::size_t, std::size_t>>> perfect_matchings(std::size_t photons) {
  if (photons % 2 != 0) throw InputError("a perfect matching needs an even number of photons");
  std::vector<std::size_t> all(photons);
  for (std::size_t i = 0; i < photons; ++i) all[i] = i;
  std::vector<std::pair<std::size_t, std::size_t>> current;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out;
  detail::perfect_matchings(all, current, out);
  return out;
}

/// Every scene configuration: each perfect matching crossed with every
/// geometry and labeling of each matched pair.
inline std::vector<SceneConfig> enumerate_scene(const Scene& scene, std::uint64_t cap = kDefaultEnumerationCap) {
  std::vector<SceneConfig> out;
  for (const auto& matching : perfect_matchings(scene.photons.size())) {
    std::vector<std::vector<Annihilation>> options;
    std::uint64_t combos = 1;
    for (auto [i, j] : matching) {
      std::vector<Annihilation> pair_options;
      for (const auto& g : detail::pair_geometries(scene.photons[i], scene.photons[j], scene.lattice, scene.epsilon,
                                                   cap, kOutcomes.size())) {
        for (auto [a, b] : kOutcomes) pair_options.push_back({i, j, g.left, g.right, a, b});
      }
      combos *= pair_options.size();
      if (combos > cap || out.size() + combos > cap) {
        throw CapacityError("scene configuration count exceeds the enumeration cap of " + std::to_string(cap));
      }
      options.push_back(std::move(pair_options));
    }
    if (combos == 0) continue;
    std::vector<std::size_t> digit(options.size(), 0);
    while (true) {
      SceneConfig c;
      for (std::size_t k = 0; k < options.size(); ++k) c.events.push_back(options[k][digit[k]]);
      out.push_back(std::move(c));
      std::size_t k = options.size();
      while (k > 0 && ++digit[k - 1] == options[k - 1].size()) digit[--k] = 0;
      if (k == 0) break;
    }
  }
  return out;
}

/// Product over annihilation events of both photons' propagation weights and
/// the annihilation weight with the two photons' pair labels.
inline double scene_weight(const SceneConfig& config, const Scene& scene) {
  double w = 1.0;
  for (const auto& e : config.events) {
    const auto& p = scene.photons.at(e.first);
    const auto& q = scene.photons.at(e.second);
    detail::check_path(e.first_path, p, scene.lattice, "first");
    detail::check_path(e.second_path, q, scene.lattice, "second");
    const auto a = analyze(e.first_path, p.detector_x);
    const auto b = analyze(e.second_path, q.detector_x);
    if (a.vertices.back() != b.vertices.back() || !a.measured_before_end() || !b.measured_before_end()) return 0.0;
    const AnnihilationEvent ev{p.pair_label, q.pair_label, e.first_label, e.second_label, p.setting, q.setting};
    w *= detail::propagation_weight(a, scene.epsilon) * detail::propagation_weight(b, scene.epsilon) * scene.weight(ev);
  }
  return w;
}

}  // namespace statloc::bell
