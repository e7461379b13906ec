#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "statloc/bell/experiment.hpp"
#include "statloc/bell/model.hpp"
#include "statloc/bell/trajectory.hpp"
#include "statloc/factor_model.hpp"

namespace statloc::bell {

/// Per-photon state of a lattice edge.
enum EdgeState : Value { kAbsent = 0, kUnlabeled = 1, kPlus = 2, kMinus = 3 };

/// The trajectory model as a FactorModel over local variables: one site per
/// (photon, edge) holding an EdgeState, plus one pair-label site per photon.
/// Each lattice vertex carries one factor that reads only the edges incident
/// to it and the pair labels, and returns
///   - 0 unless every photon's incident edges form a path fragment that is
///     legal at this vertex (source emission, pass-through, or termination),
///   - (1 - eps) or eps for each photon passing straight or switching,
///   - the annihilation weight where both photons terminate together.
/// Result labels switch on at a photon's first detector vertex and are then
/// carried unchanged, so the product over vertices equals trajectory_weight.
class TrajectoryFactorModel {
 public:
  static constexpr std::size_t kPhotons = 2;

  explicit TrajectoryFactorModel(const ExperimentSpec& spec) : spec_(spec), model_(build()) {}

  const FactorModel& model() const { return model_; }
  const ExperimentSpec& spec() const { return spec_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Vertex>& vertices() const { return vertices_; }

  SiteIndex edge_site(std::size_t photon, Vertex from, Move m) const {
    return photon * edges_.size() + edge_index_.at({from, m});
  }
  SiteIndex pair_site(std::size_t photon) const { return kPhotons * edges_.size() + photon; }

  Configuration encode(const TrajectoryConfig& config) const {
    detail::check_path(config.left, spec_.left_photon(), spec_.lattice, "left");
    detail::check_path(config.right, spec_.right_photon(), spec_.lattice, "right");
    Configuration out(model_.site_count(), kAbsent);
    const std::array<const PhotonPath*, kPhotons> paths{&config.left, &config.right};
    const std::array<int, kPhotons> detectors{spec_.left_detector, spec_.right_detector};
    const std::array<int, kPhotons> labels{config.alpha, config.beta};
    for (std::size_t p = 0; p < kPhotons; ++p) {
      const auto info = analyze(*paths[p], detectors[p]);
      for (std::size_t k = 0; k < paths[p]->moves.size(); ++k) {
        const bool labeled = info.detection && k >= *info.detection;
        const auto state = labeled ? (labels[p] > 0 ? kPlus : kMinus) : kUnlabeled;
        out[edge_site(p, info.vertices[k], move_from_char(paths[p]->moves[k]))] = state;
      }
    }
    out[pair_site(0)] = config.pair_left;
    out[pair_site(1)] = config.pair_right;
    model_.validate(out);
    return out;
  }

  /// Vertices where photon `p` terminates (an incoming edge and no outgoing one).
  std::vector<Vertex> termination_vertices(const Configuration& config, std::size_t p) const {
    std::vector<Vertex> out;
    for (const auto& w : vertices_) {
      int in = 0;
      int outgoing = 0;
      for (Move m : {Move::left, Move::right}) {
        const Vertex prev = m == Move::right ? Vertex{w.u - 1, w.v} : Vertex{w.u, w.v - 1};
        if (auto it = edge_index_.find({prev, m}); it != edge_index_.end()) {
          in += config[p * edges_.size() + it->second] != kAbsent;
        }
        if (auto it = edge_index_.find({w, m}); it != edge_index_.end()) {
          outgoing += config[p * edges_.size() + it->second] != kAbsent;
        }
      }
      if (in > 0 && outgoing == 0) out.push_back(w);
    }
    return out;
  }

 private:
  // Positions within a vertex factor's support; -1 where the edge does not exist.
  struct Layout {
    std::array<std::array<int, 2>, kPhotons> in{};   // [photon][0: arrives by R, 1: arrives by L]
    std::array<std::array<int, 2>, kPhotons> out{};  // [photon][0: leaves by R, 1: leaves by L]
    std::array<int, kPhotons> pair{};
  };

  struct VertexRule {
    Layout layout;
    std::array<bool, kPhotons> is_source{};
    std::array<bool, kPhotons> on_detector{};
    std::array<Move, kPhotons> first_move{};
    double epsilon = 0.0;
    ExperimentSpec spec;

    double operator()(std::span<const Value> s) const {
      double w = 1.0;
      std::array<int, kPhotons> end_label{};
      int ended = 0;
      for (std::size_t p = 0; p < kPhotons; ++p) {
        int n_in = 0;
        int n_out = 0;
        int in_dir = -1;
        int out_dir = -1;
        Value in_state = kAbsent;
        Value out_state = kAbsent;
        for (int d = 0; d < 2; ++d) {
          if (int pos = layout.in[p][d]; pos >= 0 && s[pos] != kAbsent) {
            ++n_in;
            in_dir = d;
            in_state = s[pos];
          }
          if (int pos = layout.out[p][d]; pos >= 0 && s[pos] != kAbsent) {
            ++n_out;
            out_dir = d;
            out_state = s[pos];
          }
        }
        if (n_in > 1 || n_out > 1) return 0.0;
        if (is_source[p]) {
          const int first_dir = first_move[p] == Move::right ? 0 : 1;
          if (n_in != 0 || n_out != 1 || out_dir != first_dir || out_state != kUnlabeled) return 0.0;
          continue;
        }
        if (n_in == 0) {
          if (n_out != 0) return 0.0;
          continue;
        }
        if (n_out == 1) {
          w *= in_dir == out_dir ? 1.0 - epsilon : epsilon;
          if (on_detector[p] && in_state == kUnlabeled) {
            if (out_state != kPlus && out_state != kMinus) return 0.0;
          } else if (out_state != in_state) {
            return 0.0;
          }
          continue;
        }
        if (in_state == kUnlabeled) return 0.0;
        end_label[p] = in_state == kPlus ? 1 : -1;
        ++ended;
      }
      if (ended == 0) return w;
      if (ended != static_cast<int>(kPhotons)) return 0.0;
      const AnnihilationEvent e{s[layout.pair[0]], s[layout.pair[1]], end_label[0], end_label[1], spec.a_meas,
                                spec.b_meas};
      return w * spec.weight(e);
    }
  };

  FactorModel build() {
    check_spec(spec_);
    vertices_ = spec_.lattice.vertices();
    for (const auto& w : vertices_) {
      for (Move m : {Move::right, Move::left}) {
        if (spec_.lattice.contains(w.step(m))) {
          edge_index_[{w, m}] = edges_.size();
          edges_.emplace_back(w, m);
        }
      }
    }
    const int max_label = std::max({spec_.pair_left, spec_.pair_right, 1});
    std::vector<Value> label_domain;
    for (int k = 0; k <= max_label; ++k) label_domain.push_back(k);

    std::vector<std::vector<Value>> domains(kPhotons * edges_.size(), {kAbsent, kUnlabeled, kPlus, kMinus});
    domains.push_back(label_domain);
    domains.push_back(label_domain);

    const std::array<PhotonSpec, kPhotons> photons{spec_.left_photon(), spec_.right_photon()};
    std::vector<Factor> factors;
    for (const auto& w : vertices_) {
      std::vector<SiteIndex> support;
      VertexRule rule;
      rule.epsilon = spec_.epsilon;
      rule.spec = spec_;
      for (std::size_t p = 0; p < kPhotons; ++p) {
        rule.is_source[p] = w == photons[p].source;
        rule.on_detector[p] = w.x() == photons[p].detector_x;
        rule.first_move[p] = photons[p].first_move;
        for (int d = 0; d < 2; ++d) {
          const Move m = d == 0 ? Move::right : Move::left;
          const Vertex prev = m == Move::right ? Vertex{w.u - 1, w.v} : Vertex{w.u, w.v - 1};
          rule.layout.in[p][d] = attach(support, p, prev, m);
          rule.layout.out[p][d] = attach(support, p, w, m);
        }
      }
      for (std::size_t p = 0; p < kPhotons; ++p) {
        rule.layout.pair[p] = static_cast<int>(support.size());
        support.push_back(pair_site(p));
      }
      factors.emplace_back(std::move(support), std::move(rule), "vertex" + to_string(w));
    }
    return FactorModel(std::move(domains), std::move(factors));
  }

  int attach(std::vector<SiteIndex>& support, std::size_t photon, Vertex from, Move m) const {
    auto it = edge_index_.find({from, m});
    if (it == edge_index_.end()) return -1;
    support.push_back(photon * edges_.size() + it->second);
    return static_cast<int>(support.size()) - 1;
  }

  ExperimentSpec spec_;
  std::vector<Vertex> vertices_;
  std::vector<std::pair<Vertex, Move>> edges_;
  std::map<std::pair<Vertex, Move>, std::size_t> edge_index_;
  FactorModel model_;
};

}  // namespace statloc::bell
