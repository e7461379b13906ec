#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "statloc/bell/lattice.hpp"
#include "statloc/bell/vec3.hpp"
#include "statloc/error.hpp"

namespace statloc::bell {

/// One emitted photon: where it starts, which way it leaves, the detector
/// line (a fixed x) that measures it, the setting there, and its pair label.
struct PhotonSpec {
  Vertex source;
  Move first_move = Move::left;
  int detector_x = 0;
  Vec3 setting = kZAxis;
  int pair_label = 0;
};

/// Directed lightlike path given by its start and a string of L/R moves.
struct PhotonPath {
  Vertex start;
  std::string moves;

  std::vector<Vertex> vertices() const {
    std::vector<Vertex> out{start};
    out.reserve(moves.size() + 1);
    for (char c : moves) out.push_back(out.back().step(move_from_char(c)));
    return out;
  }

  Vertex end() const {
    Vertex w = start;
    for (char c : moves) w = w.step(move_from_char(c));
    return w;
  }

  friend auto operator<=>(const PhotonPath&, const PhotonPath&) = default;
};

/// Geometry of a path relative to its detector line.
struct PathAnalysis {
  std::vector<Vertex> vertices;
  /// Index into `vertices` of the first vertex on the detector line.
  std::optional<std::size_t> detection;
  int straight = 0;
  int switches = 0;

  /// Measured strictly before the endpoint, so the final segment carries a result label.
  bool measured_before_end() const { return detection && *detection + 1 < vertices.size(); }
};

inline PathAnalysis analyze(const PhotonPath& path, int detector_x) {
  PathAnalysis out;
  out.vertices = path.vertices();
  for (std::size_t k = 1; k < out.vertices.size(); ++k) {
    if (out.vertices[k].x() == detector_x) {
      out.detection = k;
      break;
    }
  }
  for (std::size_t k = 1; k < path.moves.size(); ++k) {
    if (path.moves[k] == path.moves[k - 1]) {
      ++out.straight;
    } else {
      ++out.switches;
    }
  }
  return out;
}

inline char sign_char(int s) { return s > 0 ? '+' : '-'; }

inline int sign_from_char(char c) {
  if (c == '+') return 1;
  if (c == '-') return -1;
  throw InputError(std::string("invalid result label '") + c + "'");
}

/// Two photon paths ending at a shared annihilation vertex, with their pair
/// labels and the outcome signs recorded at the detectors.
struct TrajectoryConfig {
  PhotonPath left;
  PhotonPath right;
  int pair_left = 0;
  int pair_right = 0;
  int alpha = 1;
  int beta = 1;

  /// "<left moves> <right moves> <pair_left> <pair_right> <alpha> <beta>",
  /// e.g. "LR RL 0 0 + -".
  std::string to_string() const {
    std::string out = left.moves + ' ' + right.moves + ' ' + std::to_string(pair_left) + ' ' +
                      std::to_string(pair_right) + ' ';
    out += sign_char(alpha);
    out += ' ';
    out += sign_char(beta);
    return out;
  }

  static TrajectoryConfig parse(std::string_view text, Vertex source) {
    std::istringstream in{std::string(text)};
    TrajectoryConfig c;
    std::string a;
    std::string b;
    if (!(in >> c.left.moves >> c.right.moves >> c.pair_left >> c.pair_right >> a >> b) || a.size() != 1 ||
        b.size() != 1) {
      throw InputError("malformed trajectory record '" + std::string(text) + "'");
    }
    std::string rest;
    if (in >> rest) throw InputError("trailing text in trajectory record '" + std::string(text) + "'");
    for (char m : c.left.moves + c.right.moves) move_from_char(m);
    c.left.start = source;
    c.right.start = source;
    c.alpha = sign_from_char(a[0]);
    c.beta = sign_from_char(b[0]);
    return c;
  }

  friend auto operator<=>(const TrajectoryConfig&, const TrajectoryConfig&) = default;
};

/// The part of a configuration located before each detector crossing:
/// geometry up to and including the crossing vertex, plus the pair labels.
struct PreMeasurementRecord {
  std::string left_prefix;
  std::string right_prefix;
  int pair_left = 0;
  int pair_right = 0;

  std::string to_string() const {
    return left_prefix + ' ' + right_prefix + ' ' + std::to_string(pair_left) + ' ' + std::to_string(pair_right);
  }

  friend auto operator<=>(const PreMeasurementRecord&, const PreMeasurementRecord&) = default;
};

}  // namespace statloc::bell
