#pragma once

#include <compare>
#include <string>
#include <vector>

#include "statloc/error.hpp"

namespace statloc::bell {

/// Future-directed lightlike step. R advances u = (x + ct)/2, L advances
/// v = (ct - x)/2.
enum class Move : char { left = 'L', right = 'R' };

inline char to_char(Move m) { return static_cast<char>(m); }

inline Move move_from_char(char c) {
  if (c == 'L') return Move::left;
  if (c == 'R') return Move::right;
  throw InputError(std::string("invalid move character '") + c + "'");
}

/// Lattice vertex in lightcone coordinates. x = u - v, t = u + v.
struct Vertex {
  int u = 0;
  int v = 0;

  int x() const { return u - v; }
  int t() const { return u + v; }
  Vertex step(Move m) const { return m == Move::right ? Vertex{u + 1, v} : Vertex{u, v + 1}; }

  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

inline std::string to_string(const Vertex& w) { return "(" + std::to_string(w.u) + "," + std::to_string(w.v) + ")"; }

/// Finite lightlike lattice: 0 <= u <= u_max, 0 <= v <= v_max, u + v <= horizon.
struct DiamondLattice {
  int u_max = 0;
  int v_max = 0;
  int horizon = 0;

  /// Future light cone of the origin, cut at time `extent`.
  static DiamondLattice light_cone(int extent) {
    if (extent < 0) throw InputError("lattice extent must be >= 0");
    return {extent, extent, extent};
  }

  bool contains(const Vertex& w) const {
    return w.u >= 0 && w.v >= 0 && w.u <= u_max && w.v <= v_max && w.t() <= horizon;
  }

  /// All vertices ordered by (t, u).
  std::vector<Vertex> vertices() const {
    std::vector<Vertex> out;
    for (int t = 0; t <= horizon; ++t) {
      for (int u = 0; u <= t; ++u) {
        const Vertex w{u, t - u};
        if (contains(w)) out.push_back(w);
      }
    }
    return out;
  }

  friend bool operator==(const DiamondLattice&, const DiamondLattice&) = default;
};

}  // namespace statloc::bell
