#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "statloc/bell/vec3.hpp"
#include "statloc/error.hpp"

namespace statloc::bell {

/// Hidden variables meeting at an annihilation vertex. The result labels are
/// the signed vectors alpha * setting_left and beta * setting_right.
struct AnnihilationEvent {
  int pair_left = 0;
  int pair_right = 0;
  int alpha = 1;
  int beta = 1;
  Vec3 setting_left;
  Vec3 setting_right;

  Vec3 result_left() const { return static_cast<double>(alpha) * setting_left; }
  Vec3 result_right() const { return static_cast<double>(beta) * setting_right; }
};

class AnnihilationWeight {
 public:
  using Fn = std::function<double(const AnnihilationEvent&)>;

  AnnihilationWeight(std::string name, Fn fn, double lambda = 0.0)
      : name_(std::move(name)), fn_(std::move(fn)), lambda_(lambda) {}

  /// delta_ij (1 - a.b) / 2 on the signed result vectors.
  static AnnihilationWeight canonical() {
    return AnnihilationWeight("canonical", [](const AnnihilationEvent& e) {
      if (e.pair_left != e.pair_right) return 0.0;
      // Unit vectors can round to a dot product a few ulps past +-1.
      return (1.0 - std::clamp(dot(e.result_left(), e.result_right()), -1.0, 1.0)) / 2.0;
    });
  }

  /// delta_ij (1 + lambda alpha (b_meas . z)) / 4. Alice's marginal depends on
  /// Bob's setting whenever lambda > 0.
  static AnnihilationWeight signalling(double lambda) {
    if (!(lambda >= 0.0 && lambda < 1.0)) {
      throw InputError("signalling weight needs 0 <= lambda < 1 (lambda >= 1 allows negative weights)");
    }
    return AnnihilationWeight(
        "signalling",
        [lambda](const AnnihilationEvent& e) {
          if (e.pair_left != e.pair_right) return 0.0;
          return (1.0 + lambda * e.alpha * std::clamp(dot(e.setting_right, kZAxis), -1.0, 1.0)) / 4.0;
        },
        lambda);
  }

  const std::string& name() const { return name_; }
  double lambda() const { return lambda_; }

  double operator()(const AnnihilationEvent& e) const {
    const double w = fn_(e);
    if (!(w >= 0.0)) throw DomainError("annihilation weight '" + name_ + "' is negative");
    return w;
  }

 private:
  std::string name_;
  Fn fn_;
  double lambda_;
};

}  // namespace statloc::bell
