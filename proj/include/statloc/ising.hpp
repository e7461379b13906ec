#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "statloc/error.hpp"
#include "statloc/factor_model.hpp"

namespace statloc::ising {

enum class Boundary { open, periodic };

inline constexpr std::size_t kMaxExactSites = 24;

struct Edge {
  SiteIndex first;
  SiteIndex second;
};

/// Square-lattice Ising model with H = sum over nearest-neighbour pairs of
/// (1 - s_i s_j) and weight exp(-C H). Sites are numbered row-major.
class IsingModel {
 public:
  IsingModel(std::size_t width, std::size_t height, double coupling, Boundary boundary = Boundary::open)
      : width_(width), height_(height), coupling_(coupling), boundary_(boundary) {
    if (width == 0 || height == 0) throw InputError("Ising lattice needs width >= 1 and height >= 1");
    if (!(coupling >= 0.0) || !std::isfinite(coupling)) throw InputError("Ising coupling must be finite and >= 0");
    build_edges();
  }

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t site_count() const { return width_ * height_; }
  double coupling() const { return coupling_; }
  Boundary boundary() const { return boundary_; }
  SiteIndex site(std::size_t row, std::size_t col) const { return row * width_ + col; }

  /// Horizontal and vertical neighbour pairs. Periodic wrapping is applied only
  /// along dimensions of length >= 3, so no pair is ever listed twice.
  const std::vector<Edge>& edges() const { return edges_; }

  /// The (up to four) lattice neighbours of a site.
  std::vector<SiteIndex> neighbours(SiteIndex s) const {
    std::vector<SiteIndex> out;
    for (const auto& e : edges_) {
      if (e.first == s) out.push_back(e.second);
      if (e.second == s) out.push_back(e.first);
    }
    return out;
  }

 private:
  void build_edges() {
    const bool wrap_x = boundary_ == Boundary::periodic && width_ >= 3;
    const bool wrap_y = boundary_ == Boundary::periodic && height_ >= 3;
    for (std::size_t r = 0; r < height_; ++r) {
      for (std::size_t c = 0; c < width_; ++c) {
        if (c + 1 < width_) {
          edges_.push_back({site(r, c), site(r, c + 1)});
        } else if (wrap_x) {
          edges_.push_back({site(r, c), site(r, 0)});
        }
        if (r + 1 < height_) {
          edges_.push_back({site(r, c), site(r + 1, c)});
        } else if (wrap_y) {
          edges_.push_back({site(r, c), site(0, c)});
        }
      }
    }
  }

  std::size_t width_;
  std::size_t height_;
  double coupling_;
  Boundary boundary_;
  std::vector<Edge> edges_;
};

/// One +-1 spin per site, row-major. Serializes as a string of '+'/'-'.
class SpinConfig {
 public:
  SpinConfig() = default;
  explicit SpinConfig(Configuration spins) : spins_(std::move(spins)) {
    for (Value s : spins_) {
      if (s != 1 && s != -1) throw InputError("spin values must be +1 or -1");
    }
  }

  static SpinConfig all_up(std::size_t sites) { return SpinConfig(Configuration(sites, 1)); }

  static SpinConfig parse(std::string_view text) {
    Configuration spins;
    spins.reserve(text.size());
    for (char ch : text) {
      if (ch == '+') {
        spins.push_back(1);
      } else if (ch == '-') {
        spins.push_back(-1);
      } else {
        throw InputError(std::string("invalid spin character '") + ch + "'");
      }
    }
    return SpinConfig(std::move(spins));
  }

  std::string to_string() const {
    std::string out;
    out.reserve(spins_.size());
    for (Value s : spins_) out.push_back(s > 0 ? '+' : '-');
    return out;
  }

  std::size_t size() const { return spins_.size(); }
  Value operator[](std::size_t i) const { return spins_[i]; }
  const Configuration& values() const { return spins_; }

  void flip(std::size_t i) { spins_.at(i) = -spins_.at(i); }
  SpinConfig flipped() const {
    SpinConfig out = *this;
    for (Value& s : out.spins_) s = -s;
    return out;
  }

  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;

 private:
  Configuration spins_;
};

inline void check_dimensions(const IsingModel& model, const SpinConfig& config) {
  if (config.size() != model.site_count()) {
    throw InputError("spin configuration has " + std::to_string(config.size()) + " sites, lattice has " +
                     std::to_string(model.site_count()));
  }
}

inline long hamiltonian(const IsingModel& model, const SpinConfig& config) {
  check_dimensions(model, config);
  long h = 0;
  for (const auto& e : model.edges()) h += 1 - config[e.first] * config[e.second];
  return h;
}

inline long magnetization(const SpinConfig& config) {
  long m = 0;
  for (Value s : config.values()) m += s;
  return m;
}

/// Domain order {+1, -1}: configuration index order matches lexicographic
/// order of the '+'/'-' string ('+' sorts before '-').
inline FactorModel as_factor_model(const IsingModel& model) {
  std::vector<std::vector<Value>> domains(model.site_count(), std::vector<Value>{1, -1});
  std::vector<Factor> factors;
  factors.reserve(model.edges().size());
  const double c = model.coupling();
  const double anti = std::exp(-2.0 * c);
  for (const auto& e : model.edges()) {
    factors.emplace_back(
        std::vector<SiteIndex>{e.first, e.second},
        [anti](std::span<const Value> s) { return s[0] == s[1] ? 1.0 : anti; },
        "edge(" + std::to_string(e.first) + "," + std::to_string(e.second) + ")");
  }
  return FactorModel(std::move(domains), std::move(factors));
}

/// Full normalized distribution, indexed in lexicographic order of the spin string.
class IsingDistribution {
 public:
  IsingDistribution(std::size_t sites, std::vector<double> probabilities)
      : sites_(sites), probabilities_(std::move(probabilities)) {}

  std::size_t size() const { return probabilities_.size(); }
  std::size_t site_count() const { return sites_; }
  double probability(std::size_t index) const { return probabilities_.at(index); }
  const std::vector<double>& probabilities() const { return probabilities_; }

  SpinConfig config(std::size_t index) const {
    Configuration spins(sites_);
    for (std::size_t s = sites_; s-- > 0;) {
      spins[s] = (index & 1u) ? -1 : 1;
      index >>= 1;
    }
    return SpinConfig(std::move(spins));
  }

  std::size_t index_of(const SpinConfig& config) const {
    std::size_t index = 0;
    for (Value s : config.values()) index = (index << 1) | (s < 0 ? 1u : 0u);
    return index;
  }

  double probability(const SpinConfig& config) const { return probabilities_.at(index_of(config)); }

 private:
  std::size_t sites_;
  std::vector<double> probabilities_;
};

inline IsingDistribution exact_distribution(const IsingModel& model, const EnumerationOptions& options = {}) {
  if (model.site_count() > kMaxExactSites) {
    throw CapacityError("exact Ising enumeration is limited to " + std::to_string(kMaxExactSites) +
                        " sites; lattice has " + std::to_string(model.site_count()) + ", use sampling instead");
  }
  return IsingDistribution(model.site_count(), statloc::exact_distribution(as_factor_model(model), options));
}

inline void check_site(const IsingModel& model, SiteIndex s) {
  if (s >= model.site_count()) throw InputError("site " + std::to_string(s) + " is outside the lattice");
}

/// <s_i s_j> under the exact distribution.
inline double two_point_correlation(const IsingModel& model, const IsingDistribution& dist, SiteIndex i,
                                    SiteIndex j) {
  check_site(model, i);
  check_site(model, j);
  if (i == j) return 1.0;
  const std::size_t n = model.site_count();
  double sum = 0.0;
  for (std::size_t index = 0; index < dist.size(); ++index) {
    const bool down_i = (index >> (n - 1 - i)) & 1u;
    const bool down_j = (index >> (n - 1 - j)) & 1u;
    sum += (down_i == down_j ? 1.0 : -1.0) * dist.probability(index);
  }
  return sum;
}

inline double two_point_correlation(const IsingModel& model, SiteIndex i, SiteIndex j) {
  return two_point_correlation(model, exact_distribution(model), i, j);
}

/// Empirical mean of s_i s_j over samples.
inline double two_point_correlation(const IsingModel& model, std::span<const Configuration> samples, SiteIndex i,
                                    SiteIndex j) {
  check_site(model, i);
  check_site(model, j);
  if (samples.empty()) throw InputError("no samples");
  double sum = 0.0;
  for (const auto& s : samples) sum += s.at(i) * s.at(j);
  return sum / static_cast<double>(samples.size());
}

/// Exact <|M|>.
inline double mean_abs_magnetization(const IsingDistribution& dist) {
  double sum = 0.0;
  for (std::size_t index = 0; index < dist.size(); ++index) {
    sum += std::abs(static_cast<double>(magnetization(dist.config(index)))) * dist.probability(index);
  }
  return sum;
}

}  // namespace statloc::ising
