#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "statloc/error.hpp"
#include "statloc/parallel.hpp"

namespace statloc {

using Value = int;
using Configuration = std::vector<Value>;
using SiteIndex = std::size_t;

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 24;

struct EnumerationOptions {
  std::uint64_t cap = kDefaultEnumerationCap;
  std::size_t workers = 1;
};

/// A nonnegative weight that reads only the values of the sites in its support.
/// The weight function receives those values in support order.
class Factor {
 public:
  using WeightFn = std::function<double(std::span<const Value>)>;

  Factor(std::vector<SiteIndex> support, WeightFn weight, std::string label = {})
      : support_(std::move(support)), weight_(std::move(weight)), label_(std::move(label)) {}

  const std::vector<SiteIndex>& support() const { return support_; }
  const std::string& label() const { return label_; }

  double evaluate(std::span<const Value> config) const {
    constexpr std::size_t kInline = 16;
    if (support_.size() <= kInline) {
      std::array<Value, kInline> local{};
      for (std::size_t k = 0; k < support_.size(); ++k) local[k] = config[support_[k]];
      return checked(weight_(std::span<const Value>(local.data(), support_.size())));
    }
    std::vector<Value> local(support_.size());
    for (std::size_t k = 0; k < support_.size(); ++k) local[k] = config[support_[k]];
    return checked(weight_(local));
  }

 private:
  double checked(double w) const {
    if (!(w >= 0.0)) throw DomainError("factor '" + label_ + "' returned a negative or NaN weight");
    return w;
  }

  std::vector<SiteIndex> support_;
  WeightFn weight_;
  std::string label_;
};

/// Running product of factor weights. Falls back to log-space accumulation
/// once a factor (or the running product) drops below 1e-300.
class WeightProduct {
 public:
  static constexpr double kTiny = 1e-300;

  void multiply(double w) {
    if (zero_) return;
    if (w == 0.0) {
      zero_ = true;
      return;
    }
    if (log_mode_) {
      log_ += std::log(w);
      return;
    }
    if (w < kTiny || product_ * w < kTiny) {
      log_mode_ = true;
      log_ = std::log(product_) + std::log(w);
      return;
    }
    product_ *= w;
  }

  bool is_zero() const { return zero_; }
  bool in_log_space() const { return log_mode_; }
  double value() const { return zero_ ? 0.0 : (log_mode_ ? std::exp(log_) : product_); }
  double log_value() const {
    if (zero_) return -std::numeric_limits<double>::infinity();
    return log_mode_ ? log_ : std::log(product_);
  }

 private:
  double product_ = 1.0;
  double log_ = 0.0;
  bool log_mode_ = false;
  bool zero_ = false;
};

/// Finite configuration space plus a list of local factors. Immutable after
/// construction; safe to share across threads.
class FactorModel {
 public:
  FactorModel(std::vector<std::vector<Value>> domains, std::vector<Factor> factors)
      : domains_(std::move(domains)), factors_(std::move(factors)), site_factors_(domains_.size()) {
    for (std::size_t s = 0; s < domains_.size(); ++s) {
      if (domains_[s].empty()) throw InputError("site " + std::to_string(s) + " has an empty domain");
    }
    for (std::size_t f = 0; f < factors_.size(); ++f) {
      for (SiteIndex s : factors_[f].support()) {
        if (s >= domains_.size()) {
          throw InputError("factor " + std::to_string(f) + " reads site " + std::to_string(s) +
                           " outside the model");
        }
        auto& list = site_factors_[s];
        if (list.empty() || list.back() != f) list.push_back(f);
      }
    }
  }

  std::size_t site_count() const { return domains_.size(); }
  const std::vector<Value>& domain(SiteIndex site) const { return domains_.at(site); }
  std::span<const Factor> factors() const { return factors_; }
  /// Indices of the factors whose support contains `site`, ascending.
  std::span<const std::size_t> factors_at(SiteIndex site) const { return site_factors_.at(site); }

  bool in_domain(SiteIndex site, Value value) const {
    if (site >= domains_.size()) return false;
    const auto& d = domains_[site];
    return std::find(d.begin(), d.end(), value) != d.end();
  }

  void validate(const Configuration& config) const {
    if (config.size() != domains_.size()) {
      throw InputError("configuration has " + std::to_string(config.size()) + " sites, model has " +
                       std::to_string(domains_.size()));
    }
    for (std::size_t s = 0; s < config.size(); ++s) {
      if (!in_domain(s, config[s])) {
        throw InputError("site " + std::to_string(s) + " holds out-of-domain value " + std::to_string(config[s]));
      }
    }
  }

  /// Number of configurations, or nullopt if it does not fit in 64 bits.
  std::optional<std::uint64_t> configuration_count() const {
    std::uint64_t total = 1;
    for (const auto& d : domains_) {
      if (total > std::numeric_limits<std::uint64_t>::max() / d.size()) return std::nullopt;
      total *= d.size();
    }
    return total;
  }

  /// Mixed-radix decoding; site 0 is the most significant digit and each
  /// digit indexes the site's domain in declaration order.
  Configuration configuration_at(std::uint64_t index) const {
    Configuration config(domains_.size());
    for (std::size_t s = domains_.size(); s-- > 0;) {
      const auto radix = domains_[s].size();
      config[s] = domains_[s][index % radix];
      index /= radix;
    }
    return config;
  }

  std::uint64_t index_of(const Configuration& config) const {
    validate(config);
    std::uint64_t index = 0;
    for (std::size_t s = 0; s < domains_.size(); ++s) {
      const auto& d = domains_[s];
      index = index * d.size() + static_cast<std::uint64_t>(std::find(d.begin(), d.end(), config[s]) - d.begin());
    }
    return index;
  }

  /// Advances `config` to the next configuration in index order. Returns false
  /// after the last one (and leaves config at the first configuration).
  bool advance(Configuration& config) const {
    for (std::size_t s = domains_.size(); s-- > 0;) {
      const auto& d = domains_[s];
      auto pos = static_cast<std::size_t>(std::find(d.begin(), d.end(), config[s]) - d.begin()) + 1;
      if (pos < d.size()) {
        config[s] = d[pos];
        return true;
      }
      config[s] = d.front();
    }
    return false;
  }

 private:
  std::vector<std::vector<Value>> domains_;
  std::vector<Factor> factors_;
  std::vector<std::vector<std::size_t>> site_factors_;
};

/// Site subset R of a model.
struct Region {
  std::vector<SiteIndex> sites;

  /// R together with every site that shares a factor with R, ascending.
  std::vector<SiteIndex> closure(const FactorModel& model) const {
    std::vector<SiteIndex> out(sites.begin(), sites.end());
    for (SiteIndex s : sites) {
      for (std::size_t f : model.factors_at(s)) {
        const auto& support = model.factors()[f].support();
        out.insert(out.end(), support.begin(), support.end());
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Sites where two configurations differ.
  static Region difference(const Configuration& a, const Configuration& b) {
    Region r;
    const auto n = std::min(a.size(), b.size());
    for (std::size_t s = 0; s < n; ++s) {
      if (a[s] != b[s]) r.sites.push_back(s);
    }
    return r;
  }
};

inline WeightProduct weight_product(const FactorModel& model, const Configuration& config) {
  WeightProduct product;
  for (const auto& factor : model.factors()) {
    product.multiply(factor.evaluate(config));
    if (product.is_zero()) break;
  }
  return product;
}

/// Unnormalized weight p(S): the product of all factor weights.
inline double config_weight(const FactorModel& model, const Configuration& config) {
  model.validate(config);
  return weight_product(model, config).value();
}

inline double log_config_weight(const FactorModel& model, const Configuration& config) {
  model.validate(config);
  return weight_product(model, config).log_value();
}

namespace detail {

inline std::uint64_t checked_count(const FactorModel& model, std::uint64_t cap) {
  const auto count = model.configuration_count();
  if (!count || *count > cap) {
    throw CapacityError("configuration space exceeds the enumeration cap of " + std::to_string(cap) +
                        " configurations; use Metropolis sampling instead");
  }
  return *count;
}

// Fixed chunking keeps floating-point summation order independent of the
// worker count.
inline constexpr std::uint64_t kEnumerationChunks = 64;

}  // namespace detail

/// Visits every configuration in index order as visitor(index, config).
template <class Visitor>
void for_each_configuration(const FactorModel& model, Visitor&& visitor,
                            std::uint64_t cap = kDefaultEnumerationCap) {
  const auto count = detail::checked_count(model, cap);
  Configuration config = model.configuration_at(0);
  for (std::uint64_t index = 0; index < count; ++index) {
    visitor(index, std::as_const(config));
    model.advance(config);
  }
}

/// Unnormalized weights of every configuration, indexed by configuration index.
inline std::vector<double> enumerate_weights(const FactorModel& model, const EnumerationOptions& options = {}) {
  const auto count = detail::checked_count(model, options.cap);
  std::vector<double> weights(count);
  const auto chunks = std::min(detail::kEnumerationChunks, count);
  parallel_map(chunks, options.workers, [&](std::size_t chunk) {
    const auto begin = count * chunk / chunks;
    const auto end = count * (chunk + 1) / chunks;
    Configuration config = model.configuration_at(begin);
    for (auto index = begin; index < end; ++index) {
      weights[index] = weight_product(model, config).value();
      model.advance(config);
    }
    return 0;
  });
  return weights;
}

/// Exact sum of config_weight over the whole configuration space.
inline double partition_sum(const FactorModel& model, const EnumerationOptions& options = {}) {
  const auto count = detail::checked_count(model, options.cap);
  const auto chunks = std::min(detail::kEnumerationChunks, count);
  const auto partial = parallel_map(chunks, options.workers, [&](std::size_t chunk) {
    const auto begin = count * chunk / chunks;
    const auto end = count * (chunk + 1) / chunks;
    Configuration config = model.configuration_at(begin);
    double sum = 0.0;
    for (auto index = begin; index < end; ++index) {
      sum += weight_product(model, config).value();
      model.advance(config);
    }
    return sum;
  });
  double total = 0.0;
  for (double s : partial) total += s;
  if (!(total > 0.0)) throw DegenerateModelError("partition sum is zero: every configuration has weight 0");
  return total;
}

/// Normalized probabilities of every configuration, indexed by configuration index.
inline std::vector<double> exact_distribution(const FactorModel& model, const EnumerationOptions& options = {}) {
  auto weights = enumerate_weights(model, options);
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw DegenerateModelError("partition sum is zero: every configuration has weight 0");
  for (double& w : weights) w /= total;
  return weights;
}

inline double probability(const FactorModel& model, const Configuration& config, double partition) {
  return config_weight(model, config) / partition;
}

/// Prob(S) = p(S) / sum over S' of p(S').
inline double probability(const FactorModel& model, const Configuration& config,
                          const EnumerationOptions& options = {}) {
  model.validate(config);
  return probability(model, config, partition_sum(model, options));
}

/// Prob(a)/Prob(b) for configurations that differ exactly on `region`, using
/// only the factors whose support intersects the region.
inline double local_ratio(const FactorModel& model, const Configuration& a, const Configuration& b,
                          const Region& region) {
  if (region.sites.empty()) return 1.0;
  std::vector<std::size_t> touched;
  for (SiteIndex s : region.sites) {
    const auto fs = model.factors_at(s);
    touched.insert(touched.end(), fs.begin(), fs.end());
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

  WeightProduct numerator;
  WeightProduct denominator;
  for (std::size_t f : touched) {
    const auto& factor = model.factors()[f];
    numerator.multiply(factor.evaluate(a));
    denominator.multiply(factor.evaluate(b));
  }
  if (denominator.is_zero()) throw DomainError("local_ratio: the reference configuration has weight 0");
  if (numerator.is_zero()) return 0.0;
  if (numerator.in_log_space() || denominator.in_log_space()) {
    return std::exp(numerator.log_value() - denominator.log_value());
  }
  return numerator.value() / denominator.value();
}

inline double local_ratio(const FactorModel& model, const Configuration& a, const Configuration& b) {
  model.validate(a);
  model.validate(b);
  return local_ratio(model, a, b, Region::difference(a, b));
}

}  // namespace statloc
