#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "statloc/error.hpp"
#include "statloc/factor_model.hpp"
#include "statloc/parallel.hpp"
#include "statloc/rng.hpp"

namespace statloc {

/// Site reassignments suggested by a move set.
struct Proposal {
  std::vector<std::pair<SiteIndex, Value>> changes;
};

/// A symmetric (reversible) proposal mechanism. The Metropolis chain only
/// samples the right distribution if proposals are symmetric and connect the
/// positive-weight configurations.
template <class M>
concept MoveSet = requires(const M& moves, const FactorModel& model, const Configuration& current, Rng& rng,
                           Proposal& out) {
  { moves.propose(model, current, rng, out) } -> std::same_as<void>;
};

/// Picks a site uniformly and a new value uniformly among the other values of
/// its domain. For a +-1 spin this is a single spin flip.
struct SingleSiteMove {
  void propose(const FactorModel& model, const Configuration& current, Rng& rng, Proposal& out) const {
    const auto site = static_cast<SiteIndex>(rng.below(model.site_count()));
    const auto& domain = model.domain(site);
    if (domain.size() < 2) return;
    auto pick = rng.below(domain.size() - 1);
    if (domain[pick] == current[site]) pick = domain.size() - 1;
    out.changes.emplace_back(site, domain[pick]);
  }
};

struct SampleOptions {
  /// Proposals between emitted states. 0 means one sweep (site_count proposals).
  std::size_t steps_per_sample = 0;
};

template <MoveSet Moves>
class MetropolisChain {
 public:
  MetropolisChain(const FactorModel& model, Moves moves, Configuration initial, Rng rng)
      : model_(&model), moves_(std::move(moves)), state_(std::move(initial)), trial_(state_), rng_(std::move(rng)) {
    model.validate(state_);
    if (!(config_weight(model, state_) > 0.0)) {
      throw DomainError("Metropolis chain must start from a positive-weight configuration");
    }
  }

  /// One proposal with acceptance probability min(1, Prob(trial)/Prob(current)).
  bool step() {
    proposal_.changes.clear();
    moves_.propose(*model_, state_, rng_, proposal_);
    region_.sites.clear();
    for (const auto& [site, value] : proposal_.changes) {
      if (!model_->in_domain(site, value)) {
        throw MoveError("move proposed value " + std::to_string(value) + " at site " + std::to_string(site) +
                        ", outside the configuration space");
      }
      if (trial_[site] != value) {
        trial_[site] = value;
        region_.sites.push_back(site);
      }
    }
    ++proposed_;
    const double u = rng_.uniform01();
    bool accept = true;
    if (!region_.sites.empty()) {
      std::sort(region_.sites.begin(), region_.sites.end());
      region_.sites.erase(std::unique(region_.sites.begin(), region_.sites.end()), region_.sites.end());
      const double ratio = local_ratio(*model_, trial_, state_, region_);
      accept = ratio >= 1.0 || u < ratio;
    }
    for (SiteIndex s : region_.sites) {
      if (accept) {
        state_[s] = trial_[s];
      } else {
        trial_[s] = state_[s];
      }
    }
    if (accept) ++accepted_;
    return accept;
  }

  void advance(std::size_t steps) {
    for (std::size_t i = 0; i < steps; ++i) step();
  }

  void sweep() { advance(model_->site_count()); }

  const Configuration& state() const { return state_; }
  std::uint64_t proposed() const { return proposed_; }
  std::uint64_t accepted() const { return accepted_; }

 private:
  const FactorModel* model_;
  Moves moves_;
  Configuration state_;
  Configuration trial_;
  Rng rng_;
  Proposal proposal_;
  Region region_;
  std::uint64_t proposed_ = 0;
  std::uint64_t accepted_ = 0;
};

/// Runs n blocks of proposals from `initial` and calls visitor(state) after
/// each block. Deterministic given (model, moves, initial, n, seed, stream).
template <MoveSet Moves, class Visitor>
void metropolis_sample(const FactorModel& model, const Moves& moves, Configuration initial, std::uint64_t n,
                       std::uint64_t seed, Visitor&& visitor, const SampleOptions& options = {},
                       std::uint64_t stream = 0) {
  if (n < 1) throw InputError("metropolis_sample needs n >= 1");
  MetropolisChain<Moves> chain(model, moves, std::move(initial), Rng::stream(seed, stream));
  const auto block = options.steps_per_sample == 0 ? model.site_count() : options.steps_per_sample;
  for (std::uint64_t i = 0; i < n; ++i) {
    chain.advance(block);
    visitor(chain.state());
  }
}

template <MoveSet Moves>
std::vector<Configuration> metropolis_sample(const FactorModel& model, const Moves& moves, Configuration initial,
                                             std::uint64_t n, std::uint64_t seed, const SampleOptions& options = {}) {
  std::vector<Configuration> out;
  out.reserve(n);
  metropolis_sample(
      model, moves, std::move(initial), n, seed, [&](const Configuration& c) { out.push_back(c); }, options);
  return out;
}

/// Visit counts per configuration index, pooled over `chains` independent
/// chains of n samples each. Chain k uses RNG stream k, so the result does not
/// depend on the worker count.
template <MoveSet Moves>
std::vector<std::uint64_t> sample_histogram(const FactorModel& model, const Moves& moves,
                                            const Configuration& initial, std::uint64_t n, std::uint64_t seed,
                                            const SampleOptions& options = {}, std::size_t chains = 1,
                                            std::size_t workers = 1,
                                            std::uint64_t cap = kDefaultEnumerationCap) {
  const auto count = detail::checked_count(model, cap);
  auto per_chain = parallel_map(chains, workers, [&](std::size_t chain) {
    std::vector<std::uint64_t> histogram(count, 0);
    metropolis_sample(
        model, moves, initial, n, seed, [&](const Configuration& c) { ++histogram[model.index_of(c)]; }, options,
        chain);
    return histogram;
  });
  std::vector<std::uint64_t> total(count, 0);
  for (const auto& h : per_chain) {
    for (std::size_t i = 0; i < count; ++i) total[i] += h[i];
  }
  return total;
}

/// Total-variation distance between an empirical histogram and a distribution.
inline double total_variation(std::span<const std::uint64_t> counts, std::span<const double> exact) {
  if (counts.size() != exact.size()) throw InputError("histogram and distribution sizes differ");
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  if (n == 0) throw InputError("empty histogram");
  double tv = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    tv += std::abs(static_cast<double>(counts[i]) / static_cast<double>(n) - exact[i]);
  }
  return 0.5 * tv;
}

}  // namespace statloc
