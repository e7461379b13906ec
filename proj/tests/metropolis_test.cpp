#include <gtest/gtest.h>

#include <cmath>

#include "statloc/ising.hpp"
#include "statloc/metropolis.hpp"

namespace statloc {
namespace {

TEST(Metropolis, SingleRejectedProposalReturnsInitialState) {
  auto model = ising::as_factor_model(ising::IsingModel(2, 2, 50.0));
  const Configuration initial(4, 1);
  MetropolisChain chain(model, SingleSiteMove{}, initial, Rng(1));
  EXPECT_FALSE(chain.step());
  EXPECT_EQ(chain.accepted(), 0u);

  const auto samples = metropolis_sample(model, SingleSiteMove{}, initial, 1, 1, {.steps_per_sample = 1});
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0], initial);
}

TEST(Metropolis, ZeroCouplingAcceptsEveryFlip) {
  auto model = ising::as_factor_model(ising::IsingModel(4, 4, 0.0));
  MetropolisChain chain(model, SingleSiteMove{}, Configuration(16, 1), Rng(3));
  chain.advance(10000);
  EXPECT_EQ(chain.accepted(), chain.proposed());
}

TEST(Metropolis, ZeroCouplingMagnetizationCentred) {
  auto model = ising::as_factor_model(ising::IsingModel(4, 4, 0.0));
  const std::uint64_t n = 20000;
  double sum = 0.0;
  metropolis_sample(
      model, SingleSiteMove{}, Configuration(16, 1), n, 99,
      [&](const Configuration& c) {
        for (Value s : c) sum += s;
      },
      {.steps_per_sample = 80});
  // Var(M) = 16 under the uniform distribution.
  const double sigma = std::sqrt(16.0 / static_cast<double>(n));
  EXPECT_LT(std::abs(sum / static_cast<double>(n)), 3.0 * sigma);
}

TEST(Metropolis, DeterministicGivenSeed) {
  auto model = ising::as_factor_model(ising::IsingModel(3, 3, 0.3));
  const auto a = metropolis_sample(model, SingleSiteMove{}, Configuration(9, 1), 500, 42);
  const auto b = metropolis_sample(model, SingleSiteMove{}, Configuration(9, 1), 500, 42);
  const auto c = metropolis_sample(model, SingleSiteMove{}, Configuration(9, 1), 500, 43);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Metropolis, TotalVariationShrinksWithSampleCount) {
  auto model = ising::as_factor_model(ising::IsingModel(3, 2, 0.3));
  const auto exact = exact_distribution(model);
  const Configuration start(6, 1);
  const double tv_small = total_variation(sample_histogram(model, SingleSiteMove{}, start, 2000, 7), exact);
  const double tv_large = total_variation(sample_histogram(model, SingleSiteMove{}, start, 200000, 7), exact);
  EXPECT_LT(tv_large, tv_small);
  EXPECT_LT(tv_large, 0.01);
}

TEST(Metropolis, PooledChainsIndependentOfWorkers) {
  auto model = ising::as_factor_model(ising::IsingModel(2, 2, 0.3));
  const Configuration start(4, 1);
  EXPECT_EQ(sample_histogram(model, SingleSiteMove{}, start, 1000, 5, {}, 4, 1),
            sample_histogram(model, SingleSiteMove{}, start, 1000, 5, {}, 4, 3));
}

struct OutOfDomainMove {
  void propose(const FactorModel&, const Configuration&, Rng&, Proposal& out) const { out.changes.emplace_back(0, 0); }
};

TEST(Metropolis, OutOfDomainProposalIsMoveError) {
  auto model = ising::as_factor_model(ising::IsingModel(2, 2, 0.3));
  MetropolisChain chain(model, OutOfDomainMove{}, Configuration(4, 1), Rng(1));
  EXPECT_THROW(chain.step(), MoveError);
}

TEST(Metropolis, ZeroWeightStartRejected) {
  FactorModel gated({{0, 1}}, {Factor({0}, [](auto v) { return v[0] == 0 ? 0.0 : 1.0; })});
  EXPECT_THROW(MetropolisChain(gated, SingleSiteMove{}, Configuration{0}, Rng(1)), DomainError);
  EXPECT_THROW(metropolis_sample(gated, SingleSiteMove{}, Configuration{1}, 0, 1), InputError);
}

TEST(Metropolis, NeverEntersZeroWeightStates) {
  // Three-valued site whose middle value is forbidden.
  FactorModel model({{0, 1, 2}, {0, 1}}, {Factor({0}, [](auto v) { return v[0] == 1 ? 0.0 : 1.0; })});
  metropolis_sample(
      model, SingleSiteMove{}, Configuration{0, 0}, 5000, 8, [](const Configuration& c) { ASSERT_NE(c[0], 1); },
      {.steps_per_sample = 1});
}

TEST(TotalVariation, Basics) {
  const std::vector<std::uint64_t> counts{1, 1, 0, 2};
  const std::vector<double> exact{0.25, 0.25, 0.25, 0.25};
  EXPECT_DOUBLE_EQ(total_variation(counts, exact), 0.25);
  EXPECT_THROW(total_variation(std::vector<std::uint64_t>{0, 0}, std::vector<double>{0.5, 0.5}), InputError);
}

}  // namespace
}  // namespace statloc
