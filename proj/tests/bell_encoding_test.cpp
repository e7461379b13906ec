#include <gtest/gtest.h>

#include <cmath>

#include "statloc/bell/factor_encoding.hpp"
#include "statloc/bell/model.hpp"
#include "statloc/rng.hpp"

namespace statloc::bell {
namespace {

ExperimentSpec spec_with(int extent, double a_deg, double b_deg, double eps = 0.05) {
  ExperimentSpec spec;
  spec.lattice = DiamondLattice::light_cone(extent);
  spec.a_meas = setting_from_degrees(a_deg);
  spec.b_meas = setting_from_degrees(b_deg);
  spec.epsilon = eps;
  return spec;
}

TEST(Encoding, ProductOfVertexFactorsEqualsTrajectoryWeight) {
  for (int extent : {2, 4, 5}) {
    for (auto [a, b] : {std::pair{0.0, 0.0}, {0.0, 60.0}, {20.0, 135.0}}) {
      const auto spec = spec_with(extent, a, b);
      const TrajectoryFactorModel encoded(spec);
      for (const auto& c : enumerate_trajectories(spec)) {
        const double direct = trajectory_weight(c, spec);
        EXPECT_NEAR(config_weight(encoded.model(), encoded.encode(c)), direct, 1e-15 + 1e-12 * direct) << c.to_string();
      }
    }
  }
}

TEST(Encoding, SignallingRuleAgrees) {
  auto spec = spec_with(4, 10.0, 70.0, 0.2);
  spec.weight = AnnihilationWeight::signalling(0.7);
  const TrajectoryFactorModel encoded(spec);
  for (const auto& c : enumerate_trajectories(spec)) {
    const double direct = trajectory_weight(c, spec);
    EXPECT_NEAR(config_weight(encoded.model(), encoded.encode(c)), direct, 1e-12 * direct);
  }
}

TEST(Encoding, InvalidGeometriesEncodeToZero) {
  const auto spec = spec_with(4, 0.0, 90.0);
  const TrajectoryFactorModel encoded(spec);
  for (const char* text : {"LR RR 0 0 + -", "L R 0 0 + -", "LR RL 0 1 + -"}) {
    const auto c = TrajectoryConfig::parse(text, spec.source);
    EXPECT_EQ(config_weight(encoded.model(), encoded.encode(c)), 0.0) << text;
    EXPECT_EQ(trajectory_weight(c, spec), 0.0) << text;
  }
  EXPECT_THROW(encoded.encode(TrajectoryConfig::parse("LLLLL RL 0 0 + -", spec.source)), InputError);
}

TEST(Encoding, LabelSwitchedOnAfterDetectionIsZero) {
  // A label already present on the first edge (before the detector vertex) is rejected.
  const auto spec = spec_with(4, 0.0, 90.0);
  const TrajectoryFactorModel encoded(spec);
  auto config = encoded.encode(TrajectoryConfig::parse("LR RL 0 0 + -", spec.source));
  config[encoded.edge_site(0, spec.source, Move::left)] = kPlus;
  EXPECT_EQ(config_weight(encoded.model(), config), 0.0);
}

TEST(Encoding, EveryPositiveConfigurationAnnihilatesOnce) {
  const auto spec = spec_with(4, 0.0, 45.0);
  const TrajectoryFactorModel encoded(spec);
  int positive = 0;
  for (const auto& c : enumerate_trajectories(spec)) {
    const auto config = encoded.encode(c);
    if (config_weight(encoded.model(), config) == 0.0) continue;
    ++positive;
    const auto left = encoded.termination_vertices(config, 0);
    const auto right = encoded.termination_vertices(config, 1);
    ASSERT_EQ(left.size(), 1u);
    ASSERT_EQ(right.size(), 1u);
    EXPECT_EQ(left.front(), right.front());
  }
  EXPECT_GT(positive, 0);
}

TEST(Encoding, FactorsReadOnlyIncidentEdges) {
  const auto spec = spec_with(5, 0.0, 45.0);
  const TrajectoryFactorModel encoded(spec);
  for (const auto& f : encoded.model().factors()) EXPECT_LE(f.support().size(), 10u);
}

TEST(Encoding, LocalRatioMatchesGlobalRatio) {
  const auto spec = spec_with(5, 0.0, 60.0, 0.1);
  const TrajectoryFactorModel encoded(spec);
  const auto configs = enumerate_trajectories(spec);
  double z = 0.0;
  for (const auto& c : configs) z += trajectory_weight(c, spec);
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const auto& a = configs[rng.below(configs.size())];
    const auto& b = configs[rng.below(configs.size())];
    const double pa = trajectory_weight(a, spec) / z;
    const double pb = trajectory_weight(b, spec) / z;
    if (pb == 0.0) continue;
    const double local = local_ratio(encoded.model(), encoded.encode(a), encoded.encode(b));
    EXPECT_NEAR(local, pa / pb, 1e-12 * (pa / pb) + 1e-300);
  }
}

}  // namespace
}  // namespace statloc::bell
