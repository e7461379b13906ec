#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "statloc/bell/spec_io.hpp"

namespace statloc::bell {
namespace {

TEST(SpecIo, ParsesAllKeys) {
  const auto spec = parse_spec(R"(
# comment line
extent = 6
left_detector = -1   # trailing comment
right_detector = 3
a_meas = 0 0 1
b_angle = 90
epsilon = 0.001
weight_rule = signalling
lambda = 0.25
pair_labels = 2 2
)");
  EXPECT_EQ(spec.lattice, DiamondLattice::light_cone(6));
  EXPECT_EQ(spec.right_detector, 3);
  EXPECT_NEAR(spec.b_meas.x, 1.0, 1e-15);
  EXPECT_NEAR(spec.b_meas.z, 0.0, 1e-15);
  EXPECT_EQ(spec.epsilon, 0.001);
  EXPECT_EQ(spec.weight.name(), "signalling");
  EXPECT_EQ(spec.weight.lambda(), 0.25);
  EXPECT_EQ(spec.pair_left, 2);
}

TEST(SpecIo, EmptyInputGivesDefaults) {
  const auto spec = parse_spec("");
  EXPECT_TRUE(same_geometry(spec, ExperimentSpec{}));
  EXPECT_EQ(spec.weight.name(), "canonical");
}

TEST(SpecIo, WriteParseRoundTrip) {
  ExperimentSpec spec;
  spec.lattice = {5, 4, 7};
  spec.source = {1, 0};
  spec.left_detector = 0;
  spec.right_detector = 3;
  spec.a_meas = setting_from_degrees(33.3);
  spec.b_meas = setting_in_xz_plane(std::numbers::pi / 7);
  spec.epsilon = 0.0123456789;
  spec.weight = AnnihilationWeight::signalling(0.3);
  const auto back = parse_spec(write_spec(spec));
  EXPECT_TRUE(same_geometry(spec, back));
  EXPECT_EQ(back.a_meas.x, spec.a_meas.x);
  EXPECT_EQ(back.a_meas.z, spec.a_meas.z);
  EXPECT_EQ(back.b_meas.x, spec.b_meas.x);
  EXPECT_EQ(back.weight.lambda(), 0.3);
  EXPECT_EQ(write_spec(back), write_spec(spec));
}

TEST(SpecIo, RejectsBadInput) {
  EXPECT_THROW(parse_spec("colour = blue"), SpecError);
  EXPECT_THROW(parse_spec("epsilon = 0.1\nepsilon = 0.2"), SpecError);
  EXPECT_THROW(parse_spec("epsilon = abc"), SpecError);
  EXPECT_THROW(parse_spec("extent = 1.5"), SpecError);
  EXPECT_THROW(parse_spec("a_meas = 0 1"), SpecError);
  EXPECT_THROW(parse_spec("no equals sign"), SpecError);
  EXPECT_THROW(parse_spec("weight_rule = magic"), SpecError);
  EXPECT_THROW(parse_spec("weight_rule = signalling\nlambda = 1"), SpecError);
  EXPECT_THROW(parse_spec("lambda = 0.5"), SpecError);
  EXPECT_THROW(parse_spec("extent = 2\nright_detector = 5"), SpecError);
  EXPECT_THROW(parse_spec("a_meas = 0 0 2"), SpecError);
  EXPECT_THROW(parse_spec("extent = 4\nlattice = 4 4 4"), SpecError);
  EXPECT_THROW(load_spec("/nonexistent/spec.txt"), SpecError);
}

TEST(SpecIo, WritesTrajectoriesOnePerLine) {
  std::ostringstream out;
  write_trajectories(out, enumerate_trajectories(minimal_spec()));
  EXPECT_EQ(out.str(), "LR RL 0 0 + +\nLR RL 0 0 + -\nLR RL 0 0 - +\nLR RL 0 0 - -\n");
}

}  // namespace
}  // namespace statloc::bell
