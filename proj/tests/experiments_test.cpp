#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "statloc/experiments/campaigns.hpp"

namespace statloc::experiments {
namespace {

bell::ExperimentSpec extent(int n) {
  bell::ExperimentSpec spec;
  spec.lattice = bell::DiamondLattice::light_cone(n);
  return spec;
}

const CheckRecord& find(const CampaignReport& r, const std::string& id) {
  for (const auto& c : r.checks) {
    if (c.id == id) return c;
  }
  throw std::out_of_range(id);
}

TEST(Report, ComparisonRules) {
  EXPECT_TRUE(make_check("x", 1.0, 1.0, 0.0).pass);
  EXPECT_FALSE(make_check("x", 1.0, 1.1, 0.05).pass);
  EXPECT_TRUE(make_check("x", 1e6, 1e6 + 1e-7, 1e-12, Comparison::relative).pass);
  EXPECT_TRUE(make_check("x", 0.0, 0.3, 0.0, Comparison::lower_bound).pass);
  EXPECT_FALSE(make_check("x", 0.0, -1e-300, 0.0, Comparison::lower_bound).pass);
  EXPECT_FALSE(make_check("x", 0.0, std::nan(""), 1.0).pass);
}

TEST(Report, CsvAndJsonMirrorEachOther) {
  CampaignReport r{"demo", 7};
  r.add(make_check("a", 0.5, 0.75, 1e-12));
  r.metric("m", 0.25);
  r.runtime_seconds = 123.0;
  std::ostringstream csv;
  write_csv(csv, r);
  EXPECT_EQ(csv.str(),
            "campaign,check,kind,expected,observed,tolerance,pass\n"
            "demo,a,abs,0.5,0.75,9.9999999999999998e-13,false\n"
            "demo,m,metric,,0.25,,\n");
  const auto j = to_json(r);
  EXPECT_EQ(j["campaign"], "demo");
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["passed"], false);
  EXPECT_EQ(j["checks"][0]["observed"], 0.75);
  EXPECT_FALSE(j.contains("runtime"));
  std::ostringstream table;
  write_summary(table, r);
  EXPECT_NE(table.str().find("FAIL"), std::string::npos);
}

TEST(Locality, IsingAuditAllPass) {
  const auto r = run_locality_audit(ising::IsingModel(4, 4, 0.45), 100, 3);
  EXPECT_EQ(r.checks.size(), 100u);
  EXPECT_TRUE(r.passed());
}

TEST(Locality, BellAuditAllPass) {
  const auto minimal = run_locality_audit(bell::minimal_spec().with_settings(bell::kZAxis, bell::setting_from_degrees(60)), 50, 4);
  EXPECT_EQ(minimal.checks.size(), 50u);
  EXPECT_TRUE(minimal.passed());
  const auto wider = run_locality_audit(extent(6).with_settings(bell::kZAxis, bell::setting_from_degrees(60)), 100, 4);
  EXPECT_TRUE(wider.passed());
}

TEST(Locality, ZeroTrialsIsEmptyPass) {
  const auto r = run_locality_audit(ising::IsingModel(2, 2, 0.1), 0, 1);
  EXPECT_TRUE(r.checks.empty());
  EXPECT_TRUE(r.passed());
}

TEST(Locality, DeterministicGivenSeed) {
  std::ostringstream a;
  std::ostringstream b;
  write_csv(a, run_locality_audit(ising::IsingModel(3, 3, 0.2), 20, 9));
  write_csv(b, run_locality_audit(ising::IsingModel(3, 3, 0.2), 20, 9));
  EXPECT_EQ(a.str(), b.str());
}

TEST(FreeWill, ChshSettingsOnMinimalAndExtent8) {
  const auto minimal = run_free_will_suite(bell::minimal_spec(), chsh_settings(), 1);
  EXPECT_EQ(minimal.checks.size(), 6u);
  for (const auto& c : minimal.checks) EXPECT_EQ(c.observed, 0.0);
  const auto big = run_free_will_suite(extent(8), chsh_settings(), 1);
  EXPECT_TRUE(big.passed());
}

TEST(FreeWill, SinglePairTriviallyPasses) {
  const auto r = run_free_will_suite(bell::minimal_spec(), {settings_from_degrees(0, 45)}, 1);
  EXPECT_TRUE(r.checks.empty());
  EXPECT_TRUE(r.passed());
}

TEST(FreeWill, GeometryMismatchIsSpecError) {
  EXPECT_THROW(run_free_will_suite({extent(4), extent(6)}, {"x", "y"}, 1), SpecError);
}

TEST(NoSignalling, CanonicalPassesSignallingFails) {
  const auto grid = settings_grid(angle_grid(12));
  const auto canonical = run_no_signalling_suite(extent(4), grid);
  EXPECT_EQ(canonical.checks.size(), 2 * 144u);
  EXPECT_TRUE(canonical.passed());

  auto spec = extent(4);
  spec.weight = bell::AnnihilationWeight::signalling(0.5);
  const auto signalling = run_no_signalling_suite(spec, grid);
  EXPECT_FALSE(signalling.passed());
  const auto& c = find(signalling, "P_left(+)[a=0,b=0]");
  EXPECT_NEAR(c.observed, 0.75, 1e-12);
  EXPECT_FALSE(c.pass);
  EXPECT_TRUE(find(signalling, "P_right(+)[a=0,b=0]").pass);
}

TEST(SignallingDemo, MarginalFollowsRemoteSetting) {
  const auto r = run_signalling_demo(extent(4), 0.5, {settings_from_degrees(0, 0), settings_from_degrees(0, 90)});
  EXPECT_TRUE(r.passed());
  EXPECT_NEAR(find(r, "P_left(+)[a=0,b=0]").observed, 0.75, 1e-12);
  EXPECT_NEAR(find(r, "P_left(+)[a=0,b=90]").observed, 0.5, 1e-12);
  double success = 0.0;
  for (const auto& m : r.metrics) {
    if (m.name == "signalling-success-probability") success = m.value;
  }
  EXPECT_NEAR(success, 0.75, 1e-12);
}

TEST(SignallingDemo, LambdaZeroIsCanonical) {
  const auto r = run_signalling_demo(extent(4), 0.0, {settings_from_degrees(0, 0)});
  EXPECT_TRUE(r.passed());
  EXPECT_NEAR(find(r, "P_left(+)[a=0,b=0]").observed, 0.5, 1e-12);
  EXPECT_THROW(run_signalling_demo(extent(4), 1.0, {}), InputError);
}

TEST(ChshScan, KnownCurve) {
  const auto r = run_chsh_scan(bell::minimal_spec(), {0, 45, 90, 135, 180});
  EXPECT_TRUE(r.passed());
  EXPECT_NEAR(find(r, "E[theta=45]").observed, -std::numbers::sqrt2 / 2, 1e-12);
  EXPECT_NEAR(find(r, "E[theta=180]").observed, 1.0, 1e-12);
  // 45-degree steps contain the optimal quadruple.
  EXPECT_NEAR(r.metrics.front().value, 2 * std::numbers::sqrt2, 1e-9);
}

TEST(ChshScan, EmptyGrid) { EXPECT_TRUE(run_chsh_scan(bell::minimal_spec(), {}).checks.empty()); }

TEST(Sampler, SmallLatticeConvergesAndIsDeterministic) {
  const ising::IsingModel lattice(2, 2, 0.5);
  const auto a = run_sampler_check(lattice, 200000, 5, 2);
  EXPECT_TRUE(a.passed());
  std::ostringstream x;
  std::ostringstream y;
  write_csv(x, a);
  write_csv(y, run_sampler_check(lattice, 200000, 5, 2, {.workers = 2}));
  EXPECT_EQ(x.str(), y.str());
}

}  // namespace
}  // namespace statloc::experiments
