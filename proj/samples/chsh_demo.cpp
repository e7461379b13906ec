// Prints E(theta) on a coarse grid and the CHSH value for a spec file.
//   chsh_demo [spec-file]

#include <cstdio>
#include <numbers>

#include "statloc/bell/spec_io.hpp"

int main(int argc, char** argv) {
  using namespace statloc::bell;
  const ExperimentSpec spec = argc > 1 ? load_spec(argv[1]) : minimal_spec();
  std::printf("%zu configurations\n", enumerate_trajectories(spec).size());
  for (int deg = 0; deg <= 180; deg += 30) {
    const double e = correlation(spec.with_settings(kZAxis, setting_from_degrees(deg)));
    std::printf("theta %3d  E % .12f\n", deg, e);
  }
  const auto d = setting_from_degrees;
  std::printf("S = %.12f (2 sqrt2 = %.12f)\n", chsh(spec, d(0), d(90), d(45), d(135)), 2 * std::numbers::sqrt2);
}
