// statloc: exact enumeration, sampling and verification campaigns for
// statistically local product-weight models.
//
// Exit status: 0 all checks pass, 1 a check failed, 2 usage/spec/capacity error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "statloc/bell/spec_io.hpp"
#include "statloc/experiments/campaigns.hpp"
#include "statloc/ising.hpp"
#include "statloc/metropolis.hpp"

namespace {

using namespace statloc;
namespace ex = statloc::experiments;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string format = "csv";
  std::string output;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t cap = kDefaultEnumerationCap;
  std::size_t workers = 1;
  bool quiet = false;

  ex::CampaignOptions campaign() const { return {cap, workers}; }
};

struct IsingArgs {
  std::size_t width = 3;
  std::size_t height = 3;
  double coupling = 0.3;
  std::string boundary = "open";
  std::uint64_t samples = 100000;
  std::size_t chains = 1;
  std::size_t trials = 100;

  ising::IsingModel model() const {
    return ising::IsingModel(width, height, coupling, boundary == "periodic" ? ising::Boundary::periodic
                                                                             : ising::Boundary::open);
  }
};

struct BellArgs {
  std::string spec_path;
  std::optional<int> extent;
  std::optional<double> theta;
  std::optional<double> a_angle;
  std::optional<double> b_angle;
  std::optional<double> epsilon;
  std::string weight;
  std::optional<double> lambda;
  std::optional<long> links;
  std::string angles;
  std::size_t trials = 100;
};

std::vector<double> parse_angles(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw InputError("invalid angle '" + item + "' in --angles");
    out.push_back(v);
  }
  return out;
}

bell::ExperimentSpec build_spec(const BellArgs& args) {
  bell::ExperimentSpec spec = args.spec_path.empty() ? bell::ExperimentSpec{} : bell::load_spec(args.spec_path);
  if (args.extent) spec.lattice = bell::DiamondLattice::light_cone(*args.extent);
  if (args.theta) {
    spec.a_meas = bell::kZAxis;
    spec.b_meas = bell::setting_from_degrees(*args.theta);
  }
  if (args.a_angle) spec.a_meas = bell::setting_from_degrees(*args.a_angle);
  if (args.b_angle) spec.b_meas = bell::setting_from_degrees(*args.b_angle);
  if (args.epsilon) spec.epsilon = *args.epsilon;
  if (args.weight == "canonical" || (args.weight.empty() && spec.weight.name() == "canonical")) {
    if (args.lambda) throw InputError("--lambda needs --weight signalling");
    spec.weight = bell::AnnihilationWeight::canonical();
  } else {
    spec.weight = bell::AnnihilationWeight::signalling(args.lambda.value_or(args.weight.empty() ? spec.weight.lambda() : 0.5));
  }
  bell::check_spec(spec);
  return spec;
}

/// Output sink: --output, else $STATLOC_OUTPUT_DIR/<name>.<format>, else stdout.
class Sink {
 public:
  Sink(const Common& common, const std::string& name) {
    std::string path = common.output;
    const char* dir = std::getenv("STATLOC_OUTPUT_DIR");
    if (path.empty() && dir && *dir) path = name + "." + common.format;
    if (!path.empty() && dir && *dir && std::filesystem::path(path).is_relative()) {
      std::filesystem::create_directories(dir);
      path = (std::filesystem::path(dir) / path).string();
    }
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw InputError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& out() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int emit_report(const Common& common, const ex::CampaignReport& report) {
  Sink sink(common, report.campaign);
  if (common.format == "json") {
    ex::write_json(sink.out(), report);
  } else {
    ex::write_csv(sink.out(), report);
  }
  if (!common.quiet) ex::write_summary(std::cerr, report);
  return report.passed() ? kExitPass : kExitCheckFailed;
}

std::string number(double v) { return ex::format_number(v); }

int ising_exact(const Common& common, const IsingArgs& args) {
  const auto model = args.model();
  const auto dist = ising::exact_distribution(model, {common.cap, common.workers});
  Sink sink(common, "ising-exact");
  auto& out = sink.out();
  if (common.format == "json") {
    nlohmann::ordered_json j;
    j["width"] = model.width();
    j["height"] = model.height();
    j["coupling"] = model.coupling();
    j["distribution"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < dist.size(); ++i) {
      j["distribution"].push_back({{"config", dist.config(i).to_string()}, {"probability", dist.probability(i)}});
    }
    out << j.dump(2) << '\n';
  } else {
    out << "config,probability\n";
    for (std::size_t i = 0; i < dist.size(); ++i) out << dist.config(i).to_string() << ',' << number(dist.probability(i)) << '\n';
  }
  return kExitPass;
}

int ising_sample(const Common& common, const IsingArgs& args) {
  const auto lattice = args.model();
  const auto model = ising::as_factor_model(lattice);
  if (args.samples < 1) throw InputError("--samples must be >= 1");
  const std::size_t chains = std::clamp<std::size_t>(args.chains, 1, args.samples);
  const bool exact_available = lattice.site_count() <= ising::kMaxExactSites;

  struct ChainResult {
    std::map<long, std::uint64_t> magnetization;
    std::vector<double> pair_sums;
    std::vector<std::uint64_t> histogram;
  };
  const auto& edges = lattice.edges();
  auto results = parallel_map(chains, common.workers, [&](std::size_t k) {
    ChainResult r;
    r.pair_sums.assign(edges.size(), 0.0);
    if (exact_available) r.histogram.assign(std::size_t{1} << lattice.site_count(), 0);
    const std::uint64_t n = args.samples / chains + (k < args.samples % chains ? 1 : 0);
    metropolis_sample(
        model, SingleSiteMove{}, Configuration(lattice.site_count(), 1), n, common.seed,
        [&](const Configuration& c) {
          long m = 0;
          for (Value s : c) m += s;
          ++r.magnetization[m];
          for (std::size_t e = 0; e < edges.size(); ++e) r.pair_sums[e] += c[edges[e].first] * c[edges[e].second];
          if (exact_available) ++r.histogram[model.index_of(c)];
        },
        {}, k);
    return r;
  });

  std::map<long, std::uint64_t> magnetization;
  std::vector<double> pair_sums(edges.size(), 0.0);
  std::vector<std::uint64_t> histogram(exact_available ? std::size_t{1} << lattice.site_count() : 0, 0);
  for (const auto& r : results) {
    for (auto [m, c] : r.magnetization) magnetization[m] += c;
    for (std::size_t e = 0; e < edges.size(); ++e) pair_sums[e] += r.pair_sums[e];
    for (std::size_t i = 0; i < histogram.size(); ++i) histogram[i] += r.histogram[i];
  }
  const double n = static_cast<double>(args.samples);
  std::optional<ising::IsingDistribution> exact;
  if (exact_available) exact = ising::exact_distribution(lattice, {common.cap, common.workers});

  // Long format: quantity,key,value,exact
  struct Row {
    std::string quantity;
    std::string key;
    double value;
    std::optional<double> exact;
  };
  std::vector<Row> rows;
  rows.push_back({"samples", "", n, std::nullopt});
  for (auto [m, c] : magnetization) rows.push_back({"magnetization", std::to_string(m), c / n, std::nullopt});
  for (std::size_t e = 0; e < edges.size(); ++e) {
    std::optional<double> reference;
    if (exact) reference = ising::two_point_correlation(lattice, *exact, edges[e].first, edges[e].second);
    rows.push_back({"correlation", std::to_string(edges[e].first) + "-" + std::to_string(edges[e].second),
                    pair_sums[e] / n, reference});
  }
  if (exact) rows.push_back({"total_variation", "", total_variation(histogram, exact->probabilities()), std::nullopt});

  Sink sink(common, "ising-sample");
  auto& out = sink.out();
  if (common.format == "json") {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json item{{"quantity", r.quantity}, {"key", r.key}, {"value", r.value}};
      item["exact"] = r.exact ? nlohmann::ordered_json(*r.exact) : nlohmann::ordered_json(nullptr);
      j.push_back(item);
    }
    out << j.dump(2) << '\n';
  } else {
    out << "quantity,key,value,exact\n";
    for (const auto& r : rows) out << r.quantity << ',' << r.key << ',' << number(r.value) << ',' << (r.exact ? number(*r.exact) : "") << '\n';
  }
  return kExitPass;
}

int bell_distribution(const Common& common, const BellArgs& args) {
  const auto spec = build_spec(args);
  const auto d = bell::outcome_distribution(spec, {common.cap, common.workers});
  Sink sink(common, "bell-distribution");
  auto& out = sink.out();
  if (common.format == "json") {
    nlohmann::ordered_json j;
    j["outcomes"] = nlohmann::ordered_json::array();
    for (auto [a, b] : bell::kOutcomes) {
      j["outcomes"].push_back({{"alpha", std::string(1, bell::sign_char(a))},
                               {"beta", std::string(1, bell::sign_char(b))},
                               {"probability", d(a, b)}});
    }
    j["correlation"] = d.correlation();
    out << j.dump(2) << '\n';
  } else {
    out << "alpha,beta,probability\n";
    for (auto [a, b] : bell::kOutcomes) out << bell::sign_char(a) << ',' << bell::sign_char(b) << ',' << number(d(a, b)) << '\n';
  }
  return kExitPass;
}

/// Golden-file format: one configuration and its probability per line, sorted.
int bell_trajectories(const Common& common, const BellArgs& args) {
  const auto spec = build_spec(args);
  const auto configs = bell::enumerate_trajectories(spec, {common.cap, common.workers});
  std::vector<double> w(configs.size());
  double z = 0.0;
  for (std::size_t i = 0; i < configs.size(); ++i) z += w[i] = bell::trajectory_weight(configs[i], spec);
  if (!(z > 0.0)) throw DegenerateModelError("every trajectory configuration has weight 0");
  Sink sink(common, "bell-trajectories");
  auto& out = sink.out();
  if (common.format == "json") {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < configs.size(); ++i) j.push_back({{"config", configs[i].to_string()}, {"probability", w[i] / z}});
    out << j.dump(2) << '\n';
  } else {
    for (std::size_t i = 0; i < configs.size(); ++i) out << configs[i].to_string() << ' ' << number(w[i] / z) << '\n';
  }
  return kExitPass;
}

int bell_validate(const Common& common, const BellArgs& args) {
  const auto spec = build_spec(args);
  const auto v = bell::validate(spec, args.links);
  Sink sink(common, "bell-validate");
  auto& out = sink.out();
  if (common.format == "json") {
    nlohmann::ordered_json j{{"link_count", v.link_count},
                             {"survival", v.survival},
                             {"threshold", bell::kSurvivalThreshold},
                             {"warning", v.survival_warning}};
    out << j.dump(2) << '\n';
  } else {
    out << "link_count,survival,threshold,warning\n"
        << v.link_count << ',' << number(v.survival) << ',' << number(bell::kSurvivalThreshold) << ','
        << (v.survival_warning ? "true" : "false") << '\n';
  }
  for (const auto& w : v.warnings) std::cerr << "warning: " << w << '\n';
  return kExitPass;
}

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--output,-o", common.output, "Output file (default: stdout or $STATLOC_OUTPUT_DIR)");
  cmd->add_option("--seed", common.seed, "RNG seed");
  cmd->add_option("--cap", common.cap, "Enumeration cap");
  cmd->add_option("--workers", common.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--quiet,-q", common.quiet, "Do not print the summary table");
}

void add_ising(CLI::App* cmd, IsingArgs& args) {
  cmd->add_option("--width", args.width, "Lattice width")->check(CLI::PositiveNumber);
  cmd->add_option("--height", args.height, "Lattice height")->check(CLI::PositiveNumber);
  cmd->add_option("--coupling,-C", args.coupling, "Coupling C >= 0");
  cmd->add_option("--boundary", args.boundary, "Boundary conditions")->check(CLI::IsMember({"open", "periodic"}));
}

void add_bell(CLI::App* cmd, BellArgs& args) {
  cmd->add_option("--spec", args.spec_path, "Experiment spec file");
  cmd->add_option("--extent", args.extent, "Light-cone lattice horizon");
  cmd->add_option("--theta", args.theta, "Angle between settings in degrees (a = z)");
  cmd->add_option("--a-angle", args.a_angle, "Left setting, degrees in the x-z plane");
  cmd->add_option("--b-angle", args.b_angle, "Right setting, degrees in the x-z plane");
  cmd->add_option("--epsilon", args.epsilon, "Switching weight");
  cmd->add_option("--weight", args.weight, "Annihilation weight rule")->check(CLI::IsMember({"canonical", "signalling"}));
  cmd->add_option("--lambda", args.lambda, "Signalling strength in [0, 1)");
}

int run(int argc, char** argv) {
  CLI::App app{"Exact enumeration, sampling and verification campaigns for statistically local models"};
  app.require_subcommand(1);
  Common common;
  IsingArgs ising_args;
  BellArgs bell_args;
  std::function<int()> action;

  auto* ising_cmd = app.add_subcommand("ising", "Square-lattice Ising model");
  ising_cmd->require_subcommand(1);
  auto* exact = ising_cmd->add_subcommand("exact", "Full exact distribution");
  auto* sample = ising_cmd->add_subcommand("sample", "Metropolis sampling summary");
  auto* locality = ising_cmd->add_subcommand("locality", "Statistical-locality audit");
  auto* sampler = ising_cmd->add_subcommand("sampler-check", "Sampler histogram vs exact distribution");
  for (auto* c : {exact, sample, locality, sampler}) {
    add_common(c, common);
    add_ising(c, ising_args);
  }
  for (auto* c : {sample, sampler}) {
    c->add_option("--samples,-n", ising_args.samples, "Number of sweeps");
    c->add_option("--chains", ising_args.chains, "Independent chains (stream k for chain k)")->check(CLI::PositiveNumber);
  }
  locality->add_option("--trials", ising_args.trials, "Number of configuration pairs");
  exact->callback([&] { action = [&] { return ising_exact(common, ising_args); }; });
  sample->callback([&] { action = [&] { return ising_sample(common, ising_args); }; });
  locality->callback([&] {
    action = [&] {
      return emit_report(common,
                         ex::run_locality_audit(ising_args.model(), ising_args.trials, common.seed, common.campaign()));
    };
  });
  sampler->callback([&] {
    action = [&] {
      return emit_report(common, ex::run_sampler_check(ising_args.model(), ising_args.samples, common.seed,
                                                       ising_args.chains, common.campaign()));
    };
  });

  auto* bell_cmd = app.add_subcommand("bell", "Lightlike trajectory model of a Bell experiment");
  bell_cmd->require_subcommand(1);
  std::map<std::string, CLI::App*> bell_sub;
  for (const char* name : {"distribution", "trajectories", "validate", "chsh-scan", "locality", "free-will",
                           "no-signalling", "signalling-demo"}) {
    bell_sub[name] = bell_cmd->add_subcommand(name);
    add_common(bell_sub[name], common);
    add_bell(bell_sub[name], bell_args);
  }
  bell_sub["distribution"]->description("Outcome distribution P(alpha, beta)");
  bell_sub["trajectories"]->description("Every configuration with its probability");
  bell_sub["validate"]->description("Spec checks and the (1 - epsilon)^N survival bound");
  bell_sub["validate"]->add_option("--links", bell_args.links, "Link count N (default: longest path to a detector)");
  bell_sub["chsh-scan"]->description("E(theta) curve and CHSH value");
  bell_sub["chsh-scan"]->add_option("--angles", bell_args.angles, "Comma-separated angles in degrees (default 0,10,...,180)");
  bell_sub["locality"]->description("Statistical-locality audit on the factor encoding");
  bell_sub["locality"]->add_option("--trials", bell_args.trials, "Number of configuration pairs");
  bell_sub["free-will"]->description("Pre-measurement records across the CHSH settings");
  bell_sub["no-signalling"]->description("Single-wing marginals across a settings grid");
  bell_sub["no-signalling"]->add_option("--angles", bell_args.angles, "Comma-separated angles in degrees (default 0,15,...,165)");
  bell_sub["signalling-demo"]->description("Signalling annihilation weight: consistency and marginal shift");

  bell_sub["distribution"]->callback([&] { action = [&] { return bell_distribution(common, bell_args); }; });
  bell_sub["trajectories"]->callback([&] { action = [&] { return bell_trajectories(common, bell_args); }; });
  bell_sub["validate"]->callback([&] { action = [&] { return bell_validate(common, bell_args); }; });
  bell_sub["chsh-scan"]->callback([&] {
    action = [&] {
      const auto angles = bell_args.angles.empty() ? ex::angle_grid(19, 0.0, 10.0) : parse_angles(bell_args.angles);
      return emit_report(common, ex::run_chsh_scan(build_spec(bell_args), angles, common.campaign()));
    };
  });
  bell_sub["locality"]->callback([&] {
    action = [&] {
      return emit_report(common, ex::run_locality_audit(build_spec(bell_args), bell_args.trials, common.seed,
                                                        common.campaign()));
    };
  });
  bell_sub["free-will"]->callback([&] {
    action = [&] {
      return emit_report(common, ex::run_free_will_suite(build_spec(bell_args), ex::chsh_settings(), common.seed,
                                                         common.campaign()));
    };
  });
  bell_sub["no-signalling"]->callback([&] {
    action = [&] {
      const auto angles = bell_args.angles.empty() ? ex::angle_grid(12) : parse_angles(bell_args.angles);
      return emit_report(common,
                         ex::run_no_signalling_suite(build_spec(bell_args), ex::settings_grid(angles), common.campaign()));
    };
  });
  bell_sub["signalling-demo"]->callback([&] {
    action = [&] {
      const auto settings = std::vector<ex::SettingsPair>{ex::settings_from_degrees(0, 0), ex::settings_from_degrees(0, 90),
                                                          ex::settings_from_degrees(0, 180)};
      BellArgs base = bell_args;
      base.weight = "canonical";
      base.lambda.reset();
      return emit_report(common, ex::run_signalling_demo(build_spec(base), bell_args.lambda.value_or(0.5), settings,
                                                         common.campaign()));
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    return action();
  } catch (const Error& e) {
    nlohmann::ordered_json err{{"error", {{"kind", e.kind()}, {"message", e.what()}}}};
    std::cerr << err.dump() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    nlohmann::ordered_json err{{"error", {{"kind", "internal"}, {"message", e.what()}}}};
    std::cerr << err.dump() << '\n';
    return kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
