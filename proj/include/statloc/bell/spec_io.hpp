#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "statloc/bell/experiment.hpp"
#include "statloc/bell/model.hpp"
#include "statloc/error.hpp"

namespace statloc::bell {

// Experiment spec files are "key = value" lines; '#' starts a comment.
//
//   extent         = 8          # light-cone lattice cut at time 8
//   lattice        = 4 4 8      # alternatively: u_max v_max horizon
//   source         = 0 0        # u v
//   left_detector  = -1         # x of the left detector line
//   right_detector = 1
//   a_meas         = 0 0 1      # unit vector, or a_angle = <degrees in the x-z plane>
//   b_meas         = 1 0 0      # or b_angle
//   epsilon        = 0.01
//   weight_rule    = canonical  # or signalling
//   lambda         = 0.5        # signalling strength
//   pair_labels    = 0 0
//
// Missing keys keep the defaults of ExperimentSpec.

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
std::vector<T> parse_values(const std::string& key, const std::string& text, std::size_t expected) {
  std::istringstream in(text);
  std::vector<T> out;
  T value{};
  while (in >> value) out.push_back(value);
  if (!in.eof() || out.size() != expected) {
    throw SpecError("key '" + key + "' expects " + std::to_string(expected) + " numeric value(s), got '" + text + "'");
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline ExperimentSpec parse_spec(std::istream& in) {
  ExperimentSpec spec;
  std::string weight_rule = "canonical";
  double lambda = 0.0;
  bool lambda_given = false;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw SpecError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw SpecError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");

    if (key == "extent") {
      spec.lattice = DiamondLattice::light_cone(detail::parse_values<int>(key, value, 1)[0]);
    } else if (key == "lattice") {
      const auto v = detail::parse_values<int>(key, value, 3);
      spec.lattice = {v[0], v[1], v[2]};
    } else if (key == "source") {
      const auto v = detail::parse_values<int>(key, value, 2);
      spec.source = {v[0], v[1]};
    } else if (key == "left_detector") {
      spec.left_detector = detail::parse_values<int>(key, value, 1)[0];
    } else if (key == "right_detector") {
      spec.right_detector = detail::parse_values<int>(key, value, 1)[0];
    } else if (key == "a_meas" || key == "b_meas") {
      const auto v = detail::parse_values<double>(key, value, 3);
      (key == "a_meas" ? spec.a_meas : spec.b_meas) = {v[0], v[1], v[2]};
    } else if (key == "a_angle" || key == "b_angle") {
      const auto v = detail::parse_values<double>(key, value, 1);
      (key == "a_angle" ? spec.a_meas : spec.b_meas) = setting_from_degrees(v[0]);
    } else if (key == "epsilon") {
      spec.epsilon = detail::parse_values<double>(key, value, 1)[0];
    } else if (key == "weight_rule") {
      weight_rule = value;
    } else if (key == "lambda") {
      lambda = detail::parse_values<double>(key, value, 1)[0];
      lambda_given = true;
    } else if (key == "pair_labels") {
      const auto v = detail::parse_values<int>(key, value, 2);
      spec.pair_left = v[0];
      spec.pair_right = v[1];
    } else {
      throw SpecError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (seen.contains("extent") && seen.contains("lattice")) throw SpecError("give either 'extent' or 'lattice', not both");
  if ((seen.contains("a_meas") && seen.contains("a_angle")) || (seen.contains("b_meas") && seen.contains("b_angle"))) {
    throw SpecError("give each setting either as a vector or as an angle, not both");
  }
  if (weight_rule == "canonical") {
    if (lambda_given) throw SpecError("'lambda' only applies to weight_rule = signalling");
  } else if (weight_rule == "signalling") {
    try {
      spec.weight = AnnihilationWeight::signalling(lambda);
    } catch (const InputError& e) {
      throw SpecError(e.what());
    }
  } else {
    throw SpecError("unknown weight_rule '" + weight_rule + "' (expected canonical or signalling)");
  }
  if (spec.pair_left < 0 || spec.pair_right < 0) throw SpecError("pair labels must be >= 0");
  check_spec(spec);
  return spec;
}

inline ExperimentSpec parse_spec(const std::string& text) {
  std::istringstream in(text);
  return parse_spec(in);
}

inline ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open experiment spec '" + path + "'");
  return parse_spec(in);
}

/// Canonical text form; parse_spec(write_spec(s)) reproduces s exactly.
inline std::string write_spec(const ExperimentSpec& spec) {
  using detail::format_double;
  std::ostringstream out;
  out << "lattice = " << spec.lattice.u_max << ' ' << spec.lattice.v_max << ' ' << spec.lattice.horizon << '\n'
      << "source = " << spec.source.u << ' ' << spec.source.v << '\n'
      << "left_detector = " << spec.left_detector << '\n'
      << "right_detector = " << spec.right_detector << '\n'
      << "a_meas = " << format_double(spec.a_meas.x) << ' ' << format_double(spec.a_meas.y) << ' '
      << format_double(spec.a_meas.z) << '\n'
      << "b_meas = " << format_double(spec.b_meas.x) << ' ' << format_double(spec.b_meas.y) << ' '
      << format_double(spec.b_meas.z) << '\n'
      << "epsilon = " << format_double(spec.epsilon) << '\n'
      << "weight_rule = " << spec.weight.name() << '\n';
  if (spec.weight.name() == "signalling") out << "lambda = " << format_double(spec.weight.lambda()) << '\n';
  out << "pair_labels = " << spec.pair_left << ' ' << spec.pair_right << '\n';
  return out.str();
}

/// One configuration per line in enumeration order.
inline void write_trajectories(std::ostream& out, const std::vector<TrajectoryConfig>& configs) {
  for (const auto& c : configs) out << c.to_string() << '\n';
}

}  // namespace statloc::bell
