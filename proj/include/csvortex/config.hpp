#pragma once

// Experiment configuration: TOML-style sections of flat key = value lines.
// The schema is closed; unknown sections or keys are rejected before any
// compute so sweep scripts fail fast on typos.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "csvortex/vortex.hpp"

namespace csvortex {

struct ConfigInvalid : std::runtime_error {
  explicit ConfigInvalid(const std::string& what)
      : std::runtime_error("config: " + what) {}
};

enum class SolverKind { Monotone, Newton, Perturbative };

struct ExperimentConfig {
  int grid_n = 256;
  std::vector<double> epsilon;          // one or more values (sweep list)
  std::vector<Vec2> vortex_points;
  std::vector<int> vortex_multiplicities;
  SolverKind solver = SolverKind::Monotone;
  double solver_tol = 1e-10;
  int max_iter = 10000;
  double kappa = 0.0;                   // monotone; 0 = auto
  double krylov_tol = 1e-4;             // newton inner
  double cutoff_delta = 0.2;            // perturbative
  double planar_alpha = 1.0;            // perturbative profile strength
  std::vector<std::string> checks;      // flux, pohozaev, decay, dichotomy,
                                        // spectrum, uniqueness
  double pohozaev_radius = 20.0;
  double flux_rel_tol = 1e-3;
  double pohozaev_gap_tol = 0.05;
  std::vector<double> decay_radii{3.0, 5.0, 8.0};
  int uniqueness_trials = 5;
  double cluster_threshold = 10.0;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;

  VortexConfiguration vortices(double eps) const {
    return VortexConfiguration(vortex_points, vortex_multiplicities, eps);
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline double parse_real(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigInvalid("key '" + key + "': not a number: '" + s + "'");
  }
}

inline long parse_int(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigInvalid("key '" + key + "': not an integer: '" + s + "'");
  }
}

}  // namespace detail

/// Parse and validate a config file. Every key is checked against the schema
/// and every value range-checked; errors carry the offending key.
inline ExperimentConfig parse_config(std::istream& in) {
  using detail::parse_int;
  using detail::parse_real;
  static const std::map<std::string, std::set<std::string>> schema = {
      {"grid", {"n"}},
      {"physics", {"epsilon"}},
      {"vortices", {"vortex", "cluster_threshold"}},
      {"solver", {"type", "tol", "max_iter", "kappa", "krylov_tol", "delta", "alpha"}},
      {"diagnostics",
       {"checks", "pohozaev_radius", "flux_rel_tol", "pohozaev_gap_tol",
        "decay_radii", "uniqueness_trials"}},
      {"output", {"dir", "seed"}},
  };
  static const std::set<std::string> known_checks = {
      "flux", "pohozaev", "decay", "dichotomy", "spectrum", "uniqueness"};

  ExperimentConfig cfg;
  cfg.epsilon.clear();
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigInvalid("line " + std::to_string(lineno) + ": bad section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (!schema.count(section))
        throw ConfigInvalid("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigInvalid("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigInvalid("key '" + key + "' outside any section");
    if (!schema.at(section).count(key))
      throw ConfigInvalid("unknown key '" + key + "' in section [" + section + "]");

    if (section == "grid" && key == "n") {
      cfg.grid_n = static_cast<int>(parse_int(val, key));
    } else if (section == "physics" && key == "epsilon") {
      for (const auto& tok : detail::split_ws(val))
        cfg.epsilon.push_back(parse_real(tok, key));
    } else if (section == "vortices" && key == "vortex") {
      const auto toks = detail::split_ws(val);
      if (toks.size() != 2 && toks.size() != 3)
        throw ConfigInvalid("vortex needs 'x y [multiplicity]', got '" + val + "'");
      cfg.vortex_points.push_back(
          {parse_real(toks[0], key), parse_real(toks[1], key)});
      cfg.vortex_multiplicities.push_back(
          toks.size() == 3 ? static_cast<int>(parse_int(toks[2], key)) : 1);
    } else if (section == "vortices" && key == "cluster_threshold") {
      cfg.cluster_threshold = parse_real(val, key);
    } else if (section == "solver" && key == "type") {
      if (val == "monotone") cfg.solver = SolverKind::Monotone;
      else if (val == "newton") cfg.solver = SolverKind::Newton;
      else if (val == "perturbative") cfg.solver = SolverKind::Perturbative;
      else throw ConfigInvalid("solver type must be monotone|newton|perturbative");
    } else if (section == "solver" && key == "tol") {
      cfg.solver_tol = parse_real(val, key);
    } else if (section == "solver" && key == "max_iter") {
      cfg.max_iter = static_cast<int>(parse_int(val, key));
    } else if (section == "solver" && key == "kappa") {
      cfg.kappa = parse_real(val, key);
    } else if (section == "solver" && key == "krylov_tol") {
      cfg.krylov_tol = parse_real(val, key);
    } else if (section == "solver" && key == "delta") {
      cfg.cutoff_delta = parse_real(val, key);
    } else if (section == "solver" && key == "alpha") {
      cfg.planar_alpha = parse_real(val, key);
    } else if (section == "diagnostics" && key == "checks") {
      for (const auto& tok : detail::split_ws(val)) {
        if (tok == "all") {
          cfg.checks.assign(known_checks.begin(), known_checks.end());
        } else if (known_checks.count(tok)) {
          cfg.checks.push_back(tok);
        } else {
          throw ConfigInvalid("unknown check '" + tok + "'");
        }
      }
    } else if (section == "diagnostics" && key == "pohozaev_radius") {
      cfg.pohozaev_radius = parse_real(val, key);
    } else if (section == "diagnostics" && key == "flux_rel_tol") {
      cfg.flux_rel_tol = parse_real(val, key);
    } else if (section == "diagnostics" && key == "pohozaev_gap_tol") {
      cfg.pohozaev_gap_tol = parse_real(val, key);
    } else if (section == "diagnostics" && key == "decay_radii") {
      cfg.decay_radii.clear();
      for (const auto& tok : detail::split_ws(val))
        cfg.decay_radii.push_back(parse_real(tok, key));
    } else if (section == "diagnostics" && key == "uniqueness_trials") {
      cfg.uniqueness_trials = static_cast<int>(parse_int(val, key));
    } else if (section == "output" && key == "dir") {
      cfg.output_dir = val;
    } else if (section == "output" && key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(val, key));
    }
  }

  if (cfg.epsilon.empty()) throw ConfigInvalid("physics.epsilon is required");
  for (double e : cfg.epsilon)
    if (!(e > 0.0)) throw ConfigInvalid("epsilon values must be positive");
  if (cfg.grid_n < 16 || cfg.grid_n % 2 != 0)
    throw ConfigInvalid("grid.n must be even and >= 16");
  for (int mlt : cfg.vortex_multiplicities)
    if (mlt < 1) throw ConfigInvalid("vortex multiplicities must be >= 1");
  if (cfg.solver_tol <= 0.0) throw ConfigInvalid("solver.tol must be positive");
  if (cfg.max_iter < 1) throw ConfigInvalid("solver.max_iter must be >= 1");
  if (cfg.uniqueness_trials < 2)
    throw ConfigInvalid("diagnostics.uniqueness_trials must be >= 2");
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot read " + path.string());
  return parse_config(in);
}

/// FNV-1a hash of the config text, recorded in the run manifest.
inline std::string config_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t h = 1469598103934665603ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace csvortex
