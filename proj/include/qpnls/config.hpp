#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpnls/solver.hpp"

namespace qpnls {

struct AsymptoticsConfig {
  std::vector<double> epsilons{1e-2, 1e-3, 1e-4};
  double eta = 0.2;
  int sobolev_s = 1;
  double dt_max = 0.01;
  std::int64_t max_steps = 4'000'000;
};

struct CombinatoricsConfig {
  int k_max = 2;
  std::uint64_t budget = 2'000'000;
};

struct BoundsConfig {
  std::vector<double> s_grid{4, 6, 8, 12};
  std::vector<int> nu_grid{1, 2};
  std::vector<int> n_grid{4, 8, 16};
  int samples = 100;
};

// Everything a run needs; identical (config, seed) pairs produce
// byte-identical artifacts.
struct RunConfig {
  ProblemSpec spec;
  bool t_end_from_t0 = false;  // grid t_end was given as "t0"
  AsymptoticsConfig asymptotics;
  CombinatoricsConfig combinatorics;
  BoundsConfig bounds;
  std::string out_dir = "out";
  std::vector<std::string> warnings;  // guarantee-regime violations
};

// Parses and validates; hypothesis violations (r > 8, 2 <= nu < r/4) become
// warnings, structural problems become parse_error with the key path.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Canonical JSON form; parse_config_text(config_to_json(c)) reproduces c.
std::string config_to_json(const RunConfig& c);

// Deterministic run name: hash of the canonical config.
std::string config_hash_name(const RunConfig& c);

}  // namespace qpnls
