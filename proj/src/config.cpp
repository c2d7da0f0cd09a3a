#include "qpnls/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "qpnls/bounds.hpp"
#include "qpnls/errors.hpp"
#include "qpnls/io.hpp"
#include "qpnls/rng.hpp"

namespace qpnls {

namespace {

using Json = nlohmann::ordered_json;

const Json& require(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key))
    throw parse_error("missing required key", path + "/" + key);
  return obj.at(key);
}

double as_number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw parse_error("expected a number", path);
  return v.get<double>();
}

int as_int(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) throw parse_error("expected an integer", path);
  return v.get<int>();
}

std::string as_string(const Json& v, const std::string& path) {
  if (!v.is_string()) throw parse_error("expected a string", path);
  return v.get<std::string>();
}

PhaseScheme parse_phase_scheme(const std::string& s, const std::string& path) {
  if (s == "zero") return PhaseScheme::zero;
  if (s == "deterministic") return PhaseScheme::deterministic;
  if (s == "seeded-random") return PhaseScheme::seeded_random;
  throw parse_error("unknown phase scheme '" + s + "'", path);
}

std::string phase_scheme_name(PhaseScheme s) {
  switch (s) {
    case PhaseScheme::zero: return "zero";
    case PhaseScheme::deterministic: return "deterministic";
    case PhaseScheme::seeded_random: return "seeded-random";
  }
  return "?";
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  if (text.empty()) throw parse_error("empty config");
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw parse_error("config root must be an object");

  RunConfig c;
  ProblemSpec& spec = c.spec;

  spec.nu = as_int(require(root, "nu", ""), "/nu");
  if (spec.nu < 2) throw parse_error("nu must be >= 2", "/nu");
  spec.p = as_int(require(root, "p", ""), "/p");
  if (spec.p < 1) throw parse_error("p must be >= 1", "/p");

  const Json& om = require(root, "omega", "");
  if (!om.is_array() || static_cast<int>(om.size()) != spec.nu)
    throw parse_error("omega must be an array of nu numbers", "/omega");
  spec.omega_entries.clear();
  for (std::size_t j = 0; j < om.size(); ++j)
    spec.omega_entries.push_back(as_number(om[j], "/omega[" + fmt_int(static_cast<std::int64_t>(j)) + "]"));
  try {
    FrequencyVector check(spec.omega_entries);
  } catch (const argument_error& e) {
    throw parse_error(e.what(), "/omega");
  }

  spec.lambda_sign = as_int(require(root, "lambda_sign", ""), "/lambda_sign");
  if (spec.lambda_sign != 1 && spec.lambda_sign != -1)
    throw parse_error("lambda_sign must be +1 or -1", "/lambda_sign");

  spec.amplitude = as_number(require(root, "amplitude", ""), "/amplitude");
  if (!(spec.amplitude > 0)) throw parse_error("amplitude must be positive", "/amplitude");

  const Json& decay = require(root, "decay", "");
  const std::string model = as_string(require(decay, "model", "/decay"), "/decay/model");
  if (model == "polynomial") spec.decay_model = DecayModel::polynomial;
  else if (model == "exponential") spec.decay_model = DecayModel::exponential;
  else throw parse_error("decay model must be 'polynomial' or 'exponential'", "/decay/model");
  spec.decay_rate = as_number(require(decay, "rate", "/decay"), "/decay/rate");
  if (!(spec.decay_rate > 0)) throw parse_error("decay rate must be positive", "/decay/rate");
  if (spec.decay_model == DecayModel::exponential && spec.decay_rate > 1.0)
    throw parse_error("exponential decay rate must lie in (0,1]", "/decay/rate");

  spec.box_radius = as_int(require(root, "box_radius", ""), "/box_radius");
  if (spec.box_radius < 0) throw parse_error("box_radius must be >= 0", "/box_radius");

  const Json& grid = require(root, "grid", "");
  const Json& te = require(grid, "t_end", "/grid");
  const int steps = as_int(require(grid, "steps", "/grid"), "/grid/steps");
  double t_end = 0;
  if (te.is_string()) {
    if (te.get<std::string>() != "t0")
      throw parse_error("t_end must be a number or \"t0\"", "/grid/t_end");
    if (spec.decay_model != DecayModel::polynomial)
      throw parse_error("t_end=\"t0\" requires polynomial decay", "/grid/t_end");
    if (!(spec.decay_rate / 2.0 > spec.nu))
      throw parse_error("t_end=\"t0\" requires r/2 > nu", "/grid/t_end");
    c.t_end_from_t0 = true;
    t_end = t0_bound(spec.amplitude, spec.decay_rate, spec.nu, spec.p);
  } else {
    t_end = as_number(te, "/grid/t_end");
  }
  try {
    spec.grid = TimeGrid(t_end, steps);
  } catch (const argument_error& e) {
    throw parse_error(e.what(), "/grid");
  }

  spec.picard_depth = as_int(require(root, "picard_depth", ""), "/picard_depth");
  if (spec.picard_depth < 1) throw parse_error("picard_depth must be >= 1", "/picard_depth");

  spec.phase_scheme = parse_phase_scheme(
      as_string(require(root, "phase_scheme", ""), "/phase_scheme"), "/phase_scheme");

  const Json& seed = require(root, "seed", "");
  if (!seed.is_number_unsigned() && !seed.is_number_integer())
    throw parse_error("seed must be an integer", "/seed");
  spec.seed = seed.get<std::uint64_t>();

  if (root.contains("tolerances")) {
    const Json& tol = root.at("tolerances");
    if (tol.contains("picard_stop")) spec.tol.picard_stop = as_number(tol.at("picard_stop"), "/tolerances/picard_stop");
    if (tol.contains("cross_solver")) spec.tol.cross_solver = as_number(tol.at("cross_solver"), "/tolerances/cross_solver");
    if (tol.contains("mass_drift")) spec.tol.mass_drift = as_number(tol.at("mass_drift"), "/tolerances/mass_drift");
    if (tol.contains("min_divisor_warn")) spec.tol.min_divisor_warn = as_number(tol.at("min_divisor_warn"), "/tolerances/min_divisor_warn");
  }

  if (root.contains("asymptotics")) {
    const Json& a = root.at("asymptotics");
    if (a.contains("epsilons")) {
      c.asymptotics.epsilons.clear();
      for (std::size_t j = 0; j < a.at("epsilons").size(); ++j)
        c.asymptotics.epsilons.push_back(
            as_number(a.at("epsilons")[j], "/asymptotics/epsilons[" + fmt_int(static_cast<std::int64_t>(j)) + "]"));
    }
    if (a.contains("eta")) c.asymptotics.eta = as_number(a.at("eta"), "/asymptotics/eta");
    if (a.contains("sobolev_s")) c.asymptotics.sobolev_s = as_int(a.at("sobolev_s"), "/asymptotics/sobolev_s");
    if (a.contains("dt_max")) c.asymptotics.dt_max = as_number(a.at("dt_max"), "/asymptotics/dt_max");
    if (a.contains("max_steps")) c.asymptotics.max_steps = static_cast<std::int64_t>(as_number(a.at("max_steps"), "/asymptotics/max_steps"));
  }

  if (root.contains("combinatorics")) {
    const Json& k = root.at("combinatorics");
    if (k.contains("k_max")) c.combinatorics.k_max = as_int(k.at("k_max"), "/combinatorics/k_max");
    if (k.contains("budget")) c.combinatorics.budget = static_cast<std::uint64_t>(as_number(k.at("budget"), "/combinatorics/budget"));
  }

  if (root.contains("bounds")) {
    const Json& b = root.at("bounds");
    if (b.contains("s_grid")) {
      c.bounds.s_grid.clear();
      for (const auto& v : b.at("s_grid")) c.bounds.s_grid.push_back(as_number(v, "/bounds/s_grid"));
    }
    if (b.contains("nu_grid")) {
      c.bounds.nu_grid.clear();
      for (const auto& v : b.at("nu_grid")) c.bounds.nu_grid.push_back(as_int(v, "/bounds/nu_grid"));
    }
    if (b.contains("n_grid")) {
      c.bounds.n_grid.clear();
      for (const auto& v : b.at("n_grid")) c.bounds.n_grid.push_back(as_int(v, "/bounds/n_grid"));
    }
    if (b.contains("samples")) c.bounds.samples = as_int(b.at("samples"), "/bounds/samples");
  }

  if (root.contains("output")) {
    const Json& o = root.at("output");
    if (o.contains("dir")) c.out_dir = as_string(o.at("dir"), "/output/dir");
  }

  // Decay-rate regime backing the existence and convergence guarantees;
  // leaving it is exploration, not an error.
  if (spec.decay_model == DecayModel::polynomial) {
    if (!(spec.decay_rate > 8.0))
      c.warnings.push_back("hypothesis violated: r > 8 (r=" + fmt_double(spec.decay_rate) + ")");
    if (!(spec.nu < spec.decay_rate / 4.0))
      c.warnings.push_back("hypothesis violated: nu < r/4 (nu=" + fmt_int(spec.nu) +
                           ", r/4=" + fmt_double(spec.decay_rate / 4.0) + ")");
  }
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_to_json(const RunConfig& c) {
  const ProblemSpec& spec = c.spec;
  Json root;
  root["nu"] = spec.nu;
  root["p"] = spec.p;
  root["omega"] = spec.omega_entries;
  root["lambda_sign"] = spec.lambda_sign;
  root["amplitude"] = spec.amplitude;
  root["decay"] = {{"model", spec.decay_model == DecayModel::polynomial ? "polynomial" : "exponential"},
                   {"rate", spec.decay_rate}};
  root["box_radius"] = spec.box_radius;
  if (c.t_end_from_t0)
    root["grid"] = {{"t_end", "t0"}, {"steps", spec.grid.steps}};
  else
    root["grid"] = {{"t_end", spec.grid.t_end}, {"steps", spec.grid.steps}};
  root["picard_depth"] = spec.picard_depth;
  root["phase_scheme"] = phase_scheme_name(spec.phase_scheme);
  root["seed"] = spec.seed;
  root["tolerances"] = {{"picard_stop", spec.tol.picard_stop},
                        {"cross_solver", spec.tol.cross_solver},
                        {"mass_drift", spec.tol.mass_drift},
                        {"min_divisor_warn", spec.tol.min_divisor_warn}};
  root["asymptotics"] = {{"epsilons", c.asymptotics.epsilons},
                         {"eta", c.asymptotics.eta},
                         {"sobolev_s", c.asymptotics.sobolev_s},
                         {"dt_max", c.asymptotics.dt_max},
                         {"max_steps", c.asymptotics.max_steps}};
  root["combinatorics"] = {{"k_max", c.combinatorics.k_max},
                           {"budget", c.combinatorics.budget}};
  root["bounds"] = {{"s_grid", c.bounds.s_grid},
                    {"nu_grid", c.bounds.nu_grid},
                    {"n_grid", c.bounds.n_grid},
                    {"samples", c.bounds.samples}};
  root["output"] = {{"dir", c.out_dir}};
  return root.dump(2) + "\n";
}

std::string config_hash_name(const RunConfig& c) {
  const std::uint64_t h = hash_stream(config_to_json(c));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace qpnls
