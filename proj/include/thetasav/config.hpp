#pragma once

// Run configuration: plain `key = value` files with command-line overrides
// under the same key names.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>

#include "thetasav/coupler.hpp"
#include "thetasav/errors.hpp"
#include "thetasav/verification.hpp"

namespace thetasav {

enum class Experiment { Convergence, EnergyMass, PhaseSeparation, Custom };

enum class InitialCondition { Random2, Random3, Spinodal, Exact };

struct RunConfig {
  Experiment experiment = Experiment::Custom;
  ModelKind model = ModelKind::NavierStokes;
  int components = 2;
  double theta = 0.5;
  double dt = 1e-3;
  long steps = 0;
  double final_time = 0.0;  // used when steps == 0
  int nx = 64;
  int ny = 64;
  double lx = 2.0;
  double ly = 2.0;
  double mobility = 10.0;
  double lambda = 0.01;
  double epsilon = 0.05;
  double nu = 1.0;
  double alpha = 1000.0;
  double tau = 1.0;
  double sav_shift = 10.0;
  std::uint64_t seed = 1;
  long snapshot_stride = 0;
  std::string out = "out";
  bool dealias = false;
  InitialCondition initial = InitialCondition::Random2;
  int levels = 5;
  bool exact_first_step = false;

  ModelParams model_params() const {
    ModelParams p;
    p.phase = PhaseParams{components, mobility, lambda, epsilon, sav_shift};
    p.flow = FlowParams{model, nu, alpha, tau};
    p.theta = theta;
    p.dt = dt;
    p.dealias = dealias;
    return p;
  }

  /// Number of time steps the run performs.
  long step_count() const { return steps > 0 ? steps : std::lround(final_time / dt); }
};

using ConfigMap = std::map<std::string, std::string>;

inline const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys = {
      "experiment", "model", "components", "theta", "dt",    "steps",  "T",
      "nx",         "ny",    "lx",         "ly",    "M",     "lambda", "epsilon",
      "nu",         "alpha", "tau",        "C",     "seed",  "snapshot_stride",
      "out",        "dealias", "initial",  "levels", "exact_first_step"};
  return keys;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Parses `key = value` lines; `#` starts a comment.
inline ConfigMap parse_config_text(const std::string& text, const std::string& origin = "config") {
  ConfigMap out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
    }
    if (!out.emplace(key, value).second) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

inline ConfigMap read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

namespace detail {

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + v + "' is not a finite number");
  }
}

inline long long to_integer(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

inline Experiment to_experiment(const std::string& v) {
  if (v == "convergence") return Experiment::Convergence;
  if (v == "energy-mass") return Experiment::EnergyMass;
  if (v == "phase-separation") return Experiment::PhaseSeparation;
  if (v == "custom") return Experiment::Custom;
  throw ConfigError("unknown experiment '" + v +
                    "' (expected convergence, energy-mass, phase-separation or custom)");
}

inline ModelKind to_model(const std::string& v) {
  if (v == "ns-cac") return ModelKind::NavierStokes;
  if (v == "d-cac") return ModelKind::Darcy;
  throw ConfigError("unknown model '" + v + "' (expected ns-cac or d-cac)");
}

inline InitialCondition to_initial(const std::string& v) {
  if (v == "random-2") return InitialCondition::Random2;
  if (v == "random-3") return InitialCondition::Random3;
  if (v == "spinodal") return InitialCondition::Spinodal;
  if (v == "exact") return InitialCondition::Exact;
  throw ConfigError("unknown initial condition '" + v + "' (expected random-2, random-3, spinodal or exact)");
}

/// Experiment presets, applied before explicit keys.
inline RunConfig preset(Experiment e, int components) {
  RunConfig c;
  c.experiment = e;
  c.components = components;
  c.initial = components == 2 ? InitialCondition::Random2 : InitialCondition::Random3;
  switch (e) {
    case Experiment::Convergence:
      c.initial = InitialCondition::Exact;
      c.final_time = 0.1;
      c.dt = 1e-3;
      break;
    case Experiment::EnergyMass:
      c.theta = 0.6;
      c.dt = 0.005;
      c.steps = 400;
      break;
    case Experiment::PhaseSeparation:
      c.initial = InitialCondition::Spinodal;
      c.nx = c.ny = 128;
      c.lx = c.ly = 1.0;
      c.epsilon = 0.004;
      c.lambda = 0.001;
      c.theta = 0.6;
      c.dt = 1e-4;
      c.steps = 2000;
      c.snapshot_stride = 500;
      break;
    case Experiment::Custom:
      break;
  }
  return c;
}

}  // namespace detail

/// Merges file values with overrides (overrides win), applies the experiment
/// preset, then validates.
inline RunConfig build_config(const ConfigMap& file, const ConfigMap& overrides = {}) {
  ConfigMap m = file;
  for (const auto& [k, v] : overrides) m[k] = v;
  for (const auto& [k, v] : m) {
    if (!config_keys().count(k)) throw ConfigError("unknown key '" + k + "'");
  }
  for (const char* required : {"experiment", "model"}) {
    if (!m.count(required)) throw ConfigError(std::string("missing required key '") + required + "'");
  }
  using namespace detail;
  const Experiment exp = to_experiment(m.at("experiment"));
  int components = exp == Experiment::PhaseSeparation ? 3 : 2;
  if (m.count("components")) components = static_cast<int>(to_integer("components", m.at("components")));
  RunConfig c = preset(exp, components);
  c.model = to_model(m.at("model"));

  auto num = [&](const char* key, double& dst) {
    if (m.count(key)) dst = to_double(key, m.at(key));
  };
  auto integer = [&](const char* key, auto& dst) {
    if (m.count(key)) dst = static_cast<std::remove_reference_t<decltype(dst)>>(to_integer(key, m.at(key)));
  };
  num("theta", c.theta);
  num("dt", c.dt);
  integer("steps", c.steps);
  num("T", c.final_time);
  if (m.count("T") && !m.count("steps")) c.steps = 0;
  integer("nx", c.nx);
  if (m.count("nx") && !m.count("ny")) c.ny = c.nx;
  integer("ny", c.ny);
  num("lx", c.lx);
  if (m.count("lx") && !m.count("ly")) c.ly = c.lx;
  num("ly", c.ly);
  num("M", c.mobility);
  num("lambda", c.lambda);
  num("epsilon", c.epsilon);
  num("nu", c.nu);
  num("alpha", c.alpha);
  num("tau", c.tau);
  num("C", c.sav_shift);
  if (m.count("seed")) {
    const long long s = to_integer("seed", m.at("seed"));
    if (s < 0) throw ConfigError("seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  integer("snapshot_stride", c.snapshot_stride);
  if (m.count("out")) c.out = m.at("out");
  if (m.count("dealias")) c.dealias = to_bool("dealias", m.at("dealias"));
  if (m.count("initial")) c.initial = to_initial(m.at("initial"));
  integer("levels", c.levels);
  if (m.count("exact_first_step")) c.exact_first_step = to_bool("exact_first_step", m.at("exact_first_step"));

  if (!(c.theta >= 0.5 && c.theta <= 1.0)) {
    throw ConfigError("theta = " + m.at("theta") +
                      " is outside [1/2, 1]; the scheme is only energy stable for theta in [1/2, 1]");
  }
  if (c.components < 2) throw ConfigError("components must be at least 2");
  if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
  if (c.steps < 0) throw ConfigError("steps must be non-negative");
  if (c.steps == 0 && !(c.final_time > 0.0)) throw ConfigError("either steps or T must be positive");
  if (c.steps == 0 && std::abs(c.step_count() * c.dt - c.final_time) > 1e-9 * c.final_time) {
    throw ConfigError("T must be an integer multiple of dt");
  }
  if (c.nx < 8 || c.ny < 8 || c.nx % 2 || c.ny % 2) throw ConfigError("nx and ny must be even and >= 8");
  for (auto [name, v] : {std::pair{"lx", c.lx}, {"ly", c.ly}, {"M", c.mobility}, {"lambda", c.lambda},
                         {"epsilon", c.epsilon}, {"nu", c.nu}, {"alpha", c.alpha}, {"tau", c.tau},
                         {"C", c.sav_shift}}) {
    if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
  }
  if (c.snapshot_stride < 0) throw ConfigError("snapshot_stride must be non-negative");
  if (c.levels < 2) throw ConfigError("levels must be at least 2");
  if (c.initial == InitialCondition::Exact && c.components > 3) {
    throw ConfigError("manufactured solutions exist for 2 or 3 components only");
  }
  if (c.initial == InitialCondition::Random2 && c.components != 2) {
    throw ConfigError("initial = random-2 needs components = 2");
  }
  if ((c.initial == InitialCondition::Random3 || c.initial == InitialCondition::Spinodal) &&
      c.components != 3) {
    throw ConfigError("random three-component initial data needs components = 3");
  }
  if (c.experiment == Experiment::Convergence && c.initial != InitialCondition::Exact) {
    throw ConfigError("the convergence experiment uses the manufactured solution (initial = exact)");
  }
  if (c.initial == InitialCondition::Exact && (c.lx != 2.0 || c.ly != 2.0)) {
    throw ConfigError("the manufactured solution lives on [0,2]^2");
  }
  return c;
}

}  // namespace thetasav
