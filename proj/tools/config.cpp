#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace blp::cli {
namespace {

using nlohmann::json;

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.contains(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

double number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return obj[key].get<double>();
}

double required_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + " needs '" + key + "'");
  return number(obj, key, 0.0);
}

std::vector<double> numbers(const json& obj, const char* key) {
  if (!obj.contains(key)) return {};
  const json& arr = obj[key];
  if (!arr.is_array()) throw ConfigError(std::string("'") + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : arr) {
    if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Theta theta_of(const json& obj) {
  try {
    return Theta(number(obj, "theta", 0.0));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

LambdaSpec parse_lambda(const json& j) {
  allow_keys(j, "lambda", {"components", "geometric_cascade", "declared_levels"});
  LambdaSpec spec;
  if (j.contains("components")) {
    if (!j["components"].is_array()) throw ConfigError("lambda.components must be an array");
    for (const auto& c : j["components"]) {
      allow_keys(c, "lambda component", {"weight", "atoms"});
      spec.components.push_back({required_number(c, "weight", "lambda component"),
                                 RankedPointMeasure(numbers(c, "atoms"))});
    }
  }
  if (j.contains("geometric_cascade")) {
    const json& g = j["geometric_cascade"];
    const json list = g.is_array() ? g : json::array({g});
    for (const auto& c : list) {
      allow_keys(c, "geometric_cascade", {"base_weight", "ratio", "atom_template"});
      spec.cascades.push_back({required_number(c, "base_weight", "geometric_cascade"),
                               required_number(c, "ratio", "geometric_cascade"),
                               RankedPointMeasure(numbers(c, "atom_template"))});
    }
  }
  spec.declared_levels = numbers(j, "declared_levels");
  return spec;
}

JumpLaw parse_law(const json& j) {
  allow_keys(j, "jump law", {"type", "position", "low", "high", "sign", "decay", "cap"});
  if (!j.contains("type") || !j["type"].is_string()) throw ConfigError("jump law needs a string 'type'");
  const std::string type = j["type"];
  if (type == "point_mass") return PointMassJump{required_number(j, "position", "point_mass jump")};
  if (type == "uniform") {
    return UniformJump{required_number(j, "low", "uniform jump"), required_number(j, "high", "uniform jump")};
  }
  if (type == "exponential") {
    return ExponentialJump{number(j, "sign", 1.0), required_number(j, "decay", "exponential jump"),
                           number(j, "cap", std::numeric_limits<double>::infinity())};
  }
  throw ConfigError("unknown jump law type '" + type + "'");
}

FiniteBirthParams parse_finite_birth(const json& j) {
  allow_keys(j, "finite_birth", {"theta", "motion", "beta", "offspring"});
  FiniteBirthParams p;
  if (j.contains("motion")) {
    const json& m = j["motion"];
    allow_keys(m, "motion", {"sigma2", "drift", "kill_rate", "jumps"});
    p.motion.sigma2 = number(m, "sigma2", 0.0);
    p.motion.drift = number(m, "drift", 0.0);
    p.motion.kill_rate = number(m, "kill_rate", 0.0);
    if (m.contains("jumps")) {
      if (!m["jumps"].is_array()) throw ConfigError("motion.jumps must be an array");
      for (const auto& jump : m["jumps"]) {
        allow_keys(jump, "jump", {"rate", "law"});
        if (!jump.contains("law")) throw ConfigError("jump needs a 'law'");
        p.motion.jumps.push_back({required_number(jump, "rate", "jump"), parse_law(jump["law"])});
      }
    }
  }
  p.beta = number(j, "beta", 0.0);
  if (j.contains("offspring")) {
    if (!j["offspring"].is_array()) throw ConfigError("offspring must be an array");
    std::vector<OffspringOutcome> outcomes;
    for (const auto& o : j["offspring"]) {
      allow_keys(o, "offspring outcome", {"rate", "atoms"});
      outcomes.push_back({required_number(o, "rate", "offspring outcome"), RankedPointMeasure(numbers(o, "atoms"))});
    }
    p.rho = OffspringLaw(std::move(outcomes));
  }
  return p;
}

std::size_t count(const json& obj, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_unsigned() && !(obj[key].is_number_integer() && obj[key].get<long long>() >= 0)) {
    throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
  }
  return obj[key].get<std::size_t>();
}

}  // namespace

ModelConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  try {
    allow_keys(root, "config", {"model", "finite_birth", "level", "simulation", "verify", "kappa", "nested"});
    ModelConfig cfg;
    if (root.contains("model") == root.contains("finite_birth")) {
      throw ConfigError("config needs exactly one of 'model' and 'finite_birth'");
    }
    if (root.contains("model")) {
      const json& m = root["model"];
      allow_keys(m, "model", {"sigma2", "a", "theta", "lambda"});
      CharacteristicTriple t;
      t.sigma2 = number(m, "sigma2", 0.0);
      t.a = number(m, "a", 0.0);
      t.theta = theta_of(m);
      if (m.contains("lambda")) t.lambda = parse_lambda(m["lambda"]);
      t.validate();
      cfg.theta = t.theta;
      cfg.triple = std::move(t);
    } else {
      const json& f = root["finite_birth"];
      cfg.params = parse_finite_birth(f);
      cfg.params->validate();
      cfg.theta = theta_of(f);
    }
    if (root.contains("level")) cfg.level = number(root, "level", 0.0);

    if (root.contains("simulation")) {
      const json& s = root["simulation"];
      allow_keys(s, "simulation", {"horizon", "observation_times", "max_particles"});
      cfg.simulation.horizon = number(s, "horizon", 1.0);
      cfg.simulation.observation_times = numbers(s, "observation_times");
      cfg.simulation.max_particles = count(s, "max_particles", cfg.simulation.max_particles);
    }
    if (cfg.simulation.observation_times.empty()) cfg.simulation.observation_times = {cfg.simulation.horizon};
    cfg.simulation.validate();

    VerifySection& v = cfg.verify;
    if (root.contains("verify")) {
      const json& j = root["verify"];
      allow_keys(j, "verify", {"t", "z", "r", "grid", "censor_levels", "top_level", "replicas", "ks"});
      v.t = number(j, "t", 1.0);
      if (j.contains("z")) {
        const auto z = numbers(j, "z");
        if (z.size() != 2) throw ConfigError("verify.z must be [re, im]");
        v.z = std::complex<double>(z[0], z[1]);
      }
      v.r = number(j, "r", 1.0);
      v.grid = numbers(j, "grid");
      v.censor_levels = numbers(j, "censor_levels");
      if (j.contains("top_level")) v.top_level = number(j, "top_level", 0.0);
      v.replicas = count(j, "replicas", v.replicas);
      if (j.contains("ks")) {
        const json& ks = j["ks"];
        allow_keys(ks, "verify.ks", {"s", "t", "samples"});
        v.ks_s = number(ks, "s", 0.5);
        v.ks_t = number(ks, "t", 0.5);
        v.ks_samples = count(ks, "samples", 0);
      }
    }
    if (!(v.t > 0.0)) throw ConfigError("verify.t must be positive");
    if (v.grid.empty()) v.grid = {v.t / 4, v.t / 2, 3 * v.t / 4, v.t};

    if (root.contains("kappa")) {
      const json& k = root["kappa"];
      allow_keys(k, "kappa", {"r"});
      cfg.kappa.r = numbers(k, "r");
    }
    if (cfg.kappa.r.empty()) cfg.kappa.r = {0.0, 0.5, 1.0, 2.0};

    if (root.contains("nested")) {
      const json& n = root["nested"];
      allow_keys(n, "nested", {"levels"});
      cfg.levels = numbers(n, "levels");
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

double simulation_level(const ModelConfig& config) {
  if (config.level) return *config.level;
  if (!config.triple) throw ConfigError("simulation_level needs a characteristic triple");
  const LambdaSpec& lambda = config.triple->lambda;
  if (!lambda.declared_levels.empty()) {
    return *std::max_element(lambda.declared_levels.begin(), lambda.declared_levels.end());
  }
  if (!lambda.finite()) throw ConfigError("a model with cascades needs 'level' or declared levels");
  double deepest = 1.0;
  for (const auto& c : lambda.components) {
    for (double x : c.measure.atoms()) deepest = std::max(deepest, -x);
  }
  return deepest;
}

}  // namespace blp::cli
