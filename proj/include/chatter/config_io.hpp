// Flat key/value JSON representation of a LoopConfig.
//
//   {
//     "controller.type": "sta",
//     "controller.k1": 6.7262, "controller.k2": 11,
//     "actuator.mu": 0.01,
//     "disturbance.alpha": 0, "disturbance.Omega": 0,
//     "sim.x0": 1, "sim.t_end": 12.5, "sim.h": 5e-05
//   }
//
// sim.z1, sim.z2 (actuator initial state) and sim.v0 (STA integrator) are
// optional and default to zero. Any other key is rejected.
#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "model.hpp"

namespace chatter {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline nlohmann::ordered_json to_json(const LoopConfig &cfg) {
  nlohmann::ordered_json j;
  j["controller.type"] = controller_name(cfg.controller);
  if (const auto *f = std::get_if<FosmcGain>(&cfg.controller)) {
    j["controller.M"] = f->M;
  } else {
    const auto &g = std::get<StaGains>(cfg.controller);
    j["controller.k1"] = g.k1;
    j["controller.k2"] = g.k2;
  }
  j["actuator.mu"] = cfg.actuator.mu;
  j["disturbance.alpha"] = cfg.disturbance.alpha();
  j["disturbance.Omega"] = cfg.disturbance.Omega();
  j["sim.x0"] = cfg.x0;
  if (cfg.z1_0 != 0.0) j["sim.z1"] = cfg.z1_0;
  if (cfg.z2_0 != 0.0) j["sim.z2"] = cfg.z2_0;
  if (cfg.v0 != 0.0) j["sim.v0"] = cfg.v0;
  j["sim.t_end"] = cfg.t_end;
  j["sim.h"] = cfg.h;
  return j;
}

inline std::string serialize_config(const LoopConfig &cfg) {
  return to_json(cfg).dump(2) + "\n";
}

namespace detail {

inline double number_at(const nlohmann::json &j, const std::string &key) {
  const auto &v = j.at(key);
  if (!v.is_number()) throw ConfigError("key '" + key + "' must be a number");
  return v.get<double>();
}

inline double number_or(const nlohmann::json &j, const std::string &key,
                        double fallback) {
  return j.contains(key) ? number_at(j, key) : fallback;
}

} // namespace detail

/// Parses the flat representation. Missing sim.t_end / sim.h fall back to
/// default_horizon / default_step. Does not validate invariants.
inline LoopConfig parse_config(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  static const std::set<std::string> known = {
      "controller.type", "controller.M",      "controller.k1",
      "controller.k2",   "actuator.mu",       "disturbance.alpha",
      "disturbance.Omega", "sim.x0",          "sim.z1",
      "sim.z2",          "sim.v0",            "sim.t_end",
      "sim.h"};
  for (const auto &item : j.items())
    if (!known.contains(item.key()))
      throw ConfigError("unknown config key '" + item.key() + "'");

  if (!j.contains("controller.type") || !j["controller.type"].is_string())
    throw ConfigError("controller.type must be \"fosmc\" or \"sta\"");
  const auto type = j["controller.type"].get<std::string>();

  LoopConfig cfg;
  try {
    if (type == "fosmc") {
      if (j.contains("controller.k1") || j.contains("controller.k2"))
        throw ConfigError("controller.k1/k2 are not used by fosmc");
      cfg.controller = FosmcGain{detail::number_at(j, "controller.M")};
    } else if (type == "sta") {
      if (j.contains("controller.M"))
        throw ConfigError("controller.M is not used by sta");
      cfg.controller = StaGains{detail::number_at(j, "controller.k1"),
                                detail::number_at(j, "controller.k2")};
    } else {
      throw ConfigError("controller.type must be \"fosmc\" or \"sta\"");
    }
    cfg.actuator.mu = detail::number_at(j, "actuator.mu");
  } catch (const nlohmann::json::out_of_range &e) {
    throw ConfigError(std::string("missing config key: ") + e.what());
  }
  cfg.disturbance = DisturbanceSpec(detail::number_or(j, "disturbance.alpha", 0.0),
                                    detail::number_or(j, "disturbance.Omega", 0.0));
  cfg.x0 = detail::number_or(j, "sim.x0", 1.0);
  cfg.z1_0 = detail::number_or(j, "sim.z1", 0.0);
  cfg.z2_0 = detail::number_or(j, "sim.z2", 0.0);
  cfg.v0 = detail::number_or(j, "sim.v0", 0.0);
  cfg.h = detail::number_or(j, "sim.h", default_step(cfg.actuator.mu));
  cfg.t_end = detail::number_or(
      j, "sim.t_end", default_horizon(cfg.actuator.mu, cfg.disturbance.Omega()));
  return cfg;
}

inline LoopConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

} // namespace chatter
