// Closed-loop description: plant, second-order actuator, relay or
// super-twisting controller, sinusoidal matched disturbance.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace chatter {

/// Relay (first-order sliding mode) controller, u = -M sign(x).
struct FosmcGain {
  double M = 1.0;

  friend bool operator==(const FosmcGain &, const FosmcGain &) = default;
};

/// Super-twisting controller gains.
///   u = -k1 |x|^(1/2) sign(x) + v,  dv/dt = -k2 sign(x)
struct StaGains {
  double k1 = 1.0;
  double k2 = 1.0;

  friend bool operator==(const StaGains &, const StaGains &) = default;
};

using Controller = std::variant<FosmcGain, StaGains>;

inline bool is_sta(const Controller &c) {
  return std::holds_alternative<StaGains>(c);
}

inline const char *controller_name(const Controller &c) {
  return is_sta(c) ? "sta" : "fosmc";
}

/// F(t) = alpha sin(Omega t). The bounds |F| <= delta and |dF/dt| <= Delta
/// are derived, never stored independently.
class DisturbanceSpec {
public:
  DisturbanceSpec() = default;
  DisturbanceSpec(double alpha, double Omega) : alpha_(alpha), Omega_(Omega) {}

  double alpha() const { return alpha_; }
  double Omega() const { return Omega_; }
  double delta() const { return alpha_; }
  double Delta() const { return alpha_ * Omega_; }

  double value(double t) const {
    return alpha_ == 0.0 ? 0.0 : alpha_ * std::sin(Omega_ * t);
  }

  bool active() const { return alpha_ != 0.0 && Omega_ != 0.0; }

  friend bool operator==(const DisturbanceSpec &,
                         const DisturbanceSpec &) = default;

private:
  double alpha_ = 0.0;
  double Omega_ = 0.0;
};

/// Critically damped second-order actuator with unit DC gain and time
/// constant mu: transfer function 1/(mu s + 1)^2.
struct ActuatorSpec {
  double mu = 0.01;

  friend bool operator==(const ActuatorSpec &, const ActuatorSpec &) = default;
};

struct LoopConfig {
  Controller controller = FosmcGain{};
  ActuatorSpec actuator{};
  DisturbanceSpec disturbance{};
  double x0 = 1.0;
  double z1_0 = 0.0;
  double z2_0 = 0.0;
  double v0 = 0.0;
  double t_end = 1.0;
  double h = 5e-5;

  friend bool operator==(const LoopConfig &, const LoopConfig &) = default;
};

/// Amplitude, angular frequency and averaged power of a first-harmonic
/// oscillation x(t) = A sin(omega t).
struct ChatterPrediction {
  double A = 0.0;
  double omega = 0.0;
  double P = 0.0;

  /// P is stored redundantly; this checks it against A^2 omega^2 / 2.
  bool consistent(double rel_tol = 1e-12) const {
    const double expected = A * A * omega * omega / 2.0;
    return A > 0.0 && omega > 0.0 &&
           std::abs(P - expected) <= rel_tol * std::abs(expected);
  }
};

/// Integration step used when none is given: 200 steps per actuator
/// time constant.
inline double default_step(double mu) { return mu / 200.0; }

/// Horizon covering at least 200 chattering periods and, with a disturbance,
/// at least 40 disturbance periods.
inline double default_horizon(double mu, double Omega) {
  const double two_pi = 2.0 * std::numbers::pi;
  double t = 200.0 * two_pi * mu;
  if (Omega > 0.0) t = std::max(t, 40.0 * two_pi / Omega);
  return t;
}

/// Violations of controller gain positivity.
inline std::vector<std::string> validate_gains(const Controller &c) {
  std::vector<std::string> out;
  if (const auto *f = std::get_if<FosmcGain>(&c)) {
    if (!(f->M > 0.0) || !std::isfinite(f->M)) out.emplace_back("M must be positive");
  } else {
    const auto &g = std::get<StaGains>(c);
    if (!(g.k1 > 0.0) || !std::isfinite(g.k1)) out.emplace_back("k1 must be positive");
    if (!(g.k2 > 0.0) || !std::isfinite(g.k2)) out.emplace_back("k2 must be positive");
  }
  return out;
}

namespace detail {

inline std::vector<std::string> loop_violations(const LoopConfig &cfg) {
  std::vector<std::string> out;
  const double mu = cfg.actuator.mu;
  if (!(mu > 0.0) || !std::isfinite(mu)) out.emplace_back("mu must be positive");
  if (!(cfg.disturbance.alpha() >= 0.0) || !std::isfinite(cfg.disturbance.alpha()))
    out.emplace_back("alpha must be nonnegative");
  if (!(cfg.disturbance.Omega() >= 0.0) || !std::isfinite(cfg.disturbance.Omega()))
    out.emplace_back("Omega must be nonnegative");
  for (double s : {cfg.x0, cfg.z1_0, cfg.z2_0, cfg.v0})
    if (!std::isfinite(s)) {
      out.emplace_back("initial state must be finite");
      break;
    }
  if (!(cfg.h > 0.0) || !std::isfinite(cfg.h)) {
    out.emplace_back("h must be positive");
  } else {
    if (!(cfg.t_end >= 100.0 * cfg.h)) out.emplace_back("t_end must be at least 100*h");
    if (mu > 0.0 && cfg.h > mu / 50.0) out.emplace_back("h exceeds mu/50");
  }
  return out;
}

} // namespace detail

/// Violations of everything except gain positivity: actuator, disturbance,
/// initial state and integration grid. Zero gains pass, so a controller can
/// be switched off for open-loop runs.
inline std::vector<std::string> validate_structure(const LoopConfig &cfg) {
  auto out = detail::loop_violations(cfg);
  if (const auto *f = std::get_if<FosmcGain>(&cfg.controller)) {
    if (!(f->M >= 0.0)) out.emplace_back("M must be nonnegative");
  } else {
    const auto &g = std::get<StaGains>(cfg.controller);
    if (!(g.k1 >= 0.0) || !(g.k2 >= 0.0)) out.emplace_back("STA gains must be nonnegative");
  }
  return out;
}

/// Every violated invariant, as human-readable text. Empty means valid.
inline std::vector<std::string> validate(const LoopConfig &cfg) {
  auto out = validate_gains(cfg.controller);
  auto rest = detail::loop_violations(cfg);
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

/// Fills h and t_end from the defaults when they are not given.
inline LoopConfig make_config(Controller controller, double mu,
                              DisturbanceSpec disturbance = {},
                              std::optional<double> h = std::nullopt,
                              std::optional<double> t_end = std::nullopt) {
  LoopConfig cfg;
  cfg.controller = controller;
  cfg.actuator.mu = mu;
  cfg.disturbance = disturbance;
  cfg.h = h.value_or(default_step(mu));
  cfg.t_end = t_end.value_or(default_horizon(mu, disturbance.Omega()));
  return cfg;
}

} // namespace chatter
