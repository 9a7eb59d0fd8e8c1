// Super-twisting gain selection and the actuator time constants at which
// relay and super-twisting chattering coincide.
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "freq.hpp"
#include "model.hpp"

namespace chatter {

enum class DesignObjective { MinAmplitude, MinPower };

/// Actuator time constants at which the harmonic-balance amplitudes
/// (mu_star) or averaged powers (mu_starstar) of the two controllers agree.
struct CriticalAtc {
  double mu_star = 0.0;
  double mu_starstar = 0.0;
};

/// k1 minimizing A / mu^2 for fixed k2; (1.1128 k1)^2 = 16 k2 / pi there.
inline double k1_min_amplitude(double k2) {
  if (!(k2 > 0.0)) throw std::domain_error("k1_min_amplitude: k2 must be positive");
  return std::sqrt(16.0 * k2 / (std::numbers::pi * kSqrtDfConstant * kSqrtDfConstant));
}

/// k1 minimizing P / mu^2 for fixed k2; equals k1_min_amplitude(k2) / sqrt(2).
inline double k1_min_power(double k2) {
  if (!(k2 > 0.0)) throw std::domain_error("k1_min_power: k2 must be positive");
  return std::sqrt(8.0 * k2 / (std::numbers::pi * kSqrtDfConstant * kSqrtDfConstant));
}

/// A / mu^2 as a function of the gains.
inline double normalized_amplitude(const StaGains &g) {
  const double a = kSqrtDfConstant * g.k1;
  const double r = 0.5 * (a * a + 16.0 * g.k2 / std::numbers::pi) / a;
  return r * r;
}

/// P / mu^2 as a function of the gains.
inline double normalized_power(const StaGains &g) {
  const double a = kSqrtDfConstant * g.k1;
  const double s = a * a + 16.0 * g.k2 / std::numbers::pi;
  return s * s * s / (32.0 * a * a);
}

/// Finite-time stability sufficient condition: k1 > 1.414 sqrt(k2), k2 > Delta.
inline bool stability_check(const StaGains &g, double Delta) {
  return g.k1 > 1.414 * std::sqrt(g.k2) && g.k2 > Delta;
}

/// k2 = k2_factor * Delta and the k1 optimal for the chosen objective.
inline StaGains design_gains(double Delta, DesignObjective objective,
                             double k2_factor = 1.1) {
  if (!(Delta > 0.0)) throw std::domain_error("design_gains: Delta must be positive");
  if (!(k2_factor > 0.0)) throw std::domain_error("design_gains: k2 factor must be positive");
  const double k2 = k2_factor * Delta;
  const double k1 = objective == DesignObjective::MinAmplitude ? k1_min_amplitude(k2)
                                                               : k1_min_power(k2);
  return {k1, k2};
}

inline double critical_mu_amplitude(double M, const StaGains &g) {
  if (!(M > 0.0) || !(g.k1 > 0.0) || !(g.k2 > 0.0))
    throw std::domain_error("critical_mu_amplitude: arguments must be positive");
  const double a2 = std::pow(kSqrtDfConstant * g.k1, 2);
  const double s = a2 + 16.0 * g.k2 / std::numbers::pi;
  return 8.0 * M * a2 / (std::numbers::pi * s * s);
}

inline double critical_mu_power(double M, const StaGains &g) {
  if (!(M > 0.0) || !(g.k1 > 0.0) || !(g.k2 > 0.0))
    throw std::domain_error("critical_mu_power: arguments must be positive");
  const double a = kSqrtDfConstant * g.k1;
  const double s = a * a + 16.0 * g.k2 / std::numbers::pi;
  return 8.0 * M * a / (std::numbers::pi * std::pow(s, 1.5));
}

inline CriticalAtc critical_atc(double M, const StaGains &g) {
  return {critical_mu_amplitude(M, g), critical_mu_power(M, g)};
}

} // namespace chatter
