// Frequency response of the actuator-plant cascade and the describing
// functions of the relay and super-twisting nonlinearities.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "model.hpp"

namespace chatter {

using ComplexValue = std::complex<double>;

/// First-harmonic gain of k1 |x|^(1/2) sign(x) is kSqrtDfConstant * k1 / A^(1/2).
inline constexpr double kSqrtDfConstant = 1.1128;

/// W(jw) = 1 / (jw (j mu w + 1)^2): integrator plant behind the
/// critically damped actuator.
inline ComplexValue freq_response(double mu, double omega) {
  if (!(omega > 0.0)) throw std::domain_error("freq_response: omega must be positive (pole at origin)");
  if (!(mu > 0.0)) throw std::domain_error("freq_response: mu must be positive");
  const ComplexValue jw(0.0, omega);
  const ComplexValue lag = ComplexValue(1.0, mu * omega);
  return 1.0 / (jw * lag * lag);
}

/// Relay describing function N(A) = 4M / (pi A).
inline double relay_df(double M, double A) {
  if (!(A > 0.0)) throw std::domain_error("relay_df: amplitude must be positive");
  return 4.0 * M / (std::numbers::pi * A);
}

/// Super-twisting describing function
///   N(A, w) = 1.1128 k1 / A^(1/2) - j 4 k2 / (pi A w).
/// The real part comes from the square-root term, the imaginary part from
/// the integrated relay.
inline ComplexValue sta_df(const StaGains &gains, double A, double omega) {
  if (!(A > 0.0)) throw std::domain_error("sta_df: amplitude must be positive");
  if (!(omega > 0.0)) throw std::domain_error("sta_df: omega must be positive");
  return {kSqrtDfConstant * gains.k1 / std::sqrt(A),
          -4.0 * gains.k2 / (std::numbers::pi * A * omega)};
}

/// |N W + 1|; zero exactly on a harmonic-balance solution.
inline double hbe_residual(ComplexValue N, ComplexValue W) {
  return std::abs(N * W + 1.0);
}

} // namespace chatter
