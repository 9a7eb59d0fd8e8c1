// Harmonic-balance chattering predictions.
//
// Closed forms for the relay and the super-twisting loop, plus a numeric
// solver of N(A, w) W(jw) = -1 that never touches the closed forms and is
// used to cross-check them.
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>

#include "freq.hpp"
#include "model.hpp"

namespace chatter {

class NoLimitCycleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Super-twisting limit cycle scales as A = mu^2 K_A, w = K_omega / mu.
struct StaHbConstants {
  double K_A = 0.0;
  double K_omega = 0.0;
};

/// P = A^2 w^2 / 2, the mean of (dx/dt)^2 over one period of A sin(wt).
inline double averaged_power(double A, double omega) {
  return A * A * omega * omega / 2.0;
}

/// A = 2 M mu / pi, w = 1/mu, P = 2 M^2 / pi^2 (independent of mu).
inline ChatterPrediction fosmc_predict(const FosmcGain &gain, double mu) {
  if (!(gain.M > 0.0) || !(mu > 0.0))
    throw std::domain_error("fosmc_predict: M and mu must be positive");
  const double pi = std::numbers::pi;
  return {2.0 * gain.M * mu / pi, 1.0 / mu, 2.0 * gain.M * gain.M / (pi * pi)};
}

inline StaHbConstants sta_constants(const StaGains &gains) {
  if (!(gains.k1 > 0.0) || !(gains.k2 > 0.0))
    throw std::domain_error("sta_constants: k1 and k2 must be positive");
  const double a = kSqrtDfConstant * gains.k1;
  const double a2 = a * a;
  const double b = 16.0 * gains.k2 / std::numbers::pi;
  StaHbConstants c;
  c.K_omega = std::sqrt(a2 / (a2 + b));
  const double r = a / (2.0 * c.K_omega * c.K_omega);
  c.K_A = r * r;
  return c;
}

inline ChatterPrediction sta_predict(const StaGains &gains, double mu) {
  if (!(mu > 0.0)) throw std::domain_error("sta_predict: mu must be positive");
  const auto c = sta_constants(gains);
  const double a = kSqrtDfConstant * gains.k1;
  const double s = a * a + 16.0 * gains.k2 / std::numbers::pi;
  ChatterPrediction p;
  p.A = mu * mu * c.K_A;
  p.omega = c.K_omega / mu;
  p.P = mu * mu / 32.0 * s * s * s / (a * a);
  return p;
}

inline ChatterPrediction predict(const Controller &controller, double mu) {
  return std::visit(
      [mu](const auto &g) -> ChatterPrediction {
        if constexpr (std::is_same_v<std::decay_t<decltype(g)>, FosmcGain>)
          return fosmc_predict(g, mu);
        else
          return sta_predict(g, mu);
      },
      controller);
}

/// Describing function of the controller at (A, w).
inline ComplexValue controller_df(const Controller &controller, double A, double omega) {
  if (const auto *f = std::get_if<FosmcGain>(&controller)) return relay_df(f->M, A);
  return sta_df(std::get<StaGains>(controller), A, omega);
}

struct NumericHbResult {
  ChatterPrediction prediction;
  double residual = 0.0;
  int iterations = 0;
  /// Set when the scan found more than one sign change; the lowest-frequency
  /// root is returned.
  bool multiple_roots = false;
};

namespace detail {

// Imaginary balance after eliminating A through the real balance:
//   g(w) = 4 k2 / (pi A(w) w) - w (1 - mu^2 w^2),  A(w) = (1.1128 k1 / (2 mu w^2))^2
// Positive near w -> 0, negative near w -> 1/mu.
inline double sta_imag_balance(const StaGains &g, double mu, double w) {
  const double root = kSqrtDfConstant * g.k1 / (2.0 * mu * w * w);
  const double A = root * root;
  return 4.0 * g.k2 / (std::numbers::pi * A * w) - w * (1.0 - mu * mu * w * w);
}

inline double sta_amplitude_from_real_balance(const StaGains &g, double mu, double w) {
  const double root = kSqrtDfConstant * g.k1 / (2.0 * mu * w * w);
  return root * root;
}

} // namespace detail

/// Solves the real/imaginary split of N(A, w) W(jw) = -1 by root finding.
///
/// Relay: the imaginary part of W vanishes only at w = 1/mu, and the real
/// balance 4M/(pi A) = -1/Re W(j/mu) then fixes A. Super-twisting: A is
/// eliminated through the real balance and the remaining equation in w is
/// bisected on (1e-6/mu, (1 - 1e-6)/mu).
inline NumericHbResult hb_solve_numeric(const Controller &controller, double mu) {
  if (!(mu > 0.0)) throw std::domain_error("hb_solve_numeric: mu must be positive");
  const auto bad = validate_gains(controller);
  if (!bad.empty()) throw std::domain_error("hb_solve_numeric: " + bad.front());

  NumericHbResult out;
  if (const auto *f = std::get_if<FosmcGain>(&controller)) {
    // Im W(jw) = -(1 - mu^2 w^2) / (w |1 + j mu w|^4); bisect its zero.
    auto im = [mu](double w) { return freq_response(mu, w).imag(); };
    double lo = 1e-6 / mu, hi = 1e6 / mu;
    if (!(im(lo) < 0.0 && im(hi) > 0.0))
      throw NoLimitCycleError("no limit cycle found: relay phase crossing not bracketed");
    int it = 0;
    for (; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (im(mid) < 0.0 ? lo : hi) = mid;
    }
    const double w = 0.5 * (lo + hi);
    const double re = freq_response(mu, w).real();
    const double A = -4.0 * f->M * re / std::numbers::pi;
    out.prediction = {A, w, averaged_power(A, w)};
    out.iterations = it;
    out.residual = hbe_residual(relay_df(f->M, A), freq_response(mu, w));
    return out;
  }

  const auto &g = std::get<StaGains>(controller);
  const double lo0 = 1e-6 / mu, hi0 = (1.0 - 1e-6) / mu;
  auto balance = [&](double w) { return detail::sta_imag_balance(g, mu, w); };

  // Coarse log scan for sign changes before bisecting the first one.
  constexpr int kScan = 256;
  double prev_w = lo0, prev_v = balance(lo0);
  double lo = 0.0, hi = 0.0;
  int changes = 0;
  for (int i = 1; i <= kScan; ++i) {
    const double w = lo0 * std::pow(hi0 / lo0, static_cast<double>(i) / kScan);
    const double v = balance(w);
    if ((prev_v > 0.0) != (v > 0.0)) {
      if (changes == 0) {
        lo = prev_w;
        hi = w;
      }
      ++changes;
    }
    prev_w = w;
    prev_v = v;
  }
  if (changes == 0)
    throw NoLimitCycleError("no limit cycle found: no sign change on the frequency bracket");
  out.multiple_roots = changes > 1;

  const bool lo_positive = balance(lo) > 0.0;
  int it = 0;
  for (; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    ((balance(mid) > 0.0) == lo_positive ? lo : hi) = mid;
  }
  const double w = 0.5 * (lo + hi);
  const double A = detail::sta_amplitude_from_real_balance(g, mu, w);
  out.prediction = {A, w, averaged_power(A, w)};
  out.iterations = it;
  out.residual = hbe_residual(sta_df(g, A, w), freq_response(mu, w));
  return out;
}

} // namespace chatter
