// Steady-state chattering measurement on a sampled trajectory.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "sim.hpp"

namespace chatter {

class NoSteadyOscillation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Integer number of periods of x, delimited by up-crossings of x - mean(x).
struct SteadyWindow {
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t n_periods = 0;
  double mean = 0.0;
  std::vector<double> crossings; // n_periods + 1 interpolated crossing times
};

struct WaveformReport {
  double A_meas = 0.0;     // mean half peak-to-peak per period
  double omega_meas = 0.0; // 2 pi n_periods / window length
  double P_meas = 0.0;     // time average of xdot^2
  double A_max = 0.0;      // max |x| on the window
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t n_periods = 0;
};

inline constexpr std::size_t kMinPeriods = 10;

namespace detail {

inline std::size_t first_at_or_after(std::span<const Sample> s, double t) {
  auto it = std::lower_bound(s.begin(), s.end(), t,
                             [](const Sample &a, double v) { return a.t < v; });
  return static_cast<std::size_t>(it - s.begin());
}

// Linear interpolation of a sample channel at time t inside the trajectory.
template <typename Get>
double interpolate(std::span<const Sample> s, double t, Get get) {
  std::size_t i = first_at_or_after(s, t);
  if (i == 0) return get(s.front());
  if (i >= s.size()) return get(s.back());
  const auto &a = s[i - 1];
  const auto &b = s[i];
  const double w = (t - a.t) / (b.t - a.t);
  return get(a) + w * (get(b) - get(a));
}

// Trapezoidal integral of get(sample) over [t0, t1], with linearly
// interpolated end points.
template <typename Get>
double integrate(std::span<const Sample> s, double t0, double t1, Get get) {
  std::size_t i = first_at_or_after(s, t0);
  double prev_t = t0;
  double prev_v = interpolate(s, t0, get);
  double sum = 0.0;
  for (; i < s.size() && s[i].t < t1; ++i) {
    const double v = get(s[i]);
    sum += 0.5 * (prev_v + v) * (s[i].t - prev_t);
    prev_t = s[i].t;
    prev_v = v;
  }
  const double v_end = interpolate(s, t1, get);
  sum += 0.5 * (prev_v + v_end) * (t1 - prev_t);
  return sum;
}

} // namespace detail

/// Locates an integer-period analysis window in the second half of the
/// trajectory. Up-crossings use a hysteresis of 10% of the half range so
/// that ripple near zero is not counted as extra periods.
inline SteadyWindow steady_window(const Trajectory &traj) {
  std::span<const Sample> s(traj.samples);
  if (s.size() < 3) throw NoSteadyOscillation("no steady oscillation: trajectory too short");
  const double t_half = s.front().t + 0.5 * (s.back().t - s.front().t);
  const std::size_t begin = detail::first_at_or_after(s, t_half);
  const auto half = s.subspan(begin);
  if (half.size() < 3) throw NoSteadyOscillation("no steady oscillation: trajectory too short");

  double sum = 0.0, lo = half.front().x, hi = half.front().x;
  for (const auto &p : half) {
    sum += p.x;
    lo = std::min(lo, p.x);
    hi = std::max(hi, p.x);
  }
  const double mean = sum / static_cast<double>(half.size());
  const double hysteresis = 0.1 * 0.5 * (hi - lo);

  SteadyWindow w;
  w.mean = mean;
  if (hi - lo > 0.0 && std::isfinite(hi - lo)) {
    bool armed = false;
    for (std::size_t i = 1; i < half.size(); ++i) {
      const double a = half[i - 1].x - mean;
      const double b = half[i].x - mean;
      if (a <= -hysteresis) armed = true;
      if (armed && a < 0.0 && b >= 0.0) {
        const double frac = -a / (b - a);
        w.crossings.push_back(half[i - 1].t + frac * (half[i].t - half[i - 1].t));
        armed = false;
      }
    }
  }
  if (w.crossings.size() < kMinPeriods + 1)
    throw NoSteadyOscillation("no steady oscillation: fewer than 10 full periods detected");
  w.n_periods = w.crossings.size() - 1;
  w.t_start = w.crossings.front();
  w.t_end = w.crossings.back();
  return w;
}

/// The window made of periods [first, first + count) of an existing window.
inline SteadyWindow sub_window(const SteadyWindow &w, std::size_t first, std::size_t count) {
  if (first + count > w.n_periods || count == 0)
    throw std::out_of_range("sub_window: period range outside window");
  SteadyWindow out;
  out.mean = w.mean;
  out.crossings.assign(w.crossings.begin() + static_cast<std::ptrdiff_t>(first),
                       w.crossings.begin() + static_cast<std::ptrdiff_t>(first + count + 1));
  out.n_periods = count;
  out.t_start = out.crossings.front();
  out.t_end = out.crossings.back();
  return out;
}

inline WaveformReport measure(const Trajectory &traj, const SteadyWindow &w) {
  std::span<const Sample> s(traj.samples);
  WaveformReport r;
  r.t_start = w.t_start;
  r.t_end = w.t_end;
  r.n_periods = w.n_periods;

  auto x_at = [](const Sample &p) { return p.x; };
  double amp_sum = 0.0;
  for (std::size_t k = 0; k < w.n_periods; ++k) {
    const double a = w.crossings[k], b = w.crossings[k + 1];
    double lo = detail::interpolate(s, a, x_at);
    double hi = lo;
    for (std::size_t i = detail::first_at_or_after(s, a); i < s.size() && s[i].t <= b; ++i) {
      lo = std::min(lo, s[i].x);
      hi = std::max(hi, s[i].x);
      r.A_max = std::max(r.A_max, std::abs(s[i].x));
    }
    amp_sum += 0.5 * (hi - lo);
  }
  r.A_meas = amp_sum / static_cast<double>(w.n_periods);

  const double length = w.t_end - w.t_start;
  r.omega_meas = 2.0 * std::numbers::pi * static_cast<double>(w.n_periods) / length;
  r.P_meas = detail::integrate(s, w.t_start, w.t_end,
                               [](const Sample &p) { return p.xdot * p.xdot; }) /
             length;
  return r;
}

inline WaveformReport measure(const Trajectory &traj) {
  return measure(traj, steady_window(traj));
}

/// (integral of |xdot|^p over the window)^(1/p).
inline double levant_energy(const Trajectory &traj, const SteadyWindow &w, int p) {
  if (p < 1) throw std::domain_error("levant_energy: p must be at least 1");
  const double integral = detail::integrate(
      std::span<const Sample>(traj.samples), w.t_start, w.t_end,
      [p](const Sample &s) { return std::pow(std::abs(s.xdot), p); });
  return std::pow(integral, 1.0 / p);
}

inline double levant_energy(const Trajectory &traj, int p) {
  return levant_energy(traj, steady_window(traj), p);
}

inline void write_report_csv_header(std::ostream &os) {
  os << "A_meas,omega_meas,P_meas,A_max,t_start,t_end,n_periods\n";
}

inline void write_report_csv_row(std::ostream &os, const WaveformReport &r) {
  const auto old = os.precision(17);
  os << r.A_meas << ',' << r.omega_meas << ',' << r.P_meas << ',' << r.A_max << ','
     << r.t_start << ',' << r.t_end << ',' << r.n_periods << '\n';
  os.precision(old);
}

} // namespace chatter
