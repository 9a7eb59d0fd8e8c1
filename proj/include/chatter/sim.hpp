// Fixed-step time-domain simulation of the closed loop
//
//   dx/dt  = z1 + F(t)                          plant
//   dz1/dt = z2                                 actuator, 1/(mu s + 1)^2
//   dz2/dt = (u - z1) / mu^2 - 2 z2 / mu
//   dv/dt  = -k2 sign(x)                        STA integrator (0 for relay)
//
// integrated with classical RK4. The control is re-evaluated from each
// stage's (x, v), so the switching is seen inside the step rather than
// frozen at its start.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"

namespace chatter {

class SimulationError : public std::runtime_error {
public:
  SimulationError(const std::string &what, double last_good_time)
      : std::runtime_error(what), last_good_time_(last_good_time) {}
  double last_good_time() const { return last_good_time_; }

private:
  double last_good_time_;
};

struct SimState {
  double t = 0.0;
  double x = 0.0;
  double z1 = 0.0; // actuator output, applied to the plant
  double z2 = 0.0;
  double v = 0.0;
};

struct Sample {
  double t;
  double x;
  double xdot; // z1 + F(t), exact plant derivative
  double u;
  double ubar;
};

struct Trajectory {
  double h = 0.0; // sample spacing
  std::vector<Sample> samples;
  SimState final_state{}; // state after the last integration step

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double t_end() const { return samples.empty() ? 0.0 : samples.back().t; }
};

struct ControlOutput {
  double u;
  double vdot;
};

inline double sign(double x) { return (x > 0.0) - (x < 0.0); }

inline ControlOutput control_law(const Controller &controller, double x, double v) {
  if (const auto *f = std::get_if<FosmcGain>(&controller)) return {-f->M * sign(x), 0.0};
  const auto &g = std::get<StaGains>(controller);
  const double s = sign(x);
  return {-g.k1 * std::sqrt(std::abs(x)) * s + v, -g.k2 * s};
}

/// One classical Runge-Kutta 4 step of dy/dt = f(t, y).
template <std::size_t N, typename F>
std::array<double, N> rk4_step(F &&f, double t, const std::array<double, N> &y, double h) {
  auto axpy = [](const std::array<double, N> &a, double s, const std::array<double, N> &b) {
    std::array<double, N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
    return r;
  };
  const double half = 0.5 * h;
  const auto k1 = f(t, y);
  const auto k2 = f(t + half, axpy(y, half, k1));
  const auto k3 = f(t + half, axpy(y, half, k2));
  const auto k4 = f(t + h, axpy(y, h, k3));
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i)
    out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

struct SimOptions {
  /// Record every stride-th integration step. The trajectory spacing is
  /// then stride * h.
  std::size_t stride = 1;
};

/// Number of integration steps covering [0, t_end].
inline std::size_t step_count(double t_end, double h) {
  const double ratio = t_end / h;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio))
    return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::floor(ratio));
}

/// Integrates the loop over [0, t_end] with an arbitrary control law
/// control(t, x, v) -> ControlOutput in place of the configured controller.
/// Requires validate_structure(config) to be empty. Throws SimulationError on
/// divergence or a non-finite state.
template <typename Control>
Trajectory simulate_with(const LoopConfig &config, Control &&control, SimOptions options = {}) {
  const auto bad = validate_structure(config);
  if (!bad.empty()) throw std::invalid_argument("simulate: " + bad.front());
  if (options.stride == 0) throw std::invalid_argument("simulate: stride must be positive");

  const double mu = config.actuator.mu;
  const double inv_mu = 1.0 / mu;
  const double inv_mu2 = inv_mu * inv_mu;
  const auto &dist = config.disturbance;

  using State = std::array<double, 4>; // x, z1, z2, v
  auto rhs = [&](double t, const State &y) -> State {
    const ControlOutput c = control(t, y[0], y[3]);
    return {y[1] + dist.value(t), y[2], (c.u - y[1]) * inv_mu2 - 2.0 * y[2] * inv_mu, c.vdot};
  };

  const double h = config.h;
  const std::size_t n = step_count(config.t_end, h);
  const double limit = 1e6 * std::max(1.0, std::abs(config.x0));

  Trajectory traj;
  traj.h = h * static_cast<double>(options.stride);
  traj.samples.reserve(n / options.stride + 1);

  auto record = [&](double t, const State &y) {
    const ControlOutput c = control(t, y[0], y[3]);
    traj.samples.push_back({t, y[0], y[1] + dist.value(t), c.u, y[1]});
  };

  State y{config.x0, config.z1_0, config.z2_0, config.v0};
  record(0.0, y);
  double last_good = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * h;
    y = rk4_step<4>(rhs, t, y, h);
    const double t_next = static_cast<double>(i + 1) * h;
    for (double s : y) {
      if (!std::isfinite(s)) {
        std::ostringstream os;
        os << "non-finite state at t=" << t_next << " (last good t=" << last_good << ")";
        throw SimulationError(os.str(), last_good);
      }
    }
    if (std::abs(y[0]) > limit) {
      std::ostringstream os;
      os << "simulation diverged at t=" << t_next << ": |x|=" << std::abs(y[0])
         << " exceeds " << limit << " (last good t=" << last_good << ")";
      throw SimulationError(os.str(), last_good);
    }
    last_good = t_next;
    if ((i + 1) % options.stride == 0) record(t_next, y);
  }
  traj.final_state = {static_cast<double>(n) * h, y[0], y[1], y[2], y[3]};
  return traj;
}

/// Integrates the configured loop over [0, t_end]. Zero gains are allowed
/// (open loop); see simulate_with for the error behaviour.
inline Trajectory simulate(const LoopConfig &config, SimOptions options = {}) {
  const Controller &ctrl = config.controller;
  return simulate_with(
      config, [&ctrl](double, double x, double v) { return control_law(ctrl, x, v); }, options);
}

/// CSV with header t,x,xdot,u,ubar and 17 significant digits per value.
inline void write_trajectory_csv(std::ostream &os, const Trajectory &traj) {
  const auto old = os.precision(17);
  os << "t,x,xdot,u,ubar\n";
  for (const auto &s : traj.samples)
    os << s.t << ',' << s.x << ',' << s.xdot << ',' << s.u << ',' << s.ubar << '\n';
  os.precision(old);
}

} // namespace chatter
