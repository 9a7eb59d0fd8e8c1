// Experiment harness: published chattering tables re-run cell by cell,
// figure data for the harmonic-balance curves, and parameter sweeps.
//
// Every cell records the published reference value next to the
// harmonic-balance prediction and, where the cell is a simulation, the
// measured value. Cells are evaluated in index order so output is
// deterministic.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "design.hpp"
#include "hb.hpp"
#include "model.hpp"
#include "sim.hpp"
#include "waveform.hpp"

namespace chatter {

struct TableCell {
  std::string id;
  double reference = 0.0;
  std::optional<double> hb;
  std::optional<double> sim;
  std::string note = "ok";

  /// Deviation of the simulated value (or, without one, the harmonic-balance
  /// value) from the reference.
  std::optional<double> rel_dev() const {
    const auto &v = sim ? sim : hb;
    if (!v || reference == 0.0) return std::nullopt;
    return (*v - reference) / reference;
  }
};

struct TableReport {
  std::string name;
  std::vector<std::string> comments;
  std::vector<TableCell> cells;

  const TableCell &at(const std::string &id) const {
    for (const auto &c : cells)
      if (c.id == id) return c;
    throw std::out_of_range("no cell '" + id + "' in " + name);
  }
};

/// Generic numeric CSV used for figure data and sweeps.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;
};

inline std::string format_double(double v, int digits = 17) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

inline void write_csv(std::ostream &os, const TableReport &t) {
  for (const auto &c : t.comments) os << "# " << c << '\n';
  os << "row_id,reference,hb,sim,rel_dev,note\n";
  auto opt = [](const std::optional<double> &v) { return v ? format_double(*v) : std::string(); };
  for (const auto &c : t.cells)
    os << c.id << ',' << format_double(c.reference) << ',' << opt(c.hb) << ',' << opt(c.sim)
       << ',' << opt(c.rel_dev()) << ',' << c.note << '\n';
}

inline void write_csv(std::ostream &os, const CsvTable &t) {
  for (const auto &c : t.comments) os << "# " << c << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto &row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << (row[i] ? format_double(*row[i]) : std::string());
    os << '\n';
  }
}

/// Recording stride keeping long runs at or below about two million samples.
inline std::size_t auto_stride(const LoopConfig &cfg) {
  const std::size_t n = step_count(cfg.t_end, cfg.h);
  return std::max<std::size_t>(1, n / 2'000'000);
}

/// Simulates with default step and horizon and measures the steady state.
inline WaveformReport simulate_and_measure(const LoopConfig &cfg) {
  return measure(simulate(cfg, {auto_stride(cfg)}));
}

namespace detail {

struct SimOutcome {
  std::optional<WaveformReport> report;
  std::string note = "ok";
};

inline SimOutcome try_simulate(const LoopConfig &cfg) {
  SimOutcome out;
  try {
    out.report = simulate_and_measure(cfg);
  } catch (const std::exception &e) {
    out.note = std::string("error: ") + e.what();
  }
  return out;
}

inline std::string mu_label(double mu) { return format_double(mu, 6); }

} // namespace detail

// Disturbance-on accuracy tables report max |x| on the steady window; the
// nominal tables report mean half peak-to-peak amplitude.

inline TableReport reproduce_table1() {
  TableReport t;
  t.name = "table1";
  t.comments = {
      "table1: sliding accuracy vs disturbance frequency",
      "disturbance on: F = sin(Omega t), alpha = 1, delta = 1, Delta = Omega",
      "gains: M = 1.1 delta; k1 = 1.5 sqrt(Delta), k2 = 1.1 Delta",
      "sim metric: max |x| on the steady window; hb: nominal (F = 0) amplitude"};
  const double omegas[] = {1.0, 10.0, 100.0};
  const double mus[] = {1e-1, 1e-2, 1e-3};
  // reference[controller][mu][Omega]
  const double reference[2][3][3] = {
      {{1.366e-1, 1.692e-1, 0.934e-1}, {1.092e-2, 1.361e-2, 1.692e-2}, {1.064e-3, 1.096e-3, 1.362e-3}},
      {{1.243e-1, 8.663e-1, 6.4041}, {9.431e-4, 1.302e-2, 8.694e-2}, {8.915e-6, 9.445e-5, 1.343e-3}}};
  for (int c = 0; c < 2; ++c)
    for (int m = 0; m < 3; ++m)
      for (int o = 0; o < 3; ++o) {
        const double Omega = omegas[o], mu = mus[m];
        const DisturbanceSpec dist(1.0, Omega);
        const Controller ctrl = c == 0 ? Controller(FosmcGain{1.1 * dist.delta()})
                                       : Controller(StaGains{1.5 * std::sqrt(dist.Delta()),
                                                             1.1 * dist.Delta()});
        TableCell cell;
        cell.id = std::string("table1/") + controller_name(ctrl) + "/mu=" + detail::mu_label(mu) +
                  "/Omega=" + detail::mu_label(Omega) + "/A";
        cell.reference = reference[c][m][o];
        cell.hb = predict(ctrl, mu).A;
        const auto r = detail::try_simulate(make_config(ctrl, mu, dist));
        if (r.report) cell.sim = r.report->A_max;
        cell.note = r.note;
        t.cells.push_back(cell);
      }
  return t;
}

namespace detail {

inline TableReport nominal_sta_table(const std::string &name, const std::string &title,
                                     const double (&multipliers)[3],
                                     const double (&hb_ref)[3][3],
                                     const double (&sim_ref)[3][3]) {
  TableReport t;
  t.name = name;
  const double Delta = 10.0, mu = 0.01;
  t.comments = {name + ": " + title, "nominal: F = 0, Delta = 10, k2 = 1.1 Delta, mu = 0.01",
                "sim metric: mean half peak-to-peak amplitude, zero-crossing frequency, mean xdot^2"};
  const char *params[] = {"A", "omega", "P"};
  for (int col = 0; col < 3; ++col) {
    const StaGains g{multipliers[col] * std::sqrt(Delta), 1.1 * Delta};
    const auto hb = sta_predict(g, mu);
    const double hb_vals[] = {hb.A, hb.omega, hb.P};
    const auto sim = try_simulate(make_config(g, mu));
    const std::string prefix = name + "/k1=" + format_double(multipliers[col], 6) + "sqrtDelta/";
    for (int p = 0; p < 3; ++p) {
      TableCell cell;
      cell.id = prefix + params[p] + "/harmonic_balance";
      cell.reference = hb_ref[p][col];
      cell.hb = hb_vals[p];
      t.cells.push_back(cell);
    }
    for (int p = 0; p < 3; ++p) {
      TableCell cell;
      cell.id = prefix + params[p] + "/simulation";
      cell.reference = sim_ref[p][col];
      cell.hb = hb_vals[p];
      if (sim.report) {
        const double v[] = {sim.report->A_meas, sim.report->omega_meas, sim.report->P_meas};
        cell.sim = v[p];
      }
      cell.note = sim.note;
      t.cells.push_back(cell);
    }
  }
  return t;
}

} // namespace detail

inline TableReport reproduce_table2() {
  static constexpr double mult[3] = {1.5, 2.127, 2.5};
  static constexpr double hb[3][3] = {
      {6.314e-3, 5.602e-3, 5.750e-3}, {57.632, 70.711, 76.164}, {6.620e-2, 7.846e-2, 9.589e-2}};
  static constexpr double sim[3][3] = {
      {6.395e-3, 5.653e-3, 5.799e-3}, {57.099, 70.299, 75.781}, {6.786e-2, 8.009e-2, 9.784e-2}};
  return detail::nominal_sta_table("table2", "minimum-amplitude STA gains", mult, hb, sim);
}

inline TableReport reproduce_table3() {
  static constexpr double mult[3] = {1.0, 1.504, 2.0};
  static constexpr double hb[3][3] = {
      {9.447e-3, 6.302e-3, 5.623e-3}, {42.547, 57.735, 68.502}, {8.078e-2, 6.620e-2, 7.420e-2}};
  static constexpr double sim[3][3] = {
      {9.688e-3, 6.383e-3, 5.676e-3}, {41.789, 57.203, 68.076}, {8.416e-2, 6.781e-2, 7.573e-2}};
  return detail::nominal_sta_table("table3", "minimum-averaged-power STA gains", mult, hb, sim);
}

/// mu values of the disturbance-frequency comparison: above, at and below
/// the amplitude crossing mu* = 0.125 / Omega.
inline constexpr double kTable4MuFactors[3] = {0.25, 0.125, 0.0833};

inline TableReport reproduce_table4() {
  TableReport t;
  t.name = "table4";
  t.comments = {"table4: sliding accuracy for minimum-amplitude STA gains",
                "disturbance on: F = sin(Omega t), alpha = 1, delta = 1, Delta = Omega",
                "gains: M = 1.1 delta; k1 = 2.127 sqrt(Delta), k2 = 1.1 Delta",
                "mu in {0.25, 0.125, 0.0833} / Omega",
                "sim metric: max |x| on the steady window; hb: nominal (F = 0) amplitude"};
  const double omegas[] = {1.0, 10.0, 100.0};
  const char *mu_names[] = {"mu1", "mu_star", "mu2"};
  const double reference[2][3][3] = {
      {{1.6326, 1.6224e-1, 1.6226e-2}, {1.7644e-1, 1.9018e-2, 1.8969e-3}, {9.4217e-2, 9.4311e-3, 9.4872e-4}},
      {{2.2492, 2.6933e-1, 2.7061e-2}, {1.3229e-1, 1.3516e-2, 1.3518e-3}, {4.8421e-2, 4.8374e-3, 4.8573e-4}}};
  for (int c = 0; c < 2; ++c)
    for (int m = 0; m < 3; ++m)
      for (int o = 0; o < 3; ++o) {
        const double Omega = omegas[o];
        const double mu = kTable4MuFactors[m] / Omega;
        const DisturbanceSpec dist(1.0, Omega);
        const Controller ctrl = c == 0 ? Controller(FosmcGain{1.1 * dist.delta()})
                                       : Controller(StaGains{2.127 * std::sqrt(dist.Delta()),
                                                             1.1 * dist.Delta()});
        TableCell cell;
        cell.id = std::string("table4/") + controller_name(ctrl) + "/" + mu_names[m] +
                  "/Omega=" + detail::mu_label(Omega) + "/A";
        cell.reference = reference[c][m][o];
        cell.hb = predict(ctrl, mu).A;
        const auto r = detail::try_simulate(make_config(ctrl, mu, dist));
        if (r.report) cell.sim = r.report->A_max;
        cell.note = r.note;
        t.cells.push_back(cell);
      }
  return t;
}

inline constexpr double kTable5Mus[4] = {0.2, 0.1768, 0.125, 0.1};

/// Relay and super-twisting gains for delta = Delta = 60.
inline FosmcGain table5_relay() { return {1.1 * 60.0}; }
inline StaGains table5_sta() { return design_gains(60.0, DesignObjective::MinAmplitude); }

inline TableReport reproduce_table5() {
  TableReport t;
  t.name = "table5";
  t.comments = {"table5: chattering parameters, delta = Delta = 60",
                "nominal: F = 0; M = 1.1 delta = 66; minimum-amplitude STA gains (k2 = 66)",
                "sim metric: mean half peak-to-peak amplitude, zero-crossing frequency, mean xdot^2"};
  const double reference[2][3][4] = {
      {{8.6899, 7.6819, 5.4312, 4.3450}, {4.8900, 5.5317, 7.8240, 9.7800}, {926.899, 926.899, 926.899, 926.899}},
      {{13.5615, 10.5999, 5.2987, 3.3911}, {3.5153, 3.9764, 5.6242, 7.0302}, {1152.394, 900.6406, 450.360, 288.2422}}};
  const char *params[] = {"A", "omega", "P"};
  for (int c = 0; c < 2; ++c)
    for (int m = 0; m < 4; ++m) {
      const double mu = kTable5Mus[m];
      const Controller ctrl = c == 0 ? Controller(table5_relay()) : Controller(table5_sta());
      const auto hb = predict(ctrl, mu);
      const double hb_vals[] = {hb.A, hb.omega, hb.P};
      const auto sim = detail::try_simulate(make_config(ctrl, mu));
      for (int p = 0; p < 3; ++p) {
        TableCell cell;
        cell.id = std::string("table5/") + controller_name(ctrl) + "/mu=" + detail::mu_label(mu) +
                  "/" + params[p];
        cell.reference = reference[c][p][m];
        cell.hb = hb_vals[p];
        if (sim.report) {
          const double v[] = {sim.report->A_meas, sim.report->omega_meas, sim.report->P_meas};
          cell.sim = v[p];
        }
        cell.note = sim.note;
        t.cells.push_back(cell);
      }
    }
  return t;
}

/// n log-spaced values from start to stop inclusive.
inline std::vector<double> log_range(double start, double stop, std::size_t count) {
  if (count < 2) throw std::invalid_argument("log_range: count must be at least 2");
  if (!(start > 0.0) || !(stop > 0.0)) throw std::invalid_argument("log_range: bounds must be positive");
  std::vector<double> v(count);
  const double ratio = std::log(stop / start);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = start * std::exp(ratio * static_cast<double>(i) / static_cast<double>(count - 1));
  v.back() = stop;
  return v;
}

/// Normalized amplitude and power over a log grid of k1 in [0.5, 8] sqrt(k2).
inline CsvTable reproduce_fig2(double Delta = 1.0, std::size_t points = 1000) {
  CsvTable t;
  const double k2 = 1.1 * Delta;
  t.comments = {"fig2: A/mu^2 and P/mu^2 vs k1, k2 = 1.1 Delta, Delta = " + format_double(Delta, 6),
                "k1 minimizing A: " + format_double(k1_min_amplitude(k2), 6) +
                    ", k1 minimizing P: " + format_double(k1_min_power(k2), 6)};
  t.columns = {"k1", "A_over_mu2", "P_over_mu2"};
  for (double k1 : log_range(0.5 * std::sqrt(k2), 8.0 * std::sqrt(k2), points)) {
    const StaGains g{k1, k2};
    t.rows.push_back({k1, normalized_amplitude(g), normalized_power(g)});
  }
  return t;
}

/// mu grid with 100 log-spaced values per decade over [1e-3, 1].
inline std::vector<double> figure_mu_grid() { return log_range(1e-3, 1.0, 301); }

/// Harmonic-balance chattering parameters of both controllers against mu,
/// delta = Delta = 1, M = 1.1 delta.
inline CsvTable reproduce_mu_figure(DesignObjective objective) {
  const bool amp = objective == DesignObjective::MinAmplitude;
  const FosmcGain relay{1.1};
  const StaGains sta = design_gains(1.0, objective);
  CsvTable t;
  t.comments = {std::string(amp ? "fig3" : "fig5") + ": chattering parameters vs mu, delta = Delta = 1",
                std::string("M = 1.1; STA gains minimize ") + (amp ? "amplitude" : "averaged power") +
                    ": k1 = " + format_double(sta.k1, 6) + ", k2 = " + format_double(sta.k2, 6),
                "mu_star (equal amplitude) = " + format_double(critical_mu_amplitude(relay.M, sta), 6) +
                    ", mu_starstar (equal power) = " + format_double(critical_mu_power(relay.M, sta), 6)};
  t.columns = {"mu", "A_fosmc", "omega_fosmc", "P_fosmc", "A_sta", "omega_sta", "P_sta"};
  for (double mu : figure_mu_grid()) {
    const auto f = fosmc_predict(relay, mu);
    const auto s = sta_predict(sta, mu);
    t.rows.push_back({mu, f.A, f.omega, f.P, s.A, s.omega, s.P});
  }
  return t;
}

inline CsvTable reproduce_fig3() { return reproduce_mu_figure(DesignObjective::MinAmplitude); }
inline CsvTable reproduce_fig5() { return reproduce_mu_figure(DesignObjective::MinPower); }

enum class SweepVariable { Mu, Omega, K1 };

struct SweepSpec {
  SweepVariable variable = SweepVariable::Mu;
  std::vector<double> values;
  LoopConfig base;
  /// Recompute h and t_end from the defaults for every value.
  bool auto_step = true;
  bool auto_horizon = true;
};

inline const char *sweep_variable_name(SweepVariable v) {
  switch (v) {
  case SweepVariable::Mu: return "mu";
  case SweepVariable::Omega: return "Omega";
  case SweepVariable::K1: return "k1";
  }
  return "?";
}

/// The base configuration with the swept variable set to value.
inline LoopConfig sweep_point(const SweepSpec &spec, double value) {
  LoopConfig cfg = spec.base;
  switch (spec.variable) {
  case SweepVariable::Mu: cfg.actuator.mu = value; break;
  case SweepVariable::Omega: cfg.disturbance = DisturbanceSpec(cfg.disturbance.alpha(), value); break;
  case SweepVariable::K1:
    if (!is_sta(cfg.controller)) throw std::invalid_argument("sweep over k1 requires an sta controller");
    std::get<StaGains>(cfg.controller).k1 = value;
    break;
  }
  if (spec.auto_step) cfg.h = default_step(cfg.actuator.mu);
  if (spec.auto_horizon) cfg.t_end = default_horizon(cfg.actuator.mu, cfg.disturbance.Omega());
  return cfg;
}

/// One row per value: harmonic-balance prediction and, with simulate set,
/// the measured steady state. Failed simulations leave empty fields.
inline CsvTable run_sweep(const SweepSpec &spec, bool simulate_points) {
  if (spec.values.size() < 2) throw std::invalid_argument("sweep needs at least 2 values");
  for (double v : spec.values)
    if (!(v > 0.0)) throw std::invalid_argument("sweep values must be positive");
  CsvTable t;
  t.comments = {std::string("sweep over ") + sweep_variable_name(spec.variable) + ", controller " +
                controller_name(spec.base.controller)};
  t.columns = {sweep_variable_name(spec.variable), "A_hb", "omega_hb", "P_hb"};
  if (simulate_points)
    for (const char *c : {"A_meas", "omega_meas", "P_meas", "A_max"}) t.columns.emplace_back(c);
  for (double v : spec.values) {
    const LoopConfig cfg = sweep_point(spec, v);
    const auto p = predict(cfg.controller, cfg.actuator.mu);
    std::vector<std::optional<double>> row{v, p.A, p.omega, p.P};
    if (simulate_points) {
      const auto sim = detail::try_simulate(cfg);
      if (sim.report)
        row.insert(row.end(), {sim.report->A_meas, sim.report->omega_meas, sim.report->P_meas,
                               sim.report->A_max});
      else
        row.insert(row.end(), 4, std::nullopt);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

} // namespace chatter
