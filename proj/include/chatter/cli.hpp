// Command-line front end: predict, design, simulate, sweep, reproduce.
//
// Exit codes: 0 success, 1 runtime failure (divergence, no steady
// oscillation, no limit cycle), 2 usage or validation error.
#pragma once

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config_io.hpp"
#include "design.hpp"
#include "hb.hpp"
#include "model.hpp"
#include "reproduce.hpp"
#include "sim.hpp"
#include "waveform.hpp"

namespace chatter::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct LoopFlags {
  std::optional<std::string> config;
  std::optional<std::string> controller;
  std::optional<double> M, k1, k2, mu, alpha, Omega, x0, h, t_end;
};

inline void add_loop_flags(CLI::App *app, LoopFlags &f) {
  app->add_option("--config", f.config, "flat JSON config file");
  app->add_option("--controller", f.controller, "fosmc or sta")
      ->check(CLI::IsMember({"fosmc", "sta"}));
  app->add_option("--M", f.M, "relay magnitude");
  app->add_option("--k1", f.k1, "super-twisting square-root gain");
  app->add_option("--k2", f.k2, "super-twisting integral gain");
  app->add_option("--mu", f.mu, "actuator time constant");
  app->add_option("--alpha", f.alpha, "disturbance amplitude");
  app->add_option("--Omega", f.Omega, "disturbance angular frequency");
  app->add_option("--x0", f.x0, "initial plant output");
  app->add_option("--h", f.h, "integration step (default mu/200)");
  app->add_option("--t-end", f.t_end, "horizon (default: 200 chattering / 40 disturbance periods)");
}

/// Config file first, then flags on top. h and t_end fall back to the
/// defaults for the final mu and Omega unless given explicitly.
inline LoopConfig build_config(const LoopFlags &f) {
  LoopConfig cfg;
  bool h_fixed = false, t_fixed = false;
  if (f.config) {
    cfg = load_config(*f.config);
    h_fixed = t_fixed = !f.mu && !f.Omega;
  } else {
    if (!f.controller) throw UsageError("--controller is required (fosmc or sta)");
    if (!f.mu) throw UsageError("--mu is required");
  }

  const std::string type = f.controller.value_or(controller_name(cfg.controller));
  if (type == "fosmc") {
    const auto *prev = std::get_if<FosmcGain>(&cfg.controller);
    if (f.M) cfg.controller = FosmcGain{*f.M};
    else if (!prev || !f.config) throw UsageError("--M is required for fosmc");
    if (f.k1 || f.k2) throw UsageError("--k1/--k2 do not apply to fosmc");
  } else {
    const auto *prev = std::get_if<StaGains>(&cfg.controller);
    StaGains g = prev && f.config ? *prev : StaGains{};
    if (!f.k1 && !(prev && f.config)) throw UsageError("--k1 is required for sta");
    if (!f.k2 && !(prev && f.config)) throw UsageError("--k2 is required for sta");
    if (f.k1) g.k1 = *f.k1;
    if (f.k2) g.k2 = *f.k2;
    cfg.controller = g;
    if (f.M) throw UsageError("--M does not apply to sta");
  }

  if (f.mu) cfg.actuator.mu = *f.mu;
  cfg.disturbance = DisturbanceSpec(f.alpha.value_or(cfg.disturbance.alpha()),
                                    f.Omega.value_or(cfg.disturbance.Omega()));
  if (f.x0) cfg.x0 = *f.x0;
  if (f.h) cfg.h = *f.h;
  else if (!h_fixed) cfg.h = default_step(cfg.actuator.mu);
  if (f.t_end) cfg.t_end = *f.t_end;
  else if (!t_fixed) cfg.t_end = default_horizon(cfg.actuator.mu, cfg.disturbance.Omega());
  return cfg;
}

inline void check_valid(const std::vector<std::string> &violations) {
  if (violations.empty()) return;
  std::string msg = violations.front();
  for (std::size_t i = 1; i < violations.size(); ++i) msg += "; " + violations[i];
  throw UsageError(msg);
}

inline std::ofstream open_output(const std::string &path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.precision(17);
  return out;
}

inline double percent(double measured, double predicted) {
  return 100.0 * (measured - predicted) / predicted;
}

inline int cmd_predict(const LoopFlags &flags, const std::optional<std::string> &out_path,
                       std::ostream &out) {
  const LoopConfig cfg = build_config(flags);
  check_valid(validate(cfg));
  const double mu = cfg.actuator.mu;
  const auto p = predict(cfg.controller, mu);
  const auto numeric = hb_solve_numeric(cfg.controller, mu);

  out << std::setprecision(6);
  out << "controller: " << controller_name(cfg.controller) << "\n"
      << "mu: " << mu << "\n"
      << "A: " << p.A << "\n"
      << "omega: " << p.omega << "\n"
      << "P: " << p.P << "\n"
      << "numeric HB: A " << numeric.prediction.A << ", omega " << numeric.prediction.omega
      << ", residual " << numeric.residual << "\n";
  if (numeric.multiple_roots) out << "warning: several harmonic-balance intersections found\n";

  if (out_path) {
    auto f = open_output(*out_path);
    f << "controller,mu,A,omega,P,hb_residual\n"
      << controller_name(cfg.controller) << ',' << mu << ',' << p.A << ',' << p.omega << ','
      << p.P << ',' << numeric.residual << '\n';
  }
  return kExitOk;
}

inline int cmd_design(double Delta, const std::string &objective, double k2_factor,
                      const std::optional<std::string> &out_path, std::ostream &out) {
  if (!(Delta > 0.0)) throw UsageError("Delta must be positive");
  if (!(k2_factor > 0.0)) throw UsageError("k2 factor must be positive");
  const auto obj = objective == "amplitude" ? DesignObjective::MinAmplitude : DesignObjective::MinPower;
  const StaGains g = design_gains(Delta, obj, k2_factor);
  const auto c = sta_constants(g);
  const bool stable = stability_check(g, Delta);

  out << std::setprecision(6);
  out << "objective: " << objective << "\n"
      << "k1: " << g.k1 << "\n"
      << "k2: " << g.k2 << "\n"
      << "finite-time stable (k1 > 1.414 sqrt(k2), k2 > Delta): " << (stable ? "yes" : "no") << "\n"
      << "A/mu^2: " << c.K_A << "\n"
      << "omega*mu: " << c.K_omega << "\n"
      << "P/mu^2: " << normalized_power(g) << "\n";
  if (out_path) {
    auto f = open_output(*out_path);
    f << "Delta,k1,k2,stable,A_over_mu2,omega_times_mu,P_over_mu2\n"
      << Delta << ',' << g.k1 << ',' << g.k2 << ',' << (stable ? 1 : 0) << ',' << c.K_A << ','
      << c.K_omega << ',' << normalized_power(g) << '\n';
  }
  return kExitOk;
}

inline int cmd_simulate(const LoopFlags &flags, const std::optional<std::string> &out_path,
                        const std::optional<std::string> &report_path, std::size_t stride,
                        std::ostream &out, std::ostream &err) {
  const LoopConfig cfg = build_config(flags);
  check_valid(validate_structure(cfg));
  const auto gain_issues = validate_gains(cfg.controller);
  for (const auto &g : gain_issues) err << "warning: " << g << "; running open loop\n";

  const Trajectory traj = simulate(cfg, {stride});
  if (out_path) {
    auto f = open_output(*out_path);
    write_trajectory_csv(f, traj);
  }
  const WaveformReport r = measure(traj);

  out << std::setprecision(6);
  out << "samples: " << traj.size() << "\n"
      << "window: [" << r.t_start << ", " << r.t_end << "], " << r.n_periods << " periods\n"
      << "A_max: " << r.A_max << "\n";
  if (gain_issues.empty()) {
    const auto p = predict(cfg.controller, cfg.actuator.mu);
    out << std::fixed;
    out << "           measured     predicted    deviation\n";
    auto line = [&](const char *name, double m, double hb) {
      out << std::setw(8) << name << "  " << std::setprecision(6) << std::defaultfloat
          << std::setw(11) << m << "  " << std::setw(11) << hb << "  " << std::setprecision(2)
          << std::fixed << std::showpos << percent(m, hb) << std::noshowpos << "%\n";
    };
    line("A", r.A_meas, p.A);
    line("omega", r.omega_meas, p.omega);
    line("P", r.P_meas, p.P);
    out << std::defaultfloat << std::setprecision(6);
  } else {
    out << "A_meas: " << r.A_meas << "\nomega_meas: " << r.omega_meas << "\nP_meas: " << r.P_meas
        << "\n";
  }
  if (report_path) {
    auto f = open_output(*report_path);
    write_report_csv_header(f);
    write_report_csv_row(f, r);
  }
  return kExitOk;
}

inline SweepVariable parse_sweep_variable(const std::string &s) {
  if (s == "mu") return SweepVariable::Mu;
  if (s == "Omega") return SweepVariable::Omega;
  if (s == "k1") return SweepVariable::K1;
  throw UsageError("--var must be mu, Omega or k1");
}

inline int cmd_sweep(const LoopFlags &flags, const std::string &var,
                     const std::vector<double> &values, const std::vector<double> &range,
                     bool with_sim, const std::optional<std::string> &out_path, std::ostream &out) {
  SweepSpec spec;
  spec.variable = parse_sweep_variable(var);
  LoopFlags base_flags = flags;
  // The swept variable may stand in for a required flag.
  if (spec.variable == SweepVariable::Mu && !base_flags.mu && !base_flags.config) base_flags.mu = 1.0;
  if (spec.variable == SweepVariable::K1 && !base_flags.k1 && !base_flags.config) base_flags.k1 = 1.0;
  spec.base = build_config(base_flags);
  spec.auto_step = !flags.h;
  spec.auto_horizon = !flags.t_end;

  if (!values.empty() && !range.empty()) throw UsageError("give either --values or --range");
  if (!range.empty()) {
    if (range.size() != 3) throw UsageError("--range takes start,stop,count");
    if (!(range[2] >= 2.0)) throw UsageError("sweep count must be at least 2");
    if (!(range[0] > 0.0) || !(range[1] > 0.0)) throw UsageError("sweep values must be positive");
    spec.values = log_range(range[0], range[1], static_cast<std::size_t>(range[2]));
  } else {
    spec.values = values;
  }
  if (spec.values.size() < 2) throw UsageError("sweep needs at least 2 values");
  for (double v : spec.values)
    if (!(v > 0.0)) throw UsageError("sweep values must be positive");
  for (double v : spec.values) check_valid(validate(sweep_point(spec, v)));

  const CsvTable t = run_sweep(spec, with_sim);
  if (out_path) {
    auto f = open_output(*out_path);
    write_csv(f, t);
  } else {
    write_csv(out, t);
  }
  return kExitOk;
}

inline const std::vector<std::string> &reproduce_targets() {
  static const std::vector<std::string> names = {"table1", "table2", "table3", "table4",
                                                 "table5", "fig2",   "fig3",   "fig5"};
  return names;
}

inline void write_reproduction(std::ostream &os, const std::string &target) {
  if (target == "table1") write_csv(os, reproduce_table1());
  else if (target == "table2") write_csv(os, reproduce_table2());
  else if (target == "table3") write_csv(os, reproduce_table3());
  else if (target == "table4") write_csv(os, reproduce_table4());
  else if (target == "table5") write_csv(os, reproduce_table5());
  else if (target == "fig2") write_csv(os, reproduce_fig2());
  else if (target == "fig3") write_csv(os, reproduce_fig3());
  else if (target == "fig5") write_csv(os, reproduce_fig5());
  else throw UsageError("unknown reproduction target '" + target + "'");
}

inline int cmd_reproduce(const std::string &target, const std::optional<std::string> &out_path,
                         std::ostream &out) {
  if (out_path) {
    auto f = open_output(*out_path);
    write_reproduction(f, target);
  } else {
    write_reproduction(out, target);
  }
  return kExitOk;
}

/// Parses argv and dispatches. Never throws; returns the process exit code.
inline int run_cli(int argc, const char *const *argv, std::ostream &out = std::cout,
                   std::ostream &err = std::cerr) {
  CLI::App app{"Chattering prediction, gain design and simulation for relay and "
               "super-twisting loops with second-order actuators"};
  app.require_subcommand(1);
  // "-h" stays free so "--h" can name the integration step.
  app.set_help_flag("--help", "print help and exit");

  LoopFlags predict_flags, sim_flags, sweep_flags;
  std::optional<std::string> out_path, report_path;

  auto *predict = app.add_subcommand("predict", "harmonic-balance amplitude, frequency and power");
  add_loop_flags(predict, predict_flags);
  predict->add_option("--out", out_path, "CSV output path");

  double Delta = 0.0, k2_factor = 1.1;
  std::string objective = "amplitude";
  auto *design = app.add_subcommand("design", "super-twisting gains for a disturbance-rate bound");
  design->add_option("--Delta", Delta, "bound on |dF/dt|")->required();
  design->add_option("--objective", objective, "amplitude or power")
      ->check(CLI::IsMember({"amplitude", "power"}));
  design->add_option("--k2-factor", k2_factor, "k2 = factor * Delta (default 1.1)");
  design->add_option("--out", out_path, "CSV output path");

  std::size_t stride = 1;
  auto *simulate_cmd = app.add_subcommand("simulate", "simulate the loop and measure chattering");
  add_loop_flags(simulate_cmd, sim_flags);
  simulate_cmd->add_option("--out", out_path, "trajectory CSV path");
  simulate_cmd->add_option("--report", report_path, "waveform report CSV path");
  simulate_cmd->add_option("--stride", stride, "record every n-th step")->check(CLI::PositiveNumber);

  std::string var = "mu";
  std::vector<double> values, range;
  bool with_sim = false;
  auto *sweep = app.add_subcommand("sweep", "parameter sweep of predictions (and simulations)");
  add_loop_flags(sweep, sweep_flags);
  sweep->add_option("--var", var, "mu, Omega or k1");
  sweep->add_option("--values", values, "explicit values")->delimiter(',');
  sweep->add_option("--range", range, "log range start,stop,count")->delimiter(',');
  sweep->add_flag("--simulate", with_sim, "also simulate every point");
  sweep->add_option("--out", out_path, "CSV output path");

  std::string target;
  auto *reproduce = app.add_subcommand("reproduce", "regenerate a table or figure as CSV");
  reproduce->add_option("target", target, "table1..table5, fig2, fig3, fig5")
      ->required()
      ->check(CLI::IsMember(reproduce_targets()));
  reproduce->add_option("--out", out_path, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*predict) return cmd_predict(predict_flags, out_path, out);
    if (*design) return cmd_design(Delta, objective, k2_factor, out_path, out);
    if (*simulate_cmd) return cmd_simulate(sim_flags, out_path, report_path, stride, out, err);
    if (*sweep) return cmd_sweep(sweep_flags, var, values, range, with_sim, out_path, out);
    if (*reproduce) return cmd_reproduce(target, out_path, out);
  } catch (const UsageError &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

} // namespace chatter::cli
