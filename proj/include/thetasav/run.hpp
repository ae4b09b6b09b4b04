#pragma once

// Experiment execution and file output for the command-line tool.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "thetasav/config.hpp"
#include "thetasav/coupler.hpp"
#include "thetasav/errors.hpp"
#include "thetasav/snapshot.hpp"
#include "thetasav/verification.hpp"

namespace thetasav {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitSolvability = 3,
  kExitNonFinite = 4,
  kExitIo = 5,
};

struct RunOutcome {
  int exit_code = kExitOk;
  long steps_completed = 0;
  std::string message;
};

inline const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::Convergence: return "convergence";
    case Experiment::EnergyMass: return "energy-mass";
    case Experiment::PhaseSeparation: return "phase-separation";
    case Experiment::Custom: return "custom";
  }
  return "custom";
}

inline Snapshot make_snapshot(const ModelState& s) {
  const Grid& g = s.grid();
  Snapshot snap{g.nx(), g.ny(), g.lx(), g.ly(), s.time, s.step, {}, {}};
  auto add = [&](std::string name, const RealField& f) {
    snap.names.push_back(std::move(name));
    snap.fields.emplace_back(f.values().begin(), f.values().end());
  };
  for (std::size_t k = 0; k < s.phase.phi.size(); ++k) add("phi_" + std::to_string(k + 1), s.phase.phi[k]);
  add("u", s.flow.u.x);
  add("v", s.flow.u.y);
  add("p", s.flow.p);
  return snap;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw IoError("cannot write '" + p.string() + "'");
  os << std::setprecision(17);
  return os;
}

/// Per-component masses; a two-component run reports phi and 1 - phi.
inline std::vector<double> component_masses(const Diagnostics& d, int components, double area) {
  std::vector<double> m = d.mass;
  if (components == 2 && m.size() == 1) m.push_back(area - m[0]);
  return m;
}

inline ModelState build_initial(const RunConfig& c, const Grid& g, ForcingFn& forcing) {
  const ModelParams mp = c.model_params();
  switch (c.initial) {
    case InitialCondition::Exact: {
      const ExactSolution ex = exact_solution(c.components);
      forcing = [ex, g, mp](double t) { return manufactured_forcing(ex, t, g, mp); };
      ExactFields f = sample_exact(ex, g, 0.0);
      return initial_state(mp, std::move(f.phi), std::move(f.u), std::move(f.p));
    }
    case InitialCondition::Random2:
    case InitialCondition::Random3:
    case InitialCondition::Spinodal: {
      const InitialKind kind = c.initial == InitialCondition::Random2   ? InitialKind::TwoComponent
                               : c.initial == InitialCondition::Random3 ? InitialKind::ThreeComponent
                                                                        : InitialKind::ThreeComponentSpinodal;
      InitialFields f = random_ic(kind, c.seed, g);
      return initial_state(mp, std::move(f.phi), std::move(f.u), std::move(f.p));
    }
  }
  throw ConfigError("unsupported initial condition");
}

inline RunOutcome run_trajectory(const RunConfig& c, const std::filesystem::path& out, std::ostream& log) {
  const Grid g = create_grid(c.nx, c.ny, c.lx, c.ly);
  ForcingFn forcing;
  Simulation sim(c.model_params(), build_initial(c, g, forcing), forcing);
  const long steps = c.step_count();
  const bool regions = c.experiment == Experiment::PhaseSeparation;

  std::ofstream csv = open_output(out / "diagnostics.csv");
  csv << "step,time,modified_energy";
  for (int k = 1; k <= c.components; ++k) csv << ",mass_" << k;
  csv << ",q,r,max_div_u,margin_D,margin_q\n";
  std::ofstream reg;
  if (regions) {
    reg = open_output(out / "regions.csv");
    reg << "step,time,regions\n";
    reg << 0 << ',' << 0.0 << ',' << count_phase_regions(sim.current().phase.phi) << '\n';
  }
  if (c.snapshot_stride > 0) {
    std::filesystem::create_directories(out / "snapshots");
  }
  auto snapshot = [&]() {
    char name[32];
    std::snprintf(name, sizeof name, "step_%06ld", sim.current().step);
    write_snapshot(make_snapshot(sim.current()), out / "snapshots" / name);
  };
  if (c.snapshot_stride > 0) snapshot();

  const Diagnostics d0 = sim.diagnostics();
  const std::vector<double> mass0 = component_masses(d0, c.components, g.area());
  double max_mass_drift = 0.0;
  double max_div = 0.0;
  double max_energy_rise = -INFINITY;
  double prev_energy = d0.modified_energy;
  RunOutcome outcome;
  std::string failure;
  int code = kExitOk;
  try {
    while (sim.current().step < steps) {
      sim.advance();
      const Diagnostics d = sim.diagnostics();
      const std::vector<double> mass = component_masses(d, c.components, g.area());
      csv << d.step << ',' << d.time << ',' << d.modified_energy;
      for (std::size_t k = 0; k < mass.size(); ++k) {
        csv << ',' << mass[k];
        max_mass_drift = std::max(max_mass_drift, std::abs(mass[k] - mass0[k]));
      }
      csv << ',' << d.q << ',' << d.r << ',' << d.max_div_u << ',' << d.margin_d << ',' << d.margin_q
          << '\n';
      max_energy_rise = std::max(max_energy_rise, d.modified_energy - prev_energy);
      prev_energy = d.modified_energy;
      max_div = std::max(max_div, d.max_div_u);
      if (regions) reg << d.step << ',' << d.time << ',' << count_phase_regions(sim.current().phase.phi) << '\n';
      if (c.snapshot_stride > 0 && d.step % c.snapshot_stride == 0) snapshot();
      if (!csv) throw IoError("write failed for diagnostics.csv");
    }
  } catch (const SolvabilityError& e) {
    code = kExitSolvability;
    failure = e.what();
  } catch (const NonFiniteError& e) {
    code = kExitNonFinite;
    failure = e.what();
  }
  outcome.steps_completed = sim.current().step;
  outcome.exit_code = code;

  std::ofstream sum = open_output(out / "summary.txt");
  sum << "experiment = " << experiment_name(c.experiment) << "\nmodel = " << model_name(c.model)
      << "\ncomponents = " << c.components << "\ntheta = " << c.theta << "\ndt = " << c.dt
      << "\nsteps_requested = " << steps << "\nsteps_completed = " << outcome.steps_completed
      << "\nfinal_time = " << sim.current().time << "\ninitial_modified_energy = " << d0.modified_energy
      << "\nfinal_modified_energy = " << prev_energy << "\nmax_energy_increase = " << max_energy_rise
      << "\nmax_mass_drift = " << max_mass_drift << "\nmax_div_u = " << max_div;
  if (regions) sum << "\nfinal_regions = " << count_phase_regions(sim.current().phase.phi);
  if (code == kExitOk) {
    sum << "\nstatus = ok\n";
    outcome.message = "completed " + std::to_string(outcome.steps_completed) + " steps";
  } else {
    sum << "\nstatus = failed\nfailed_step = " << outcome.steps_completed + 1 << "\nerror = " << failure << '\n';
    outcome.message = "failed at step " + std::to_string(outcome.steps_completed + 1) + ": " + failure;
  }
  log << outcome.message << '\n';
  return outcome;
}

inline RunOutcome run_convergence(const RunConfig& c, const std::filesystem::path& out, std::ostream& log) {
  std::vector<double> dts;
  for (int i = 0; i < c.levels; ++i) dts.push_back(c.dt / std::pow(2.0, i));
  ConvergenceSetup setup;
  setup.n = c.nx;
  setup.final_time = c.final_time > 0.0 ? c.final_time : c.steps * c.dt;
  setup.exact_first_step = c.exact_first_step;
  setup.dealias = c.dealias;
  ConvergenceReport rep{c.model, c.components, c.theta, {}};
  for (double dt : dts) {
    RunConfig level = c;
    level.dt = dt;
    rep.rows.push_back(run_manufactured(level.model_params(), setup));
    const auto& r = rep.rows.back();
    log << "dt = " << r.dt << "  err_phi = " << r.error_phi << "  err_u = " << r.error_u
        << "  err_p = " << r.error_p << '\n';
  }
  std::ofstream csv = open_output(out / "convergence_report.csv");
  write_convergence_csv(csv, {rep});
  const auto op = rep.orders_phi();
  const auto ou = rep.orders_u();
  std::ofstream sum = open_output(out / "summary.txt");
  sum << "experiment = convergence\nmodel = " << model_name(c.model) << "\ncomponents = " << c.components
      << "\ntheta = " << c.theta << "\nlevels = " << c.levels << "\nfinal_time = " << setup.final_time;
  sum << "\norders_phi =";
  for (double o : op) sum << ' ' << o;
  sum << "\norders_u =";
  for (double o : ou) sum << ' ' << o;
  sum << "\nstatus = ok\n";
  for (std::size_t i = 0; i < op.size(); ++i) {
    log << "order (dt " << dts[i] << " -> " << dts[i + 1] << "): phi " << op[i] << ", u " << ou[i] << '\n';
  }
  return {kExitOk, 0, "convergence study finished"};
}

}  // namespace detail

/// Runs the configured experiment, writing all output under `config.out`.
/// Solver failures are reported through the exit code; configuration and I/O
/// errors propagate as exceptions.
inline RunOutcome run(const RunConfig& c, std::ostream& log) {
  const std::filesystem::path out(c.out);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory '" + out.string() + "': " + ec.message());
  if (c.experiment == Experiment::Convergence) return detail::run_convergence(c, out, log);
  return detail::run_trajectory(c, out, log);
}

/// Maps an exception escaping `run` to the process exit code.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidArgument*>(&e)) return kExitConfig;
  if (dynamic_cast<const SolvabilityError*>(&e) || dynamic_cast<const CompatibilityError*>(&e)) {
    return kExitSolvability;
  }
  if (dynamic_cast<const NonFiniteError*>(&e)) return kExitNonFinite;
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const std::filesystem::filesystem_error*>(&e)) {
    return kExitIo;
  }
  return kExitFailure;
}

}  // namespace thetasav
