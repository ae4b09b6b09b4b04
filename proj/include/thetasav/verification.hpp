#pragma once

// Manufactured solutions and their forcing, error and rate measurement, the
// convergence driver, random initial conditions, and phase-region counting.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "thetasav/coupler.hpp"
#include "thetasav/errors.hpp"
#include "thetasav/grid.hpp"
#include "thetasav/phase.hpp"
#include "thetasav/spectral.hpp"

namespace thetasav {

/// Smooth periodic exact solution on [0,2]^2 with analytic time derivatives.
/// `phi(k, ...)` covers the stored phase fields only.
struct ExactSolution {
  int n_components = 2;
  std::function<double(int, double, double, double)> phi;
  std::function<double(int, double, double, double)> phi_t;
  std::function<double(double, double, double)> u;
  std::function<double(double, double, double)> v;
  std::function<double(double, double, double)> u_t;
  std::function<double(double, double, double)> v_t;
  std::function<double(double, double, double)> p;

  int field_count() const { return n_components == 2 ? 1 : n_components; }
};

namespace detail {

inline void attach_flow(ExactSolution& e) {
  constexpr double pi = std::numbers::pi;
  auto sq = [](double s) { return s * s; };
  e.u = [=](double x, double y, double t) { return pi * std::sin(t) * std::sin(2 * pi * y) * sq(std::sin(pi * x)); };
  e.v = [=](double x, double y, double t) { return -pi * std::sin(t) * std::sin(2 * pi * x) * sq(std::sin(pi * y)); };
  e.u_t = [=](double x, double y, double t) { return pi * std::cos(t) * std::sin(2 * pi * y) * sq(std::sin(pi * x)); };
  e.v_t = [=](double x, double y, double t) { return -pi * std::cos(t) * std::sin(2 * pi * x) * sq(std::sin(pi * y)); };
  e.p = [=](double x, double y, double t) { return std::sin(t) * std::cos(pi * x) * std::sin(pi * y); };
}

}  // namespace detail

inline ExactSolution exact_two_component() {
  constexpr double pi = std::numbers::pi;
  ExactSolution e;
  e.n_components = 2;
  e.phi = [=](int, double x, double y, double t) {
    return 0.5 + 0.5 * std::cos(t) * std::sin(pi * x) * std::sin(pi * y);
  };
  e.phi_t = [=](int, double x, double y, double t) {
    return -0.5 * std::sin(t) * std::sin(pi * x) * std::sin(pi * y);
  };
  detail::attach_flow(e);
  return e;
}

inline ExactSolution exact_three_component() {
  constexpr double pi = std::numbers::pi;
  ExactSolution e;
  e.n_components = 3;
  e.phi = [=](int k, double x, double y, double t) {
    const double s = std::cos(t) * std::sin(pi * x) * std::sin(pi * y);
    const double p1 = 0.3 + 0.01 * s;
    const double p2 = 0.3 + 0.02 * s;
    return k == 0 ? p1 : k == 1 ? p2 : 1.0 - p1 - p2;
  };
  e.phi_t = [=](int k, double x, double y, double t) {
    const double s = -std::sin(t) * std::sin(pi * x) * std::sin(pi * y);
    return k == 0 ? 0.01 * s : k == 1 ? 0.02 * s : -0.03 * s;
  };
  detail::attach_flow(e);
  return e;
}

inline ExactSolution exact_solution(int n_components) {
  if (n_components == 2) return exact_two_component();
  if (n_components == 3) return exact_three_component();
  throw InvalidArgument("manufactured solutions exist for 2 or 3 components only");
}

struct ExactFields {
  std::vector<RealField> phi;
  VectorField u;
  RealField p;
};

inline ExactFields sample_exact(const ExactSolution& e, const Grid& g, double t) {
  ExactFields out{{}, VectorField(g), RealField(g)};
  for (int k = 0; k < e.field_count(); ++k) {
    out.phi.push_back(RealField::from_function(g, [&](double x, double y) { return e.phi(k, x, y, t); }));
  }
  out.u = VectorField(RealField::from_function(g, [&](double x, double y) { return e.u(x, y, t); }),
                      RealField::from_function(g, [&](double x, double y) { return e.v(x, y, t); }));
  out.p = RealField::from_function(g, [&](double x, double y) { return e.p(x, y, t); });
  return out;
}

/// Residual of the continuous model evaluated on the exact solution at time t.
inline Forcing manufactured_forcing(const ExactSolution& e, double t, const Grid& g,
                                    const ModelParams& params) {
  const PhaseParams& ph = params.phase;
  const ExactFields f = sample_exact(e, g, t);
  const int n = e.field_count();

  std::vector<RealField> f_bar;
  for (int k = 0; k < n; ++k) {
    RealField fk = double_well_deriv(f.phi[k], ph.epsilon);
    fk += -mean(fk);
    f_bar.push_back(std::move(fk));
  }
  RealField beta(g);
  if (n > 1) {
    for (const auto& fk : f_bar) beta.add_scaled(-1.0 / e.n_components, fk);
  }

  Forcing out{{}, VectorField(g)};
  std::vector<RealField> mu;
  for (int k = 0; k < n; ++k) {
    RealField m = -1.0 * laplacian(f.phi[k]);
    m += f_bar[k];
    m += beta;
    m *= ph.lambda;
    RealField gk = RealField::from_function(g, [&](double x, double y) { return e.phi_t(k, x, y, t); });
    gk += advect_scalar(f.u, f.phi[k]);
    gk.add_scaled(ph.mobility, m);
    out.phi.push_back(std::move(gk));
    mu.push_back(std::move(m));
  }

  const VectorField ut(RealField::from_function(g, [&](double x, double y) { return e.u_t(x, y, t); }),
                       RealField::from_function(g, [&](double x, double y) { return e.v_t(x, y, t); }));
  const FlowParams& fp = params.flow;
  VectorField gu = gradient(f.p);
  gu += surface_tension(f.phi, mu);
  if (fp.kind == ModelKind::NavierStokes) {
    gu += ut;
    gu += convect(f.u);
    gu.add_scaled(-fp.nu, laplacian(f.u));
  } else {
    gu.add_scaled(fp.tau, ut);
    gu.add_scaled(fp.alpha * fp.nu, f.u);
  }
  out.u = std::move(gu);
  return out;
}

inline double linf_error(const RealField& numeric, const RealField& exact) {
  require_same_grid(numeric.grid(), exact.grid());
  double m = 0.0;
  for (std::size_t k = 0; k < numeric.size(); ++k) m = std::max(m, std::abs(numeric[k] - exact[k]));
  return m;
}

inline double linf_error(const VectorField& numeric, const VectorField& exact) {
  return std::max(linf_error(numeric.x, exact.x), linf_error(numeric.y, exact.y));
}

inline constexpr double kErrorFloor = 1e-14;

/// log(e_i / e_{i+1}) / log(dt_i / dt_{i+1}); NaN where either error is below the floor.
inline std::vector<double> observed_order(const std::vector<double>& errors, const std::vector<double>& dts) {
  if (errors.size() != dts.size() || errors.size() < 2) {
    throw InvalidArgument("observed_order needs matching error and step lists of length >= 2");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    if (errors[i] < kErrorFloor || errors[i + 1] < kErrorFloor) {
      out.push_back(std::nan(""));
      continue;
    }
    out.push_back(std::log(errors[i] / errors[i + 1]) / std::log(dts[i] / dts[i + 1]));
  }
  return out;
}

/// Parameters of the manufactured-solution tests.
inline ModelParams manufactured_params(ModelKind kind, int n_components, double theta, double dt) {
  ModelParams p;
  p.phase = PhaseParams{n_components, 10.0, 0.01, 0.05, 10.0};
  p.flow = FlowParams{kind, 1.0, 1000.0, 1.0};
  p.theta = theta;
  p.dt = dt;
  return p;
}

struct ConvergenceRow {
  double dt = 0.0;
  double error_phi = 0.0;
  double error_u = 0.0;
  double error_p = 0.0;
  double min_margin_d = INFINITY;
  double min_margin_q = INFINITY;
};

struct ConvergenceReport {
  ModelKind kind = ModelKind::NavierStokes;
  int n_components = 2;
  double theta = 0.5;
  std::vector<ConvergenceRow> rows;

  std::vector<double> dts() const {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r.dt);
    return v;
  }
  std::vector<double> orders_phi() const { return orders(&ConvergenceRow::error_phi); }
  std::vector<double> orders_u() const { return orders(&ConvergenceRow::error_u); }
  std::vector<double> orders_p() const { return orders(&ConvergenceRow::error_p); }

 private:
  std::vector<double> orders(double ConvergenceRow::*field) const {
    std::vector<double> e;
    for (const auto& r : rows) e.push_back(r.*field);
    return observed_order(e, dts());
  }
};

struct ConvergenceSetup {
  int n = 64;
  double final_time = 0.1;
  bool exact_first_step = false;
  bool dealias = false;
};

/// Runs the manufactured problem to final_time and returns the L-infinity errors.
inline ConvergenceRow run_manufactured(const ModelParams& params, const ConvergenceSetup& setup) {
  const Grid g = create_grid(setup.n, setup.n, 2.0, 2.0);
  const ExactSolution exact = exact_solution(params.phase.n_components);
  const long steps = std::lround(setup.final_time / params.dt);
  if (steps < 2 || std::abs(steps * params.dt - setup.final_time) > 1e-9 * setup.final_time) {
    throw InvalidArgument("final time must be an integer multiple (>= 2) of dt");
  }
  ModelParams mp = params;
  mp.dealias = setup.dealias;
  ForcingFn forcing = [exact, g, mp](double t) { return manufactured_forcing(exact, t, g, mp); };
  ExactFields f0 = sample_exact(exact, g, 0.0);
  ModelState s0 = initial_state(mp, std::move(f0.phi), std::move(f0.u), std::move(f0.p));

  auto sim = [&]() {
    if (!setup.exact_first_step) return Simulation(mp, std::move(s0), forcing);
    ExactFields f1 = sample_exact(exact, g, mp.dt);
    ModelState s1 = initial_state(mp, std::move(f1.phi), std::move(f1.u), std::move(f1.p), mp.dt);
    s1.step = 1;
    return Simulation(mp, std::move(s0), std::move(s1), forcing);
  }();
  ConvergenceRow row;
  while (sim.current().step < steps) {
    const StepReport& rep = sim.advance();
    row.min_margin_d = std::min(row.min_margin_d, rep.margin_d);
    row.min_margin_q = std::min(row.min_margin_q, rep.margin_q);
  }

  const ExactFields fe = sample_exact(exact, g, sim.current().time);
  row.dt = mp.dt;
  for (std::size_t k = 0; k < fe.phi.size(); ++k) {
    row.error_phi = std::max(row.error_phi, linf_error(sim.current().phase.phi[k], fe.phi[k]));
  }
  row.error_u = linf_error(sim.current().flow.u, fe.u);
  row.error_p = linf_error(sim.current().flow.p, fe.p);
  return row;
}

inline ConvergenceReport run_convergence_study(ModelKind kind, int n_components, double theta,
                                               const std::vector<double>& dts,
                                               const ConvergenceSetup& setup = {}) {
  ConvergenceReport rep{kind, n_components, theta, {}};
  for (double dt : dts) rep.rows.push_back(run_manufactured(manufactured_params(kind, n_components, theta, dt), setup));
  return rep;
}

inline void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceReport>& reports) {
  os.precision(17);
  os << "model,components,theta,dt,error_phi,error_u,error_p,order_phi,order_u,order_p\n";
  for (const auto& rep : reports) {
    const auto op = rep.orders_phi();
    const auto ou = rep.orders_u();
    const auto opp = rep.orders_p();
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      const auto& r = rep.rows[i];
      os << model_name(rep.kind) << ',' << rep.n_components << ',' << rep.theta << ',' << r.dt << ','
         << r.error_phi << ',' << r.error_u << ',' << r.error_p;
      if (i == 0) {
        os << ",,,\n";
      } else {
        os << ',' << op[i - 1] << ',' << ou[i - 1] << ',' << opp[i - 1] << '\n';
      }
    }
  }
}

enum class InitialKind {
  TwoComponent,           // phi = rand, u = v = p = 1
  ThreeComponent,         // phi_1, phi_2 perturbed about 1/3, phi_3 closes the sum
  ThreeComponentSpinodal  // all three perturbed independently, u = v = p = 0
};

struct InitialFields {
  std::vector<RealField> phi;
  VectorField u;
  RealField p;
};

/// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline InitialFields random_ic(InitialKind kind, std::uint64_t seed, const Grid& g) {
  std::mt19937_64 rng(seed);
  auto perturbed = [&]() {
    RealField f(g);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = 1.0 / 3.0 + 0.01 * (2.0 * unit_uniform(rng) - 1.0);
    return f;
  };
  InitialFields out{{}, VectorField(g), RealField(g)};
  switch (kind) {
    case InitialKind::TwoComponent: {
      RealField f(g);
      for (std::size_t k = 0; k < f.size(); ++k) f[k] = unit_uniform(rng);
      out.phi.push_back(std::move(f));
      out.u = VectorField(g, 1.0, 1.0);
      out.p = RealField(g, 1.0);
      break;
    }
    case InitialKind::ThreeComponent: {
      RealField a = perturbed();
      RealField b = perturbed();
      RealField c(g, 1.0);
      c -= a;
      c -= b;
      out.phi = {std::move(a), std::move(b), std::move(c)};
      break;
    }
    case InitialKind::ThreeComponentSpinodal: {
      RealField a = perturbed();
      RealField b = perturbed();
      RealField c = perturbed();
      out.phi = {std::move(a), std::move(b), std::move(c)};
      break;
    }
  }
  return out;
}

/// Number of 4-connected periodic regions of the map argmax_k phi_k.  For a
/// single stored field the labels are phi >= 1/2 and phi < 1/2.
inline int count_phase_regions(const std::vector<RealField>& phi) {
  if (phi.empty()) return 0;
  const Grid& g = phi.front().grid();
  const int nx = g.nx();
  const int ny = g.ny();
  const std::size_t n = g.size();
  std::vector<int> label(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    if (phi.size() == 1) {
      label[s] = phi[0][s] >= 0.5 ? 1 : 0;
      continue;
    }
    int best = 0;
    for (std::size_t k = 1; k < phi.size(); ++k) {
      if (phi[k][s] > phi[best][s]) best = static_cast<int>(k);
    }
    label[s] = best;
  }
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack;
  int regions = 0;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    ++regions;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t s = stack.back();
      stack.pop_back();
      const int i = static_cast<int>(s % nx);
      const int j = static_cast<int>(s / nx);
      const std::size_t nb[4] = {static_cast<std::size_t>(j) * nx + (i + 1) % nx,
                                 static_cast<std::size_t>(j) * nx + (i + nx - 1) % nx,
                                 static_cast<std::size_t>((j + 1) % ny) * nx + i,
                                 static_cast<std::size_t>((j + ny - 1) % ny) * nx + i};
      for (std::size_t t : nb) {
        if (!seen[t] && label[t] == label[s]) {
          seen[t] = 1;
          stack.push_back(t);
        }
      }
    }
  }
  return regions;
}

}  // namespace thetasav
