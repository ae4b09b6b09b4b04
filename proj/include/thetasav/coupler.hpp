#pragma once

// One full time step of the coupled phase-field / flow system, the first-order
// start-up step, and the discrete structure diagnostics (modified energy, mass,
// divergence, solvability margins).

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thetasav/errors.hpp"
#include "thetasav/flow.hpp"
#include "thetasav/gnorm.hpp"
#include "thetasav/grid.hpp"
#include "thetasav/phase.hpp"
#include "thetasav/spectral.hpp"

namespace thetasav {

struct ModelParams {
  PhaseParams phase;
  FlowParams flow;
  double theta = 0.5;
  double dt = 1e-3;
  bool dealias = false;

  ModelKind kind() const { return flow.kind; }

  void validate() const {
    phase.validate();
    flow.validate();
    require_theta(theta);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("time step must be positive");
  }
};

struct ModelState {
  PhaseState phase;
  FlowState flow;
  double time = 0.0;
  long step = 0;

  const Grid& grid() const { return flow.p.grid(); }
};

/// Right-hand sides added to the phase equations and the momentum equation.
struct Forcing {
  std::vector<RealField> phi;
  VectorField u;
};

using ForcingFn = std::function<Forcing(double t)>;

struct StepReport {
  double margin_d = 0.0;
  double margin_q = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
  double q_theta = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
};

struct StepResult {
  ModelState state;
  StepReport report;
};

/// Builds the level-0 state: r = sqrt(int F + C), q = 1, mu from the SAV form
/// of the chemical potential, u~ = u.
inline ModelState initial_state(const ModelParams& params, std::vector<RealField> phi, VectorField u,
                                RealField p, double time = 0.0) {
  params.validate();
  if (static_cast<int>(phi.size()) != params.phase.field_count()) {
    throw InvalidArgument("initial condition has " + std::to_string(phi.size()) +
                          " phase fields, expected " + std::to_string(params.phase.field_count()));
  }
  ModelState s{PhaseState{}, FlowState{u, u, std::move(p)}, time, 0};
  s.phase.r = sav_denominator(phi, params.phase.epsilon, params.phase.sav_shift);
  s.phase.q = 1.0;
  s.phase.mu = chemical_potential(phi, s.phase.r, params.phase);
  s.phase.phi = std::move(phi);
  s.flow.p += -mean(s.flow.p);
  return s;
}

struct EtaTerms {
  double eta1 = 0.0;
  double eta2 = 0.0;
};

/// Coefficients of the q equation: its right-hand side is eta2 + q^{n+theta} eta1.
inline EtaTerms eta_terms(const StarCache& star, const PhaseSplitParts& parts, const VectorField& u1,
                          const VectorField& u2, const VectorField& u_n,
                          const std::vector<RealField>& mu_n, double theta, ModelKind kind,
                          bool dealiased = false) {
  EtaTerms e;
  for (std::size_t k = 0; k < star.phi.size(); ++k) {
    const RealField adv = advect_scalar(star.u, star.phi[k], dealiased);
    e.eta1 += theta * l2_inner(adv, parts.mu2(k));
    e.eta2 += l2_inner(adv, combine(theta, parts.mu1(k), 1.0 - theta, mu_n[k]));
  }
  VectorField drive = surface_tension(star.phi, star.mu);
  if (kind == ModelKind::NavierStokes) drive += convect(star.u, dealiased);
  e.eta1 += theta * l2_inner(drive, u2);
  e.eta2 += l2_inner(drive, combine(theta, u1, 1.0 - theta, u_n));
  return e;
}

struct QUpdate {
  double q_theta = 0.0;
  double q_next = 0.0;
  double margin = 0.0;
};

inline QUpdate solve_q_scalar(double eta1, double eta2, double q_n, double q_nm1, double theta,
                              const Stencil& st, double dt) {
  const double lead = st.a1 / (theta * dt);
  const double margin = lead - eta1;
  if (!(margin > kSolvabilityFloor * lead)) {
    throw SolvabilityError("q-equation coefficient is not positive: " + std::to_string(margin));
  }
  const double rhs = (st.a1 * (1.0 - theta) / (theta * dt) - st.a0 / dt) * q_n - st.am1 / dt * q_nm1 +
                     eta2;
  const double q_theta = rhs / margin;
  return {q_theta, (q_theta - (1.0 - theta) * q_n) / theta, margin};
}

namespace detail {

inline void require_finite(const ModelState& s) {
  bool ok = std::isfinite(s.phase.r) && std::isfinite(s.phase.q) && s.flow.u.all_finite() &&
            s.flow.u_tilde.all_finite() && s.flow.p.all_finite();
  for (const auto& f : s.phase.phi) ok = ok && f.all_finite();
  for (const auto& f : s.phase.mu) ok = ok && f.all_finite();
  if (!ok) {
    throw NonFiniteError("non-finite value in the solution at step " + std::to_string(s.step) +
                         " (t = " + std::to_string(s.time) + ")");
  }
}

/// The shared update.  `prev` supplies level n-1 (ignored terms when the stencil has am1 = 0).
inline StepResult advance(const ModelState& curr, const ModelState& prev, const StarCache& star,
                          const ModelParams& params, const Stencil& st, const ForcingFn* forcing) {
  const double theta = params.theta;
  const double dt = params.dt;
  std::optional<Forcing> g;
  if (forcing != nullptr && *forcing) g = (*forcing)(curr.time + theta * dt);

  const PhaseHistory hist{curr.phase.phi, prev.phase.phi, curr.phase.mu, curr.phase.r, prev.phase.r};
  PhaseSplitParts parts = split_phase_step(hist, star, params.phase, theta, st, dt,
                                           g ? &g->phi : nullptr, params.dealias);

  const FlowParams& fp = params.flow;
  const VectorField* gu = g ? &g->u : nullptr;
  VectorField u1 = fp.kind == ModelKind::NavierStokes
                       ? ns_tilde_u1(curr.flow.u, prev.flow.u, curr.flow.p, fp.nu, theta, st, dt, gu)
                       : darcy_tilde_u1(curr.flow.u, prev.flow.u, curr.flow.p, fp.alpha, fp.nu, fp.tau,
                                        theta, st, dt, gu);
  VectorField u2 = fp.kind == ModelKind::NavierStokes
                       ? ns_tilde_u2(star.u, star.phi, star.mu, fp.nu, theta, st, dt, params.dealias)
                       : darcy_tilde_u2(star.phi, star.mu, fp.alpha, fp.nu, fp.tau, theta, st, dt);

  const EtaTerms eta = eta_terms(star, parts, u1, u2, curr.flow.u, curr.phase.mu, theta, fp.kind,
                                 params.dealias);
  const QUpdate q = solve_q_scalar(eta.eta1, eta.eta2, curr.phase.q, prev.phase.q, theta, st, dt);

  PhaseUpdate ph = assemble_phase(parts, q.q_theta);
  VectorField u_tilde = combine(1.0, u1, q.q_theta, u2);
  const double coeff = pressure_coefficient(fp, theta, st, dt);
  RealField p = pressure_poisson(u_tilde, curr.flow.p, coeff);
  VectorField u = project_velocity(u_tilde, p, curr.flow.p, coeff);

  StepResult out{ModelState{PhaseState{std::move(ph.phi), std::move(ph.mu), ph.r, q.q_next},
                            FlowState{std::move(u), std::move(u_tilde), std::move(p)},
                            curr.time + dt, curr.step + 1},
                 StepReport{parts.margin_d, q.margin, eta.eta1, eta.eta2, q.q_theta, parts.r1,
                            parts.r2}};
  require_finite(out.state);
  return out;
}

}  // namespace detail

/// First-order start-up step from level 0 to level 1.
inline StepResult bootstrap(const ModelState& initial, const ModelParams& params,
                            const ForcingFn* forcing = nullptr) {
  params.validate();
  const StarCache star =
      build_star_cache(initial.phase.phi, initial.phase.mu, initial.flow.u, params.phase);
  return detail::advance(initial, initial, star, params, Stencil::one_step(), forcing);
}

/// Second-order step from levels n and n-1 to level n+1.
inline StepResult step(const ModelState& curr, const ModelState& prev, const ModelParams& params,
                       const ForcingFn* forcing = nullptr) {
  params.validate();
  const double theta = params.theta;
  const StarCache star = build_star_cache(extrapolate_star(curr.phase.phi, prev.phase.phi, theta),
                                          extrapolate_star(curr.phase.mu, prev.phase.mu, theta),
                                          extrapolate_star(curr.flow.u, prev.flow.u, theta),
                                          params.phase);
  return detail::advance(curr, prev, star, params, Stencil::bdf_theta(theta), forcing);
}

/// Discrete Lyapunov functional on the pair (next, curr).
inline double modified_energy(const ModelState& next, const ModelState& curr, const ModelParams& params) {
  const double theta = params.theta;
  const double lambda = params.phase.lambda;
  const double inertia = params.flow.inertia();
  double e = 0.0;
  for (std::size_t k = 0; k < next.phase.phi.size(); ++k) {
    e += 0.5 * lambda * g_norm_pair_gradient(next.phase.phi[k], curr.phase.phi[k], theta);
  }
  e += lambda * g_quadratic_pair(next.phase.r, curr.phase.r, theta);
  e += 0.5 * g_quadratic_pair(next.phase.q, curr.phase.q, theta);
  e += 0.5 * inertia * g_norm_pair(next.flow.u, curr.flow.u, theta);
  const double dt = params.dt;
  e += theta * theta * dt * dt / ((2.0 * theta + 1.0) * inertia) *
       l2_norm_squared(gradient(next.flow.p));
  return e;
}

inline std::vector<double> total_mass(const ModelState& s) {
  std::vector<double> m;
  for (const auto& f : s.phase.phi) m.push_back(integral(f));
  return m;
}

/// max |sum_k phi_k - 1|; zero for a two-component system.
inline double sum_to_one_defect(const ModelState& s) {
  if (s.phase.phi.size() < 2) return 0.0;
  RealField sum(s.grid(), -1.0);
  for (const auto& f : s.phase.phi) sum += f;
  return linf_norm(sum);
}

struct Diagnostics {
  long step = 0;
  double time = 0.0;
  double modified_energy = 0.0;
  std::vector<double> mass;
  double q = 1.0;
  double r = 0.0;
  double max_div_u = 0.0;
  double max_u = 0.0;
  double sum_defect = 0.0;
  double margin_d = 0.0;
  double margin_q = 0.0;
};

/// Owns the two most recent levels and advances them.
class Simulation {
 public:
  Simulation(ModelParams params, ModelState initial, ForcingFn forcing = {})
      : params_(std::move(params)), curr_(std::move(initial)), forcing_(std::move(forcing)) {
    params_.validate();
    detail::require_finite(curr_);
  }

  /// Starts from two given levels, skipping the start-up step.
  Simulation(ModelParams params, ModelState level0, ModelState level1, ForcingFn forcing = {})
      : params_(std::move(params)),
        prev_(std::move(level0)),
        curr_(std::move(level1)),
        forcing_(std::move(forcing)) {
    params_.validate();
    detail::require_finite(*prev_);
    detail::require_finite(curr_);
  }

  const ModelParams& params() const { return params_; }
  const ModelState& current() const { return curr_; }
  const ModelState* previous() const { return prev_ ? &*prev_ : nullptr; }
  const StepReport& last_report() const { return report_; }

  const StepReport& advance() {
    const ForcingFn* g = forcing_ ? &forcing_ : nullptr;
    StepResult res = prev_ ? step(curr_, *prev_, params_, g) : bootstrap(curr_, params_, g);
    prev_ = std::move(curr_);
    curr_ = std::move(res.state);
    report_ = res.report;
    return report_;
  }

  Diagnostics diagnostics() const {
    Diagnostics d;
    d.step = curr_.step;
    d.time = curr_.time;
    d.modified_energy = modified_energy(curr_, prev_ ? *prev_ : curr_, params_);
    d.mass = total_mass(curr_);
    d.q = curr_.phase.q;
    d.r = curr_.phase.r;
    d.max_div_u = max_divergence(curr_.flow.u);
    d.max_u = linf_norm(curr_.flow.u);
    d.sum_defect = sum_to_one_defect(curr_);
    d.margin_d = report_.margin_d;
    d.margin_q = report_.margin_q;
    return d;
  }

 private:
  ModelParams params_;
  std::optional<ModelState> prev_;
  ModelState curr_;
  ForcingFn forcing_;
  StepReport report_;
};

}  // namespace thetasav
