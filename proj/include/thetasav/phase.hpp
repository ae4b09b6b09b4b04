#pragma once

// Conservative Allen-Cahn machinery: double-well potential, the SAV nonlinear
// terms, extrapolation, and the split linear solves that make one phase update
// fully decoupled.
//
// Every time difference is written as (a1 x^{n+1} + a0 x^n + am1 x^{n-1}) / dt
// so that the second-order stepper and the first-order start-up step share the
// same code.  Implicit linear terms are weighted at x^{n+theta}.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "thetasav/errors.hpp"
#include "thetasav/grid.hpp"
#include "thetasav/spectral.hpp"

namespace thetasav {

struct PhaseParams {
  int n_components = 2;
  double mobility = 10.0;
  double lambda = 0.01;
  double epsilon = 0.05;
  double sav_shift = 10.0;

  /// Number of stored phase fields: a two-component system keeps only phi.
  int field_count() const { return n_components == 2 ? 1 : n_components; }

  void validate() const {
    if (n_components < 2) throw InvalidArgument("component count must be at least 2");
    if (!(mobility > 0.0)) throw InvalidArgument("mobility must be positive");
    if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    if (!(sav_shift > 0.0)) throw InvalidArgument("SAV shift C must be positive");
  }
};

struct PhaseState {
  std::vector<RealField> phi;
  std::vector<RealField> mu;
  double r = 0.0;
  double q = 1.0;
};

/// Coefficients of (a1 x^{n+1} + a0 x^n + am1 x^{n-1}) / dt.
struct Stencil {
  double a1 = 1.0;
  double a0 = -1.0;
  double am1 = 0.0;

  static Stencil bdf_theta(double theta) {
    return {(2.0 * theta + 1.0) / 2.0, -2.0 * theta, (2.0 * theta - 1.0) / 2.0};
  }
  static Stencil one_step() { return {1.0, -1.0, 0.0}; }

  double apply(double xp, double xn, double xm) const { return a1 * xp + a0 * xn + am1 * xm; }
};

inline void require_theta(double theta) {
  if (!(theta >= 0.5 && theta <= 1.0)) {
    throw InvalidArgument("theta must lie in [1/2, 1] for the scheme to be energy stable, got " +
                          std::to_string(theta));
  }
}

/// F(phi) = phi^2 (1 - phi)^2 / (4 eps^2)
inline RealField double_well(const RealField& phi, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  RealField out(phi.grid());
  const double s = 1.0 / (4.0 * epsilon * epsilon);
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double p = phi[k];
    out[k] = s * p * p * (1.0 - p) * (1.0 - p);
  }
  return out;
}

/// f(phi) = phi (phi - 1/2)(phi - 1) / eps^2
inline RealField double_well_deriv(const RealField& phi, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  RealField out(phi.grid());
  const double s = 1.0 / (epsilon * epsilon);
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double p = phi[k];
    out[k] = s * p * (p - 0.5) * (p - 1.0);
  }
  return out;
}

inline double bulk_energy(const std::vector<RealField>& phi, double epsilon) {
  double e = 0.0;
  for (const auto& f : phi) e += integral(double_well(f, epsilon));
  return e;
}

/// sqrt(sum_k int F(phi_k) + C)
inline double sav_denominator(const std::vector<RealField>& phi, double epsilon, double shift) {
  if (!(shift > 0.0)) throw InvalidArgument("SAV shift C must be positive");
  return std::sqrt(bulk_energy(phi, epsilon) + shift);
}

struct NonlinearTerms {
  std::vector<RealField> h_bar;
  RealField gamma;

  /// H_bar_k + gamma, the field multiplying r in the chemical potential.
  RealField source(std::size_t k) const { return h_bar.at(k) + gamma; }
};

inline NonlinearTerms nonlinear_terms(const std::vector<RealField>& phi, const PhaseParams& params) {
  if (phi.empty()) throw InvalidArgument("no phase fields");
  if (static_cast<int>(phi.size()) != params.field_count()) {
    throw InvalidArgument("phase field count does not match component count");
  }
  const double denom = sav_denominator(phi, params.epsilon, params.sav_shift);
  NonlinearTerms out{{}, RealField(phi.front().grid())};
  out.h_bar.reserve(phi.size());
  for (const auto& f : phi) {
    RealField h = double_well_deriv(f, params.epsilon);
    h *= 1.0 / denom;
    h += -mean(h);
    out.h_bar.push_back(std::move(h));
  }
  if (params.field_count() > 1) {
    for (const auto& h : out.h_bar) out.gamma.add_scaled(-1.0 / params.n_components, h);
  }
  return out;
}

inline RealField extrapolate_star(const RealField& xn, const RealField& xnm1, double theta) {
  return combine(1.0 + theta, xn, -theta, xnm1);
}

inline VectorField extrapolate_star(const VectorField& xn, const VectorField& xnm1, double theta) {
  return combine(1.0 + theta, xn, -theta, xnm1);
}

inline std::vector<RealField> extrapolate_star(const std::vector<RealField>& xn,
                                               const std::vector<RealField>& xnm1, double theta) {
  if (xn.size() != xnm1.size()) throw InvalidArgument("history lengths differ");
  std::vector<RealField> out;
  out.reserve(xn.size());
  for (std::size_t k = 0; k < xn.size(); ++k) out.push_back(extrapolate_star(xn[k], xnm1[k], theta));
  return out;
}

/// Explicit data every linear solve of one step is built from.
struct StarCache {
  std::vector<RealField> phi;
  std::vector<RealField> mu;
  VectorField u;
  NonlinearTerms terms;
};

inline StarCache build_star_cache(std::vector<RealField> phi, std::vector<RealField> mu, VectorField u,
                                  const PhaseParams& params) {
  NonlinearTerms terms = nonlinear_terms(phi, params);
  return {std::move(phi), std::move(mu), std::move(u), std::move(terms)};
}

struct FieldPair {
  RealField phi;
  RealField mu;
};

/// Shared elliptic operator a1/dt - M lambda theta Lap.
inline RealField phase_helmholtz(const RealField& rhs, const PhaseParams& params, double theta,
                                 const Stencil& st, double dt) {
  return solve_helmholtz(st.a1 / dt, params.mobility * params.lambda * theta, rhs);
}

/// q-free, r-free branch.  `source` is H_bar_k + gamma, `forcing` an optional
/// right-hand side of the phase equation.
inline FieldPair solve_sub11(const RealField& phi_n, const RealField& phi_nm1, const RealField& mu_n,
                             const RealField& source, double r_n, const PhaseParams& params,
                             double theta, const Stencil& st, double dt,
                             const RealField* forcing = nullptr) {
  const double ml = params.mobility * params.lambda;
  const RealField neg_lap_n = -1.0 * laplacian(phi_n);
  RealField rhs = combine(-st.a0 / dt, phi_n, -st.am1 / dt, phi_nm1);
  rhs.add_scaled(-ml * (1.0 - theta), neg_lap_n);
  rhs.add_scaled(-ml * (1.0 - theta) * r_n, source);
  if (forcing != nullptr) rhs += *forcing;
  RealField phi = phase_helmholtz(rhs, params, theta, st, dt);

  // mu^{n+theta} from the chemical potential equation, then unwound to mu^{n+1}.
  RealField m = combine(-theta, laplacian(phi), 1.0 - theta, neg_lap_n);
  m.add_scaled((1.0 - theta) * r_n, source);
  m *= params.lambda;
  m.add_scaled(-(1.0 - theta), mu_n);
  m *= 1.0 / theta;
  return {std::move(phi), std::move(m)};
}

/// Response to r: shared by the r-branch and the q-branch.
inline FieldPair solve_sub12(const RealField& source, const PhaseParams& params, double theta,
                             const Stencil& st, double dt) {
  RealField phi = phase_helmholtz(-params.mobility * params.lambda * theta * source, params, theta,
                                  st, dt);
  RealField mu = combine(-1.0, laplacian(phi), 1.0, source);
  mu *= params.lambda;
  return {std::move(phi), std::move(mu)};
}

/// Response to the advection term, multiplied by q^{n+theta} on assembly.
inline FieldPair solve_sub21(const VectorField& u_star, const RealField& phi_star,
                             const PhaseParams& params, double theta, const Stencil& st, double dt,
                             bool dealiased = false) {
  RealField phi = phase_helmholtz(-1.0 * advect_scalar(u_star, phi_star, dealiased), params, theta,
                                  st, dt);
  RealField mu = -params.lambda * laplacian(phi);
  return {std::move(phi), std::move(mu)};
}

inline constexpr double kSolvabilityFloor = 1e-12;

/// a1 - 1/2 sum_k int H_bar_k a1 phi_k12; positive by construction.
inline double r_denominator(const std::vector<RealField>& h_bar, const std::vector<RealField>& phi12,
                            const Stencil& st) {
  double s = 0.0;
  for (std::size_t k = 0; k < h_bar.size(); ++k) s += l2_inner(h_bar[k], phi12[k]);
  const double d = st.a1 - 0.5 * st.a1 * s;
  if (!(d > kSolvabilityFloor)) {
    throw SolvabilityError("SAV r-denominator is not positive: D = " + std::to_string(d));
  }
  return d;
}

inline double compute_r1(const std::vector<RealField>& phi11, const std::vector<RealField>& phi12,
                         const std::vector<RealField>& phi_n, const std::vector<RealField>& phi_nm1,
                         const std::vector<RealField>& h_bar, double r_n, double r_nm1,
                         const Stencil& st) {
  const double d = r_denominator(h_bar, phi12, st);
  double s = 0.0;
  for (std::size_t k = 0; k < h_bar.size(); ++k) {
    RealField w = combine(st.a1, phi11[k], st.a0, phi_n[k]);
    w.add_scaled(st.am1, phi_nm1[k]);
    s += l2_inner(h_bar[k], w);
  }
  return (-st.a0 * r_n - st.am1 * r_nm1 + 0.5 * s) / d;
}

inline double compute_r2(const std::vector<RealField>& phi21, const std::vector<RealField>& phi12,
                         const std::vector<RealField>& h_bar, const Stencil& st) {
  const double d = r_denominator(h_bar, phi12, st);
  double s = 0.0;
  for (std::size_t k = 0; k < h_bar.size(); ++k) s += l2_inner(h_bar[k], phi21[k]);
  return 0.5 * st.a1 * s / d;
}

struct PhaseSplitParts {
  std::vector<RealField> phi11, phi12, phi21;
  std::vector<RealField> mu11, mu12, mu21;
  double r1 = 0.0;
  double r2 = 0.0;
  double margin_d = 0.0;

  /// phi_k1 = phi_k11 + r1 phi_k12
  RealField phi1(std::size_t k) const { return combine(1.0, phi11[k], r1, phi12[k]); }
  RealField phi2(std::size_t k) const { return combine(1.0, phi21[k], r2, phi12[k]); }
  RealField mu1(std::size_t k) const { return combine(1.0, mu11[k], r1, mu12[k]); }
  RealField mu2(std::size_t k) const { return combine(1.0, mu21[k], r2, mu12[k]); }
};

/// History the phase split needs: levels n and n-1 and the explicit data.
struct PhaseHistory {
  const std::vector<RealField>& phi_n;
  const std::vector<RealField>& phi_nm1;
  const std::vector<RealField>& mu_n;
  double r_n;
  double r_nm1;
};

inline PhaseSplitParts split_phase_step(const PhaseHistory& h, const StarCache& star,
                                        const PhaseParams& params, double theta, const Stencil& st,
                                        double dt, const std::vector<RealField>* forcing = nullptr,
                                        bool dealiased = false) {
  PhaseSplitParts parts;
  const std::size_t n = h.phi_n.size();
  for (std::size_t k = 0; k < n; ++k) {
    const RealField src = star.terms.source(k);
    const RealField* g = forcing != nullptr ? &forcing->at(k) : nullptr;
    FieldPair p11 = solve_sub11(h.phi_n[k], h.phi_nm1[k], h.mu_n[k], src, h.r_n, params, theta, st,
                                dt, g);
    FieldPair p12 = solve_sub12(src, params, theta, st, dt);
    FieldPair p21 = solve_sub21(star.u, star.phi[k], params, theta, st, dt, dealiased);
    parts.phi11.push_back(std::move(p11.phi));
    parts.mu11.push_back(std::move(p11.mu));
    parts.phi12.push_back(std::move(p12.phi));
    parts.mu12.push_back(std::move(p12.mu));
    parts.phi21.push_back(std::move(p21.phi));
    parts.mu21.push_back(std::move(p21.mu));
  }
  parts.margin_d = r_denominator(star.terms.h_bar, parts.phi12, st);
  parts.r1 = compute_r1(parts.phi11, parts.phi12, h.phi_n, h.phi_nm1, star.terms.h_bar, h.r_n,
                        h.r_nm1, st);
  parts.r2 = compute_r2(parts.phi21, parts.phi12, star.terms.h_bar, st);
  return parts;
}

struct PhaseUpdate {
  std::vector<RealField> phi;
  std::vector<RealField> mu;
  double r = 0.0;
};

inline PhaseUpdate assemble_phase(const PhaseSplitParts& parts, double q_theta) {
  PhaseUpdate out;
  for (std::size_t k = 0; k < parts.phi11.size(); ++k) {
    out.phi.push_back(combine(1.0, parts.phi1(k), q_theta, parts.phi2(k)));
    out.mu.push_back(combine(1.0, parts.mu1(k), q_theta, parts.mu2(k)));
  }
  out.r = parts.r1 + q_theta * parts.r2;
  return out;
}

/// mu = lambda(-Lap phi + (H_bar + gamma) r) evaluated at a single level.
inline std::vector<RealField> chemical_potential(const std::vector<RealField>& phi, double r,
                                                 const PhaseParams& params) {
  const NonlinearTerms t = nonlinear_terms(phi, params);
  std::vector<RealField> mu;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    RealField m = -1.0 * laplacian(phi[k]);
    m.add_scaled(r, t.source(k));
    m *= params.lambda;
    mu.push_back(std::move(m));
  }
  return mu;
}

}  // namespace thetasav
