#pragma once

// Velocity and pressure updates: the two intermediate-velocity branches for
// Navier-Stokes and Darcy flow, the pressure increment, and the projection.

#include <cmath>
#include <string>
#include <vector>

#include "thetasav/errors.hpp"
#include "thetasav/grid.hpp"
#include "thetasav/phase.hpp"
#include "thetasav/spectral.hpp"

namespace thetasav {

enum class ModelKind { NavierStokes, Darcy };

inline const char* model_name(ModelKind kind) {
  return kind == ModelKind::NavierStokes ? "ns-cac" : "d-cac";
}

struct FlowParams {
  ModelKind kind = ModelKind::NavierStokes;
  double nu = 1.0;
  double alpha = 1000.0;
  double tau = 1.0;

  void validate() const {
    if (!(nu > 0.0)) throw InvalidArgument("viscosity must be positive");
    if (kind == ModelKind::Darcy) {
      if (!(alpha > 0.0)) throw InvalidArgument("hydraulic conductivity must be positive");
      if (!(tau > 0.0)) throw InvalidArgument("Darcy inertia constant tau must be positive");
    }
  }

  /// Weight on the velocity time derivative: 1 for Navier-Stokes, tau for Darcy.
  double inertia() const { return kind == ModelKind::Darcy ? tau : 1.0; }
};

struct FlowState {
  VectorField u;
  VectorField u_tilde;
  RealField p;
};

/// sum_k phi_k grad mu_k
inline VectorField surface_tension(const std::vector<RealField>& phi, const std::vector<RealField>& mu) {
  if (phi.empty() || phi.size() != mu.size()) throw InvalidArgument("phase/potential list mismatch");
  VectorField out(phi.front().grid());
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const VectorField g = gradient(mu[k]);
    out.x += hadamard(phi[k], g.x);
    out.y += hadamard(phi[k], g.y);
  }
  return out;
}

inline VectorField ns_tilde_u1(const VectorField& u_n, const VectorField& u_nm1, const RealField& p_n,
                               double nu, double theta, const Stencil& st, double dt,
                               const VectorField* forcing = nullptr) {
  VectorField rhs = combine(-st.a0 / dt, u_n, -st.am1 / dt, u_nm1);
  rhs.add_scaled(nu * (1.0 - theta), laplacian(u_n));
  rhs -= gradient(p_n);
  if (forcing != nullptr) rhs += *forcing;
  return solve_helmholtz(st.a1 / dt, nu * theta, rhs);
}

inline VectorField ns_tilde_u2(const VectorField& u_star, const std::vector<RealField>& phi_star,
                               const std::vector<RealField>& mu_star, double nu, double theta,
                               const Stencil& st, double dt, bool dealiased = false) {
  VectorField rhs = convect(u_star, dealiased);
  rhs += surface_tension(phi_star, mu_star);
  rhs *= -1.0;
  return solve_helmholtz(st.a1 / dt, nu * theta, rhs);
}

inline double darcy_shift(double alpha, double nu, double tau, double theta, const Stencil& st,
                          double dt) {
  return tau * st.a1 / dt + alpha * nu * theta;
}

inline VectorField darcy_tilde_u1(const VectorField& u_n, const VectorField& u_nm1, const RealField& p_n,
                                  double alpha, double nu, double tau, double theta, const Stencil& st,
                                  double dt, const VectorField* forcing = nullptr) {
  VectorField rhs = combine(-tau * st.a0 / dt - alpha * nu * (1.0 - theta), u_n, -tau * st.am1 / dt,
                            u_nm1);
  rhs -= gradient(p_n);
  if (forcing != nullptr) rhs += *forcing;
  rhs *= 1.0 / darcy_shift(alpha, nu, tau, theta, st, dt);
  return rhs;
}

inline VectorField darcy_tilde_u2(const std::vector<RealField>& phi_star,
                                  const std::vector<RealField>& mu_star, double alpha, double nu,
                                  double tau, double theta, const Stencil& st, double dt) {
  VectorField rhs = surface_tension(phi_star, mu_star);
  rhs *= -1.0 / darcy_shift(alpha, nu, tau, theta, st, dt);
  return rhs;
}

/// tau a1 / (theta dt): the factor linking the pressure increment to div(u~).
inline double pressure_coefficient(const FlowParams& flow, double theta, const Stencil& st, double dt) {
  return flow.inertia() * st.a1 / (theta * dt);
}

/// p^{n+1} with div grad (p^{n+1} - p^n) = coeff div(u~), zero-mean gauge.
inline RealField pressure_poisson(const VectorField& u_tilde, const RealField& p_n, double coeff) {
  RealField p = p_n + coeff * solve_div_grad_mean_zero(divergence(u_tilde));
  p += -mean(p);
  return p;
}

inline VectorField project_velocity(const VectorField& u_tilde, const RealField& p_np1,
                                    const RealField& p_n, double coeff) {
  if (!(coeff > 0.0)) throw InvalidArgument("projection coefficient must be positive");
  return u_tilde - (1.0 / coeff) * gradient(p_np1 - p_n);
}

}  // namespace thetasav
