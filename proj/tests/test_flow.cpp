#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "support/oracles.hpp"
#include "thetasav/flow.hpp"
#include "thetasav/spectral.hpp"

using namespace thetasav;

namespace {

VectorField random_velocity(const Grid& g, std::mt19937_64& rng) {
  return VectorField(oracle::sample(g, oracle::random_trig(rng, 4, 5, g.lx(), g.ly())),
                     oracle::sample(g, oracle::random_trig(rng, 4, 5, g.lx(), g.ly())));
}

double vmax(const VectorField& v) { return std::max(oracle::max_abs(v.x), oracle::max_abs(v.y)); }

}  // namespace

TEST(FlowParams, Names) {
  EXPECT_STREQ(model_name(ModelKind::NavierStokes), "ns-cac");
  EXPECT_STREQ(model_name(ModelKind::Darcy), "d-cac");
}

TEST(FlowParams, Validation) {
  EXPECT_THROW((FlowParams{ModelKind::NavierStokes, 0.0, 1.0, 1.0}.validate()), InvalidArgument);
  EXPECT_THROW((FlowParams{ModelKind::Darcy, 1.0, -1.0, 1.0}.validate()), InvalidArgument);
  EXPECT_THROW((FlowParams{ModelKind::Darcy, 1.0, 1.0, 0.0}.validate()), InvalidArgument);
  EXPECT_DOUBLE_EQ((FlowParams{ModelKind::Darcy, 1.0, 1.0, 3.0}.inertia()), 3.0);
  EXPECT_DOUBLE_EQ((FlowParams{ModelKind::NavierStokes, 1.0, 1.0, 3.0}.inertia()), 1.0);
}

TEST(Pressure, Coefficient) {
  const double dt = 0.01;
  EXPECT_NEAR(pressure_coefficient(FlowParams{}, 0.5, Stencil::bdf_theta(0.5), dt), 200.0, 1e-12);
  EXPECT_NEAR(pressure_coefficient(FlowParams{ModelKind::Darcy, 1.0, 1.0, 2.0}, 1.0, Stencil::bdf_theta(1.0), dt),
              300.0, 1e-12);
}

TEST(SurfaceTension, ConstantPhase) {
  const Grid g = create_grid(32, 32, 2.0, 2.0);
  const RealField mu = RealField::from_function(g, [](double x, double) { return std::sin(oracle::pi * x); });
  const VectorField f = surface_tension({RealField(g, 0.25)}, {mu});
  const RealField expect = RealField::from_function(
      g, [](double x, double) { return 0.25 * oracle::pi * std::cos(oracle::pi * x); });
  EXPECT_LT(oracle::max_abs_diff(f.x, expect), 1e-12);
  EXPECT_LT(oracle::max_abs(f.y), 1e-12);
}

TEST(Projection, PureGradientIsRemoved) {
  const Grid g = create_grid(32, 32, 2.0, 2.0);
  std::mt19937_64 rng(1);
  const oracle::TrigField phi = oracle::random_trig(rng, 3, 4, 2.0, 2.0);
  const VectorField ut = gradient(oracle::sample(g, phi));
  const double coeff = 50.0;
  const RealField p = pressure_poisson(ut, RealField(g), coeff);
  const VectorField u = project_velocity(ut, p, RealField(g), coeff);
  EXPECT_LT(vmax(u), 1e-11 * vmax(ut));
  RealField expect = coeff * oracle::sample(g, phi);
  expect += -oracle::riemann_sum(expect) / g.area();
  EXPECT_LT(oracle::max_abs_diff(p, expect), 1e-10 * oracle::max_abs(expect));
}

TEST(Projection, DivergenceFreeOrthogonalAndNormSplit) {
  const Grid g = create_grid(32, 32, 2.0, 2.0);
  std::mt19937_64 rng(2);
  for (double coeff : {1.0, 400.0}) {
    const VectorField ut = random_velocity(g, rng);
    const RealField pn = oracle::sample(g, oracle::random_trig(rng, 3, 3, 2.0, 2.0));
    const RealField p = pressure_poisson(ut, pn, coeff);
    const VectorField u = project_velocity(ut, p, pn, coeff);
    EXPECT_LT(max_divergence(u), 1e-11 * (1.0 + vmax(u)));
    EXPECT_NEAR(oracle::riemann_sum(p), 0.0, 1e-10);
    const VectorField gp = gradient(p - pn);
    const double cross = oracle::riemann_sum(hadamard(u.x, gp.x)) + oracle::riemann_sum(hadamard(u.y, gp.y));
    EXPECT_NEAR(cross, 0.0, 1e-10 * coeff);
    // |u~|^2 = |u|^2 + |grad(p^{n+1} - p^n)|^2 / coeff^2
    const double lhs = l2_norm_squared(ut);
    const double rhs = l2_norm_squared(u) + l2_norm_squared(gp) / (coeff * coeff);
    EXPECT_NEAR(lhs, rhs, 1e-12 * lhs);
  }
}

TEST(Projection, RejectsBadCoefficient) {
  const Grid g = create_grid(8, 8, 1.0, 1.0);
  EXPECT_THROW(project_velocity(VectorField(g), RealField(g), RealField(g), 0.0), InvalidArgument);
}

TEST(Darcy, SteadyUniformFlowFormula) {
  const Grid g = create_grid(16, 16, 2.0, 2.0);
  const double alpha = 1000.0, nu = 1.0, tau = 2.0, dt = 1e-3;
  for (double th : {0.5, 0.75, 1.0}) {
    const Stencil st = Stencil::bdf_theta(th);
    const VectorField U(g, 0.3, -0.7);
    const VectorField u1 = darcy_tilde_u1(U, U, RealField(g), alpha, nu, tau, th, st, dt);
    const double factor = (tau * st.a1 / dt - alpha * nu * (1 - th)) / (tau * st.a1 / dt + alpha * nu * th);
    EXPECT_NEAR(u1.x[10], 0.3 * factor, 1e-14);
    EXPECT_NEAR(u1.y[10], -0.7 * factor, 1e-14);
  }
}

TEST(Darcy, ForcingResponseU2) {
  const Grid g = create_grid(32, 32, 2.0, 2.0);
  std::mt19937_64 rng(3);
  const RealField phi = oracle::sample(g, oracle::random_trig(rng, 2, 3, 2.0, 2.0));
  const RealField mu = oracle::sample(g, oracle::random_trig(rng, 2, 3, 2.0, 2.0));
  const Stencil st = Stencil::bdf_theta(0.75);
  const VectorField u2 = darcy_tilde_u2({phi}, {mu}, 10.0, 2.0, 1.5, 0.75, st, 1e-2);
  const VectorField f = surface_tension({phi}, {mu});
  const double shift = 1.5 * st.a1 / 1e-2 + 10.0 * 2.0 * 0.75;
  EXPECT_LT(oracle::max_abs_diff(shift * u2.x, -1.0 * f.x), 1e-12 * vmax(f));
  EXPECT_LT(oracle::max_abs_diff(shift * u2.y, -1.0 * f.y), 1e-12 * vmax(f));
}

TEST(NavierStokes, SteadyAndZeroData) {
  const Grid g = create_grid(16, 16, 2.0, 2.0);
  for (double th : {0.5, 0.75, 1.0}) {
    const Stencil st = Stencil::bdf_theta(th);
    const VectorField c(g, 0.4, -1.1);
    const VectorField u1 = ns_tilde_u1(c, c, RealField(g), 1.0, th, st, 1e-3);
    EXPECT_NEAR(u1.x[9], 0.4, 1e-13);
    EXPECT_NEAR(u1.y[9], -1.1, 1e-13);
    EXPECT_EQ(vmax(ns_tilde_u1(VectorField(g), VectorField(g), RealField(g), 1.0, th, st, 1e-3)), 0.0);
    const VectorField u2 = ns_tilde_u2(VectorField(g), {RealField(g, 0.3)}, {RealField(g, 2.0)}, 1.0, th, st, 1e-3);
    EXPECT_LT(vmax(u2), 1e-15);
  }
}

TEST(NavierStokes, TildeU1SolvesMomentumEquation) {
  const Grid g = create_grid(32, 32, 2.0, 2.0);
  std::mt19937_64 rng(4);
  const double nu = 0.7, th = 0.6, dt = 5e-3;
  const Stencil st = Stencil::bdf_theta(th);
  const VectorField un = random_velocity(g, rng);
  const VectorField um = random_velocity(g, rng);
  const RealField pn = oracle::sample(g, oracle::random_trig(rng, 3, 3, 2.0, 2.0));
  const VectorField u1 = ns_tilde_u1(un, um, pn, nu, th, st, dt);
  VectorField res = combine(st.a1 / dt, u1, st.a0 / dt, un);
  res.add_scaled(st.am1 / dt, um);
  res.add_scaled(-nu, laplacian(combine(th, u1, 1 - th, un)));
  res += gradient(pn);
  EXPECT_LT(vmax(res), 1e-10 * vmax(un) / dt);
}

TEST(NavierStokes, TildeU2OpposesDriving) {
  const Grid g = create_grid(32, 32, 2.0, 2.0);
  std::mt19937_64 rng(5);
  const double nu = 1.0, th = 1.0, dt = 1e-2;
  const Stencil st = Stencil::bdf_theta(th);
  const VectorField us = random_velocity(g, rng);
  const RealField phi = oracle::sample(g, oracle::random_trig(rng, 2, 3, 2.0, 2.0));
  const RealField mu = oracle::sample(g, oracle::random_trig(rng, 2, 3, 2.0, 2.0));
  const VectorField u2 = ns_tilde_u2(us, {phi}, {mu}, nu, th, st, dt);
  VectorField drive = convect(us);
  drive += surface_tension({phi}, {mu});
  VectorField res = st.a1 / dt * u2;
  res.add_scaled(-nu * th, laplacian(u2));
  res += drive;
  EXPECT_LT(vmax(res), 1e-11 * vmax(drive));
  // the elliptic operator is positive, so (drive, u2) < 0
  EXPECT_LT(l2_inner(drive, u2), 0.0);
}
