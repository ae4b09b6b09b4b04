#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "thetasav/spectral.hpp"

using namespace thetasav;
using oracle::pi;

namespace {

Grid grid2(int n = 32) { return create_grid(n, n, 2.0, 2.0); }

VectorField divergence_free(const RealField& psi) {
  const VectorField g = gradient(psi);
  return VectorField(g.y, -1.0 * g.x);
}

}  // namespace

TEST(Grid, WavenumbersFollowFftOrdering) {
  const Grid g = create_grid(8, 8, 2.0, 2.0);
  const double base = 2.0 * pi / 2.0;
  const int expected[8] = {0, 1, 2, 3, -4, -3, -2, -1};
  for (int i = 0; i < 8; ++i) {
    EXPECT_DOUBLE_EQ(g.kx()[i], base * expected[i]);
    EXPECT_DOUBLE_EQ(g.ky()[i], base * expected[i]);
  }
  EXPECT_EQ(g.kx()[0], 0.0);
}

TEST(Grid, UnitDomainSpacing) {
  const Grid g = create_grid(8, 8, 1.0, 1.0);
  EXPECT_NEAR(g.kx()[1] - g.kx()[0], 2.0 * pi, 1e-15);
}

TEST(Grid, DefaultMeshSize) {
  const Grid g = create_grid(128, 128, 2.0, 2.0);
  EXPECT_EQ(g.size(), 128u * 128u);
  EXPECT_DOUBLE_EQ(g.dx(), 2.0 / 128.0);
}

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(create_grid(7, 8, 1, 1), InvalidArgument);
  EXPECT_THROW(create_grid(6, 6, 1, 1), InvalidArgument);
  EXPECT_THROW(create_grid(8, 8, 0, 1), InvalidArgument);
  EXPECT_THROW(create_grid(8, 8, 1, -1), InvalidArgument);
}

TEST(Grid, RoundTripIsIdentity) {
  std::mt19937_64 rng(1);
  for (int n : {8, 16, 32, 64, 128}) {
    const Grid g = create_grid(n, n, 2.0, 1.0);
    const RealField f = oracle::random_field(g, rng, -1.0, 1.0);
    const RealField back = to_physical(to_spectral(f));
    EXPECT_LE(oracle::max_abs_diff(f, back), 1e-13 * oracle::max_abs(f)) << n;
  }
}

TEST(Grid, MismatchedGridsRejected) {
  RealField a(create_grid(8, 8, 1, 1));
  RealField b(create_grid(16, 16, 1, 1));
  EXPECT_THROW(a += b, GridMismatch);
  EXPECT_THROW(l2_inner(a, b), GridMismatch);
}

TEST(Gradient, ConstantAndSine) {
  const Grid g = grid2();
  const VectorField c = gradient(RealField(g, 3.0));
  EXPECT_LE(linf_norm(c), 1e-14);
  const VectorField s = gradient(RealField::from_function(g, [](double x, double) { return std::sin(pi * x); }));
  const RealField expect = RealField::from_function(g, [](double x, double) { return pi * std::cos(pi * x); });
  EXPECT_LE(oracle::max_abs_diff(s.x, expect), 1e-12);
  EXPECT_LE(linf_norm(s.y), 1e-12);
}

TEST(Gradient, MatchesSixthOrderDifferences) {
  std::mt19937_64 rng(2);
  const Grid g = grid2(32);
  const auto f = oracle::random_trig(rng, 5, 8, 2.0, 2.0);
  const VectorField d = gradient(oracle::sample(g, f));
  const double h = 1e-3;
  for (int j = 0; j < g.ny(); j += 3) {
    for (int i = 0; i < g.nx(); i += 3) {
      EXPECT_NEAR(d.x(i, j), oracle::fd6_x(f, g.x(i), g.y(j), h), 1e-7);
      EXPECT_NEAR(d.y(i, j), oracle::fd6_y(f, g.x(i), g.y(j), h), 1e-7);
    }
  }
}

TEST(Divergence, Examples) {
  const Grid g = grid2();
  EXPECT_LE(linf_norm(divergence(VectorField(g, 1.5, -2.0))), 1e-14);
  const VectorField u(RealField::from_function(g, [](double x, double y) {
                        return pi * std::sin(2 * pi * y) * std::pow(std::sin(pi * x), 2);
                      }),
                      RealField::from_function(g, [](double x, double y) {
                        return -pi * std::sin(2 * pi * x) * std::pow(std::sin(pi * y), 2);
                      }));
  EXPECT_LE(linf_norm(divergence(u)), 1e-12);
}

TEST(Laplacian, Examples) {
  const Grid g = grid2();
  EXPECT_LE(linf_norm(laplacian(RealField(g, 2.0))), 1e-14);
  const RealField s = RealField::from_function(g, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
  EXPECT_LE(oracle::max_abs_diff(laplacian(s), -2 * pi * pi * s), 1e-11);
}

TEST(Laplacian, DivGradAgreesForBandLimitedFields) {
  std::mt19937_64 rng(3);
  const Grid g = grid2(32);
  for (int trial = 0; trial < 10; ++trial) {
    const RealField f = oracle::sample(g, oracle::random_trig(rng, 7, 10, 2.0, 2.0));
    const RealField a = divergence(gradient(f));
    const RealField b = laplacian(f);
    EXPECT_LE(oracle::max_abs_diff(a, b), 1e-12 * oracle::max_abs(b));
  }
}

TEST(Advection, Examples) {
  std::mt19937_64 rng(4);
  const Grid g = grid2();
  const RealField f = oracle::random_field(g, rng);
  EXPECT_LE(linf_norm(advect_scalar(VectorField(g), f)), 1e-14);
  const VectorField v = divergence_free(oracle::sample(g, oracle::random_trig(rng, 4, 6, 2, 2)));
  EXPECT_LE(linf_norm(advect_scalar(v, RealField(g, 1.0))), 1e-12 * (1 + linf_norm(v)));
}

TEST(Advection, MatchesSixthOrderDifferences) {
  std::mt19937_64 rng(5);
  const Grid g = grid2(32);
  const auto u = oracle::random_trig(rng, 3, 5, 2, 2);
  const auto v = oracle::random_trig(rng, 3, 5, 2, 2);
  const auto f = oracle::random_trig(rng, 3, 5, 2, 2);
  const RealField a = advect_scalar(VectorField(oracle::sample(g, u), oracle::sample(g, v)), oracle::sample(g, f));
  auto uf = [&](double x, double y) { return u(x, y) * f(x, y); };
  auto vf = [&](double x, double y) { return v(x, y) * f(x, y); };
  for (int j = 0; j < g.ny(); j += 5) {
    for (int i = 0; i < g.nx(); i += 5) {
      const double x = g.x(i), y = g.y(j);
      EXPECT_NEAR(a(i, j), oracle::fd6_x(uf, x, y, 1e-3) + oracle::fd6_y(vf, x, y, 1e-3), 1e-7);
    }
  }
}

TEST(Advection, ZeroEnergyPairing) {
  std::mt19937_64 rng(6);
  const Grid g = grid2(32);
  for (int trial = 0; trial < 5; ++trial) {
    const VectorField v = divergence_free(oracle::random_field(g, rng));
    const RealField f = oracle::random_field(g, rng);
    const RealField h = oracle::random_field(g, rng);
    const VectorField gh = gradient(h);
    const double a = l2_inner(advect_scalar(v, f), h);
    const double b = l2_inner(VectorField(hadamard(f, gh.x), hadamard(f, gh.y)), v);
    EXPECT_NEAR(a + b, 0.0, 1e-11 * (1 + std::abs(a)));
  }
}

TEST(Convect, Examples) {
  std::mt19937_64 rng(7);
  const Grid g = grid2();
  EXPECT_LE(linf_norm(convect(VectorField(g, 1.0, 2.0))), 1e-13);
  const VectorField shear(RealField::from_function(g, [](double, double y) { return std::sin(2 * pi * y / 2.0); }),
                          RealField(g));
  EXPECT_LE(linf_norm(convect(shear)), 1e-13);
}

TEST(Convect, MatchesSixthOrderDifferences) {
  std::mt19937_64 rng(8);
  const Grid g = grid2(32);
  const auto u = oracle::random_trig(rng, 3, 5, 2, 2);
  const auto v = oracle::random_trig(rng, 3, 5, 2, 2);
  const VectorField c = convect(VectorField(oracle::sample(g, u), oracle::sample(g, v)));
  for (int j = 0; j < g.ny(); j += 5) {
    for (int i = 0; i < g.nx(); i += 5) {
      const double x = g.x(i), y = g.y(j);
      const double cx = u(x, y) * oracle::fd6_x(u, x, y, 1e-3) + v(x, y) * oracle::fd6_y(u, x, y, 1e-3);
      const double cy = u(x, y) * oracle::fd6_x(v, x, y, 1e-3) + v(x, y) * oracle::fd6_y(v, x, y, 1e-3);
      EXPECT_NEAR(c.x(i, j), cx, 1e-7);
      EXPECT_NEAR(c.y(i, j), cy, 1e-7);
    }
  }
}

TEST(Dealias, RemovesHighModesOnly) {
  const Grid g = grid2(32);
  const RealField low = RealField::from_function(g, [](double x, double y) { return std::cos(pi * x) + std::sin(3 * pi * y); });
  EXPECT_LE(oracle::max_abs_diff(dealias(low), low), 1e-13);
  const RealField high = RealField::from_function(g, [](double x, double) { return std::cos(14 * pi * x); });
  EXPECT_LE(linf_norm(dealias(high)), 1e-13);
}

TEST(Helmholtz, Examples) {
  const Grid g = grid2();
  const RealField c(g, 4.0);
  EXPECT_LE(oracle::max_abs_diff(solve_helmholtz(1.0, 0.0, c), c), 1e-14);
  const RealField s = RealField::from_function(g, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
  EXPECT_LE(oracle::max_abs_diff(solve_helmholtz(1.0, 1.0, (1 + 2 * pi * pi) * s), s), 1e-13);
  EXPECT_THROW(solve_helmholtz(0.0, 1.0, c), InvalidArgument);
  EXPECT_THROW(solve_helmholtz(1.0, -1.0, c), InvalidArgument);
}

TEST(Helmholtz, ResidualOnRandomProblems) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> da(0.1, 100.0), db(0.0, 10.0);
  const Grid g = grid2(32);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = trial == 0 ? 3.0 : da(rng);
    const double b = trial == 0 ? 0.7 : db(rng);
    const RealField rhs = oracle::random_field(g, rng, -1, 1);
    const RealField x = solve_helmholtz(a, b, rhs);
    const RealField back = a * x - b * laplacian(x);
    EXPECT_LE(oracle::max_abs_diff(back, rhs), 1e-12 * oracle::max_abs(rhs));
  }
}

TEST(Poisson, Examples) {
  const Grid g = grid2();
  EXPECT_LE(linf_norm(solve_poisson_mean_zero(RealField(g))), 0.0);
  const RealField s = RealField::from_function(g, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
  const RealField x = solve_poisson_mean_zero(-2 * pi * pi * s);
  EXPECT_LE(oracle::max_abs_diff(x, s), 1e-13);
  EXPECT_THROW(solve_poisson_mean_zero(RealField(g, 1.0)), CompatibilityError);
}

TEST(Poisson, ResidualAndGauge) {
  std::mt19937_64 rng(10);
  const Grid g = grid2(32);
  for (int trial = 0; trial < 20; ++trial) {
    const VectorField v(oracle::random_field(g, rng), oracle::random_field(g, rng));
    const RealField rhs = divergence(v);
    const RealField x = solve_poisson_mean_zero(rhs);
    EXPECT_LE(oracle::max_abs_diff(laplacian(x), rhs), 1e-12 * oracle::max_abs(rhs));
    EXPECT_LE(std::abs(mean(x)), 1e-14 * oracle::max_abs(x));
    const RealField y = solve_div_grad_mean_zero(rhs);
    EXPECT_LE(oracle::max_abs_diff(divergence(gradient(y)), rhs), 1e-12 * oracle::max_abs(rhs));
    EXPECT_LE(std::abs(mean(y)), 1e-14 * oracle::max_abs(y));
  }
}

TEST(Quadrature, Examples) {
  std::mt19937_64 rng(11);
  const Grid g = grid2();
  EXPECT_NEAR(integral(RealField(g, 1.0)), 4.0, 1e-14);
  EXPECT_NEAR(integral(RealField::from_function(g, [](double x, double) { return std::sin(pi * x); })), 0.0, 1e-13);
  for (int trial = 0; trial < 10; ++trial) {
    const RealField f = oracle::random_field(g, rng, -1, 1);
    const RealField h = oracle::random_field(g, rng, -1, 1);
    EXPECT_GE(l2_inner(f, f), 0.0);
    EXPECT_DOUBLE_EQ(l2_inner(f, h), l2_inner(h, f));
    EXPECT_NEAR(integral(f), oracle::riemann_sum(f), 1e-13);
    EXPECT_NEAR(mean(f), oracle::riemann_sum(f) / 4.0, 1e-14);
  }
  const RealField c(g, -2.5);
  EXPECT_DOUBLE_EQ(linf_norm(c), 2.5);
}

TEST(Quadrature, DirichletFormIsGradientPairing) {
  std::mt19937_64 rng(12);
  const Grid g = grid2(32);
  const RealField f = oracle::sample(g, oracle::random_trig(rng, 6, 8, 2, 2));
  const RealField h = oracle::sample(g, oracle::random_trig(rng, 6, 8, 2, 2));
  EXPECT_NEAR(dirichlet_inner(f, h), l2_inner(gradient(f), gradient(h)), 1e-10);
  EXPECT_GE(dirichlet_inner(f, f), 0.0);
}
