#pragma once

// Spectral differential operators, pseudo-spectral products, diagonal
// elliptic solvers and grid quadrature.
//
// Odd-order derivatives drop the Nyquist mode so they stay real-valued. The
// resulting first-derivative matrices are exactly skew-symmetric, so discrete
// integration by parts holds to roundoff.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "thetasav/errors.hpp"
#include "thetasav/grid.hpp"

namespace thetasav {

namespace detail {

/// Multiplies each half-spectrum coefficient by symbol(s, i, j).
template <class Symbol>
void apply_symbol(SpectralField& f, Symbol&& symbol) {
  const int nxh = f.grid().nxh();
  const int ny = f.grid().ny();
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nxh; ++i) {
      const std::size_t s = static_cast<std::size_t>(j) * nxh + i;
      f[s] *= symbol(s, i, j);
    }
  }
}

inline SpectralField derivative_x(const SpectralField& f) {
  SpectralField out = f;
  const auto kx = f.grid().kx_deriv();
  apply_symbol(out, [&](std::size_t, int i, int) { return Complex(0.0, kx[i]); });
  return out;
}

inline SpectralField derivative_y(const SpectralField& f) {
  SpectralField out = f;
  const auto ky = f.grid().ky_deriv();
  apply_symbol(out, [&](std::size_t, int, int j) { return Complex(0.0, ky[j]); });
  return out;
}

}  // namespace detail

/// Zeroes every mode with |k_x| > (2/3) k_x,max or |k_y| > (2/3) k_y,max.
inline RealField dealias(const RealField& f) {
  const Grid& g = f.grid();
  SpectralField fh = to_spectral(f);
  const double cut_x = (2.0 / 3.0) * (g.nx() / 2);
  const double cut_y = (2.0 / 3.0) * (g.ny() / 2);
  detail::apply_symbol(fh, [&](std::size_t, int i, int j) {
    const double fy = std::abs(detail::fft_frequency(j, g.ny()));
    return (i > cut_x || fy > cut_y) ? Complex(0.0) : Complex(1.0);
  });
  return to_physical(std::move(fh));
}

inline VectorField gradient(const RealField& f) {
  const SpectralField fh = to_spectral(f);
  return VectorField(to_physical(detail::derivative_x(fh)), to_physical(detail::derivative_y(fh)));
}

inline RealField divergence(const VectorField& v) {
  SpectralField out = detail::derivative_x(to_spectral(v.x));
  const SpectralField dy = detail::derivative_y(to_spectral(v.y));
  for (std::size_t s = 0; s < out.size(); ++s) out[s] += dy[s];
  return to_physical(std::move(out));
}

inline RealField laplacian(const RealField& f) {
  SpectralField fh = to_spectral(f);
  const auto k2 = f.grid().k2();
  detail::apply_symbol(fh, [&](std::size_t s, int, int) { return Complex(-k2[s]); });
  return to_physical(std::move(fh));
}

inline VectorField laplacian(const VectorField& v) { return VectorField(laplacian(v.x), laplacian(v.y)); }

/// div(V f) with the product formed pointwise in physical space.
inline RealField advect_scalar(const VectorField& v, const RealField& f, bool dealiased = false) {
  require_same_grid(v.grid(), f.grid());
  if (dealiased) {
    const RealField fd = dealias(f);
    VectorField flux(dealias(hadamard(dealias(v.x), fd)), dealias(hadamard(dealias(v.y), fd)));
    return divergence(flux);
  }
  return divergence(VectorField(hadamard(v.x, f), hadamard(v.y, f)));
}

/// (V . grad) V in convective form.
inline VectorField convect(const VectorField& v, bool dealiased = false) {
  const VectorField vv = dealiased ? VectorField(dealias(v.x), dealias(v.y)) : v;
  const VectorField gu = gradient(vv.x);
  const VectorField gv = gradient(vv.y);
  RealField cx = hadamard(vv.x, gu.x);
  cx += hadamard(vv.y, gu.y);
  RealField cy = hadamard(vv.x, gv.x);
  cy += hadamard(vv.y, gv.y);
  if (dealiased) return VectorField(dealias(cx), dealias(cy));
  return VectorField(std::move(cx), std::move(cy));
}

/// Solves (a I - b Lap) x = rhs by diagonal inversion.
inline RealField solve_helmholtz(double a, double b, const RealField& rhs) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw InvalidArgument("Helmholtz shift must be positive, got " + std::to_string(a));
  }
  if (!(b >= 0.0) || !std::isfinite(b)) {
    throw InvalidArgument("Helmholtz diffusion coefficient must be non-negative");
  }
  SpectralField fh = to_spectral(rhs);
  const auto k2 = rhs.grid().k2();
  detail::apply_symbol(fh, [&](std::size_t s, int, int) { return Complex(1.0 / (a + b * k2[s])); });
  return to_physical(std::move(fh));
}

inline VectorField solve_helmholtz(double a, double b, const VectorField& rhs) {
  return VectorField(solve_helmholtz(a, b, rhs.x), solve_helmholtz(a, b, rhs.y));
}

inline double integral(const RealField& f) {
  const auto v = f.values();
  return std::accumulate(v.begin(), v.end(), 0.0) * f.grid().cell_area();
}

inline double mean(const RealField& f) { return integral(f) / f.grid().area(); }

inline double l2_inner(const RealField& f, const RealField& g) {
  require_same_grid(f.grid(), g.grid());
  double acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) acc += f[k] * g[k];
  return acc * f.grid().cell_area();
}

inline double l2_inner(const VectorField& a, const VectorField& b) {
  return l2_inner(a.x, b.x) + l2_inner(a.y, b.y);
}

inline double l2_norm_squared(const RealField& f) { return l2_inner(f, f); }
inline double l2_norm_squared(const VectorField& v) { return l2_inner(v, v); }

/// (grad f, grad g) realized as (-Lap f, g), the form that pairs with the
/// spectral Laplacian in the phase equations.
inline double dirichlet_inner(const RealField& f, const RealField& g) {
  return -l2_inner(laplacian(f), g);
}

inline double linf_norm(const RealField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

inline double linf_norm(const VectorField& v) { return std::max(linf_norm(v.x), linf_norm(v.y)); }

namespace detail {

inline void check_poisson_compatibility(const RealField& rhs) {
  const double m = mean(rhs);
  const double scale = linf_norm(rhs);
  if (std::abs(m) > 1e-10 * scale) {
    throw CompatibilityError("periodic Poisson right-hand side has nonzero mean " +
                             std::to_string(m) + " (max norm " + std::to_string(scale) + ")");
  }
}

/// Inverts the symbol -sym on its range; null modes (sym == 0) map to zero.
inline RealField invert_negative_symbol(const RealField& rhs, std::span<const double> sym) {
  SpectralField fh = to_spectral(rhs);
  detail::apply_symbol(fh, [&](std::size_t s, int, int) {
    return sym[s] > 0.0 ? Complex(-1.0 / sym[s]) : Complex(0.0);
  });
  return to_physical(std::move(fh));
}

}  // namespace detail

/// Solves Lap x = rhs on the periodic domain under the zero-mean gauge.
inline RealField solve_poisson_mean_zero(const RealField& rhs) {
  detail::check_poisson_compatibility(rhs);
  return detail::invert_negative_symbol(rhs, rhs.grid().k2());
}

/// Solves div(grad x) = rhs with the discrete (Nyquist-free) gradient and
/// divergence, zero-mean gauge. This is the Poisson operator that makes the
/// pressure projection exactly divergence-free.
inline RealField solve_div_grad_mean_zero(const RealField& rhs) {
  detail::check_poisson_compatibility(rhs);
  return detail::invert_negative_symbol(rhs, rhs.grid().k2_deriv());
}

inline double max_divergence(const VectorField& v) { return linf_norm(divergence(v)); }

}  // namespace thetasav
