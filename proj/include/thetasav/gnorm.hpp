#pragma once

// G-norm on pairs of consecutive time levels and the telescoping identity of
// the theta-weighted difference.

#include <utility>

#include "thetasav/grid.hpp"
#include "thetasav/phase.hpp"
#include "thetasav/spectral.hpp"

namespace thetasav {

struct GMatrix {
  double g11 = 1.0;
  double g12 = 0.0;
  double g22 = 0.0;

  static GMatrix for_theta(double theta) {
    require_theta(theta);
    return {theta * (2.0 * theta + 3.0) / 2.0, -(theta + 1.0) * (2.0 * theta - 1.0) / 2.0,
            theta * (2.0 * theta - 1.0) / 2.0};
  }

  /// g11 ww + g22 vv + 2 g12 wv from the three inner products.
  double form(double ww, double vv, double wv) const { return g11 * ww + g22 * vv + 2.0 * g12 * wv; }
};

inline double g_quadratic_pair(double w, double v, double theta) {
  return GMatrix::for_theta(theta).form(w * w, v * v, w * v);
}

inline double g_norm_pair(const RealField& w, const RealField& v, double theta) {
  return GMatrix::for_theta(theta).form(l2_norm_squared(w), l2_norm_squared(v), l2_inner(w, v));
}

inline double g_norm_pair(const VectorField& w, const VectorField& v, double theta) {
  return GMatrix::for_theta(theta).form(l2_norm_squared(w), l2_norm_squared(v), l2_inner(w, v));
}

/// G-norm of the gradient pair (grad w, grad v) in the Dirichlet form.
inline double g_norm_pair_gradient(const RealField& w, const RealField& v, double theta) {
  return GMatrix::for_theta(theta).form(dirichlet_inner(w, w), dirichlet_inner(v, v),
                                        dirichlet_inner(w, v));
}

struct IdentitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

inline IdentitySides gf_identity_check(double w_np1, double w_n, double w_nm1, double theta) {
  const Stencil st = Stencil::bdf_theta(theta);
  const double d2 = w_np1 - 2.0 * w_n + w_nm1;
  return {st.apply(w_np1, w_n, w_nm1) * (theta * w_np1 + (1.0 - theta) * w_n),
          0.5 * g_quadratic_pair(w_np1, w_n, theta) - 0.5 * g_quadratic_pair(w_n, w_nm1, theta) +
              theta * (2.0 * theta - 1.0) / 4.0 * d2 * d2};
}

template <class Field>
IdentitySides gf_identity_check(const Field& w_np1, const Field& w_n, const Field& w_nm1, double theta) {
  const Stencil st = Stencil::bdf_theta(theta);
  Field diff = combine(st.a1, w_np1, st.a0, w_n);
  diff.add_scaled(st.am1, w_nm1);
  Field d2 = combine(1.0, w_np1, -2.0, w_n);
  d2 += w_nm1;
  return {l2_inner(diff, combine(theta, w_np1, 1.0 - theta, w_n)),
          0.5 * g_norm_pair(w_np1, w_n, theta) - 0.5 * g_norm_pair(w_n, w_nm1, theta) +
              theta * (2.0 * theta - 1.0) / 4.0 * l2_norm_squared(d2)};
}

}  // namespace thetasav
