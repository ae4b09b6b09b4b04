#pragma once

// Uniform periodic 2D grid with FFTW-backed real transforms, and the field
// containers every other module works with.
//
// Physical storage is row-major with y as the row index: value (i, j) at
// x_i = i*lx/nx, y_j = j*ly/ny lives at j*nx + i.  Spectral storage is the
// r2c half spectrum: ny rows of nx/2+1 coefficients, coefficient (i, j) has
// wavenumbers (kx[i], ky[j]).

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "thetasav/errors.hpp"

namespace thetasav {

using Complex = std::complex<double>;

namespace detail {

// FFTW planning and plan destruction are not thread-safe.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct GridData {
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  double ly = 0.0;
  int nxh = 0;
  std::vector<double> kx;        // length nx, FFT ordering
  std::vector<double> ky;        // length ny, FFT ordering
  std::vector<double> kx_deriv;  // length nxh, Nyquist zeroed
  std::vector<double> ky_deriv;  // length ny, Nyquist zeroed
  std::vector<double> k2;        // length ny*nxh, kx^2+ky^2
  std::vector<double> k2_deriv;  // length ny*nxh, symbol of -div(grad)
  fftw_plan forward_plan = nullptr;
  fftw_plan inverse_plan = nullptr;

  GridData() = default;
  GridData(const GridData&) = delete;
  GridData& operator=(const GridData&) = delete;

  ~GridData() {
    std::lock_guard lock(fftw_planner_mutex());
    if (forward_plan != nullptr) fftw_destroy_plan(forward_plan);
    if (inverse_plan != nullptr) fftw_destroy_plan(inverse_plan);
  }
};

inline double fft_frequency(int index, int n) { return index <= n / 2 - 1 ? index : index - n; }

}  // namespace detail

class Grid {
 public:
  Grid(int nx, int ny, double lx, double ly) {
    if (nx < 8 || ny < 8 || nx % 2 != 0 || ny % 2 != 0) {
      throw InvalidArgument("grid sizes must be even and >= 8, got " + std::to_string(nx) + "x" +
                            std::to_string(ny));
    }
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
      throw InvalidArgument("domain lengths must be positive and finite");
    }
    auto d = std::make_shared<detail::GridData>();
    d->nx = nx;
    d->ny = ny;
    d->lx = lx;
    d->ly = ly;
    d->nxh = nx / 2 + 1;
    const double two_pi = 2.0 * std::numbers::pi;
    d->kx.resize(nx);
    d->ky.resize(ny);
    for (int i = 0; i < nx; ++i) d->kx[i] = two_pi * detail::fft_frequency(i, nx) / lx;
    for (int j = 0; j < ny; ++j) d->ky[j] = two_pi * detail::fft_frequency(j, ny) / ly;
    d->kx_deriv.resize(d->nxh);
    for (int i = 0; i < d->nxh; ++i) d->kx_deriv[i] = (i == nx / 2) ? 0.0 : d->kx[i];
    d->ky_deriv = d->ky;
    d->ky_deriv[ny / 2] = 0.0;
    const std::size_t nspec = static_cast<std::size_t>(ny) * d->nxh;
    d->k2.resize(nspec);
    d->k2_deriv.resize(nspec);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < d->nxh; ++i) {
        // |kx| for the half spectrum; i == nx/2 is the Nyquist column.
        const double kxi = two_pi * i / lx;
        const std::size_t s = static_cast<std::size_t>(j) * d->nxh + i;
        d->k2[s] = kxi * kxi + d->ky[j] * d->ky[j];
        d->k2_deriv[s] = d->kx_deriv[i] * d->kx_deriv[i] + d->ky_deriv[j] * d->ky_deriv[j];
      }
    }
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      std::vector<double> real(static_cast<std::size_t>(nx) * ny);
      std::vector<Complex> spec(nspec);
      auto* in = real.data();
      auto* out = reinterpret_cast<fftw_complex*>(spec.data());
      const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
      d->forward_plan = fftw_plan_dft_r2c_2d(ny, nx, in, out, flags);
      d->inverse_plan = fftw_plan_dft_c2r_2d(ny, nx, out, in, flags | FFTW_DESTROY_INPUT);
    }
    if (d->forward_plan == nullptr || d->inverse_plan == nullptr) {
      throw std::runtime_error("FFTW failed to create plans");
    }
    data_ = std::move(d);
  }

  int nx() const { return data_->nx; }
  int ny() const { return data_->ny; }
  double lx() const { return data_->lx; }
  double ly() const { return data_->ly; }
  /// Number of spectral columns of the half spectrum (nx/2 + 1).
  int nxh() const { return data_->nxh; }
  std::size_t size() const { return static_cast<std::size_t>(data_->nx) * data_->ny; }
  std::size_t spectral_size() const { return static_cast<std::size_t>(data_->ny) * data_->nxh; }
  double area() const { return data_->lx * data_->ly; }
  double cell_area() const { return area() / static_cast<double>(size()); }
  double dx() const { return data_->lx / data_->nx; }
  double dy() const { return data_->ly / data_->ny; }
  double x(int i) const { return i * dx(); }
  double y(int j) const { return j * dy(); }

  std::span<const double> kx() const { return data_->kx; }
  std::span<const double> ky() const { return data_->ky; }
  std::span<const double> kx_deriv() const { return data_->kx_deriv; }
  std::span<const double> ky_deriv() const { return data_->ky_deriv; }
  std::span<const double> k2() const { return data_->k2; }
  std::span<const double> k2_deriv() const { return data_->k2_deriv; }

  /// Unnormalized forward transform.
  void forward(std::span<const double> in, std::span<Complex> out) const {
    // Out-of-place r2c preserves its input; the cast is required by the C API.
    fftw_execute_dft_r2c(data_->forward_plan, const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
  }

  /// Normalized inverse transform. `in` is used as scratch and destroyed.
  void inverse(std::span<Complex> in, std::span<double> out) const {
    fftw_execute_dft_c2r(data_->inverse_plan, reinterpret_cast<fftw_complex*>(in.data()),
                         out.data());
    const double scale = 1.0 / static_cast<double>(size());
    for (double& v : out) v *= scale;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.data_ == b.data_ || (a.nx() == b.nx() && a.ny() == b.ny() && a.lx() == b.lx() &&
                                  a.ly() == b.ly());
  }

 private:
  std::shared_ptr<const detail::GridData> data_;
};

inline Grid create_grid(int nx, int ny, double lx, double ly) { return Grid(nx, ny, lx, ly); }

inline void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw GridMismatch();
}

class RealField {
 public:
  explicit RealField(Grid grid, double value = 0.0)
      : grid_(std::move(grid)), values_(grid_.size(), value) {}

  RealField(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw InvalidArgument("field size does not match grid");
  }

  template <class F>
  static RealField from_function(const Grid& grid, F&& f) {
    RealField out(grid);
    for (int j = 0; j < grid.ny(); ++j) {
      for (int i = 0; i < grid.nx(); ++i) out(i, j) = f(grid.x(i), grid.y(j));
    }
    return out;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator()(int i, int j) { return values_[static_cast<std::size_t>(j) * grid_.nx() + i]; }
  double operator()(int i, int j) const {
    return values_[static_cast<std::size_t>(j) * grid_.nx() + i];
  }

  RealField& operator+=(const RealField& o) {
    require_same_grid(grid_, o.grid_);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    return *this;
  }
  RealField& operator-=(const RealField& o) {
    require_same_grid(grid_, o.grid_);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    return *this;
  }
  RealField& operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
  }
  RealField& operator+=(double s) {
    for (double& v : values_) v += s;
    return *this;
  }
  /// this += s * o
  RealField& add_scaled(double s, const RealField& o) {
    require_same_grid(grid_, o.grid_);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * o.values_[k];
    return *this;
  }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

inline RealField operator+(RealField a, const RealField& b) { return a += b; }
inline RealField operator-(RealField a, const RealField& b) { return a -= b; }
inline RealField operator*(double s, RealField a) { return a *= s; }
inline RealField operator*(RealField a, double s) { return a *= s; }

/// Pointwise product.
inline RealField hadamard(const RealField& a, const RealField& b) {
  require_same_grid(a.grid(), b.grid());
  RealField out(a.grid());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
  return out;
}

/// a*x + b*y, the workhorse of every linear combination in the stepper.
inline RealField combine(double a, const RealField& x, double b, const RealField& y) {
  require_same_grid(x.grid(), y.grid());
  RealField out(x.grid());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = a * x[k] + b * y[k];
  return out;
}

class SpectralField {
 public:
  explicit SpectralField(Grid grid) : grid_(std::move(grid)), coeffs_(grid_.spectral_size()) {}

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return coeffs_.size(); }
  std::span<Complex> coeffs() { return coeffs_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  Complex& operator[](std::size_t s) { return coeffs_[s]; }
  Complex operator[](std::size_t s) const { return coeffs_[s]; }
  Complex& operator()(int i, int j) { return coeffs_[static_cast<std::size_t>(j) * grid_.nxh() + i]; }
  Complex operator()(int i, int j) const {
    return coeffs_[static_cast<std::size_t>(j) * grid_.nxh() + i];
  }

 private:
  Grid grid_;
  std::vector<Complex> coeffs_;
};

inline SpectralField to_spectral(const RealField& f) {
  SpectralField out(f.grid());
  f.grid().forward(f.values(), out.coeffs());
  return out;
}

/// Takes the spectrum by value: the c2r transform destroys its input.
inline RealField to_physical(SpectralField f) {
  RealField out(f.grid());
  f.grid().inverse(f.coeffs(), out.values());
  return out;
}

struct VectorField {
  RealField x;
  RealField y;

  explicit VectorField(const Grid& grid, double vx = 0.0, double vy = 0.0) : x(grid, vx), y(grid, vy) {}
  VectorField(RealField x_component, RealField y_component)
      : x(std::move(x_component)), y(std::move(y_component)) {
    require_same_grid(x.grid(), y.grid());
  }

  const Grid& grid() const { return x.grid(); }

  VectorField& operator+=(const VectorField& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  VectorField& operator-=(const VectorField& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  VectorField& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  VectorField& add_scaled(double s, const VectorField& o) {
    x.add_scaled(s, o.x);
    y.add_scaled(s, o.y);
    return *this;
  }
  bool all_finite() const { return x.all_finite() && y.all_finite(); }
};

inline VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
inline VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
inline VectorField operator*(double s, VectorField a) { return a *= s; }

inline VectorField combine(double a, const VectorField& u, double b, const VectorField& v) {
  return VectorField(combine(a, u.x, b, v.x), combine(a, u.y, b, v.y));
}

}  // namespace thetasav
