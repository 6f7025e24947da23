#pragma once

// Periodic Poisson solves and spectral differentiation on a Grid2D, backed by
// FFTW real-to-complex transforms.
//
// Sign convention everywhere: -Laplace(phi) = rho, with the mean of rho
// removed first so the periodic problem is solvable; phi has zero mean.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "mppfd/grid.hpp"

namespace mppfd {

namespace detail {

struct FftwPlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using FftwPlanPtr = std::unique_ptr<fftw_plan_s, FftwPlanDeleter>;

template <typename T>
struct FftwFree {
  void operator()(T* p) const { fftw_free(p); }
};

/// Aligned scratch array; FFTW new-array execution needs the alignment of the
/// arrays the plan was created with, which fftw_malloc guarantees.
template <typename T>
class FftwBuffer {
 public:
  explicit FftwBuffer(std::size_t n) : n_(n), data_(static_cast<T*>(fftw_malloc(sizeof(T) * (n ? n : 1)))) {
    if (!data_) throw std::bad_alloc();
  }
  T* data() const { return data_.get(); }
  std::size_t size() const { return n_; }
  T& operator[](std::size_t k) const { return data_.get()[k]; }

 private:
  std::size_t n_;
  std::unique_ptr<T, FftwFree<T>> data_;
};

using ComplexBuffer = FftwBuffer<fftw_complex>;
using RealBuffer = FftwBuffer<double>;

inline std::complex<double> load(const fftw_complex& c) { return {c[0], c[1]}; }
inline void store(fftw_complex& c, std::complex<double> v) {
  c[0] = v.real();
  c[1] = v.imag();
}

}  // namespace detail

/// Immutable FFT plans for one grid. Transforms use per-call buffers, so a
/// plan may be shared between threads once constructed.
class SpectralPlan {
 public:
  explicit SpectralPlan(const Grid2D& grid) : grid_(grid) {
    const int nx = static_cast<int>(grid.nx());
    const int ny = static_cast<int>(grid.ny());
    const std::size_t nxh = grid.nx() / 2 + 1;
    detail::RealBuffer r2(grid.size());
    detail::ComplexBuffer c2(grid.ny() * nxh);
    forward_2d_.reset(fftw_plan_dft_r2c_2d(ny, nx, r2.data(), c2.data(), FFTW_ESTIMATE));
    inverse_2d_.reset(fftw_plan_dft_c2r_2d(ny, nx, c2.data(), r2.data(), FFTW_ESTIMATE));
    detail::RealBuffer r1(grid.nx());
    detail::ComplexBuffer c1(nxh);
    forward_1d_.reset(fftw_plan_dft_r2c_1d(nx, r1.data(), c1.data(), FFTW_ESTIMATE));
    inverse_1d_.reset(fftw_plan_dft_c2r_1d(nx, c1.data(), r1.data(), FFTW_ESTIMATE));

    kx_.resize(nxh);
    for (std::size_t m = 0; m < nxh; ++m) kx_[m] = 2.0 * std::numbers::pi * static_cast<double>(m) / grid.length_x();
    ky_.resize(grid.ny());
    for (std::size_t l = 0; l < grid.ny(); ++l) {
      const auto signed_l = l <= grid.ny() / 2 ? static_cast<double>(l)
                                               : static_cast<double>(l) - static_cast<double>(grid.ny());
      ky_[l] = 2.0 * std::numbers::pi * signed_l / grid.length_y();
    }
  }

  const Grid2D& grid() const { return grid_; }

  /// Wavenumber of x-mode m (0..nx/2) and y-mode l (0..ny-1, folded).
  double kx(std::size_t m) const { return kx_[m]; }
  double ky(std::size_t l) const { return ky_[l]; }

  /// Forward then inverse transform; identity up to roundoff.
  ScalarField round_trip(const ScalarField& f) const {
    auto spec = forward(f);
    return inverse(spec);
  }

  ScalarField solve_poisson(const ScalarField& rho) const {
    auto spec = forward(rho);
    to_potential(spec);
    return inverse(spec);
  }

  /// Exact derivative of the trigonometric interpolant; the Nyquist mode of an
  /// even-length direction is dropped.
  ScalarField derivative(const ScalarField& f, Axis axis) const {
    auto spec = forward(f);
    differentiate(spec, axis);
    return inverse(spec);
  }

  /// Applies the spectral Laplacian (no mean handling).
  ScalarField laplacian(const ScalarField& f) const {
    auto spec = forward(f);
    const std::size_t nxh = grid_.nx() / 2 + 1;
    for (std::size_t l = 0; l < grid_.ny(); ++l) {
      for (std::size_t m = 0; m < nxh; ++m) {
        const double k2 = kx_[m] * kx_[m] + ky_[l] * ky_[l];
        auto& c = spec[l * nxh + m];
        c[0] *= -k2;
        c[1] *= -k2;
      }
    }
    return inverse(spec);
  }

  struct PotentialFlow {
    ScalarField phi;
    ScalarField u_x;  ///< -d(phi)/dy
    ScalarField u_y;  ///< +d(phi)/dx
  };

  /// phi from -Laplace(phi) = rho and the divergence-free U = (-phi_y, phi_x),
  /// sharing one forward transform.
  PotentialFlow potential_flow(const ScalarField& rho) const {
    auto spec = forward(rho);
    to_potential(spec);
    const std::size_t nc = spec.size();
    detail::ComplexBuffer dy(nc), dx(nc);
    for (std::size_t k = 0; k < nc; ++k) {
      dy[k][0] = dx[k][0] = spec[k][0];
      dy[k][1] = dx[k][1] = spec[k][1];
    }
    differentiate(dy, Axis::y);
    differentiate(dx, Axis::x);
    ScalarField u_x = inverse(dy);
    for (double& v : u_x.values()) v = -v;
    return {inverse(spec), std::move(u_x), inverse(dx)};
  }

  // One-dimensional transforms along x (length nx, period length_x).

  std::vector<double> solve_poisson_1d(std::span<const double> rho) const {
    auto spec = forward_1d(rho);
    spec[0][0] = spec[0][1] = 0.0;
    for (std::size_t m = 1; m < spec.size(); ++m) {
      const double k2 = kx_[m] * kx_[m];
      spec[m][0] /= k2;
      spec[m][1] /= k2;
    }
    return inverse_1d(spec);
  }

  std::vector<double> derivative_1d(std::span<const double> f) const {
    auto spec = forward_1d(f);
    const std::size_t nxh = spec.size();
    for (std::size_t m = 0; m < nxh; ++m) {
      const bool nyquist = grid_.nx() % 2 == 0 && m == grid_.nx() / 2;
      const std::complex<double> c = detail::load(spec[m]);
      detail::store(spec[m], nyquist ? std::complex<double>{} : std::complex<double>(0.0, kx_[m]) * c);
    }
    return inverse_1d(spec);
  }

  /// E = -d(phi)/dx.
  std::vector<double> electric_field(std::span<const double> phi) const {
    auto e = derivative_1d(phi);
    for (double& v : e) v = -v;
    return e;
  }

 private:
  detail::ComplexBuffer forward(const ScalarField& f) const {
    detail::RealBuffer in(grid_.size());
    const auto v = f.values();
    for (std::size_t k = 0; k < v.size(); ++k) in[k] = v[k];
    detail::ComplexBuffer out(grid_.ny() * (grid_.nx() / 2 + 1));
    fftw_execute_dft_r2c(forward_2d_.get(), in.data(), out.data());
    return out;
  }

  /// Consumes `spec` (c2r overwrites its input) and normalizes.
  ScalarField inverse(detail::ComplexBuffer& spec) const {
    detail::RealBuffer out(grid_.size());
    fftw_execute_dft_c2r(inverse_2d_.get(), spec.data(), out.data());
    ScalarField f(grid_);
    const double scale = 1.0 / static_cast<double>(grid_.size());
    auto v = f.values();
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = out[k] * scale;
    return f;
  }

  void to_potential(detail::ComplexBuffer& spec) const {
    const std::size_t nxh = grid_.nx() / 2 + 1;
    for (std::size_t l = 0; l < grid_.ny(); ++l) {
      for (std::size_t m = 0; m < nxh; ++m) {
        auto& c = spec[l * nxh + m];
        if (l == 0 && m == 0) {
          c[0] = c[1] = 0.0;
          continue;
        }
        const double k2 = kx_[m] * kx_[m] + ky_[l] * ky_[l];
        c[0] /= k2;
        c[1] /= k2;
      }
    }
  }

  void differentiate(detail::ComplexBuffer& spec, Axis axis) const {
    const std::size_t nxh = grid_.nx() / 2 + 1;
    for (std::size_t l = 0; l < grid_.ny(); ++l) {
      for (std::size_t m = 0; m < nxh; ++m) {
        double k = 0.0;
        if (axis == Axis::x) {
          k = (grid_.nx() % 2 == 0 && m == grid_.nx() / 2) ? 0.0 : kx_[m];
        } else {
          k = (grid_.ny() % 2 == 0 && l == grid_.ny() / 2) ? 0.0 : ky_[l];
        }
        auto& c = spec[l * nxh + m];
        const std::complex<double> v = detail::load(c);
        detail::store(c, std::complex<double>(0.0, k) * v);
      }
    }
  }

  detail::ComplexBuffer forward_1d(std::span<const double> f) const {
    if (f.size() != grid_.nx()) throw ConfigError("spectral: 1D line length does not match n_x");
    detail::RealBuffer in(grid_.nx());
    for (std::size_t k = 0; k < f.size(); ++k) in[k] = f[k];
    detail::ComplexBuffer out(grid_.nx() / 2 + 1);
    fftw_execute_dft_r2c(forward_1d_.get(), in.data(), out.data());
    return out;
  }

  std::vector<double> inverse_1d(detail::ComplexBuffer& spec) const {
    detail::RealBuffer out(grid_.nx());
    fftw_execute_dft_c2r(inverse_1d_.get(), spec.data(), out.data());
    std::vector<double> v(grid_.nx());
    const double scale = 1.0 / static_cast<double>(grid_.nx());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = out[k] * scale;
    return v;
  }

  Grid2D grid_;
  detail::FftwPlanPtr forward_2d_, inverse_2d_, forward_1d_, inverse_1d_;
  std::vector<double> kx_, ky_;
};

// Convenience entry points that build a one-off plan.

inline std::vector<double> solve_poisson_1d(std::span<const double> rho_line, double length) {
  SpectralPlan plan(Grid2D(0.0, length, 0.0, 1.0, rho_line.size(), Grid2D::min_nodes));
  return plan.solve_poisson_1d(rho_line);
}

inline std::vector<double> electric_field(std::span<const double> phi_line, double length) {
  SpectralPlan plan(Grid2D(0.0, length, 0.0, 1.0, phi_line.size(), Grid2D::min_nodes));
  return plan.electric_field(phi_line);
}

inline ScalarField solve_poisson_2d(const ScalarField& rho) { return SpectralPlan(rho.grid()).solve_poisson(rho); }

inline ScalarField spectral_derivative(const ScalarField& field, Axis axis) {
  return SpectralPlan(field.grid()).derivative(field, axis);
}

}  // namespace mppfd
