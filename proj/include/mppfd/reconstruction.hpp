#pragma once

// Fifth-order interface fluxes for conservative finite differences.
//
// Given point values h_i = u_i * rho_i on a periodic line, the flux at
// x_{i+1/2} is reconstructed from the left (h^-) or the right (h^+) and the
// upwind one is selected from the averaged interface velocity. Both
// reconstructions are Hermite type: besides h they use G'_{i+1/2}, the
// interface value of the derivative of the primitive of h, obtained by a
// sixth-order central stencil.

#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mppfd/errors.hpp"
#include "mppfd/grid.hpp"

namespace mppfd {

enum class Scheme { hermite_linear, hermite_weno };

inline std::string to_string(Scheme s) {
  return s == Scheme::hermite_linear ? "hermite_linear" : "hermite_weno";
}

inline Scheme parse_scheme(const std::string& name) {
  if (name == "hermite_linear") return Scheme::hermite_linear;
  if (name == "hermite_weno") return Scheme::hermite_weno;
  throw ConfigError("unknown scheme '" + name + "' (valid: hermite_linear, hermite_weno)");
}

struct WenoConfig {
  double epsilon = 1e-6;
  /// Linear weights (c_l, c_c, c_r); these recover the Hermite linear flux.
  std::array<double, 3> linear_weights{1.0 / 9.0, 4.0 / 9.0, 4.0 / 9.0};

  void validate() const {
    if (!(epsilon > 0.0)) throw ConfigError("weno: epsilon must be positive");
    for (double c : linear_weights) {
      if (!(c >= 0.0)) throw ConfigError("weno: linear weights must be non-negative");
    }
    const double s = linear_weights[0] + linear_weights[1] + linear_weights[2];
    if (std::abs(s - 1.0) > 1e-14) throw ConfigError("weno: linear weights must sum to 1");
  }
};

/// Inputs of a left-biased reconstruction at x_{i+1/2}:
/// h_{i-1}, h_i, h_{i+1}, G'_{i-3/2}, G'_{i+3/2}.
/// The right-biased value at the same interface is the same kernel applied to
/// the mirror image h_{i+2}, h_{i+1}, h_i, G'_{i+5/2}, G'_{i-1/2}.
struct HermiteStencil {
  double h_m1, h_0, h_p1;
  double g_left, g_right;
};

struct SmoothnessIndicators {
  double left, center, right;
};

struct WenoWeights {
  double left, center, right;
};

namespace detail {

/// G' at the interface between a and b, given the symmetric neighbours:
/// (h_{i-2}, h_{i-1}, h_i | h_{i+1}, h_{i+2}, h_{i+3}).
inline double g_prime(double hm2, double hm1, double h0, double hp1, double hp2, double hp3) {
  return ((hp3 + hm2) - 8.0 * (hp2 + hm1) + 37.0 * (hp1 + h0)) / 60.0;
}

inline double linear_kernel(const HermiteStencil& s) {
  return (-8.0 * s.h_m1 + 19.0 * s.h_0 + 19.0 * s.h_p1 + 3.0 * s.g_left - 6.0 * s.g_right) / 27.0;
}

inline SmoothnessIndicators beta_kernel(const HermiteStencil& s) {
  SmoothnessIndicators b{};
  {
    const double s1 = s.h_m1 - s.h_0;
    const double s2 = -3.0 * s.h_m1 + s.h_0 + 2.0 * s.g_left;
    const double d = s1 - 4.0 * s2;
    b.left = (13.0 / 16.0) * s1 * s1 + (3.0 / 16.0) * d * d;
  }
  {
    const double s1 = s.h_p1 - s.h_m1;
    const double s2 = s.h_p1 - 2.0 * s.h_0 + s.h_m1;
    b.center = 0.25 * s1 * s1 + (13.0 / 12.0) * s2 * s2;
  }
  {
    const double s1 = s.h_p1 - s.h_0;
    const double s2 = -3.0 * s.h_p1 + s.h_0 + 2.0 * s.g_right;
    const double d = s1 - 4.0 * s2;
    b.right = (13.0 / 16.0) * s1 * s1 + (3.0 / 16.0) * d * d;
  }
  return b;
}

inline WenoWeights weights_from_beta(const SmoothnessIndicators& b, const WenoConfig& cfg) {
  const double al = cfg.linear_weights[0] / ((cfg.epsilon + b.left) * (cfg.epsilon + b.left));
  const double ac = cfg.linear_weights[1] / ((cfg.epsilon + b.center) * (cfg.epsilon + b.center));
  const double ar = cfg.linear_weights[2] / ((cfg.epsilon + b.right) * (cfg.epsilon + b.right));
  const double sum = al + ac + ar;
  return {al / sum, ac / sum, ar / sum};
}

inline double weno_kernel(const HermiteStencil& s, const WenoConfig& cfg) {
  const double p_left = -2.0 * s.h_m1 + 2.0 * s.h_0 + s.g_left;
  const double p_center = (-s.h_m1 + 5.0 * s.h_0 + 2.0 * s.h_p1) / 6.0;
  const double p_right = (s.h_0 + 5.0 * s.h_p1 - 2.0 * s.g_right) / 4.0;
  const WenoWeights w = weights_from_beta(beta_kernel(s), cfg);
  return w.left * p_left + w.center * p_center + w.right * p_right;
}

inline double periodic(std::span<const double> h, std::ptrdiff_t k) { return h[wrap_index(k, h.size())]; }

inline void require_stencil(std::span<const double> h) {
  if (h.size() < 7) throw ConfigError("reconstruction: line length must be at least 7");
}

}  // namespace detail

/// G'_{i+1/2}: sixth-order interface value of the primitive's derivative.
inline double primitive_derivative(std::span<const double> h, std::ptrdiff_t i) {
  detail::require_stencil(h);
  using detail::periodic;
  return detail::g_prime(periodic(h, i - 2), periodic(h, i - 1), periodic(h, i), periodic(h, i + 1),
                         periodic(h, i + 2), periodic(h, i + 3));
}

inline HermiteStencil left_stencil(std::span<const double> h, std::ptrdiff_t i) {
  using detail::periodic;
  return {periodic(h, i - 1), periodic(h, i), periodic(h, i + 1), primitive_derivative(h, i - 2),
          primitive_derivative(h, i + 1)};
}

inline HermiteStencil right_stencil(std::span<const double> h, std::ptrdiff_t i) {
  using detail::periodic;
  return {periodic(h, i + 2), periodic(h, i + 1), periodic(h, i), primitive_derivative(h, i + 2),
          primitive_derivative(h, i - 1)};
}

/// h^-_{i+1/2}
inline double hermite_linear_left(std::span<const double> h, std::ptrdiff_t i) {
  return detail::linear_kernel(left_stencil(h, i));
}

/// h^+_{i+1/2}
inline double hermite_linear_right(std::span<const double> h, std::ptrdiff_t i) {
  return detail::linear_kernel(right_stencil(h, i));
}

inline double hermite_weno_left(std::span<const double> h, std::ptrdiff_t i, const WenoConfig& cfg = {}) {
  return detail::weno_kernel(left_stencil(h, i), cfg);
}

inline double hermite_weno_right(std::span<const double> h, std::ptrdiff_t i, const WenoConfig& cfg = {}) {
  return detail::weno_kernel(right_stencil(h, i), cfg);
}

/// Indicators of the three candidates used by hermite_weno_left at x_{i+1/2}.
inline SmoothnessIndicators smoothness_indicators(std::span<const double> h, std::ptrdiff_t i) {
  return detail::beta_kernel(left_stencil(h, i));
}

inline WenoWeights weno_weights(std::span<const double> h, std::ptrdiff_t i, const WenoConfig& cfg = {}) {
  return detail::weights_from_beta(detail::beta_kernel(left_stencil(h, i)), cfg);
}

/// Upwind flux at x_{i+1/2}: the left value when (u_i + u_{i+1})/2 > 0,
/// otherwise (including exactly zero) the right value.
inline double upwind_flux(std::span<const double> h, std::span<const double> u, std::ptrdiff_t i,
                          Scheme scheme, const WenoConfig& cfg = {}) {
  const double u_face = 0.5 * (detail::periodic(u, i) + detail::periodic(u, i + 1));
  if (scheme == Scheme::hermite_linear) {
    return u_face > 0.0 ? hermite_linear_left(h, i) : hermite_linear_right(h, i);
  }
  return u_face > 0.0 ? hermite_weno_left(h, i, cfg) : hermite_weno_right(h, i, cfg);
}

/// Computes every interface flux of a periodic line in one pass. flux[i]
/// holds the value at x_{i+1/2}. Scratch storage is reused across calls.
class LineReconstructor {
 public:
  explicit LineReconstructor(Scheme scheme = Scheme::hermite_linear, WenoConfig cfg = {})
      : scheme_(scheme), cfg_(cfg) {
    cfg_.validate();
  }

  void operator()(std::span<const double> h, std::span<const double> u, std::span<double> flux) {
    detail::require_stencil(h);
    const std::size_t n = h.size();
    const auto sn = static_cast<std::ptrdiff_t>(n);
    padded_.resize(n + 2 * pad);
    for (std::ptrdiff_t k = -static_cast<std::ptrdiff_t>(pad); k < sn + static_cast<std::ptrdiff_t>(pad); ++k) {
      padded_[static_cast<std::size_t>(k + pad)] = h[wrap_index(k, n)];
    }
    // gp_[m + g_off] = G'_{m+1/2} for m in [-2, n+1].
    gp_.resize(n + 4);
    const double* hp = padded_.data() + pad;
    for (std::ptrdiff_t m = -2; m <= sn + 1; ++m) {
      gp_[static_cast<std::size_t>(m + g_off)] =
          detail::g_prime(hp[m - 2], hp[m - 1], hp[m], hp[m + 1], hp[m + 2], hp[m + 3]);
    }
    const double* gp = gp_.data() + g_off;
    for (std::ptrdiff_t i = 0; i < sn; ++i) {
      const double u_face = 0.5 * (u[static_cast<std::size_t>(i)] + u[wrap_index(i + 1, n)]);
      HermiteStencil s = u_face > 0.0 ? HermiteStencil{hp[i - 1], hp[i], hp[i + 1], gp[i - 2], gp[i + 1]}
                                      : HermiteStencil{hp[i + 2], hp[i + 1], hp[i], gp[i + 2], gp[i - 1]};
      flux[static_cast<std::size_t>(i)] =
          scheme_ == Scheme::hermite_linear ? detail::linear_kernel(s) : detail::weno_kernel(s, cfg_);
    }
  }

  Scheme scheme() const { return scheme_; }
  const WenoConfig& weno() const { return cfg_; }

 private:
  static constexpr std::size_t pad = 5;
  static constexpr std::ptrdiff_t g_off = 2;

  Scheme scheme_;
  WenoConfig cfg_;
  std::vector<double> padded_;
  std::vector<double> gp_;
};

}  // namespace mppfd
