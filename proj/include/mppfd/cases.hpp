#pragma once

// Benchmark presets: domain, default mesh and horizon, initial data, global
// bounds and (where known) the exact solution.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "mppfd/errors.hpp"
#include "mppfd/grid.hpp"
#include "mppfd/models.hpp"
#include "mppfd/mpp_limiter.hpp"

namespace mppfd {

using InitialData = std::function<double(double x, double y)>;
using ExactSolution = std::function<double(double t, double x, double y)>;

struct CaseSpec {
  std::string name;
  std::string summary;
  ModelKind kind = ModelKind::advection_const;
  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
  std::size_t nx = 0, ny = 0;
  double t_final = 1.0;
  double u_x = 0.0, u_y = 0.0;  ///< advection_const only
  Bounds bounds;                 ///< analytic extrema of the initial data
  InitialData initial;
  std::optional<ExactSolution> exact;
  bool one_dimensional = false;  ///< y is a dummy direction; meshes refine x only
  bool long_run = false;         ///< default horizon not meant for routine runs
};

namespace detail {

inline constexpr double pi = std::numbers::pi;
inline constexpr double inv_sqrt_2pi = 0.39894228040143267793994605993438;

/// x folded into [0, L).
inline double fold(double x, double x_min, double length) {
  double r = std::fmod(x - x_min, length);
  if (r < 0.0) r += length;
  return x_min + r;
}

inline CaseSpec advect2d_sin4() {
  CaseSpec c;
  c.name = "advect2d_sin4";
  c.summary = "2D linear advection of sin^4(x)+sin^4(y) with u=(1,1)";
  c.kind = ModelKind::advection_const;
  c.x_min = 0.0, c.x_max = 2 * pi, c.y_min = 0.0, c.y_max = 2 * pi;
  c.nx = c.ny = 64;
  c.t_final = 1.0;
  c.u_x = c.u_y = 1.0;
  c.bounds = {0.0, 2.0};
  c.initial = [](double x, double y) { return std::pow(std::sin(x), 4) + std::pow(std::sin(y), 4); };
  c.exact = [](double t, double x, double y) { return std::pow(std::sin(x - t), 4) + std::pow(std::sin(y - t), 4); };
  return c;
}

inline CaseSpec advect1d_chirp() {
  CaseSpec c;
  c.name = "advect1d_chirp";
  c.summary = "1D linear advection of the oscillatory profile sin(4x(x-2pi))";
  c.kind = ModelKind::advection_const;
  c.x_min = 0.0, c.x_max = 2 * pi, c.y_min = 0.0, c.y_max = 1.0;
  c.nx = 160;
  c.ny = Grid2D::min_nodes;
  c.t_final = 1.5;
  c.u_x = 1.0;
  c.u_y = 0.0;
  c.bounds = {-1.0, 1.0};
  c.one_dimensional = true;
  c.initial = [](double x, double) { return std::sin(4.0 * x * (x - 2 * pi)); };
  // Periodic continuation of the shifted profile.
  c.exact = [](double t, double x, double) {
    const double xs = fold(x - t, 0.0, 2 * pi);
    return std::sin(4.0 * xs * (xs - 2 * pi));
  };
  return c;
}

inline CaseSpec vp_smooth() {
  CaseSpec c;
  c.name = "vp_smooth";
  c.summary = "Vlasov-Poisson accuracy test, cos^4(kx) Maxwellian, k=0.5";
  c.kind = ModelKind::vlasov_poisson;
  c.x_min = 0.0, c.x_max = 4 * pi, c.y_min = -4 * pi, c.y_max = 4 * pi;
  c.nx = 64;
  c.ny = 128;
  c.t_final = 1.0;
  c.bounds = {0.0, inv_sqrt_2pi};
  c.initial = [](double x, double v) { return inv_sqrt_2pi * std::pow(std::cos(0.5 * x), 4) * std::exp(-0.5 * v * v); };
  return c;
}

inline CaseSpec landau_strong() {
  CaseSpec c;
  c.name = "landau_strong";
  c.summary = "strong Landau damping, alpha=0.5, k=0.5";
  c.kind = ModelKind::vlasov_poisson;
  c.x_min = 0.0, c.x_max = 4 * pi, c.y_min = -2 * pi, c.y_max = 2 * pi;
  c.nx = c.ny = 256;
  c.t_final = 50.0;
  c.bounds = {inv_sqrt_2pi * 0.5 * std::exp(-2 * pi * pi), 1.5 * inv_sqrt_2pi};
  c.initial = [](double x, double v) { return inv_sqrt_2pi * (1.0 + 0.5 * std::cos(0.5 * x)) * std::exp(-0.5 * v * v); };
  return c;
}

inline CaseSpec two_stream_sym() {
  constexpr double alpha = 0.05, u = 0.99, vth = 0.3, k = 2.0 / 13.0;
  auto profile = [=](double v) {
    return (std::exp(-(v - u) * (v - u) / (2 * vth * vth)) + std::exp(-(v + u) * (v + u) / (2 * vth * vth))) /
           (2 * vth) * inv_sqrt_2pi;
  };
  CaseSpec c;
  c.name = "two_stream_sym";
  c.summary = "symmetric two-stream instability";
  c.kind = ModelKind::vlasov_poisson;
  c.x_min = 0.0, c.x_max = 2 * pi / k, c.y_min = -2 * pi, c.y_max = 2 * pi;
  c.nx = c.ny = 256;
  c.t_final = 70.0;
  c.long_run = true;
  c.bounds = {profile(2 * pi) * (1.0 - alpha), profile(u) * (1.0 + alpha)};
  c.initial = [=](double x, double v) { return profile(v) * (1.0 + alpha * std::cos(k * x)); };
  return c;
}

inline CaseSpec bump_on_tail() {
  constexpr double np = 0.9, nb = 0.2, vb = 4.5, vt = 0.5, alpha = 0.04, k = 0.3;
  auto profile = [=](double v) {
    return np * inv_sqrt_2pi * std::exp(-0.5 * v * v) + nb * inv_sqrt_2pi * std::exp(-(v - vb) * (v - vb) / (2 * vt * vt));
  };
  CaseSpec c;
  c.name = "bump_on_tail";
  c.summary = "bump-on-tail instability";
  c.kind = ModelKind::vlasov_poisson;
  c.x_min = 0.0, c.x_max = 2 * pi / k, c.y_min = -3 * pi, c.y_max = 3 * pi;
  c.nx = c.ny = 256;
  c.t_final = 1000.0;
  c.long_run = true;
  c.bounds = {profile(-3 * pi) * (1.0 - alpha), profile(0.0) * (1.0 + alpha)};
  c.initial = [=](double x, double v) { return profile(v) * (1.0 + alpha * std::cos(k * x)); };
  return c;
}

inline CaseSpec kelvin_helmholtz() {
  CaseSpec c;
  c.name = "kelvin_helmholtz";
  c.summary = "Kelvin-Helmholtz instability of the guiding-center model";
  c.kind = ModelKind::guiding_center;
  c.x_min = 0.0, c.x_max = 4 * pi, c.y_min = 0.0, c.y_max = 2 * pi;
  c.nx = c.ny = 256;
  c.t_final = 40.0;
  c.bounds = {-1.015, 1.015};
  c.initial = [](double x, double y) { return std::sin(y) + 0.015 * std::cos(0.5 * x); };
  return c;
}

inline CaseSpec euler_stationary() {
  CaseSpec c;
  c.name = "euler_stationary";
  c.summary = "stationary incompressible Euler solution -2 sin x sin y";
  c.kind = ModelKind::incompressible_euler;
  c.x_min = 0.0, c.x_max = 2 * pi, c.y_min = 0.0, c.y_max = 2 * pi;
  c.nx = c.ny = 64;
  c.t_final = 1.0;
  c.bounds = {-2.0, 2.0};
  c.initial = [](double x, double y) { return -2.0 * std::sin(x) * std::sin(y); };
  c.exact = [](double, double x, double y) { return -2.0 * std::sin(x) * std::sin(y); };
  return c;
}

inline CaseSpec vortex_patch() {
  CaseSpec c;
  c.name = "vortex_patch";
  c.summary = "incompressible Euler vortex patch";
  c.kind = ModelKind::incompressible_euler;
  c.x_min = 0.0, c.x_max = 2 * pi, c.y_min = 0.0, c.y_max = 2 * pi;
  c.nx = c.ny = 256;
  c.t_final = 10.0;
  c.bounds = {-1.0, 1.0};
  // Closed rectangles: nodes on an edge belong to the patch.
  c.initial = [](double x, double y) {
    const bool in_x = x >= pi / 2 && x <= 3 * pi / 2;
    if (in_x && y >= pi / 4 && y <= 3 * pi / 4) return -1.0;
    if (in_x && y >= 5 * pi / 4 && y <= 7 * pi / 4) return 1.0;
    return 0.0;
  };
  return c;
}

}  // namespace detail

inline const std::vector<CaseSpec>& all_cases() {
  static const std::vector<CaseSpec> cases{
      detail::advect2d_sin4(),  detail::advect1d_chirp(),   detail::vp_smooth(),
      detail::landau_strong(),  detail::two_stream_sym(),   detail::bump_on_tail(),
      detail::kelvin_helmholtz(), detail::euler_stationary(), detail::vortex_patch()};
  return cases;
}

inline std::vector<std::string> case_names() {
  std::vector<std::string> names;
  for (const auto& c : all_cases()) names.push_back(c.name);
  return names;
}

inline const CaseSpec& find_case(const std::string& name) {
  for (const auto& c : all_cases()) {
    if (c.name == name) return c;
  }
  std::string valid;
  for (const auto& n : case_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("unknown case '" + name + "' (valid: " + valid + ")");
}

struct InitialState {
  ScalarField field;
  Bounds bounds;
};

/// Samples the initial data. The returned bounds are the analytic ones,
/// widened to the sampled extrema if roundoff in the initial data pokes
/// outside them.
inline InitialState initial_condition(const CaseSpec& c, const Grid2D& grid) {
  ScalarField f = sample(grid, c.initial);
  Bounds b = c.bounds;
  b.rho_m = std::min(b.rho_m, f.min());
  b.rho_M = std::max(b.rho_M, f.max());
  return {std::move(f), b};
}

inline Grid2D default_grid(const CaseSpec& c) { return Grid2D(c.x_min, c.x_max, c.y_min, c.y_max, c.nx, c.ny); }

inline Model make_model(const CaseSpec& c, const Grid2D& grid) { return Model::of_kind(c.kind, grid, c.u_x, c.u_y); }

}  // namespace mppfd
