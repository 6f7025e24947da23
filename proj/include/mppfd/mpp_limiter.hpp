#pragma once

// Maximum-principle-preserving flux limiting.
//
// A first-order monotone flux pair (h, g) is blended edge by edge with the
// RK-accumulated high-order pair (H, G):
//
//   H~ = theta * (H - h) + h,     G~ = theta * (G - g) + g,
//
// with theta in [0, 1] chosen per edge so that the conservative update stays
// inside [rho_m, rho_M]. The coupled inequalities at each node are decoupled
// by scaling all anti-diffusive contributions of one sign with a common
// factor; the edge value is the smaller of the two nodes sharing it.
//
// Edge storage convention (shared with the integrator): an EdgeFluxes `x`
// entry (i, j) is the value at (i+1/2, j), a `y` entry (i, j) at (i, j+1/2).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>

#include "mppfd/errors.hpp"
#include "mppfd/grid.hpp"

namespace mppfd {

struct Bounds {
  double rho_m = 0.0;
  double rho_M = 0.0;

  void validate() const {
    if (!(rho_m <= rho_M)) throw ConfigError("bounds: rho_m must not exceed rho_M");
  }

  /// Admissible roundoff outside [rho_m, rho_M].
  double tolerance() const { return 1e-12 * std::max({1.0, std::abs(rho_m), std::abs(rho_M)}); }
};

struct EdgeFluxes {
  ScalarField x;  ///< (i+1/2, j)
  ScalarField y;  ///< (i, j+1/2)

  explicit EdgeFluxes(const Grid2D& grid, double fill = 0.0) : x(grid, fill), y(grid, fill) {}
  EdgeFluxes(ScalarField fx, ScalarField fy) : x(std::move(fx)), y(std::move(fy)) {}

  const Grid2D& grid() const { return x.grid(); }
};

/// Splitting of the edge velocity into a part multiplying the left/lower node
/// (minus, >= 0) and the right/upper node (plus, <= 0).
struct SplitVelocities {
  ScalarField x_minus, x_plus;  ///< U^-_{i+1/2,j}, U^+_{i+1/2,j}
  ScalarField y_minus, y_plus;  ///< U^-_{i,j+1/2}, U^+_{i,j+1/2}

  explicit SplitVelocities(const Grid2D& g) : x_minus(g), x_plus(g), y_minus(g), y_plus(g) {}
};

/// Lax-Friedrichs split built from a node potential with U = (-phi_y, phi_x),
/// using one-sided differences so the pair is exactly discretely
/// divergence-free.
inline SplitVelocities split_velocities_potential(const ScalarField& phi) {
  const Grid2D& g = phi.grid();
  const auto nx = static_cast<std::ptrdiff_t>(g.nx());
  const auto ny = static_cast<std::ptrdiff_t>(g.ny());
  const double dx = g.dx(), dy = g.dy();
  double alpha_x = 0.0, alpha_y = 0.0;
  for (std::ptrdiff_t j = 0; j < ny; ++j) {
    for (std::ptrdiff_t i = 0; i < nx; ++i) {
      alpha_x = std::max(alpha_x, std::abs((phi.at(i, j + 1) - phi.at(i, j)) / dy));
      alpha_y = std::max(alpha_y, std::abs((phi.at(i + 1, j) - phi.at(i, j)) / dx));
    }
  }
  SplitVelocities s(g);
  for (std::ptrdiff_t j = 0; j < ny; ++j) {
    for (std::ptrdiff_t i = 0; i < nx; ++i) {
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      s.x_minus(ui, uj) = 0.5 * (alpha_x - (phi.at(i, j + 1) - phi.at(i, j)) / dy);
      s.x_plus(ui, uj) = 0.5 * (-alpha_x - (phi.at(i + 1, j) - phi.at(i + 1, j - 1)) / dy);
      s.y_minus(ui, uj) = 0.5 * (alpha_y + (phi.at(i + 1, j) - phi.at(i, j)) / dx);
      s.y_plus(ui, uj) = 0.5 * (-alpha_y + (phi.at(i, j + 1) - phi.at(i - 1, j + 1)) / dx);
    }
  }
  return s;
}

/// Global Lax-Friedrichs split of a node velocity, U^-+ = (u +- alpha)/2 with
/// u taken at node (i, j) for both edges leaving it. Discretely
/// divergence-free when u_x is constant along x and u_y constant along y,
/// which holds for Vlasov-Poisson and constant advection.
inline SplitVelocities split_velocities_lf(const VelocityField& u) {
  const Grid2D& g = u.grid();
  const double ax = u.alpha_x(), ay = u.alpha_y();
  SplitVelocities s(g);
  for (std::size_t j = 0; j < g.ny(); ++j) {
    for (std::size_t i = 0; i < g.nx(); ++i) {
      const double ux = u.u_x()(i, j);
      const double uy = u.u_y()(i, j);
      s.x_minus(i, j) = 0.5 * (ux + ax);
      s.x_plus(i, j) = 0.5 * (ux - ax);
      s.y_minus(i, j) = 0.5 * (uy + ay);
      s.y_plus(i, j) = 0.5 * (uy - ay);
    }
  }
  return s;
}

/// h_{i+1/2,j} = U^- rho_{i,j} + U^+ rho_{i+1,j}, and likewise in y.
inline EdgeFluxes first_order_fluxes(const SplitVelocities& s, const ScalarField& rho) {
  const Grid2D& g = rho.grid();
  const auto nx = static_cast<std::ptrdiff_t>(g.nx());
  const auto ny = static_cast<std::ptrdiff_t>(g.ny());
  EdgeFluxes f(g);
  for (std::ptrdiff_t j = 0; j < ny; ++j) {
    for (std::ptrdiff_t i = 0; i < nx; ++i) {
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      f.x(ui, uj) = s.x_minus(ui, uj) * rho(ui, uj) + s.x_plus(ui, uj) * rho.at(i + 1, j);
      f.y(ui, uj) = s.y_minus(ui, uj) * rho(ui, uj) + s.y_plus(ui, uj) * rho.at(i, j + 1);
    }
  }
  return f;
}

inline EdgeFluxes first_order_fluxes_potential(const ScalarField& phi, const ScalarField& rho) {
  return first_order_fluxes(split_velocities_potential(phi), rho);
}

inline EdgeFluxes first_order_fluxes_lf(const VelocityField& u, const ScalarField& rho) {
  return first_order_fluxes(split_velocities_lf(u), rho);
}

/// Coefficients of the first-order update written as a five-point
/// combination rho^{n+1}_{ij} = c rho_{ij} + e rho_{i+1,j} + w rho_{i-1,j} +
/// n rho_{i,j+1} + s rho_{i,j-1}.
struct UpdateCoefficients {
  ScalarField center, east, west, north, south;
};

inline UpdateCoefficients update_coefficients(const SplitVelocities& s, double lambda_x, double lambda_y) {
  const Grid2D& g = s.x_minus.grid();
  const auto nx = static_cast<std::ptrdiff_t>(g.nx());
  const auto ny = static_cast<std::ptrdiff_t>(g.ny());
  UpdateCoefficients c{ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g)};
  for (std::ptrdiff_t j = 0; j < ny; ++j) {
    for (std::ptrdiff_t i = 0; i < nx; ++i) {
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      c.center(ui, uj) = 1.0 - lambda_x * (s.x_minus(ui, uj) - s.x_plus.at(i - 1, j)) -
                         lambda_y * (s.y_minus(ui, uj) - s.y_plus.at(i, j - 1));
      c.east(ui, uj) = -lambda_x * s.x_plus(ui, uj);
      c.west(ui, uj) = lambda_x * s.x_minus.at(i - 1, j);
      c.north(ui, uj) = -lambda_y * s.y_plus(ui, uj);
      c.south(ui, uj) = lambda_y * s.y_minus.at(i, j - 1);
    }
  }
  return c;
}

/// rho - lambda_x (F_{i+1/2} - F_{i-1/2}) - lambda_y (G_{j+1/2} - G_{j-1/2}).
inline ScalarField flux_difference_update(const ScalarField& rho, const EdgeFluxes& f, double lambda_x,
                                          double lambda_y) {
  const Grid2D& g = rho.grid();
  const std::size_t nx = g.nx(), ny = g.ny();
  ScalarField out(g);
  for (std::size_t j = 0; j < ny; ++j) {
    const std::size_t jm = j == 0 ? ny - 1 : j - 1;
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t im = i == 0 ? nx - 1 : i - 1;
      out(i, j) = rho(i, j) - lambda_x * (f.x(i, j) - f.x(im, j)) - lambda_y * (f.y(i, j) - f.y(i, jm));
    }
  }
  return out;
}

/// Per-node upper limits for theta on the four edges of a node.
struct NodeAllowance {
  double left = 1.0, right = 1.0, down = 1.0, up = 1.0;
};

/// Decoupled allowances at one node. `f_*` are the signed anti-diffusive
/// increments F (positive values push towards rho_M). All positive increments
/// share min(gamma_max / sum F+, 1), all negative ones min(gamma_min / sum F-, 1).
inline NodeAllowance node_allowances(double gamma_max, double gamma_min, double f_left, double f_right,
                                     double f_down, double f_up) {
  const std::array<double, 4> f{f_left, f_right, f_down, f_up};
  double sum_pos = 0.0, sum_neg = 0.0;
  for (double v : f) {
    if (v > 0.0) sum_pos += v;
    if (v < 0.0) sum_neg -= v;
  }
  const double lam_max = sum_pos > 0.0 ? std::min(gamma_max / sum_pos, 1.0) : 1.0;
  const double lam_min = sum_neg > 0.0 ? std::min(gamma_min / sum_neg, 1.0) : 1.0;
  std::array<double, 4> a{};
  for (std::size_t k = 0; k < 4; ++k) {
    a[k] = std::min(f[k] > 0.0 ? lam_max : 1.0, f[k] < 0.0 ? lam_min : 1.0);
  }
  return {a[0], a[1], a[2], a[3]};
}

struct LimiterReport {
  double theta_min = 1.0;
  std::size_t clamped_nodes = 0;  ///< nodes whose first-order value left the bounds
  double max_clamp = 0.0;         ///< largest excursion of the first-order value
};

struct LimiterResult {
  EdgeFluxes theta;
  ScalarField first_order;  ///< rho^n - lambda (h, g) differences
  LimiterReport report;
};

inline LimiterResult limiter_thetas(const ScalarField& rho_n, const EdgeFluxes& low, const EdgeFluxes& high,
                                    double lambda_x, double lambda_y, const Bounds& b) {
  const Grid2D& g = rho_n.grid();
  const std::size_t nx = g.nx(), ny = g.ny();
  ScalarField first = flux_difference_update(rho_n, low, lambda_x, lambda_y);

  LimiterReport report;
  const double warn_level = 1e-10 * (b.rho_M - b.rho_m);
  std::vector<NodeAllowance> allow(g.size());
  for (std::size_t j = 0; j < ny; ++j) {
    const std::size_t jm = j == 0 ? ny - 1 : j - 1;
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t im = i == 0 ? nx - 1 : i - 1;
      const double fo = first(i, j);
      const double raw_max = b.rho_M - fo;
      const double raw_min = fo - b.rho_m;
      const double excursion = std::max(-raw_max, -raw_min);
      if (excursion > warn_level) {
        ++report.clamped_nodes;
        report.max_clamp = std::max(report.max_clamp, excursion);
      }
      const double f_left = lambda_x * (high.x(im, j) - low.x(im, j));
      const double f_right = -lambda_x * (high.x(i, j) - low.x(i, j));
      const double f_down = lambda_y * (high.y(i, jm) - low.y(i, jm));
      const double f_up = -lambda_y * (high.y(i, j) - low.y(i, j));
      allow[g.index(i, j)] =
          node_allowances(std::max(raw_max, 0.0), std::max(raw_min, 0.0), f_left, f_right, f_down, f_up);
    }
  }

  EdgeFluxes theta(g);
  for (std::size_t j = 0; j < ny; ++j) {
    const std::size_t jp = j + 1 == ny ? 0 : j + 1;
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t ip = i + 1 == nx ? 0 : i + 1;
      const NodeAllowance& here = allow[g.index(i, j)];
      const double tx = std::min(here.right, allow[g.index(ip, j)].left);
      const double ty = std::min(here.up, allow[g.index(i, jp)].down);
      theta.x(i, j) = tx;
      theta.y(i, j) = ty;
      report.theta_min = std::min({report.theta_min, tx, ty});
    }
  }
  return {std::move(theta), std::move(first), report};
}

/// theta * (high - low) + low, returning `high` itself where theta == 1 so an
/// inactive limiter reproduces the unlimited update bit for bit.
inline EdgeFluxes blend_fluxes(const EdgeFluxes& low, const EdgeFluxes& high, const EdgeFluxes& theta) {
  EdgeFluxes out(low.grid());
  auto blend = [](double t, double lo, double hi) { return t == 1.0 ? hi : t * (hi - lo) + lo; };
  const auto tx = theta.x.values(), ty = theta.y.values();
  const auto lx = low.x.values(), ly = low.y.values();
  const auto hx = high.x.values(), hy = high.y.values();
  auto ox = out.x.values(), oy = out.y.values();
  for (std::size_t k = 0; k < ox.size(); ++k) {
    ox[k] = blend(tx[k], lx[k], hx[k]);
    oy[k] = blend(ty[k], ly[k], hy[k]);
  }
  return out;
}

/// Limited conservative update. With `bounds`, every node is checked: it may
/// not leave [min(rho_m, rho_FO), max(rho_M, rho_FO)] by more than the
/// bounds' tolerance, rho_FO being the first-order value at that node.
inline ScalarField apply_limited_update(const ScalarField& rho_n, const EdgeFluxes& low, const EdgeFluxes& high,
                                        const EdgeFluxes& theta, double lambda_x, double lambda_y,
                                        const Bounds* bounds = nullptr) {
  ScalarField next = flux_difference_update(rho_n, blend_fluxes(low, high, theta), lambda_x, lambda_y);
  if (bounds) {
    const ScalarField first = flux_difference_update(rho_n, low, lambda_x, lambda_y);
    const double tol = bounds->tolerance();
    const Grid2D& g = rho_n.grid();
    for (std::size_t j = 0; j < g.ny(); ++j) {
      for (std::size_t i = 0; i < g.nx(); ++i) {
        const double v = next(i, j);
        const double lo = std::min(bounds->rho_m, first(i, j)) - tol;
        const double hi = std::max(bounds->rho_M, first(i, j)) + tol;
        if (!(v >= lo && v <= hi)) {
          std::ostringstream msg;
          msg.precision(17);
          msg << "limited update left the admissible range at node (" << i << ", " << j << "): value " << v
              << ", bounds [" << bounds->rho_m << ", " << bounds->rho_M << "]";
          throw NumericalFailure(msg.str());
        }
      }
    }
  }
  return next;
}

}  // namespace mppfd
