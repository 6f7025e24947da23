#pragma once

// Conserved-quantity tracking, electric-field norms and convergence orders.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mppfd/errors.hpp"
#include "mppfd/grid.hpp"

namespace mppfd {

/// Compensated (Neumaier) sum; fixed order, so deterministic.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0, comp_ = 0.0;
};

template <typename F>
double compensated_sum(std::span<const double> v, F&& transform) {
  CompensatedSum s;
  for (double x : v) s.add(transform(x));
  return s.value();
}

/// dx*dy*sum(rho).
inline double mass(const ScalarField& f) {
  return f.grid().cell_area() * compensated_sum(f.values(), [](double x) { return x; });
}

/// (dx*dy*sum |f|^p)^(1/p), p in {1, 2}.
inline double lp_norm(const ScalarField& f, int p) {
  const double area = f.grid().cell_area();
  if (p == 1) return area * compensated_sum(f.values(), [](double x) { return std::abs(x); });
  if (p == 2) return std::sqrt(area * compensated_sum(f.values(), [](double x) { return x * x; }));
  throw ConfigError("lp_norm: only p = 1 and p = 2 are supported");
}

/// dx*dv*sum f v^2 on a phase-space grid whose y axis is v.
inline double vp_kinetic_energy(const ScalarField& f) {
  const Grid2D& g = f.grid();
  CompensatedSum s;
  for (std::size_t j = 0; j < g.ny(); ++j) {
    const double v2 = g.y(j) * g.y(j);
    for (double x : f.row(j)) s.add(x * v2);
  }
  return g.cell_area() * s.value();
}

/// dx*sum E^2.
inline double efield_energy(std::span<const double> e, double dx) {
  return dx * compensated_sum(e, [](double x) { return x * x; });
}

/// Kinetic part plus dx*sum E^2.
inline double vp_energy(const ScalarField& f, std::span<const double> e) {
  return vp_kinetic_energy(f) + efield_energy(e, f.grid().dx());
}

/// dx*dv*sum f ln f, with non-positive values contributing zero.
inline double vp_entropy(const ScalarField& f) {
  return f.grid().cell_area() * compensated_sum(f.values(), [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; });
}

struct EfieldNorms {
  double l2 = 0.0;
  double linf = 0.0;
};

inline EfieldNorms efield_norms(std::span<const double> e, double dx) {
  EfieldNorms n;
  n.l2 = std::sqrt(efield_energy(e, dx));
  for (double x : e) n.linf = std::max(n.linf, std::abs(x));
  return n;
}

/// order_k = log2(e_k / e_{k+1}); undefined (nullopt) for non-positive errors.
inline std::vector<std::optional<double>> convergence_orders(std::span<const double> errors) {
  if (errors.size() < 2) throw ConfigError("convergence_orders: need at least two error values");
  std::vector<std::optional<double>> orders;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    if (errors[k] > 0.0 && errors[k + 1] > 0.0) {
      orders.emplace_back(std::log2(errors[k] / errors[k + 1]));
    } else {
      orders.emplace_back(std::nullopt);
    }
  }
  return orders;
}

struct ErrorNorms {
  double l1 = 0.0;    ///< mean absolute nodal error
  double linf = 0.0;  ///< max absolute nodal error
};

/// Errors of `numeric` against `reference` on the same grid.
inline ErrorNorms error_norms(const ScalarField& numeric, const ScalarField& reference) {
  ErrorNorms e;
  CompensatedSum s;
  const auto a = numeric.values();
  const auto b = reference.values();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = std::abs(a[k] - b[k]);
    s.add(d);
    e.linf = std::max(e.linf, d);
  }
  e.l1 = s.value() / static_cast<double>(a.size());
  return e;
}

/// Restriction of a field on a doubled mesh to the nodes of `coarse`
/// (fine node (2i, 2j) coincides with coarse node (i, j)).
inline ScalarField restrict_to(const ScalarField& fine, const Grid2D& coarse) {
  const Grid2D& g = fine.grid();
  const std::size_t rx = g.nx() / coarse.nx(), ry = g.ny() / coarse.ny();
  if (rx * coarse.nx() != g.nx() || ry * coarse.ny() != g.ny() || g.x_min() != coarse.x_min() ||
      g.y_min() != coarse.y_min() || g.x_max() != coarse.x_max() || g.y_max() != coarse.y_max()) {
    throw ConfigError("restrict_to: meshes are not nested refinements of the same domain");
  }
  ScalarField out(coarse);
  for (std::size_t j = 0; j < coarse.ny(); ++j) {
    for (std::size_t i = 0; i < coarse.nx(); ++i) out(i, j) = fine(rx * i, ry * j);
  }
  return out;
}

/// One row of diagnostics.csv. Relative columns are (Q - Q0)/|Q0|; when Q0 is
/// exactly zero the plain difference Q - Q0 is reported instead.
struct DiagnosticsRecord {
  std::size_t step = 0;
  double time = 0.0;
  double dt = 0.0;
  double l1 = 0.0, l2 = 0.0, mass = 0.0;
  double l1_rel = 0.0, l2_rel = 0.0, mass_rel = 0.0;
  std::optional<double> energy, kinetic, entropy;
  std::optional<double> energy_rel, kinetic_rel, entropy_rel;
  std::optional<double> efield_l2, efield_linf;
  double field_min = 0.0, field_max = 0.0;
  std::optional<double> theta_min;
};

inline double relative_deviation(double q, double q0) { return q0 != 0.0 ? (q - q0) / std::abs(q0) : q - q0; }

/// Caches the step-0 invariants and turns states into records.
class DiagnosticsTracker {
 public:
  /// `efield` is non-empty for phase-space (Vlasov-Poisson) runs.
  DiagnosticsRecord record(std::size_t step, double time, double dt, const ScalarField& f,
                           std::span<const double> efield, std::optional<double> theta_min) {
    DiagnosticsRecord r;
    r.step = step;
    r.time = time;
    r.dt = dt;
    r.l1 = lp_norm(f, 1);
    r.l2 = lp_norm(f, 2);
    r.mass = mass(f);
    r.field_min = f.min();
    r.field_max = f.max();
    r.theta_min = theta_min;
    if (!efield.empty()) {
      r.kinetic = vp_kinetic_energy(f);
      r.energy = *r.kinetic + efield_energy(efield, f.grid().dx());
      r.entropy = vp_entropy(f);
      const auto en = efield_norms(efield, f.grid().dx());
      r.efield_l2 = en.l2;
      r.efield_linf = en.linf;
    }
    if (!initial_) initial_ = r;
    const DiagnosticsRecord& r0 = *initial_;
    r.l1_rel = relative_deviation(r.l1, r0.l1);
    r.l2_rel = relative_deviation(r.l2, r0.l2);
    r.mass_rel = relative_deviation(r.mass, r0.mass);
    if (r.energy && r0.energy) {
      r.energy_rel = relative_deviation(*r.energy, *r0.energy);
      r.kinetic_rel = relative_deviation(*r.kinetic, *r0.kinetic);
      r.entropy_rel = relative_deviation(*r.entropy, *r0.entropy);
    }
    return r;
  }

  const std::optional<DiagnosticsRecord>& initial() const { return initial_; }

 private:
  std::optional<DiagnosticsRecord> initial_;
};

inline constexpr const char* diagnostics_csv_header =
    "step,time,dt,l1_rel,l2_rel,mass_rel,energy_rel,kinetic_rel,entropy_rel,efield_l2,efield_linf,min,max,theta_min";

inline void write_csv_row(std::ostream& os, const DiagnosticsRecord& r) {
  char buf[32];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.16e", v);
    os << buf;
  };
  auto opt = [&](const std::optional<double>& v) {
    if (v) num(*v);
  };
  os << r.step << ',';
  num(r.time);
  os << ',';
  num(r.dt);
  os << ',';
  num(r.l1_rel);
  os << ',';
  num(r.l2_rel);
  os << ',';
  num(r.mass_rel);
  os << ',';
  opt(r.energy_rel);
  os << ',';
  opt(r.kinetic_rel);
  os << ',';
  opt(r.entropy_rel);
  os << ',';
  opt(r.efield_l2);
  os << ',';
  opt(r.efield_linf);
  os << ',';
  num(r.field_min);
  os << ',';
  num(r.field_max);
  os << ',';
  opt(r.theta_min);
  os << '\n';
}

}  // namespace mppfd
