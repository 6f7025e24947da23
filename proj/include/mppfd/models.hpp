#pragma once

// Velocity construction for the transport models the solver advances:
//
//   advection_const        fixed (u_x, u_y)
//   vlasov_poisson         phase space (x, v): U = (v, E(x)), -phi'' = rho - <rho>,
//                          rho(x) = int f dv, E = -phi'
//   guiding_center         U = (-phi_y, phi_x), -Laplace(phi) = rho - <rho>
//   incompressible_euler   same as guiding_center with rho the vorticity
//
// Each model also supplies the first-order monotone flux pair the limiter
// falls back to.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mppfd/grid.hpp"
#include "mppfd/mpp_limiter.hpp"
#include "mppfd/spectral.hpp"

namespace mppfd {

enum class ModelKind { advection_const, vlasov_poisson, guiding_center, incompressible_euler };

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::advection_const: return "advection_const";
    case ModelKind::vlasov_poisson: return "vlasov_poisson";
    case ModelKind::guiding_center: return "guiding_center";
    case ModelKind::incompressible_euler: return "incompressible_euler";
  }
  return "unknown";
}

/// Everything a stage needs from the velocity solve.
struct FlowState {
  VelocityField velocity;
  std::optional<ScalarField> potential;  ///< guiding-center and Euler models
  std::vector<double> efield;            ///< Vlasov-Poisson: E(x_i)
};

/// rho(x_i) = dv * sum_j f_{i,j}.
inline std::vector<double> charge_density(const ScalarField& f) {
  const Grid2D& g = f.grid();
  std::vector<double> rho(g.nx(), 0.0);
  for (std::size_t j = 0; j < g.ny(); ++j) {
    const auto row = f.row(j);
    for (std::size_t i = 0; i < g.nx(); ++i) rho[i] += row[i];
  }
  for (double& r : rho) r *= g.dy();
  return rho;
}

inline FlowState velocity_vlasov(const ScalarField& f, const SpectralPlan& plan) {
  const Grid2D& g = f.grid();
  const auto rho = charge_density(f);
  auto e = plan.electric_field(plan.solve_poisson_1d(rho));
  ScalarField u_x(g), u_y(g);
  for (std::size_t j = 0; j < g.ny(); ++j) {
    const double v = g.y(j);
    for (std::size_t i = 0; i < g.nx(); ++i) {
      u_x(i, j) = v;
      u_y(i, j) = e[i];
    }
  }
  return {VelocityField(std::move(u_x), std::move(u_y)), std::nullopt, std::move(e)};
}

inline FlowState velocity_guiding_center(const ScalarField& rho, const SpectralPlan& plan) {
  auto flow = plan.potential_flow(rho);
  return {VelocityField(std::move(flow.u_x), std::move(flow.u_y)), std::move(flow.phi), {}};
}

/// Vorticity-stream form shares the guiding-center convention -Laplace(phi) = omega.
inline FlowState velocity_euler(const ScalarField& omega, const SpectralPlan& plan) {
  return velocity_guiding_center(omega, plan);
}

inline FlowState velocity_vlasov(const ScalarField& f) { return velocity_vlasov(f, SpectralPlan(f.grid())); }
inline FlowState velocity_guiding_center(const ScalarField& rho) {
  return velocity_guiding_center(rho, SpectralPlan(rho.grid()));
}
inline FlowState velocity_euler(const ScalarField& omega) { return velocity_euler(omega, SpectralPlan(omega.grid())); }

/// A transport model bound to one grid. Copies share the FFT plans.
class Model {
 public:
  static Model advection(const Grid2D& grid, double u_x, double u_y) {
    Model m(ModelKind::advection_const, grid);
    m.u_x_ = u_x;
    m.u_y_ = u_y;
    return m;
  }
  static Model vlasov_poisson(const Grid2D& grid) { return Model(ModelKind::vlasov_poisson, grid); }
  static Model guiding_center(const Grid2D& grid) { return Model(ModelKind::guiding_center, grid); }
  static Model incompressible_euler(const Grid2D& grid) { return Model(ModelKind::incompressible_euler, grid); }

  static Model of_kind(ModelKind kind, const Grid2D& grid, double u_x = 0.0, double u_y = 0.0) {
    return kind == ModelKind::advection_const ? advection(grid, u_x, u_y) : Model(kind, grid);
  }

  ModelKind kind() const { return kind_; }
  const Grid2D& grid() const { return grid_; }
  const SpectralPlan& plan() const { return *plan_; }

  FlowState flow(const ScalarField& rho) const {
    switch (kind_) {
      case ModelKind::advection_const:
        return {VelocityField(ScalarField(grid_, u_x_), ScalarField(grid_, u_y_)), std::nullopt, {}};
      case ModelKind::vlasov_poisson: return velocity_vlasov(rho, *plan_);
      case ModelKind::guiding_center: return velocity_guiding_center(rho, *plan_);
      case ModelKind::incompressible_euler: return velocity_euler(rho, *plan_);
    }
    throw ConfigError("model: unknown kind");
  }

  /// First-order monotone fluxes at the state `rho` with its flow: the
  /// potential-based split when a potential exists, the global
  /// Lax-Friedrichs split otherwise.
  EdgeFluxes first_order_fluxes(const FlowState& flow, const ScalarField& rho) const {
    if (flow.potential) return first_order_fluxes_potential(*flow.potential, rho);
    return first_order_fluxes_lf(flow.velocity, rho);
  }

  SplitVelocities split_velocities(const FlowState& flow) const {
    if (flow.potential) return split_velocities_potential(*flow.potential);
    return split_velocities_lf(flow.velocity);
  }

 private:
  Model(ModelKind kind, const Grid2D& grid)
      : kind_(kind), grid_(grid), plan_(std::make_shared<const SpectralPlan>(grid)) {}

  ModelKind kind_;
  Grid2D grid_;
  std::shared_ptr<const SpectralPlan> plan_;
  double u_x_ = 0.0, u_y_ = 0.0;
};

}  // namespace mppfd
