#pragma once

// Time integration: CFL step size, dimension-by-dimension high-order fluxes,
// classical RK4 with stage-accumulated fluxes and limiting of the final
// flux-difference update.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mppfd/errors.hpp"
#include "mppfd/grid.hpp"
#include "mppfd/models.hpp"
#include "mppfd/mpp_limiter.hpp"
#include "mppfd/reconstruction.hpp"

namespace mppfd {

struct SchemeConfig {
  Scheme scheme = Scheme::hermite_linear;
  bool limiter = true;
  double cfl = 0.6;
  WenoConfig weno{};

  /// RK4 linear stability limit for the CFL number.
  static constexpr double max_cfl = 2.0 / 3.0;

  void validate() const {
    if (!(cfl > 0.0 && cfl <= max_cfl)) {
      throw ConfigError("cfl must lie in (0, 2/3] (got " + std::to_string(cfl) + ")");
    }
    weno.validate();
  }
};

/// dt = cfl / (alpha_x/dx + alpha_y/dy).
inline double compute_dt(double alpha_x, double alpha_y, const Grid2D& grid, double cfl) {
  const double rate = alpha_x / grid.dx() + alpha_y / grid.dy();
  if (!(rate > 0.0)) throw NumericalFailure("compute_dt: velocity field vanishes, no transport step defined");
  return cfl / rate;
}

/// Evaluates high-order edge fluxes along every row (x) and column (y).
/// Holds scratch buffers; one instance per thread.
class FluxEvaluator {
 public:
  explicit FluxEvaluator(const SchemeConfig& cfg = {}) : recon_(cfg.scheme, cfg.weno) {}

  EdgeFluxes operator()(const ScalarField& rho, const VelocityField& u) {
    const Grid2D& g = rho.grid();
    EdgeFluxes out(g);
    sweep(Axis::x, rho, u.u_x(), out.x);
    sweep(Axis::y, rho, u.u_y(), out.y);
    return out;
  }

 private:
  void sweep(Axis axis, const ScalarField& rho, const ScalarField& vel, ScalarField& flux) {
    const Grid2D& g = rho.grid();
    const std::size_t n = g.n(axis);
    const std::size_t lines = axis == Axis::x ? g.ny() : g.nx();
    h_.resize(n);
    u_.resize(n);
    f_.resize(n);
    for (std::size_t l = 0; l < lines; ++l) {
      const auto r = rho.line(axis, l);
      const auto v = vel.line(axis, l);
      for (std::size_t k = 0; k < n; ++k) {
        u_[k] = v[k];
        h_[k] = v[k] * r[k];
      }
      recon_(h_, u_, f_);
      flux.insert_line(axis, l, f_);
    }
  }

  LineReconstructor recon_;
  std::vector<double> h_, u_, f_;
};

inline EdgeFluxes spatial_fluxes(const ScalarField& rho, const VelocityField& u, const SchemeConfig& cfg) {
  FluxEvaluator eval(cfg);
  return eval(rho, u);
}

/// Semi-discrete tendency L(rho) = -(H_{i+1/2}-H_{i-1/2})/dx - (G_{j+1/2}-G_{j-1/2})/dy.
inline ScalarField tendency(const EdgeFluxes& f) {
  const Grid2D& g = f.grid();
  return flux_difference_update(ScalarField(g), f, 1.0 / g.dx(), 1.0 / g.dy());
}

/// (f0 + 2 f1 + 2 f2 + f3) / 6, edge by edge.
inline EdgeFluxes accumulate_rk4(const EdgeFluxes& f0, const EdgeFluxes& f1, const EdgeFluxes& f2,
                                 const EdgeFluxes& f3) {
  EdgeFluxes out(f0.grid());
  auto combine = [](std::span<double> o, std::span<const double> a, std::span<const double> b,
                    std::span<const double> c, std::span<const double> d) {
    for (std::size_t k = 0; k < o.size(); ++k) o[k] = (a[k] + 2.0 * b[k] + 2.0 * c[k] + d[k]) / 6.0;
  };
  combine(out.x.values(), f0.x.values(), f1.x.values(), f2.x.values(), f3.x.values());
  combine(out.y.values(), f0.y.values(), f1.y.values(), f2.y.values(), f3.y.values());
  return out;
}

struct StepResult {
  ScalarField rho;
  double dt = 0.0;
  std::optional<LimiterReport> limiter;  ///< set when the limiter ran
};

/// RK4 driver reusing its flux scratch buffers between steps.
class Rk4Stepper {
 public:
  Rk4Stepper(Model model, SchemeConfig cfg) : model_(std::move(model)), cfg_(cfg), flux_(cfg) { cfg_.validate(); }

  const Model& model() const { return model_; }
  const SchemeConfig& config() const { return cfg_; }

  /// Advances rho_n by dt. `stage0` may carry the flow already computed for
  /// rho_n (it also defines the first-order fluxes used by the limiter).
  StepResult step(const ScalarField& rho_n, double dt, const Bounds& bounds,
                  const FlowState* stage0 = nullptr) {
    std::optional<FlowState> own0;
    if (!stage0) {
      own0.emplace(model_.flow(rho_n));
      stage0 = &*own0;
    }
    const Grid2D& g = rho_n.grid();
    const double lx = dt / g.dx(), ly = dt / g.dy();

    EdgeFluxes f0 = flux_(rho_n, stage0->velocity);
    ScalarField r1 = flux_difference_update(rho_n, f0, 0.5 * lx, 0.5 * ly);
    EdgeFluxes f1 = flux_(r1, model_.flow(r1).velocity);
    ScalarField r2 = flux_difference_update(rho_n, f1, 0.5 * lx, 0.5 * ly);
    EdgeFluxes f2 = flux_(r2, model_.flow(r2).velocity);
    ScalarField r3 = flux_difference_update(rho_n, f2, lx, ly);
    EdgeFluxes f3 = flux_(r3, model_.flow(r3).velocity);
    EdgeFluxes high = accumulate_rk4(f0, f1, f2, f3);

    StepResult out{ScalarField(g), dt, std::nullopt};
    if (cfg_.limiter) {
      EdgeFluxes low = model_.first_order_fluxes(*stage0, rho_n);
      LimiterResult lim = limiter_thetas(rho_n, low, high, lx, ly, bounds);
      out.rho = apply_limited_update(rho_n, low, high, lim.theta, lx, ly, &bounds);
      out.limiter = lim.report;
    } else {
      out.rho = flux_difference_update(rho_n, high, lx, ly);
    }
    if (!out.rho.all_finite()) throw NumericalFailure("rk4 step produced non-finite values");
    return out;
  }

 private:
  Model model_;
  SchemeConfig cfg_;
  FluxEvaluator flux_;
};

inline StepResult rk4_step(const ScalarField& rho_n, const Model& model, const SchemeConfig& cfg, double dt,
                           const Bounds& bounds) {
  Rk4Stepper stepper(model, cfg);
  return stepper.step(rho_n, dt, bounds);
}

/// A running simulation: state, time and the flow of the current state.
class Simulation {
 public:
  Simulation(Model model, SchemeConfig cfg, Bounds bounds, ScalarField rho0, double t0 = 0.0)
      : stepper_(std::move(model), cfg), bounds_(bounds), rho_(std::move(rho0)), time_(t0) {
    bounds_.validate();
    flow_.emplace(stepper_.model().flow(rho_));
  }

  double time() const { return time_; }
  std::size_t steps() const { return steps_; }
  const ScalarField& state() const { return rho_; }
  const FlowState& flow() const { return *flow_; }
  const Bounds& bounds() const { return bounds_; }
  const Model& model() const { return stepper_.model(); }
  const SchemeConfig& config() const { return stepper_.config(); }

  /// One CFL step, truncated so the time never passes `t_target`.
  StepResult advance(double t_target) {
    const auto& u = flow_->velocity;
    const double remaining = t_target - time_;
    StepResult r{rho_, remaining, std::nullopt};
    if (u.alpha_x() + u.alpha_y() > 0.0) {
      double dt = compute_dt(u.alpha_x(), u.alpha_y(), rho_.grid(), stepper_.config().cfl);
      if (dt >= remaining) dt = remaining;
      r = stepper_.step(rho_, dt, bounds_, &*flow_);
      rho_ = r.rho;
      flow_.emplace(stepper_.model().flow(rho_));
    }
    // A field without velocity is stationary: jump straight to the target.
    time_ = r.dt >= remaining ? t_target : time_ + r.dt;
    ++steps_;
    return r;
  }

  void run_until(double t_target) {
    while (time_ < t_target) advance(t_target);
  }

 private:
  Rk4Stepper stepper_;
  Bounds bounds_;
  ScalarField rho_;
  std::optional<FlowState> flow_;
  double time_ = 0.0;
  std::size_t steps_ = 0;
};

}  // namespace mppfd
