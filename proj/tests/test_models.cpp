#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mppfd/cases.hpp"
#include "mppfd/models.hpp"

using namespace mppfd;
constexpr double pi = std::numbers::pi;

namespace {

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
  return m;
}

}  // namespace

TEST(Vlasov, EvenUniformDistributionHasNoField) {
  const Grid2D g = make_grid(0, 4 * pi, -2 * pi, 2 * pi, 16, 32);
  const ScalarField f = sample(g, [](double, double v) { return std::exp(-0.5 * v * v); });
  const FlowState flow = velocity_vlasov(f);
  for (double e : flow.efield) EXPECT_NEAR(e, 0.0, 1e-15);
  EXPECT_EQ(flow.velocity.alpha_y(), 0.0);
}

TEST(Vlasov, VelocityIsPhaseSpaceCoordinateAndField) {
  const CaseSpec& c = find_case("landau_strong");
  const Grid2D g(c.x_min, c.x_max, c.y_min, c.y_max, 64, 64);
  const FlowState flow = velocity_vlasov(initial_condition(c, g).field);
  double emax = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    // The charge of the truncated Maxwellian is 1 up to the cutoff tail.
    EXPECT_NEAR(flow.efield[i], std::sin(0.5 * g.x(i)), 1e-6);
    emax = std::max(emax, std::abs(flow.efield[i]));
  }
  EXPECT_NEAR(emax, 1.0, 1e-6);
  for (std::size_t j = 0; j < g.ny(); ++j) {
    EXPECT_EQ(flow.velocity.u_x()(5, j), g.y(j));
    EXPECT_EQ(flow.velocity.u_y()(5, j), flow.efield[5]);
  }
  EXPECT_FALSE(flow.potential.has_value());
}

TEST(Vlasov, ChargeDensityIsVelocitySum) {
  const Grid2D g = make_grid(0, 1, -1, 1, 8, 8);
  ScalarField f(g, 0.0);
  f(2, 3) = 1.0;
  f(2, 7) = 2.0;
  const auto rho = charge_density(f);
  EXPECT_DOUBLE_EQ(rho[2], 3.0 * g.dy());
  EXPECT_EQ(rho[3], 0.0);
}

TEST(GuidingCenter, ProductOfSines) {
  const Grid2D g = make_grid(0, 2 * pi, 0, 2 * pi, 32, 32);
  const FlowState flow = velocity_guiding_center(sample(g, [](double x, double y) { return 2 * std::sin(x) * std::sin(y); }));
  EXPECT_LT(max_abs_diff(*flow.potential, sample(g, [](double x, double y) { return std::sin(x) * std::sin(y); })), 1e-14);
  EXPECT_LT(max_abs_diff(flow.velocity.u_x(), sample(g, [](double x, double y) { return -std::sin(x) * std::cos(y); })), 1e-14);
  EXPECT_LT(max_abs_diff(flow.velocity.u_y(), sample(g, [](double x, double y) { return std::cos(x) * std::sin(y); })), 1e-14);
}

TEST(GuidingCenter, KelvinHelmholtzInitialVelocity) {
  const CaseSpec& c = find_case("kelvin_helmholtz");
  const Grid2D g(c.x_min, c.x_max, c.y_min, c.y_max, 64, 32);
  const FlowState flow = velocity_guiding_center(initial_condition(c, g).field);
  EXPECT_LT(max_abs_diff(*flow.potential, sample(g, [](double x, double y) { return std::sin(y) + 0.06 * std::cos(0.5 * x); })), 1e-14);
  EXPECT_LT(max_abs_diff(flow.velocity.u_x(), sample(g, [](double, double y) { return -std::cos(y); })), 1e-14);
  EXPECT_LT(max_abs_diff(flow.velocity.u_y(), sample(g, [](double x, double) { return -0.03 * std::sin(0.5 * x); })), 1e-14);
}

TEST(GuidingCenter, ZeroDensityGivesRest) {
  const Grid2D g = make_grid(0, 1, 0, 1, 8, 8);
  const FlowState flow = velocity_guiding_center(ScalarField(g));
  EXPECT_EQ(flow.velocity.alpha_x(), 0.0);
  EXPECT_EQ(flow.velocity.alpha_y(), 0.0);
}

TEST(Euler, StationaryVorticityHasNoTransport) {
  const Grid2D g = make_grid(0, 2 * pi, 0, 2 * pi, 32, 32);
  const ScalarField omega = sample(g, [](double x, double y) { return -2 * std::sin(x) * std::sin(y); });
  const FlowState flow = velocity_euler(omega);
  const ScalarField wx = spectral_derivative(omega, Axis::x), wy = spectral_derivative(omega, Axis::y);
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    worst = std::max(worst, std::abs(flow.velocity.u_x().values()[k] * wx.values()[k] +
                                     flow.velocity.u_y().values()[k] * wy.values()[k]));
  }
  EXPECT_LT(worst, 1e-13);
}

TEST(Euler, ZeroVorticityGivesRest) {
  const FlowState flow = velocity_euler(ScalarField(make_grid(0, 1, 0, 1, 8, 8)));
  EXPECT_EQ(flow.velocity.alpha_x() + flow.velocity.alpha_y(), 0.0);
}

TEST(Euler, VortexPatchVelocityIsDivergenceFree) {
  const CaseSpec& c = find_case("vortex_patch");
  const Grid2D g(c.x_min, c.x_max, c.y_min, c.y_max, 64, 64);
  const FlowState flow = velocity_euler(initial_condition(c, g).field);
  const ScalarField dux = spectral_derivative(flow.velocity.u_x(), Axis::x);
  const ScalarField duy = spectral_derivative(flow.velocity.u_y(), Axis::y);
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) worst = std::max(worst, std::abs(dux.values()[k] + duy.values()[k]));
  EXPECT_LE(worst, 1e-10);
  EXPECT_GT(flow.velocity.alpha_x(), 0.1);
}

TEST(Model, FirstOrderFluxKindFollowsModel) {
  const Grid2D g = make_grid(0, 2 * pi, 0, 2 * pi, 16, 16);
  const ScalarField rho = sample(g, [](double x, double y) { return std::sin(x) + std::cos(y); });
  const Model gc = Model::guiding_center(g);
  const FlowState f1 = gc.flow(rho);
  ASSERT_TRUE(f1.potential.has_value());
  const EdgeFluxes a = gc.first_order_fluxes(f1, rho), b = first_order_fluxes_potential(*f1.potential, rho);
  EXPECT_EQ(max_abs_diff(a.x, b.x) + max_abs_diff(a.y, b.y), 0.0);

  const Model adv = Model::advection(g, 1.0, -2.0);
  const FlowState f2 = adv.flow(rho);
  EXPECT_FALSE(f2.potential.has_value());
  const EdgeFluxes c = adv.first_order_fluxes(f2, rho), d = first_order_fluxes_lf(f2.velocity, rho);
  EXPECT_EQ(max_abs_diff(c.x, d.x) + max_abs_diff(c.y, d.y), 0.0);
  EXPECT_EQ(f2.velocity.alpha_y(), 2.0);
}

TEST(Model, CopiesShareTheGrid) {
  const Grid2D g = make_grid(0, 1, 0, 1, 8, 8);
  const Model a = Model::incompressible_euler(g);
  const Model b = a;
  EXPECT_EQ(&a.plan(), &b.plan());
  EXPECT_EQ(b.kind(), ModelKind::incompressible_euler);
}

TEST(Cases, UnknownNameListsValidNames) {
  try {
    find_case("landau");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const auto& n : case_names()) EXPECT_NE(msg.find(n), std::string::npos) << n;
  }
}

TEST(Cases, LandauDefaults) {
  const CaseSpec& c = find_case("landau_strong");
  EXPECT_EQ(c.nx, 256u);
  EXPECT_EQ(c.ny, 256u);
  EXPECT_DOUBLE_EQ(c.y_min, -2 * pi);
  EXPECT_DOUBLE_EQ(c.y_max, 2 * pi);
  EXPECT_DOUBLE_EQ(c.x_max, 4 * pi);
  EXPECT_EQ(c.t_final, 50.0);
  EXPECT_EQ(c.kind, ModelKind::vlasov_poisson);
}

TEST(Cases, InitialDataLiesWithinBounds) {
  for (const auto& c : all_cases()) {
    const Grid2D g(c.x_min, c.x_max, c.y_min, c.y_max, std::min<std::size_t>(c.nx, 64),
                   std::min<std::size_t>(c.ny, 64));
    const InitialState s = initial_condition(c, g);
    EXPECT_GE(s.field.min(), s.bounds.rho_m) << c.name;
    EXPECT_LE(s.field.max(), s.bounds.rho_M) << c.name;
    // Widening only absorbs roundoff in the sampled extrema.
    EXPECT_NEAR(s.bounds.rho_m, c.bounds.rho_m, 1e-12) << c.name;
    EXPECT_NEAR(s.bounds.rho_M, c.bounds.rho_M, 1e-12) << c.name;
  }
}

TEST(Cases, LongRunPresetsAreFlagged) {
  EXPECT_TRUE(find_case("bump_on_tail").long_run);
  EXPECT_TRUE(find_case("two_stream_sym").long_run);
  EXPECT_FALSE(find_case("advect2d_sin4").long_run);
  EXPECT_EQ(find_case("bump_on_tail").t_final, 1000.0);
}

TEST(Cases, ChirpExactSolutionIsPeriodicShift) {
  const CaseSpec& c = find_case("advect1d_chirp");
  for (double x : {0.1, 1.0, 3.0, 6.0}) {
    EXPECT_NEAR((*c.exact)(0.0, x, 0.0), c.initial(x, 0.0), 1e-15);
    EXPECT_NEAR((*c.exact)(2 * pi, x, 0.0), c.initial(x, 0.0), 1e-12);
    EXPECT_NEAR((*c.exact)(0.5, x + 0.5, 0.0), c.initial(x, 0.0), 1e-12);
  }
}
