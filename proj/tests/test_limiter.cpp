#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mppfd/mpp_limiter.hpp"

using namespace mppfd;

namespace {

ScalarField random_field(const Grid2D& g, std::mt19937& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  ScalarField f(g);
  for (double& v : f.values()) v = dist(rng);
  return f;
}

EdgeFluxes random_fluxes(const Grid2D& g, std::mt19937& rng, double scale) {
  return {random_field(g, rng, -scale, scale), random_field(g, rng, -scale, scale)};
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
  return m;
}

// Largest node speeds of the split built from phi: |phi_y| and |phi_x| from
// forward differences.
std::pair<double, double> potential_speeds(const ScalarField& phi) {
  const Grid2D& g = phi.grid();
  double ax = 0.0, ay = 0.0;
  for (std::size_t j = 0; j < g.ny(); ++j) {
    for (std::size_t i = 0; i < g.nx(); ++i) {
      const auto si = static_cast<std::ptrdiff_t>(i), sj = static_cast<std::ptrdiff_t>(j);
      ax = std::max(ax, std::abs(phi.at(si, sj + 1) - phi(i, j)) / g.dy());
      ay = std::max(ay, std::abs(phi.at(si + 1, sj) - phi(i, j)) / g.dx());
    }
  }
  return {ax, ay};
}

// Largest time step keeping the first-order update monotone: dt = dx dy / (2 max|U| (dx + dy)).
double monotone_dt(const Grid2D& g, double max_speed) {
  return g.dx() * g.dy() / (2.0 * max_speed * (g.dx() + g.dy()));
}

}  // namespace

TEST(FirstOrder, ConstantPotentialGivesZeroFluxes) {
  const Grid2D g = make_grid(0, 1, 0, 1, 8, 8);
  std::mt19937 rng(1);
  const EdgeFluxes f = first_order_fluxes_potential(ScalarField(g, 3.0), random_field(g, rng, 0, 1));
  for (double v : f.x.values()) EXPECT_EQ(v, 0.0);
  for (double v : f.y.values()) EXPECT_EQ(v, 0.0);
}

TEST(FirstOrder, PotentialFluxesPreserveConstants) {
  const Grid2D g = make_grid(0, 2, 0, 3, 12, 10);
  std::mt19937 rng(2);
  const ScalarField phi = random_field(g, rng, -1, 1);
  const ScalarField rho(g, 0.7);
  const double dt = 0.01;
  const ScalarField next = flux_difference_update(rho, first_order_fluxes_potential(phi, rho), dt / g.dx(), dt / g.dy());
  for (double v : next.values()) EXPECT_NEAR(v, 0.7, 1e-15);
}

TEST(FirstOrder, LaxFriedrichsWithUnitSpeedIsUpwind) {
  const Grid2D g = make_grid(0, 1, 0, 1, 8, 8);
  std::mt19937 rng(3);
  const ScalarField rho = random_field(g, rng, 0, 1);
  const EdgeFluxes f = first_order_fluxes_lf(VelocityField(ScalarField(g, 1.0), ScalarField(g, 0.0)), rho);
  for (std::size_t k = 0; k < rho.size(); ++k) {
    EXPECT_EQ(f.x.values()[k], rho.values()[k]);
    EXPECT_EQ(f.y.values()[k], 0.0);
  }
}

TEST(FirstOrder, LaxFriedrichsPreservesConstantsForPhaseSpaceVelocity) {
  const Grid2D g = make_grid(0, 4, -2, 2, 10, 12);
  std::mt19937 rng(4);
  ScalarField ux(g), uy(g);
  const ScalarField e = random_field(g, rng, -1, 1);
  for (std::size_t j = 0; j < g.ny(); ++j) {
    for (std::size_t i = 0; i < g.nx(); ++i) {
      ux(i, j) = g.y(j);
      uy(i, j) = e(i, 0);
    }
  }
  const ScalarField rho(g, 0.25);
  const ScalarField next = flux_difference_update(rho, first_order_fluxes_lf(VelocityField(ux, uy), rho), 0.05, 0.05);
  for (double v : next.values()) EXPECT_NEAR(v, 0.25, 1e-15);
}

TEST(FirstOrder, SplitSignConditions) {
  const Grid2D g = make_grid(0, 1, 0, 2, 9, 11);
  std::mt19937 rng(5);
  const SplitVelocities s = split_velocities_potential(random_field(g, rng, -1, 1));
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_GE(s.x_minus.values()[k], 0.0);
    EXPECT_LE(s.x_plus.values()[k], 0.0);
    EXPECT_GE(s.y_minus.values()[k], 0.0);
    EXPECT_LE(s.y_plus.values()[k], 0.0);
  }
}

TEST(FirstOrder, ConvexCombinationUnderMonotoneStep) {
  std::mt19937 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const Grid2D g = make_grid(0, 1 + trial % 3, 0, 2, 8 + trial % 5, 8 + trial % 7);
    const ScalarField phi = random_field(g, rng, -2, 2);
    const auto [ax, ay] = potential_speeds(phi);
    const double dt = monotone_dt(g, std::max(ax, ay));
    const UpdateCoefficients c = update_coefficients(split_velocities_potential(phi), dt / g.dx(), dt / g.dy());
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double parts[] = {c.center.values()[k], c.east.values()[k], c.west.values()[k], c.north.values()[k],
                              c.south.values()[k]};
      double sum = 0.0;
      for (double p : parts) {
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        sum += p;
      }
      EXPECT_NEAR(sum, 1.0, 1e-14);
    }
  }
}

TEST(FirstOrder, CoefficientsReproduceFluxUpdate) {
  const Grid2D g = make_grid(0, 1, 0, 1, 8, 9);
  std::mt19937 rng(7);
  const ScalarField phi = random_field(g, rng, -1, 1), rho = random_field(g, rng, 0, 1);
  const SplitVelocities s = split_velocities_potential(phi);
  const double lx = 0.01, ly = 0.02;
  const UpdateCoefficients c = update_coefficients(s, lx, ly);
  const ScalarField next = flux_difference_update(rho, first_order_fluxes(s, rho), lx, ly);
  for (std::size_t j = 0; j < g.ny(); ++j) {
    for (std::size_t i = 0; i < g.nx(); ++i) {
      const auto si = static_cast<std::ptrdiff_t>(i), sj = static_cast<std::ptrdiff_t>(j);
      const double combo = c.center(i, j) * rho(i, j) + c.east(i, j) * rho.at(si + 1, sj) +
                           c.west(i, j) * rho.at(si - 1, sj) + c.north(i, j) * rho.at(si, sj + 1) +
                           c.south(i, j) * rho.at(si, sj - 1);
      EXPECT_NEAR(combo, next(i, j), 1e-15);
    }
  }
}

TEST(NodeAllowance, SinglePositiveIncrement) {
  const NodeAllowance a = node_allowances(0.1, 10.0, -0.05, 0.2, 0.0, -0.01);
  EXPECT_DOUBLE_EQ(a.right, 0.5);
  EXPECT_EQ(a.left, 1.0);
  EXPECT_EQ(a.down, 1.0);
  EXPECT_EQ(a.up, 1.0);
}

TEST(NodeAllowance, NoPositiveIncrementsNeedNoLimiting) {
  const NodeAllowance a = node_allowances(0.0, 1.0, -0.1, -0.2, 0.0, -0.3);
  EXPECT_EQ(a.left, 1.0);
  EXPECT_EQ(a.right, 1.0);
  EXPECT_EQ(a.up, 1.0);
}

TEST(NodeAllowance, ZeroRoomBlocksIncrements) {
  const NodeAllowance a = node_allowances(0.0, 0.0, 0.1, -0.2, 0.0, 0.0);
  EXPECT_EQ(a.left, 0.0);
  EXPECT_EQ(a.right, 0.0);
  EXPECT_EQ(a.down, 1.0);
}

TEST(NodeAllowance, SignsLimitedIndependently) {
  const NodeAllowance a = node_allowances(0.3, 0.1, 0.2, 0.4, -0.1, -0.3);
  EXPECT_DOUBLE_EQ(a.left, 0.5);
  EXPECT_DOUBLE_EQ(a.right, 0.5);
  EXPECT_DOUBLE_EQ(a.down, 0.25);
  EXPECT_DOUBLE_EQ(a.up, 0.25);
}

TEST(LimiterThetas, EqualFluxesLeaveThetaAtOne) {
  const Grid2D g = make_grid(0, 1, 0, 1, 8, 8);
  std::mt19937 rng(8);
  const ScalarField rho = random_field(g, rng, 0, 1);
  const EdgeFluxes f = random_fluxes(g, rng, 0.3);
  const LimiterResult r = limiter_thetas(rho, f, f, 0.1, 0.1, {0.0, 1.0});
  for (double v : r.theta.x.values()) EXPECT_EQ(v, 1.0);
  for (double v : r.theta.y.values()) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(r.report.theta_min, 1.0);
}

TEST(LimiterThetas, EdgeThetaIsMinimumOfBothNodes) {
  // One active edge between nodes 3 and 4 of row 2 with d = lambda (H - h) = 0.2:
  // node 3 sees F_R = -0.2 with 0.1 room below (0.5), node 4 sees
  // F_L = +0.2 with 0.14 room above (0.7).
  const Grid2D g = make_grid(0, 1, 0, 1, 8, 8);
  ScalarField rho(g, 0.5);
  rho(3, 2) = 0.1;
  rho(4, 2) = 0.86;
  const EdgeFluxes low(g);
  EdgeFluxes high(g);
  high.x(3, 2) = 0.4;
  const LimiterResult r = limiter_thetas(rho, low, high, 0.5, 0.5, {0.0, 1.0});
  EXPECT_NEAR(r.theta.x(3, 2), 0.5, 1e-15);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (k == g.index(3, 2)) continue;
    EXPECT_EQ(r.theta.x.values()[k], 1.0);
    EXPECT_EQ(r.theta.y.values()[k], 1.0);
  }
  const ScalarField next = apply_limited_update(rho, low, high, r.theta, 0.5, 0.5);
  EXPECT_NEAR(next(3, 2), 0.0, 1e-15);
  EXPECT_NEAR(next(4, 2), 0.96, 1e-15);
}

TEST(LimitedUpdate, ThetaZeroIsFirstOrder) {
  const Grid2D g = make_grid(0, 1, 0, 1, 8, 10);
  std::mt19937 rng(9);
  const ScalarField rho = random_field(g, rng, 0, 1);
  const EdgeFluxes low = random_fluxes(g, rng, 0.5), high = random_fluxes(g, rng, 0.5);
  const ScalarField a = apply_limited_update(rho, low, high, EdgeFluxes(g, 0.0), 0.3, 0.2);
  const ScalarField b = flux_difference_update(rho, low, 0.3, 0.2);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a.values()[k], b.values()[k]);
}

TEST(LimitedUpdate, ThetaOneIsHighOrderBitwise) {
  const Grid2D g = make_grid(0, 1, 0, 1, 8, 10);
  std::mt19937 rng(10);
  const ScalarField rho = random_field(g, rng, 0, 1);
  const EdgeFluxes low = random_fluxes(g, rng, 0.5), high = random_fluxes(g, rng, 0.5);
  const ScalarField a = apply_limited_update(rho, low, high, EdgeFluxes(g, 1.0), 0.3, 0.2);
  const ScalarField b = flux_difference_update(rho, high, 0.3, 0.2);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a.values()[k], b.values()[k]);
}

TEST(LimitedUpdate, MassConservedForArbitraryTheta) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Grid2D g = make_grid(0, 1, 0, 1, 8 + trial % 4, 8 + trial % 3);
    const ScalarField rho = random_field(g, rng, 0, 1);
    const EdgeFluxes low = random_fluxes(g, rng, 1.0), high = random_fluxes(g, rng, 1.0);
    const EdgeFluxes theta(random_field(g, rng, 0, 1), random_field(g, rng, 0, 1));
    const ScalarField next = apply_limited_update(rho, low, high, theta, 0.4, 0.7);
    long double before = 0, after = 0;
    for (std::size_t k = 0; k < rho.size(); ++k) {
      before += rho.values()[k];
      after += next.values()[k];
    }
    EXPECT_NEAR(static_cast<double>(after - before), 0.0, 1e-13);
  }
}

TEST(LimitedUpdate, BoundsPreservedOnRandomInstances) {
  // Fields inside [0, 1], admissible first-order fluxes from random
  // potentials at the monotone time step, arbitrary high-order fluxes.
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> unit(0, 1);
  const Bounds b{0.0, 1.0};
  int limited = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const Grid2D g = make_grid(0, 1, 0, 1, 8, 8);
    const ScalarField phi = random_field(g, rng, -1, 1);
    ScalarField rho = random_field(g, rng, 0, 1);
    // Push a few nodes onto the bounds so the limiter has work to do.
    for (int k = 0; k < 6; ++k) rho.values()[rng() % g.size()] = (rng() & 1) ? 0.0 : 1.0;
    const auto [ax, ay] = potential_speeds(phi);
    const double dt = monotone_dt(g, std::max(ax, ay)) * (0.25 + 0.75 * unit(rng));
    const double lx = dt / g.dx(), ly = dt / g.dy();
    const EdgeFluxes low = first_order_fluxes_potential(phi, rho);
    const EdgeFluxes high = random_fluxes(g, rng, 1.0 + 10.0 * unit(rng));
    const LimiterResult r = limiter_thetas(rho, low, high, lx, ly, b);
    EXPECT_EQ(r.report.clamped_nodes, 0u);
    const ScalarField next = apply_limited_update(rho, low, high, r.theta, lx, ly, &b);
    if (r.report.theta_min < 1.0) ++limited;
    ASSERT_GE(next.min(), -1e-15) << "trial " << trial;
    ASSERT_LE(next.max(), 1.0 + 1e-15) << "trial " << trial;
    for (double t : r.theta.x.values()) ASSERT_TRUE(t >= 0.0 && t <= 1.0);
  }
  EXPECT_GT(limited, 9000);
}

TEST(LimitedUpdate, InactiveBoundsGiveUnlimitedUpdate) {
  const Grid2D g = make_grid(0, 1, 0, 1, 10, 8);
  std::mt19937 rng(13);
  const ScalarField rho = random_field(g, rng, 0.4, 0.6);
  const EdgeFluxes low = first_order_fluxes_potential(random_field(g, rng, -0.1, 0.1), rho);
  const EdgeFluxes high = random_fluxes(g, rng, 0.05);
  const Bounds wide{-100.0, 100.0};
  const LimiterResult r = limiter_thetas(rho, low, high, 0.1, 0.1, wide);
  for (double t : r.theta.x.values()) EXPECT_EQ(t, 1.0);
  for (double t : r.theta.y.values()) EXPECT_EQ(t, 1.0);
  EXPECT_EQ(max_abs_diff(apply_limited_update(rho, low, high, r.theta, 0.1, 0.1, &wide),
                         flux_difference_update(rho, high, 0.1, 0.1)),
            0.0);
}

TEST(LimitedUpdate, HardFailureNamesNode) {
  const Grid2D g = make_grid(0, 1, 0, 1, 8, 8);
  const ScalarField rho(g, 0.5);
  const EdgeFluxes low(g);
  EdgeFluxes high(g);
  high.x(2, 5) = 10.0;
  const Bounds b{0.0, 1.0};
  try {
    apply_limited_update(rho, low, high, EdgeFluxes(g, 1.0), 0.5, 0.5, &b);
    FAIL() << "expected NumericalFailure";
  } catch (const NumericalFailure& e) {
    EXPECT_NE(std::string(e.what()).find("(2, 5)"), std::string::npos) << e.what();
  }
}

TEST(LimiterReport, CountsFirstOrderExcursions) {
  // A first-order step far beyond the monotone limit leaves the bounds; the
  // report records it and the limiter falls back to the first-order value.
  const Grid2D g = make_grid(0, 1, 0, 1, 8, 8);
  ScalarField rho(g, 0.0);
  rho(4, 4) = 1.0;
  const VelocityField u(ScalarField(g, 1.0), ScalarField(g, 0.0));
  const EdgeFluxes low = first_order_fluxes_lf(u, rho);
  const LimiterResult r = limiter_thetas(rho, low, low, 2.0, 0.0, {0.0, 1.0});
  EXPECT_GT(r.report.clamped_nodes, 0u);
  EXPECT_NEAR(r.report.max_clamp, 1.0, 1e-15);
}

TEST(Bounds, Validation) {
  EXPECT_THROW((Bounds{1.0, 0.0}).validate(), ConfigError);
  EXPECT_NO_THROW((Bounds{-1.0, 1.0}).validate());
}
