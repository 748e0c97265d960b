#include <gtest/gtest.h>

#include "fbe/geometry.hpp"
#include "support.hpp"

using namespace fbe;

TEST(Cutoff, EndpointsAndPlateau) {
  const Cutoff smooth(1.0, 0.0);
  EXPECT_EQ(smooth.value(-1.0), 0.0);
  EXPECT_EQ(smooth.value(0.0), 1.0);
  const Cutoff plateau(1.0, 0.1);
  EXPECT_EQ(plateau.value(-0.05), 1.0);
  EXPECT_EQ(plateau.value(-1.0), 0.0);
  EXPECT_EQ(plateau.value(-0.95), 0.0);
  EXPECT_NEAR(cutoff_chi(-0.05, 1.0, 0.1, 2.5), 1.0, 0.0);
  EXPECT_EQ(cutoff_chi(-1.0, 1.0, 0.1, 2.5), 0.0);
}

TEST(Cutoff, DenseSlopeWithinStatedMax) {
  for (double d0 : {0.0, 0.1, 0.3}) {
    const Cutoff chi(2.0, d0);
    double m = 0.0;
    for (int i = 0; i <= 20000; ++i) m = std::max(m, std::abs(chi.slope(-2.0 + 2.0 * i / 20000)));
    EXPECT_LE(m, chi.max_slope() + 1e-12);
    EXPECT_NEAR(m, chi.max_slope(), 1e-6);
  }
}

TEST(Cutoff, DerivativesMatchFiniteDifferences) {
  const Cutoff chi(1.0, 0.1);
  const double h = 1e-5;
  for (double z : {-0.8, -0.5, -0.3, -0.15}) {
    EXPECT_NEAR(chi.slope(z), (chi.value(z + h) - chi.value(z - h)) / (2 * h), 1e-8);
    EXPECT_NEAR(chi.curvature(z), (chi.slope(z + h) - chi.slope(z - h)) / (2 * h), 1e-6);
  }
}

TEST(Cutoff, InfeasibleSlopeBoundThrows) {
  // no cutoff from 0 to 1 over depth b has slope below 1/b
  EXPECT_THROW(cutoff_chi(-0.5, 1.0, 0.0, 0.99), ConfigError);
  EXPECT_THROW(cutoff_chi(-0.5, 1.0, 0.0, 1.0 / (1.0 + 1.0 / 3.0)), ConfigError);
  EXPECT_NO_THROW(cutoff_chi(-0.5, 1.0, 0.0, 15.0 / 8.0));
  EXPECT_EQ(minimal_feasible_slope(2.0), 0.5);
}

TEST(Geometry, FlatSurface) {
  Discretization d(make_grid(8, 8, 9, 1.0));
  const Cutoff chi(1.0, 0.0);
  const auto g = flat_geometry(d, chi);
  const Grid& gr = d.grid();
  for (int k = 0; k < gr.nz; ++k)
    for (std::size_t i = 0; i < gr.surface_size(); ++i) {
      EXPECT_EQ(g.phi[k * gr.surface_size() + i], gr.z[k]);
      EXPECT_EQ(g.d3phi[k * gr.surface_size() + i], 1.0);
    }
  EXPECT_EQ(g.surface.N[0].max_abs(), 0.0);
  EXPECT_EQ(g.surface.N[2].min(), 1.0);
  EXPECT_EQ(g.c0, 1.0);
}

TEST(Geometry, EndpointsAndJacobianIdentity) {
  Discretization d(make_grid(16, 16, 17, 1.0));
  const Cutoff chi(1.0, 0.0);
  test::Gen gen(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto psi = gen.surface(d.grid(), 4, 0.3);
    const auto g = build_geometry(d, chi, psi, d.zeros_surface());
    EXPECT_LT((level(d, g.phi, d.nz() - 1) - psi).max_abs(), 1e-15);
    EXPECT_LT((level(d, g.phi, 0) + SurfaceField(psi.size(), 1.0)).max_abs(), 1e-15);
    const auto slope = chi.profile(d.grid(), 1);
    double bound_violation = 0.0;
    for (int k = 0; k < d.nz(); ++k) {
      const auto l = level(d, g.d3phi, k);
      for (std::size_t i = 0; i < l.size(); ++i) {
        EXPECT_NEAR(l[i], 1.0 + slope[k] * psi[i], 1e-14);
        bound_violation = std::max(bound_violation, (1.0 - chi.max_slope() * psi.max_abs()) - l[i]);
      }
    }
    EXPECT_LE(bound_violation, 1e-14);
    // N restricted to the top equals the surface normal
    const auto Nint = g.interior_normal();
    for (int c = 0; c < 3; ++c) EXPECT_LT((level(d, Nint[c], d.nz() - 1) - g.surface.N[c]).max_abs(), 1e-14);
  }
}

TEST(Geometry, BreakdownForLargeSurface) {
  Discretization d(make_grid(8, 8, 9, 1.0));
  const Cutoff chi(1.0, 0.0);
  const auto psi = test::sample_surface(d.grid(), [](double x, double) { return 0.6 * std::sin(x); });
  EXPECT_THROW(build_geometry(d, chi, psi, d.zeros_surface()), DiffeomorphismBreakdown);
}

TEST(SurfaceNormals, SineSurface) {
  Discretization d(make_grid(16, 16, 9, 1.0));
  const auto psi = test::sample_surface(d.grid(), [](double x, double) { return 0.1 * std::sin(x); });
  const auto n = surface_normals(d, psi);
  const auto expect = test::sample_surface(d.grid(), [](double x, double) { return -0.1 * std::cos(x); });
  EXPECT_LT((n.N[0] - expect).max_abs(), 1e-14);
  EXPECT_LT(n.N[1].max_abs(), 1e-14);
  EXPECT_EQ(n.N[2].min(), 1.0);
}

TEST(SurfaceNormals, NormIdentityRandom) {
  Discretization d(make_grid(16, 16, 9, 1.0));
  test::Gen gen(22);
  for (int trial = 0; trial < 20; ++trial) {
    const auto psi = gen.surface(d.grid(), 5, 0.4);
    const auto n = surface_normals(d, psi);
    const auto gp = d.horizontal_gradient(psi);
    for (std::size_t i = 0; i < psi.size(); ++i)
      EXPECT_NEAR(n.norm[i] * n.norm[i], 1.0 + gp[0][i] * gp[0][i] + gp[1][i] * gp[1][i], 1e-12);
  }
}
