#include <gtest/gtest.h>

#include "fbe/evolution.hpp"
#include "support.hpp"

using namespace fbe;

namespace {

InitialData flat_elastic(double a) {
  InitialData d;
  d.elastic[0].c1 = a;
  d.elastic[1].c2 = a;
  return d;
}

}  // namespace

TEST(InitialData, FlatEquilibriumIsConstraintFree) {
  Model m(make_grid(16, 16, 17, 1.0), Params{});
  const State s = build_initial_data(m, flat_elastic(0.7));
  const auto r = constraint_report(m.disc(), s, m.geometry(s.psi, s.dtpsi));
  EXPECT_LE(r.max(), 1e-14);
  EXPECT_EQ(s.psi.max_abs(), 0.0);
  EXPECT_LE(s.q.max_abs(), 1e-12);
}

TEST(InitialData, CurvedSurfaceWithStreamFunctionTensor) {
  Model m(make_grid(16, 16, 17, 1.0), Params{});
  InitialData in;
  in.psi = {{1, 0, 0.0, 0.05}};
  in.elastic[0].c1 = 0.5;
  in.elastic[1].c2 = 0.5;
  in.elastic[2].h = {{1, 1, 0.1, 0.0}};
  const State s = build_initial_data(m, in);
  const auto r = constraint_report(m.disc(), s, m.geometry(s.psi, s.dtpsi));
  EXPECT_LE(r.max(), 1e-8);
  EXPECT_LE(s.v[0].max_abs(), 0.0);
}

TEST(InitialData, RejectsLargeSurface) {
  Model m(make_grid(16, 16, 17, 1.0), Params{});
  InitialData in;
  in.psi = {{1, 0, 0.4, 0.0}};
  EXPECT_THROW(build_initial_data(m, in), ConfigError);
  InitialData bad;
  bad.potential = {{0, 0, 1.0}};
  EXPECT_THROW(build_initial_data(m, bad), ConfigError);
}

TEST(InitialData, KinematicConditionHolds) {
  Model m(make_grid(16, 16, 17, 1.0), Params{});
  const State s = build_initial_data(m, test::small_wave());
  const auto geo = m.geometry(s.psi, s.dtpsi);
  const int top = m.disc().nz() - 1;
  SurfaceField vN(s.psi.size());
  for (int c = 0; c < 3; ++c) vN += level(m.disc(), s.v[c], top) * geo.surface.N[c];
  // the rate is the 2/3-dealiased v.N
  EXPECT_LT((vN - s.dtpsi).max_abs(), 1e-9);
  m.disc().dealias(vN);
  EXPECT_LT((vN - s.dtpsi).max_abs(), 1e-14);
}

TEST(InitialData, PotentialPullbackOnFlatSurface) {
  Model m(make_grid(16, 16, 17, 1.0), Params{});
  InitialData in;
  in.potential = {{2, 1, 0.03}};
  const State s = build_kinematic_data(m.disc(), m.chi(), in);
  const double K = std::sqrt(5.0), cb = std::cosh(K);
  const auto& g = m.disc().grid();
  const auto u1 = test::sample(g, [&](double x, double y, double z) {
    return -0.03 * 2 * std::cosh(K * (z + 1)) / cb * std::sin(2 * x + y);
  });
  const auto u3 = test::sample(g, [&](double x, double y, double z) {
    return 0.03 * K * std::sinh(K * (z + 1)) / cb * std::cos(2 * x + y);
  });
  EXPECT_LT((s.v[0] - u1).max_abs(), 1e-15);
  EXPECT_LT((s.v[2] - u3).max_abs(), 1e-15);
}

TEST(InitialData, RandomSmallDataPassConstraints) {
  // k = 2 surface modes need 24 points for the 1e-8 constraint budget
  test::Gen gen(51);
  Model m(make_grid(24, 24, 25, 1.0), Params{});
  for (int trial = 0; trial < 8; ++trial) {
    InitialData in;
    in.psi = {{gen.integer(0, 2), gen.integer(-1, 1), gen.uniform(-0.02, 0.02), gen.uniform(-0.02, 0.02)}};
    in.potential = {{gen.integer(1, 3), gen.integer(-2, 2), gen.uniform(-0.05, 0.05)}};
    for (int j = 0; j < 2; ++j) {
      in.elastic[j].c1 = gen.uniform(-0.5, 0.5);
      in.elastic[j].c2 = gen.uniform(-0.5, 0.5);
    }
    in.elastic[2].h = {{gen.integer(0, 2), gen.integer(-2, 2), gen.uniform(-0.05, 0.05), 0.0}};
    const State s = build_initial_data(m, in);
    EXPECT_LE(constraint_report(m.disc(), s, m.geometry(s.psi, s.dtpsi)).max(), 1e-8) << "trial " << trial;
  }
}

TEST(ConstraintReport, DetectsBrokenTrace) {
  Model m(make_grid(16, 16, 17, 1.0), Params{});
  const auto& d = m.disc();
  State s = zero_state(d);
  s.psi = test::sample_surface(d.grid(), [](double x, double) { return 0.1 * std::sin(x); });
  const auto geo = m.geometry(s.psi, d.zeros_surface());
  // F1 = N everywhere on the top row: F1 . N = |N|^2
  s.F[0] = geo.interior_normal();
  const auto r = constraint_report(d, s, geo);
  EXPECT_GE(r.r_FN, 1.0);
  EXPECT_NEAR(r.r_FN, geo.surface.norm.max_abs() * geo.surface.norm.max_abs(), 1e-14);
}

TEST(ConstraintReport, PropagatesOverHundredSteps) {
  // at 16 points the spatial defect alone exceeds 1e-6 by t = 0.2
  Model m(make_grid(24, 24, 25, 1.0), Params{});
  State s = build_initial_data(m, test::small_wave());
  Stepper st(m);
  for (int n = 0; n < 100; ++n) s = st.step(s, 2e-3);
  const auto r = constraint_report(m.disc(), s, m.geometry(s.psi, s.dtpsi));
  EXPECT_LE(r.r_FN, 1e-6);
  EXPECT_LE(r.r_divF, 1e-6);
}
