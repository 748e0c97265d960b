#include <gtest/gtest.h>

#include <fstream>

#include "fbe/diagnostics.hpp"
#include "fbe/galerkin.hpp"
#include "support.hpp"

using namespace fbe;

namespace {

double state_distance(const State& a, const State& b) {
  double m = (a.psi - b.psi).max_abs();
  for (int c = 0; c < 3; ++c) m = std::max(m, (a.v[c] - b.v[c]).max_abs());
  for (int j = 0; j < 3; ++j)
    for (int c = 0; c < 3; ++c) m = std::max(m, (a.F[j][c] - b.F[j][c]).max_abs());
  return m;
}

}  // namespace

TEST(Picard, ZeroDataGivesZeroIterates) {
  Model m(make_grid(16, 16, 17, 1.0), Params{});
  const auto r = picard_iterate(m, zero_state(m.disc()), {4, 0.02, 0.005});
  for (double e : r.E3) EXPECT_EQ(e, 0.0);
}

TEST(Picard, ContractsOnShortInterval) {
  Model m(make_grid(16, 16, 17, 1.0), Params{}, PressureOptions{1e-12, 500});
  const State s = build_initial_data(m, test::small_wave());
  const auto r = picard_iterate(m, s, {8, 0.1, 0.005});
  ASSERT_EQ(r.E3.size(), 8u);
  for (int n = 3; n < 8; ++n) EXPECT_TRUE(r.contracting(n)) << "n = " << n << " rho = " << r.rho[n];
  EXPECT_TRUE(std::isnan(r.rho[0]));
  EXPECT_TRUE(std::isnan(r.rho[1]));

  const auto h = picard_iterate(m, s, {6, 0.05, 0.005});
  for (int n = 3; n <= 4; ++n) EXPECT_LT(h.rho[n], r.rho[n]) << "n = " << n;
}

TEST(Picard, LimitIsNonlinearSolution) {
  // the boundary defect is the scheme's own spatial error, small from 24 points on
  Model m(make_grid(24, 24, 25, 1.0), Params{}, PressureOptions{1e-11, 500});
  const State s = build_initial_data(m, test::small_wave());
  const auto r = picard_iterate(m, s, {7, 0.05, 0.0025});
  const int n = static_cast<int>(r.finals.size()) - 1;
  EXPECT_LE(state_distance(r.finals[n], r.finals[n - 1]), 1e-9);
  EXPECT_LE(r.boundary_defect, 1e-8);

  Stepper st(m);
  State x = s;
  for (int i = 0; i < r.steps; ++i) x = st.step(x, r.dt);
  EXPECT_LE(state_distance(r.finals[n], x), 1e-8);
}

TEST(Trajectory, ExactAtNodes) {
  Model m(make_grid(16, 16, 17, 1.0), Params{}, PressureOptions{1e-12, 500});
  const State s = build_initial_data(m, test::small_wave());
  Stepper st(m);
  Trajectory tr;
  tr.dt = 0.01;
  State x = s;
  for (int i = 0; i < 4; ++i) {
    tr.states.push_back(x);
    tr.rates.push_back(st.tendency_at(x));
    x = st.step(x, tr.dt);
  }
  for (int i = 0; i < 4; ++i) {
    SurfaceField dpsi;
    const State y = tr.at(i * tr.dt, &dpsi);
    EXPECT_EQ(state_distance(y, tr.states[i]), 0.0);
    EXPECT_EQ((dpsi - tr.rates[i].dpsi).max_abs(), 0.0);
  }
  // midpoint within the Hermite interpolation error
  const State mid = tr.at(1.5 * tr.dt);
  const State ref = st.step(tr.states[1], 0.5 * tr.dt);
  EXPECT_LE(state_distance(mid, ref), 1e-6);
}

TEST(Picard, CsvHasOneRowPerIterate) {
  Model m(make_grid(16, 16, 17, 1.0), Params{});
  const State s = build_initial_data(m, test::small_wave());
  const auto r = picard_iterate(m, s, {4, 0.02, 0.005});
  const std::string path = ::testing::TempDir() + "picard_test.csv";
  write_picard_csv(path, r);
  std::ifstream in(path);
  std::string line;
  int rows = 0;
  std::getline(in, line);
  EXPECT_EQ(line, "n,E3,rho,contracting");
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
}
