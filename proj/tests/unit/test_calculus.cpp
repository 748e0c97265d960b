#include <gtest/gtest.h>

#include <numbers>

#include "fbe/calculus.hpp"
#include "support.hpp"

using namespace fbe;
using std::numbers::pi;

namespace {

double max_abs(const VectorField& a, const VectorField& b) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c) m = std::max(m, (a[c] - b[c]).max_abs());
  return m;
}

struct Curved {
  Discretization d;
  Cutoff chi;
  FlattenedGeometry geo;
  Curved(int n, int nz, double amp, std::uint64_t seed)
      : d(make_grid(n, n, nz, 1.0)), chi(1.0, 0.0) {
    test::Gen gen(seed);
    geo = build_geometry(d, chi, gen.surface(d.grid(), 3, amp), gen.surface(d.grid(), 3, amp));
  }
};

}  // namespace

TEST(FlatCalculus, GradientExamples) {
  Discretization d(make_grid(8, 8, 9, 1.0));
  const auto geo = flat_geometry(d, Cutoff(1.0, 0.0));
  const auto z = test::sample(d.grid(), [](double, double, double z) { return z; });
  auto g = grad_phi(d, z, geo);
  EXPECT_LT(g[0].max_abs() + g[1].max_abs(), 1e-14);
  EXPECT_LT((g[2] - VolumeField(z.size(), 1.0)).max_abs(), 1e-13);
  const auto s = test::sample(d.grid(), [](double x, double, double) { return std::sin(x); });
  g = grad_phi(d, s, geo);
  EXPECT_LT((g[0] - test::sample(d.grid(), [](double x, double, double) { return std::cos(x); })).max_abs(), 1e-14);
  EXPECT_LT(g[1].max_abs() + g[2].max_abs(), 1e-13);
}

TEST(FlatCalculus, DivCurlExamples) {
  Discretization d(make_grid(8, 8, 9, 1.0));
  const auto geo = flat_geometry(d, Cutoff(1.0, 0.0));
  const auto& g = d.grid();
  VectorField X{test::sample(g, [](double, double, double z) { return z; }), d.zeros_volume(), d.zeros_volume()};
  EXPECT_LT(div_phi(d, X, geo).max_abs(), 1e-13);
  auto c = curl_phi(d, X, geo);
  EXPECT_LT(c[0].max_abs() + c[2].max_abs(), 1e-13);
  EXPECT_LT((c[1] - VolumeField(c[1].size(), 1.0)).max_abs(), 1e-13);
  VectorField Y{d.zeros_volume(), d.zeros_volume(), test::sample(g, [](double x, double, double) { return std::sin(x); })};
  c = curl_phi(d, Y, geo);
  EXPECT_LT((c[1] + test::sample(g, [](double x, double, double) { return std::cos(x); })).max_abs(), 1e-13);
}

TEST(FlatCalculus, ReductionToFlatOperators) {
  Discretization d(make_grid(16, 16, 13, 1.0));
  const auto geo = flat_geometry(d, Cutoff(1.0, 0.0));
  test::Gen gen(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = gen.volume(d.grid(), 5, 6);
    VectorField X{gen.volume(d.grid(), 5, 6), gen.volume(d.grid(), 5, 6), gen.volume(d.grid(), 5, 6)};
    EXPECT_LT(max_abs(grad_phi(d, f, geo, Dealias::no), d.gradient(f)), 1e-12);
    const VolumeField div = d.d1(X[0]) + d.d2(X[1]) + d.d3(X[2]);
    EXPECT_LT((div_phi(d, X, geo, Dealias::no) - div).max_abs(), 1e-12);
    const VectorField curl{d.d2(X[2]) - d.d3(X[1]), d.d3(X[0]) - d.d1(X[2]), d.d1(X[1]) - d.d2(X[0])};
    EXPECT_LT(max_abs(curl_phi(d, X, geo, Dealias::no), curl), 1e-12);
  }
}

TEST(FlatCalculus, ChainRuleOracle) {
  Discretization d(make_grid(32, 32, 25, 1.0));
  const Cutoff chi(1.0, 0.0);
  const auto& g = d.grid();
  const auto psi = test::sample_surface(g, [](double x, double) { return 0.05 * std::sin(x); });
  const auto geo = build_geometry(d, chi, psi, d.zeros_surface());
  const auto f = test::sample(g, [](double x, double, double z) { return std::sin(x) * std::cos(pi * z); });
  const auto got = grad_phi(d, f, geo);
  VectorField want = d.zeros_vector();
  for (int k = 0; k < g.nz; ++k) {
    const double z = g.z[k], c = chi.value(z), cp = chi.slope(z);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double x = g.x1[i];
        const double f1 = std::cos(x) * std::cos(pi * z), f3 = -pi * std::sin(x) * std::sin(pi * z);
        const double p1 = c * 0.05 * std::cos(x), p3 = 1.0 + cp * 0.05 * std::sin(x);
        const std::size_t id = g.index(i, j, k);
        want[0][id] = f1 - p1 / p3 * f3;
        want[1][id] = 0.0;
        want[2][id] = f3 / p3;
      }
  }
  double scale = 0.0;
  for (auto& w : want) scale = std::max(scale, w.max_abs());
  EXPECT_LT(max_abs(got, want) / scale, 1e-8);
}

TEST(FlatCalculus, CurlOfGradientVanishes) {
  // 1/d3phi is not band-limited; 48 points resolve it to round-off
  Curved c(48, 33, 0.05, 32);
  test::Gen gen(33);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = gen.volume(c.d.grid(), 3, 4);
    const auto curl = curl_phi(c.d, grad_phi(c.d, f, c.geo, Dealias::no), c.geo, Dealias::no);
    EXPECT_LT(std::max({curl[0].max_abs(), curl[1].max_abs(), curl[2].max_abs()}), 1e-8);
  }
}

TEST(FlatCalculus, DivOfCurlVanishes) {
  Curved c(32, 21, 0.05, 34);
  test::Gen gen(35);
  for (int trial = 0; trial < 5; ++trial) {
    VectorField X{gen.volume(c.d.grid(), 3, 4), gen.volume(c.d.grid(), 3, 4), gen.volume(c.d.grid(), 3, 4)};
    EXPECT_LT(div_phi(c.d, curl_phi(c.d, X, c.geo, Dealias::no), c.geo, Dealias::no).max_abs(), 1e-8);
  }
}

TEST(FlatCalculus, ProductRule) {
  Curved c(32, 21, 0.05, 36);
  test::Gen gen(37);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = gen.volume(c.d.grid(), 3, 3);
    VectorField X{gen.volume(c.d.grid(), 3, 3), gen.volume(c.d.grid(), 3, 3), gen.volume(c.d.grid(), 3, 3)};
    VectorField fX{f * X[0], f * X[1], f * X[2]};
    const auto lhs = div_phi(c.d, fX, c.geo, Dealias::no);
    const auto gf = grad_phi(c.d, f, c.geo, Dealias::no);
    const VolumeField rhs = f * div_phi(c.d, X, c.geo, Dealias::no) + gf[0] * X[0] + gf[1] * X[1] + gf[2] * X[2];
    EXPECT_LT((lhs - rhs).max_abs(), 1e-8);
  }
}

TEST(FlatCalculus, MaterialDerivativeExamples) {
  Discretization d(make_grid(8, 8, 9, 1.0));
  const auto geo = flat_geometry(d, Cutoff(1.0, 0.0));
  const auto& g = d.grid();
  const auto f = test::sample(g, [](double x, double, double) { return std::sin(x); });
  VectorField v{VolumeField(f.size(), 1.0), d.zeros_volume(), d.zeros_volume()};
  const auto cosx = test::sample(g, [](double x, double, double) { return std::cos(x); });
  EXPECT_LT((material_derivative(d, f, d.zeros_volume(), v, geo) - cosx).max_abs(), 1e-13);
  test::Gen gen(38);
  const auto dtf = gen.volume(g, 2, 3);
  EXPECT_LT((material_derivative(d, gen.volume(g, 2, 3), dtf, d.zeros_vector(), geo, Dealias::no) - dtf).max_abs(),
            1e-15);
}

TEST(FlatCalculus, MaterialDerivativeComposedForm) {
  Curved c(16, 17, 0.1, 39);
  test::Gen gen(40);
  const auto& g = c.d.grid();
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = gen.volume(g, 3, 4), dtf = gen.volume(g, 3, 4);
    VectorField v{gen.volume(g, 3, 2), gen.volume(g, 3, 2), gen.volume(g, 3, 2)};
    const auto got = material_derivative(c.d, f, dtf, v, c.geo, Dealias::no);
    const auto gp = grad_phi(c.d, f, c.geo, Dealias::no);
    const auto d3 = c.d.d3(f);
    VolumeField want(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
      want[i] = dtf[i] - c.geo.dtphi[i] / c.geo.d3phi[i] * d3[i] + v[0][i] * gp[0][i] + v[1][i] * gp[1][i] +
                v[2][i] * gp[2][i];
    EXPECT_LT((got - want).max_abs(), 1e-10);
  }
}

TEST(MeanCurvature, ConstantsAndSine) {
  Discretization d(make_grid(16, 16, 9, 1.0));
  EXPECT_EQ(mean_curvature(d, d.zeros_surface()).max_abs(), 0.0);
  EXPECT_LT(mean_curvature(d, SurfaceField(d.grid().surface_size(), 0.3)).max_abs(), 1e-15);
  const auto psi = test::sample_surface(d.grid(), [](double x, double) { return 0.1 * std::sin(x); });
  const auto want = test::sample_surface(d.grid(), [](double x, double) {
    return 0.1 * std::sin(x) / std::pow(1.0 + 0.01 * std::cos(x) * std::cos(x), 1.5);
  });
  EXPECT_LT((mean_curvature(d, psi) - want).max_abs(), 1e-8);
}

TEST(Multiplier, SymbolExamples) {
  Discretization d(make_grid(8, 8, 9, 1.0));
  const auto& g = d.grid();
  const auto c1 = test::sample_surface(g, [](double x, double) { return std::cos(x); });
  EXPECT_LT((multiplier(d, c1, Symbol::bracket) - std::sqrt(2.0) * c1).max_abs(), 1e-14);
  const auto c11 = test::sample_surface(g, [](double x, double y) { return std::cos(x) * std::cos(y) - std::sin(x) * std::sin(y); });
  EXPECT_LT((multiplier(d, c11, Symbol::one_minus_lap_sq) - 9.0 * c11).max_abs(), 1e-13);
  const SurfaceField one(g.surface_size(), 2.5);
  EXPECT_LT((multiplier(d, one, Symbol::one_minus_lap) - one).max_abs(), 1e-15);
}

TEST(Multiplier, BracketSquaredIsOneMinusLaplacian) {
  Discretization d(make_grid(16, 16, 9, 1.0));
  test::Gen gen(41);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = gen.surface(d.grid(), 5, 1.0);
    const auto a = multiplier(d, multiplier(d, f, Symbol::bracket), Symbol::bracket);
    EXPECT_LT((a - multiplier(d, f, Symbol::one_minus_lap)).max_abs(), 1e-12);
  }
}

TEST(SobolevNorms, SurfaceExamples) {
  Discretization d(make_grid(8, 8, 9, 1.0));
  const auto s = test::sample_surface(d.grid(), [](double x, double) { return std::sin(x); });
  EXPECT_NEAR(sobolev_norm_surface(d, s, 0.0), pi * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(sobolev_norm_surface(d, s, 1.0), 2.0 * pi, 1e-12);
}

TEST(SobolevNorms, InteriorExample) {
  Discretization d(make_grid(8, 8, 9, 1.0));
  const auto f = test::sample(d.grid(), [](double x, double, double z) { return (1.0 + z) * std::sin(x); });
  // ||f||^2 + ||d1 f||^2 + ||d3 f||^2 = 2 pi^2 (1/3 + 1/3 + 1)
  EXPECT_NEAR(sobolev_norm_interior(d, f, 1), std::sqrt(2 * pi * pi * 5.0 / 3.0), 1e-8);
}

TEST(SobolevNorms, MonotoneInOrder) {
  Discretization d(make_grid(16, 16, 9, 1.0));
  test::Gen gen(42);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = gen.surface(d.grid(), 6, gen.uniform(0.1, 2.0));
    double prev = 0.0;
    for (double s = 0.0; s <= 5.0; s += 0.5) {
      const double n = sobolev_norm_surface(d, f, s);
      EXPECT_GE(n, prev);
      prev = n;
    }
  }
}
