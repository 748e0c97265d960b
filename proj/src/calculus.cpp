#include "fbe/calculus.hpp"

#include <numbers>

namespace fbe {

namespace {

void maybe_dealias(const Discretization& disc, VolumeField& f, Dealias mode) {
  if (mode == Dealias::yes) disc.dealias(f);
}

double binomial_sum_weight(double k1sq, double k2sq, int m) {
  // sum over a + b <= m of k1^{2a} k2^{2b}
  double total = 0.0;
  double pa = 1.0;
  for (int a = 0; a <= m; ++a) {
    double pb = 1.0;
    for (int b = 0; a + b <= m; ++b) {
      total += pa * pb;
      pb *= k2sq;
    }
    pa *= k1sq;
  }
  return total;
}

}  // namespace

VectorField grad_phi_from_flat(const Discretization& disc, const VectorField& flat, const FlattenedGeometry& geo,
                               Dealias mode) {
  const std::size_t n = flat[0].size();
  VectorField out{VolumeField(n), VolumeField(n), VolumeField(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double inv = 1.0 / geo.d3phi[i];
    const double f3 = flat[2][i] * inv;
    out[0][i] = flat[0][i] - geo.d1phi[i] * f3;
    out[1][i] = flat[1][i] - geo.d2phi[i] * f3;
    out[2][i] = f3;
  }
  for (auto& c : out) maybe_dealias(disc, c, mode);
  return out;
}

VectorField grad_phi(const Discretization& disc, const VolumeField& f, const FlattenedGeometry& geo, Dealias mode) {
  disc.check(f);
  return grad_phi_from_flat(disc, disc.gradient(f), geo, mode);
}

VolumeField div_phi(const Discretization& disc, const VectorField& X, const FlattenedGeometry& geo, Dealias mode) {
  for (const auto& c : X) disc.check(c);
  auto d1 = disc.d1(X[0]);
  auto d2 = disc.d2(X[1]);
  auto z1 = disc.d3(X[0]);
  auto z2 = disc.d3(X[1]);
  auto z3 = disc.d3(X[2]);
  VolumeField out(X[0].size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double inv = 1.0 / geo.d3phi[i];
    out[i] = d1[i] + d2[i] + (z3[i] - geo.d1phi[i] * z1[i] - geo.d2phi[i] * z2[i]) * inv;
  }
  maybe_dealias(disc, out, mode);
  return out;
}

VectorField curl_phi(const Discretization& disc, const VectorField& X, const FlattenedGeometry& geo, Dealias mode) {
  std::array<VectorField, 3> g;
  for (int c = 0; c < 3; ++c) g[c] = grad_phi(disc, X[c], geo, Dealias::no);
  VectorField out{g[2][1] - g[1][2], g[0][2] - g[2][0], g[1][0] - g[0][1]};
  for (auto& c : out) maybe_dealias(disc, c, mode);
  return out;
}

VolumeField material_derivative(const Discretization& disc, const VolumeField& f, const VolumeField& dtf,
                                const VectorField& v, const FlattenedGeometry& geo, Dealias mode) {
  disc.check(f);
  disc.check(dtf);
  auto g = disc.gradient(f);
  VolumeField out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double vN = -v[0][i] * geo.d1phi[i] - v[1][i] * geo.d2phi[i] + v[2][i];
    out[i] = dtf[i] + v[0][i] * g[0][i] + v[1][i] * g[1][i] + (vN - geo.dtphi[i]) / geo.d3phi[i] * g[2][i];
  }
  maybe_dealias(disc, out, mode);
  return out;
}

SurfaceField mean_curvature(const Discretization& disc, const SurfaceField& psi) {
  disc.check(psi);
  auto g = disc.horizontal_gradient(psi);
  SurfaceField a(psi.size()), b(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double inv = 1.0 / std::sqrt(1.0 + g[0][i] * g[0][i] + g[1][i] * g[1][i]);
    a[i] = g[0][i] * inv;
    b[i] = g[1][i] * inv;
  }
  SurfaceField h = disc.d1(a) + disc.d2(b);
  h *= -1.0;
  disc.dealias(h);
  return h;
}

SurfaceField multiplier(const Discretization& disc, const SurfaceField& f, Symbol symbol) {
  auto c = disc.forward(f);
  for (int i2 = 0; i2 < disc.ny(); ++i2)
    for (int i1 = 0; i1 < disc.nx_half(); ++i1) {
      const double k1 = disc.k1(i1), k2 = disc.k2(i2);
      const double m = 1.0 + k1 * k1 + k2 * k2;
      double factor = m;
      if (symbol == Symbol::one_minus_lap_sq) factor = m * m;
      if (symbol == Symbol::bracket) factor = std::sqrt(m);
      c[i1 + static_cast<std::size_t>(disc.nx_half()) * i2] *= factor;
    }
  return disc.inverse_surface(c);
}

double sobolev_norm_surface(const Discretization& disc, const SurfaceField& f, double s) {
  if (!(s >= 0.0)) throw ConfigError("s", "Sobolev index must be >= 0");
  auto c = disc.forward(f);
  double total = 0.0;
  for (int i2 = 0; i2 < disc.ny(); ++i2)
    for (int i1 = 0; i1 < disc.nx_half(); ++i1) {
      const double mult = (i1 == 0 || 2 * i1 == disc.nx()) ? 1.0 : 2.0;
      const double k1 = disc.k1(i1), k2 = disc.k2(i2);
      total += mult * std::pow(1.0 + k1 * k1 + k2 * k2, s) * std::norm(c[i1 + static_cast<std::size_t>(disc.nx_half()) * i2]);
    }
  return 2.0 * std::numbers::pi * std::sqrt(total);
}

double sobolev_norm_interior(const Discretization& disc, const VolumeField& f, int s) {
  if (s < 0) throw ConfigError("s", "Sobolev index must be >= 0");
  disc.check(f);
  const auto& w = disc.vertical_weights();
  const std::size_t h = disc.half_size();
  double total = 0.0;
  VolumeField g = f;
  for (int c = 0; c <= s; ++c) {
    if (c > 0) g = disc.d3(g);
    auto spec = disc.forward(g);
    for (int i2 = 0; i2 < disc.ny(); ++i2)
      for (int i1 = 0; i1 < disc.nx_half(); ++i1) {
        const double mult = (i1 == 0 || 2 * i1 == disc.nx()) ? 1.0 : 2.0;
        const double k1 = disc.k1_deriv(i1), k2 = disc.k2_deriv(i2);
        const double weight = binomial_sum_weight(k1 * k1, k2 * k2, s - c);
        double vert = 0.0;
        for (int k = 0; k < disc.nz(); ++k)
          vert += w[k] * std::norm(spec[k * h + i1 + static_cast<std::size_t>(disc.nx_half()) * i2]);
        total += mult * weight * vert;
      }
  }
  return 2.0 * std::numbers::pi * std::sqrt(total);
}

double dot_max_abs(const VectorField& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a[0].size(); ++i)
    m = std::max(m, std::sqrt(a[0][i] * a[0][i] + a[1][i] * a[1][i] + a[2][i] * a[2][i]));
  return m;
}

}  // namespace fbe
