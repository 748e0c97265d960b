#include "fbe/geometry.hpp"

#include <algorithm>
#include <sstream>

namespace fbe {

namespace {

// derivatives of 10 s^3 - 15 s^4 + 6 s^5 with respect to s
double smoothstep(double s, int n) {
  switch (n) {
    case 0: return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
    case 1: return 30.0 * s * s * (1.0 - s) * (1.0 - s);
    case 2: return 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
    case 3: return 60.0 - 360.0 * s + 360.0 * s * s;
    case 4: return -360.0 + 720.0 * s;
    case 5: return 720.0;
    default: return 0.0;
  }
}

}  // namespace

Cutoff::Cutoff(double b, double delta0) : b_(b), delta0_(delta0) {
  if (!(b > 0.0)) throw ConfigError("b", "b must be > 0");
  if (!(delta0 >= 0.0) || !(delta0 < 0.5 * b)) throw ConfigError("delta0", "delta0 must lie in [0, b/2)");
}

double Cutoff::derivative(double z, int n) const {
  const double L = ramp_length();
  const double s = (z + b_ - delta0_) / L;
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return n == 0 ? 1.0 : 0.0;
  return smoothstep(s, n) / std::pow(L, n);
}

std::vector<double> Cutoff::profile(const Grid& g, int n) const {
  std::vector<double> p(g.nz);
  for (int k = 0; k < g.nz; ++k) p[k] = derivative(g.z[k], n);
  return p;
}

double cutoff_chi(double z, double b, double delta0, double slope_bound) {
  Cutoff chi(b, delta0);
  if (!(slope_bound > 0.0)) throw ConfigError("slope_bound", "slope bound must be > 0");
  if (chi.max_slope() > slope_bound) {
    std::ostringstream os;
    os << "slope bound " << slope_bound << " infeasible: ramp of length " << chi.ramp_length()
       << " has max slope " << chi.max_slope() << " (no cutoff on [-b,0] can go below " << 1.0 / b << ")";
    throw ConfigError("slope_bound", os.str());
  }
  if (z < -b || z > 0.0) throw ConfigError("z", "z must lie in [-b, 0]");
  return chi.value(z);
}

SurfaceNormals surface_normals(const Discretization& disc, const SurfaceField& psi) {
  disc.check(psi);
  auto g = disc.horizontal_gradient(psi);
  SurfaceNormals out;
  const std::size_t n = psi.size();
  out.N = {-1.0 * g[0], -1.0 * g[1], SurfaceField(n, 1.0)};
  out.norm = SurfaceField(n);
  for (std::size_t i = 0; i < n; ++i) out.norm[i] = std::sqrt(1.0 + g[0][i] * g[0][i] + g[1][i] * g[1][i]);
  return out;
}

VectorField FlattenedGeometry::interior_normal() const {
  return {-1.0 * d1phi, -1.0 * d2phi, VolumeField(phi.size(), 1.0)};
}

FlattenedGeometry build_geometry(const Discretization& disc, const Cutoff& chi, const SurfaceField& psi,
                                 const SurfaceField& dtpsi, GeometryOptions opt) {
  disc.check(psi);
  disc.check(dtpsi);
  const Grid& g = disc.grid();
  if (std::abs(chi.b() - g.b) > 1e-14 * g.b) throw ConfigError("b", "cutoff depth differs from grid depth");
  if (!psi.all_finite() || !dtpsi.all_finite())
    throw DiffeomorphismBreakdown("non-finite surface elevation", std::nan(""));
  const double amp = psi.max_abs();
  if (amp >= 0.5 * g.b) {
    std::ostringstream os;
    os << "|psi|_inf = " << amp << " reached b/2";
    throw DiffeomorphismBreakdown(os.str(), 1.0 - chi.max_slope() * amp);
  }

  FlattenedGeometry geo;
  geo.delta0 = chi.delta0();
  geo.psi = psi;
  geo.dtpsi = dtpsi;
  geo.dpsi = disc.horizontal_gradient(psi);
  geo.ddtpsi = disc.horizontal_gradient(dtpsi);
  geo.surface.N = {-1.0 * geo.dpsi[0], -1.0 * geo.dpsi[1], SurfaceField(psi.size(), 1.0)};
  geo.surface.norm = SurfaceField(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i)
    geo.surface.norm[i] = std::sqrt(1.0 + geo.dpsi[0][i] * geo.dpsi[0][i] + geo.dpsi[1][i] * geo.dpsi[1][i]);

  auto p0 = chi.profile(g, 0);
  auto p1 = chi.profile(g, 1);
  const std::size_t S = g.surface_size();
  geo.phi = extend(disc, psi, p0);
  for (int k = 0; k < g.nz; ++k)
    for (std::size_t i = 0; i < S; ++i) geo.phi[k * S + i] += g.z[k];
  geo.d1phi = extend(disc, geo.dpsi[0], p0);
  geo.d2phi = extend(disc, geo.dpsi[1], p0);
  geo.d3phi = extend(disc, psi, p1);
  geo.d3phi += 1.0;
  geo.dtphi = extend(disc, dtpsi, p0);
  geo.dt_d1phi = extend(disc, geo.ddtpsi[0], p0);
  geo.dt_d2phi = extend(disc, geo.ddtpsi[1], p0);
  geo.dt_d3phi = extend(disc, dtpsi, p1);
  // endpoint rows exact
  set_level(disc, geo.phi, g.nz - 1, psi);
  set_level(disc, geo.phi, 0, SurfaceField(S, -g.b));

  geo.c0 = geo.d3phi.min();
  if (!(geo.c0 > opt.floor)) {
    std::ostringstream os;
    os << "min d3phi = " << geo.c0 << " fell to the floor " << opt.floor;
    throw DiffeomorphismBreakdown(os.str(), geo.c0);
  }
  return geo;
}

FlattenedGeometry flat_geometry(const Discretization& disc, const Cutoff& chi) {
  return build_geometry(disc, chi, disc.zeros_surface(), disc.zeros_surface());
}

}  // namespace fbe
