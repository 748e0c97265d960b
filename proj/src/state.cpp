#include "fbe/state.hpp"

#include <sstream>

#include "fbe/calculus.hpp"
#include "fbe/evolution.hpp"

namespace fbe {

State zero_state(const Discretization& disc) {
  State s;
  s.v = disc.zeros_vector();
  s.F = disc.zeros_tensor();
  s.q = disc.zeros_volume();
  s.psi = disc.zeros_surface();
  s.dtpsi = disc.zeros_surface();
  return s;
}

SurfaceField surface_from_modes(const Discretization& disc, const std::vector<SurfaceMode>& modes) {
  const Grid& g = disc.grid();
  SurfaceField f = disc.zeros_surface();
  for (const auto& m : modes)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double th = m.k1 * g.x1[i] + m.k2 * g.x2[j];
        f[g.surface_index(i, j)] += m.amp * std::cos(th) + m.amp_sin * std::sin(th);
      }
  return f;
}

ConstraintReport constraint_report(const Discretization& disc, const State& s, const FlattenedGeometry& geo) {
  ConstraintReport r;
  r.r_divv = div_phi(disc, s.v, geo, Dealias::no).max_abs();
  const int top = disc.nz() - 1;
  const auto& N = geo.surface.N;
  for (int j = 0; j < 3; ++j) {
    r.r_divF = std::max(r.r_divF, div_phi(disc, s.F[j], geo, Dealias::no).max_abs());
    auto f1 = level(disc, s.F[j][0], top);
    auto f2 = level(disc, s.F[j][1], top);
    auto f3 = level(disc, s.F[j][2], top);
    for (std::size_t i = 0; i < f1.size(); ++i)
      r.r_FN = std::max(r.r_FN, std::abs(f1[i] * N[0][i] + f2[i] * N[1][i] + f3[i] * N[2][i]));
    r.r_bottom = std::max(r.r_bottom, trace_bottom(disc, s.F[j][2]).max_abs());
  }
  r.r_bottom = std::max(r.r_bottom, trace_bottom(disc, s.v[2]).max_abs());
  return r;
}

State build_kinematic_data(const Discretization& disc, const Cutoff& chi, const InitialData& data) {
  const Grid& g = disc.grid();
  State s = zero_state(disc);
  s.psi = surface_from_modes(disc, data.psi);
  const double amp = s.psi.max_abs();
  for (const auto& m : data.potential)
    if (m.k1 == 0 && m.k2 == 0) throw ConfigError("init.potential", "potential mode needs k != 0");
  if (!(amp < g.b / 3.0)) {
    std::ostringstream os;
    os << "|psi0|_inf = " << amp << " must be < b/3 = " << g.b / 3.0;
    throw ConfigError("init.psi", os.str());
  }
  auto geo = build_geometry(disc, chi, s.psi, disc.zeros_surface());

  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t idx = g.index(i, j, k);
        const double y3 = geo.phi[idx];
        double u1 = 0.0, u2 = 0.0, u3 = 0.0;
        for (const auto& m : data.stream) {
          const double th = m.k1 * g.x1[i] + m.k2 * g.x2[j];
          const double c = std::cos(th), sn = std::sin(th);
          u1 += -m.k2 * m.a3 * sn - m.a2 * c;
          u2 += m.a1 * c + m.k1 * m.a3 * sn;
          u3 += (y3 + g.b) * (m.k2 * m.a1 - m.k1 * m.a2) * sn;
        }
        for (const auto& m : data.potential) {
          const double K = std::hypot(m.k1, m.k2);
          const double th = m.k1 * g.x1[i] + m.k2 * g.x2[j];
          const double ch = std::cosh(K * (y3 + g.b)) / std::cosh(K * g.b);
          const double sh = std::sinh(K * (y3 + g.b)) / std::cosh(K * g.b);
          u1 -= m.amp * m.k1 * ch * std::sin(th);
          u2 -= m.amp * m.k2 * ch * std::sin(th);
          u3 += m.amp * K * sh * std::cos(th);
        }
        s.v[0][idx] = u1;
        s.v[1][idx] = u2;
        s.v[2][idx] = u3;
      }

  for (int col = 0; col < 3; ++col) {
    const auto& spec = data.elastic[col];
    SurfaceField W1(g.surface_size(), spec.c1), W2(g.surface_size(), spec.c2);
    for (const auto& m : spec.h)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          const double th = m.k1 * g.x1[i] + m.k2 * g.x2[j];
          // dh/dtheta
          const double dh = -m.amp * std::sin(th) + m.amp_sin * std::cos(th);
          W1[g.surface_index(i, j)] += m.k2 * dh;
          W2[g.surface_index(i, j)] -= m.k1 * dh;
        }
    for (int k = 0; k < g.nz; ++k)
      for (std::size_t i = 0; i < g.surface_size(); ++i) {
        const std::size_t idx = k * g.surface_size() + i;
        const double J = geo.d3phi[idx];
        s.F[col][0][idx] = W1[i] / J;
        s.F[col][1][idx] = W2[i] / J;
        s.F[col][2][idx] = (geo.d1phi[idx] * W1[i] + geo.d2phi[idx] * W2[i]) / J;
      }
  }
  return s;
}

State build_initial_data(const Model& model, const InitialData& data, double tolerance) {
  const Discretization& d = model.disc();
  State s = build_kinematic_data(d, model.chi(), data);
  Tendency T = rhs(model, s);
  s.q = std::move(T.q);
  s.dtpsi = std::move(T.dpsi);
  auto geo = model.geometry(s.psi, s.dtpsi);
  auto r = constraint_report(d, s, geo);
  if (r.max() > tolerance) {
    std::ostringstream os;
    os << "initial constraint residuals too large: divv " << r.r_divv << ", divF " << r.r_divF << ", FN " << r.r_FN
       << ", bottom " << r.r_bottom;
    throw ConstraintResidualTooLarge(os.str());
  }
  return s;
}

}  // namespace fbe
