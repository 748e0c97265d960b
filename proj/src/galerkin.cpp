#include "fbe/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fbe/calculus.hpp"

namespace fbe {

CoefficientMatrices assemble_matrices(const BasicPoint& p) {
  if (!(p.d3phi > 0.0)) throw DiffeomorphismBreakdown("d3 phi of the basic state must be positive", p.d3phi);
  CoefficientMatrices out;
  for (auto& A : out.A) A.setZero();
  auto sym = [](Matrix7& A, int i, int j, double x) {
    A(i, j) = x;
    A(j, i) = x;
  };

  for (int i = 1; i < 7; ++i) out.A[0](i, i) = 1.0;

  for (int tau = 1; tau <= 2; ++tau) {
    Matrix7& A = out.A[tau];
    sym(A, 0, tau, 1.0);
    const double vt = p.v[tau - 1];
    const double ft = -p.frak[tau - 1];
    for (int i = 0; i < 3; ++i) {
      A(1 + i, 1 + i) = vt;
      A(4 + i, 4 + i) = vt;
      sym(A, 1 + i, 4 + i, ft);
    }
  }

  Matrix7& A3 = out.A[3];
  const double s = 1.0 / p.d3phi;
  double vNdot = 0.0, fN = 0.0;
  for (int i = 0; i < 3; ++i) {
    vNdot += p.v[i] * p.Ndot[i];
    fN += p.frak[i] * p.N[i];
  }
  const double diag = (vNdot - p.dtphi) * s;
  const double cross = -fN * s;
  for (int i = 0; i < 3; ++i) {
    sym(A3, 0, 1 + i, p.N[i] * s);
    A3(1 + i, 1 + i) = diag;
    A3(4 + i, 4 + i) = diag;
    sym(A3, 1 + i, 4 + i, cross);
  }
  return out;
}

VolumeField extension_operator(const Discretization& disc, const Cutoff& chi, const SurfaceField& g) {
  disc.check(g);
  const auto gh = disc.forward(g);
  const std::size_t h = disc.half_size();
  const Grid& grid = disc.grid();
  std::vector<std::complex<double>> out(h * disc.nz());
  for (int k = 0; k < disc.nz(); ++k) {
    const double z = grid.z[k];
    const double c = chi.value(z);
    for (int i2 = 0; i2 < disc.ny(); ++i2)
      for (int i1 = 0; i1 < disc.nx_half(); ++i1) {
        const std::size_t m = i1 + static_cast<std::size_t>(disc.nx_half()) * i2;
        const double k1 = disc.k1(i1), k2 = disc.k2(i2);
        const double bracket = std::sqrt(1.0 + k1 * k1 + k2 * k2);
        out[k * h + m] = c * std::exp(bracket * z) * gh[m];
      }
  }
  VolumeField f = disc.inverse_volume(out);
  // the top level is the trace itself
  set_level(disc, f, disc.nz() - 1, g);
  return f;
}

TensorField modified_deformation(const Discretization& disc, const Cutoff& chi, const TensorField& F,
                                 const SurfaceField& psi) {
  const auto dpsi = disc.horizontal_gradient(psi);
  const int top = disc.nz() - 1;
  TensorField out = F;
  for (int k = 0; k < 3; ++k) {
    auto f1 = level(disc, F[k][0], top);
    auto f2 = level(disc, F[k][1], top);
    auto f3 = level(disc, F[k][2], top);
    SurfaceField defect(f1.size());
    for (std::size_t i = 0; i < defect.size(); ++i) defect[i] = f1[i] * dpsi[0][i] + f2[i] * dpsi[1][i] - f3[i];
    if (defect.max_abs() == 0.0) continue;
    out[k][2] += extension_operator(disc, chi, defect);
  }
  return out;
}

double modified_trace_defect(const Discretization& disc, const TensorField& frak, const SurfaceField& psi) {
  const auto dpsi = disc.horizontal_gradient(psi);
  const int top = disc.nz() - 1;
  double r = 0.0;
  for (int k = 0; k < 3; ++k) {
    auto f1 = level(disc, frak[k][0], top);
    auto f2 = level(disc, frak[k][1], top);
    auto f3 = level(disc, frak[k][2], top);
    for (std::size_t i = 0; i < f1.size(); ++i)
      r = std::max(r, std::abs(-f1[i] * dpsi[0][i] - f2[i] * dpsi[1][i] + f3[i]));
  }
  return r;
}

namespace {

struct Candidate {
  int k1, k2, n;
  bool sine;
  int cost() const { return k1 * k1 + k2 * k2 + n * n; }
};

double legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return p0;
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

template <class F, class Inner>
void orthonormalize(std::vector<F>& fs, Inner inner) {
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t j = 0; j < i; ++j) fs[i].axpy(-inner(fs[i], fs[j]), fs[j]);
    const double n = std::sqrt(inner(fs[i], fs[i]));
    if (!(n > 1e-12)) throw ConfigError("m", "Galerkin modes are not linearly independent on this grid");
    fs[i] *= 1.0 / n;
  }
}

}  // namespace

GalerkinBasis::GalerkinBasis(const Discretization& disc, int m) : disc_(disc) {
  if (m < 1 || m > 64) throw ConfigError("m", "m must be in [1, 64]");
  const int Kx = disc.dealias_kmax_x(), Ky = disc.dealias_kmax_y();
  std::vector<Candidate> cand;
  for (int n = 0; n < disc.nz(); ++n)
    for (int k1 = 0; k1 <= Kx; ++k1)
      for (int k2 = -Ky; k2 <= Ky; ++k2) {
        if (k1 == 0 && k2 < 0) continue;
        cand.push_back({k1, k2, n, false});
        if (k1 != 0 || k2 != 0) cand.push_back({k1, k2, n, true});
      }
  std::stable_sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
    if (a.cost() != b.cost()) return a.cost() < b.cost();
    if (a.n != b.n) return a.n < b.n;
    if (a.k1 != b.k1) return a.k1 < b.k1;
    if (a.k2 != b.k2) return a.k2 < b.k2;
    return a.sine < b.sine;
  });
  if (static_cast<int>(cand.size()) < m) throw ConfigError("m", "grid too coarse for m modes");
  cand.resize(m);

  const Grid& g = disc.grid();
  std::vector<std::array<int, 3>> horizontal;
  for (const auto& c : cand) {
    VolumeField f(g.volume_size());
    for (int k = 0; k < g.nz; ++k) {
      const double P = legendre(c.n, 2.0 * g.z[k] / g.b + 1.0);
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          const double th = c.k1 * g.x1[i] + c.k2 * g.x2[j];
          f[g.index(i, j, k)] = P * (c.sine ? std::sin(th) : std::cos(th));
        }
    }
    modes_.push_back(std::move(f));
    const std::array<int, 3> key{c.k1, c.k2, c.sine ? 1 : 0};
    if (std::find(horizontal.begin(), horizontal.end(), key) == horizontal.end()) horizontal.push_back(key);
  }
  orthonormalize(modes_, [&](const VolumeField& a, const VolumeField& b) { return disc.integrate(a * b); });

  for (const auto& h : horizontal) {
    SurfaceField f(g.surface_size());
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double th = h[0] * g.x1[i] + h[1] * g.x2[j];
        f[g.surface_index(i, j)] = h[2] ? std::sin(th) : std::cos(th);
      }
    surface_.push_back(std::move(f));
  }
  orthonormalize(surface_, [&](const SurfaceField& a, const SurfaceField& b) { return disc.integrate(a * b); });
}

std::vector<double> GalerkinBasis::coefficients(const VolumeField& f) const {
  std::vector<double> c(modes_.size());
  for (std::size_t l = 0; l < modes_.size(); ++l) c[l] = disc_.integrate(f * modes_[l]);
  return c;
}

VolumeField GalerkinBasis::project(const VolumeField& f) const {
  VolumeField out(f.size());
  for (std::size_t l = 0; l < modes_.size(); ++l) out.axpy(disc_.integrate(f * modes_[l]), modes_[l]);
  return out;
}

SurfaceField GalerkinBasis::project_surface(const SurfaceField& g) const {
  SurfaceField out(g.size());
  for (const auto& e : surface_) out.axpy(disc_.integrate(g * e), e);
  return out;
}

namespace {

struct Rates {
  VectorField dv;
  TensorField dF;
  SurfaceField dpsi;
  double dD = 0.0;
};

State advance(const State& s, double a, const Rates& r) {
  State out = s;
  for (int i = 0; i < 3; ++i) out.v[i].axpy(a, r.dv[i]);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) out.F[j][i].axpy(a, r.dF[j][i]);
  out.psi.axpy(a, r.dpsi);
  out.dissipation += a * r.dD;
  out.dtpsi = r.dpsi;
  out.t = s.t + a;
  return out;
}

}  // namespace

GalerkinResult galerkin_evolve(const Model& model, const State& basic, const State& initial, int m, double dt,
                               double T) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw ConfigError("dt", "dt must be > 0 and T >= 0");
  const Discretization& d = model.disc();
  const GalerkinBasis basis(d, m);
  const Coefficients c = nonlinear_coefficients(model, basic);
  const double kappa = model.params().kappa;

  auto rates = [&](const State& s) {
    Tendency k = evaluate(model, s, c);
    Rates r;
    for (int i = 0; i < 3; ++i) r.dv[i] = basis.project(k.dv[i]);
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) r.dF[j][i] = basis.project(k.dF[j][i]);
    r.dpsi = basis.project_surface(k.dpsi);
    if (kappa > 0.0) {
      const double n = sobolev_norm_surface(d, r.dpsi, 1.0);
      r.dD = kappa * n * n;
    }
    return std::make_pair(r, std::move(k.q));
  };

  State u = zero_state(d);
  for (int i = 0; i < 3; ++i) u.v[i] = basis.project(initial.v[i]);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) u.F[j][i] = basis.project(initial.F[j][i]);
  u.psi = basis.project_surface(initial.psi);
  u.q = initial.q;

  GalerkinResult out;
  out.m = m;
  auto record = [&](const State& s) {
    double e = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double x = sobolev_norm_interior(d, s.v[i], 0);
      e += x * x;
    }
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) {
        const double x = sobolev_norm_interior(d, s.F[j][i], 0);
        e += x * x;
      }
    if (kappa > 0.0) {
      const double p = sobolev_norm_surface(d, s.psi, 2.0);
      e += kappa * p * p;
    }
    e += s.dissipation;
    out.t.push_back(s.t);
    out.energy.push_back(e);
    std::vector<double> coef;
    for (int i = 0; i < 3; ++i) {
      auto x = basis.coefficients(s.v[i]);
      coef.insert(coef.end(), x.begin(), x.end());
    }
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) {
        auto x = basis.coefficients(s.F[j][i]);
        coef.insert(coef.end(), x.begin(), x.end());
      }
    coef.insert(coef.end(), s.psi.begin(), s.psi.end());
    out.coefficients.push_back(std::move(coef));
  };
  record(u);

  const int steps = T > 0.0 ? static_cast<int>(std::ceil(T / dt - 1e-9)) : 0;
  const double h = steps > 0 ? T / steps : 0.0;
  for (int n = 0; n < steps; ++n) {
    auto [k1, q1] = rates(u);
    State y = advance(u, 0.5 * h, k1);
    y.q = q1;
    auto [k2, q2] = rates(y);
    y = advance(u, 0.5 * h, k2);
    y.q = q2;
    auto [k3, q3] = rates(y);
    y = advance(u, h, k3);
    y.q = q3;
    auto [k4, q4] = rates(y);
    Rates r;
    for (int i = 0; i < 3; ++i) r.dv[i] = (1.0 / 6.0) * (k1.dv[i] + 2.0 * k2.dv[i] + 2.0 * k3.dv[i] + k4.dv[i]);
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i)
        r.dF[j][i] = (1.0 / 6.0) * (k1.dF[j][i] + 2.0 * k2.dF[j][i] + 2.0 * k3.dF[j][i] + k4.dF[j][i]);
    r.dpsi = (1.0 / 6.0) * (k1.dpsi + 2.0 * k2.dpsi + 2.0 * k3.dpsi + k4.dpsi);
    r.dD = (k1.dD + 2.0 * k2.dD + 2.0 * k3.dD + k4.dD) / 6.0;
    u = advance(u, h, r);
    u.q = q4;
    u.t = (n + 1) * h;
    bool finite = u.psi.all_finite();
    for (const auto& x : u.v) finite = finite && x.all_finite();
    if (!finite) throw NonConvergence("Galerkin step produced non-finite values", NAN, n + 1);
    record(u);
  }
  out.final_state = std::move(u);
  return out;
}

}  // namespace fbe
