#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include "fbe/calculus.hpp"
#include "fbe/diagnostics.hpp"
#include "fbe/galerkin.hpp"

namespace fbe {

State Trajectory::at(double t, SurfaceField* dtpsi) const {
  const int n = static_cast<int>(states.size());
  if (n == 0) throw InsufficientHistory("empty trajectory");
  if (n == 1 || dt <= 0.0) {
    if (dtpsi) *dtpsi = rates.front().dpsi;
    return states.front();
  }
  int i = static_cast<int>(std::floor(t / dt));
  i = std::clamp(i, 0, n - 2);
  const double th = (t - i * dt) / dt;
  if (std::abs(th) < 1e-12 || std::abs(th - 1.0) < 1e-12) {
    const int j = std::abs(th) < 1e-12 ? i : i + 1;
    if (dtpsi) *dtpsi = rates[j].dpsi;
    return states[j];
  }
  const double h00 = 2 * th * th * th - 3 * th * th + 1, h10 = th * th * th - 2 * th * th + th;
  const double h01 = -2 * th * th * th + 3 * th * th, h11 = th * th * th - th * th;
  auto mix = [&](const auto& a, const auto& da, const auto& b, const auto& db) {
    auto out = h00 * a;
    out.axpy(h10 * dt, da);
    out.axpy(h01, b);
    out.axpy(h11 * dt, db);
    return out;
  };
  const State& a = states[i];
  const State& b = states[i + 1];
  const Tendency& ra = rates[i];
  const Tendency& rb = rates[i + 1];
  State s;
  for (int c = 0; c < 3; ++c) s.v[c] = mix(a.v[c], ra.dv[c], b.v[c], rb.dv[c]);
  for (int j = 0; j < 3; ++j)
    for (int c = 0; c < 3; ++c) s.F[j][c] = mix(a.F[j][c], ra.dF[j][c], b.F[j][c], rb.dF[j][c]);
  s.psi = mix(a.psi, ra.dpsi, b.psi, rb.dpsi);
  s.q = (1.0 - th) * a.q + th * b.q;
  s.t = t;
  if (dtpsi) {
    const double g00 = (6 * th * th - 6 * th) / dt, g10 = 3 * th * th - 4 * th + 1;
    const double g01 = (-6 * th * th + 6 * th) / dt, g11 = 3 * th * th - 2 * th;
    SurfaceField d = g00 * a.psi;
    d.axpy(g10, ra.dpsi);
    d.axpy(g01, b.psi);
    d.axpy(g11, rb.dpsi);
    *dtpsi = std::move(d);
  }
  s.dtpsi = dtpsi ? *dtpsi : SurfaceField(a.psi.size());
  return s;
}

Coefficients picard_coefficients(const Model& model, const Trajectory& basic, const Trajectory& previous, double t) {
  const Discretization& d = model.disc();
  SurfaceField dtpsi;
  const State b = basic.at(t, &dtpsi);
  const State p = previous.at(t);
  Coefficients c;
  c.geo = model.geometry(b.psi, dtpsi);
  c.vbar = {b.v[0], b.v[1]};
  // normal of the previous iterate inside the material derivative
  const auto dp = d.horizontal_gradient(p.psi);
  const auto prof = model.chi().profile(d.grid());
  const std::size_t S = d.grid().surface_size();
  c.V = VolumeField(b.v[0].size());
  for (int k = 0; k < d.nz(); ++k)
    for (std::size_t i = 0; i < S; ++i) {
      const std::size_t idx = k * S + i;
      const double n1 = -prof[k] * dp[0][i], n2 = -prof[k] * dp[1][i];
      c.V[idx] = (b.v[0][idx] * n1 + b.v[1][idx] * n2 + b.v[2][idx] - c.geo.dtphi[idx]) / c.geo.d3phi[idx];
    }
  c.frak = modified_deformation(d, model.chi(), b.F, b.psi);
  c.kin_dpsi = d.horizontal_gradient(b.psi);
  c.sigma_H = mean_curvature(d, b.psi);
  c.sigma_H *= model.params().sigma;
  return c;
}

namespace {

Trajectory zero_trajectory(const Discretization& d, double dt, int steps) {
  Trajectory z;
  z.dt = dt;
  for (int i = 0; i <= steps; ++i) {
    State s = zero_state(d);
    s.t = i * dt;
    Tendency k;
    k.dv = d.zeros_vector();
    k.dF = d.zeros_tensor();
    k.dpsi = d.zeros_surface();
    k.q = d.zeros_volume();
    z.states.push_back(std::move(s));
    z.rates.push_back(std::move(k));
  }
  return z;
}

// sup_t [E]_3 of the difference a - b of two trajectories on the same grid
double difference_energy(const Discretization& d, double kappa, const Trajectory& a, const Trajectory& b) {
  const int n = static_cast<int>(a.states.size());
  const double dt = a.dt;
  auto bulk = [&](const auto& get, int i, int s) {
    double e = 0.0;
    for (int c = 0; c < 12; ++c) {
      const double x = sobolev_norm_interior(d, get(i, c), s);
      e += x * x;
    }
    return e;
  };
  auto surf = [&](const SurfaceField& f, double s) {
    if (kappa <= 0.0) return 0.0;
    const double x = sobolev_norm_surface(d, f, s);
    return kappa * x * x;
  };
  auto dstate = [&](int i, int c) {
    return c < 3 ? a.states[i].v[c] - b.states[i].v[c]
                 : a.states[i].F[(c - 3) / 3][(c - 3) % 3] - b.states[i].F[(c - 3) / 3][(c - 3) % 3];
  };
  auto drate = [&](int i, int c) {
    return c < 3 ? a.rates[i].dv[c] - b.rates[i].dv[c]
                 : a.rates[i].dF[(c - 3) / 3][(c - 3) % 3] - b.rates[i].dF[(c - 3) / 3][(c - 3) % 3];
  };
  auto dpsi_rate = [&](int i) { return a.rates[i].dpsi - b.rates[i].dpsi; };

  // derivative of order m of the rate differences from a 5-point window
  auto window = [&](int i) { return std::clamp(i - 2, 0, std::max(0, n - 5)); };
  const int width = std::min(n, 5);
  auto fd = [&](int i, int m) {
    const int s0 = window(i);
    std::vector<double> times;
    for (int j = 0; j < width; ++j) times.push_back((s0 + j) * dt);
    return std::make_pair(s0, fornberg_weights(i * dt, times, m));
  };

  double sup = 0.0, integral = 0.0, prev_integrand = 0.0;
  for (int i = 0; i < n; ++i) {
    double e = bulk(dstate, i, 3) + surf(a.states[i].psi - b.states[i].psi, 5.0);
    e += bulk(drate, i, 2) + surf(dpsi_rate(i), 4.0);
    double integrand = 0.0;
    if (width >= 5) {
      for (int l = 2; l <= 4; ++l) {
        auto [s0, w] = fd(i, l - 1);
        SurfaceField p(a.states[0].psi.size());
        for (int j = 0; j < width; ++j) p.axpy(w[j], dpsi_rate(s0 + j));
        if (l == 4) {
          integrand = surf(p, 1.0);
          continue;
        }
        auto get = [&](int, int c) {
          VolumeField f(a.states[0].v[0].size());
          for (int j = 0; j < width; ++j) f.axpy(w[j], drate(s0 + j, c));
          return f;
        };
        e += bulk(get, i, 3 - l) + surf(p, 5.0 - l);
      }
    }
    if (i > 0) integral += 0.5 * dt * (integrand + prev_integrand);
    prev_integrand = integrand;
    sup = std::max(sup, e + integral);
  }
  return sup;
}

double boundary_defect(const Discretization& d, const Trajectory& tr) {
  double r = 0.0;
  const int top = d.nz() - 1;
  for (const auto& s : tr.states) {
    const auto N = surface_normals(d, s.psi);
    for (int k = 0; k < 3; ++k) {
      auto f1 = level(d, s.F[k][0], top), f2 = level(d, s.F[k][1], top), f3 = level(d, s.F[k][2], top);
      for (std::size_t i = 0; i < f1.size(); ++i)
        r = std::max(r, std::abs(f1[i] * N.N[0][i] + f2[i] * N.N[1][i] + f3[i] * N.N[2][i]));
    }
  }
  return r;
}

}  // namespace

PicardResult picard_iterate(const Model& model, const State& initial, const PicardOptions& opt) {
  if (opt.n_max < 1) throw ConfigError("n_max", "n_max must be >= 1");
  if (!(opt.T > 0.0)) throw ConfigError("T", "T must be > 0");
  const Discretization& d = model.disc();
  double dt = opt.dt.value_or(std::min(cfl_dt(model, initial, 0.5), opt.T / 20.0));
  if (!(dt > 0.0)) throw ConfigError("dt", "dt must be > 0");
  const int steps = std::max(4, static_cast<int>(std::ceil(opt.T / dt - 1e-9)));
  dt = opt.T / steps;

  PicardResult out;
  out.dt = dt;
  out.steps = steps;
  Trajectory older = zero_trajectory(d, dt, steps);
  Trajectory basic = older;
  State zero = zero_state(d);
  zero.t = opt.T;
  out.finals.push_back(zero);

  for (int n = 0; n < opt.n_max; ++n) {
    Stepper stepper(model, [&](const State& s) { return picard_coefficients(model, basic, older, s.t); });
    Trajectory next;
    next.dt = dt;
    State x = initial;
    x.t = 0.0;
    x.dissipation = 0.0;
    next.rates.push_back(stepper.tendency_at(x));
    next.states.push_back(x);
    for (int i = 0; i < steps; ++i) {
      x = stepper.step(x, dt);
      next.rates.push_back(stepper.tendency_at(x));
      next.states.push_back(x);
    }
    out.E3.push_back(difference_energy(d, model.params().kappa, next, basic));
    out.finals.push_back(next.states.back());
    if (n + 1 == opt.n_max) out.boundary_defect = boundary_defect(d, next);
    older = std::move(basic);
    basic = std::move(next);
  }
  out.rho.assign(out.E3.size(), std::nan(""));
  for (std::size_t n = 2; n < out.E3.size(); ++n) {
    const double den = out.E3[n - 1] + out.E3[n - 2];
    out.rho[n] = den > 0.0 ? out.E3[n] / den : (out.E3[n] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  }
  return out;
}

void write_picard_csv(const std::string& path, const PicardResult& r) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw ConfigError("output_dir", "cannot write " + path);
  out << "n,E3,rho,contracting\n" << std::setprecision(17);
  for (std::size_t n = 0; n < r.E3.size(); ++n) {
    out << n << ',' << r.E3[n] << ',';
    if (std::isnan(r.rho[n]))
      out << ",\n";
    else
      out << r.rho[n] << ',' << (r.rho[n] <= 0.5 ? 1 : 0) << '\n';
  }
}

}  // namespace fbe
