#include "fbe/diagnostics.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "fbe/calculus.hpp"

namespace fbe {

EnergyRecord energy_e0(const Discretization& disc, const Params& params, const State& s, const FlattenedGeometry& geo) {
  EnergyRecord e;
  e.t = s.t;
  const std::size_t n = geo.d3phi.size();
  VolumeField kin(n), ela(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v2 = 0.0, f2 = 0.0;
    for (int c = 0; c < 3; ++c) v2 += s.v[c][i] * s.v[c][i];
    for (int j = 0; j < 3; ++j)
      for (int c = 0; c < 3; ++c) f2 += s.F[j][c][i] * s.F[j][c][i];
    kin[i] = 0.5 * v2 * geo.d3phi[i];
    ela[i] = 0.5 * f2 * geo.d3phi[i];
  }
  e.kinetic = disc.integrate(kin);
  e.elastic = disc.integrate(ela);
  e.surface_sigma = params.sigma * disc.integrate(geo.surface.norm);
  if (params.kappa > 0.0) {
    auto m = multiplier(disc, s.psi, Symbol::one_minus_lap);
    e.kappa_surface = 0.5 * params.kappa * disc.integrate(m * m);
  }
  e.dissipation = s.dissipation;
  e.E0 = e.kinetic + e.elastic + e.surface_sigma + e.kappa_surface + e.dissipation;
  e.e0_literal = e.E0 - 0.5 * e.surface_sigma;
  return e;
}

double energy_e0_difference(const Discretization& disc, const Params& params, const State& a,
                            const FlattenedGeometry& geo_a, const State& b, const FlattenedGeometry& geo_b) {
  const std::size_t n = geo_a.d3phi.size();
  VolumeField bulk(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    // |x|^2 Jb - |y|^2 Ja = (|x|^2 - |y|^2) Jb + |y|^2 (Jb - Ja)
    double sa = 0.0, diff = 0.0;
    auto add = [&](double x, double y) {
      diff += (x - y) * (x + y);
      sa += y * y;
    };
    for (int c = 0; c < 3; ++c) add(b.v[c][i], a.v[c][i]);
    for (int j = 0; j < 3; ++j)
      for (int c = 0; c < 3; ++c) add(b.F[j][c][i], a.F[j][c][i]);
    acc = diff * geo_b.d3phi[i] + sa * (geo_b.d3phi[i] - geo_a.d3phi[i]);
    bulk[i] = 0.5 * acc;
  }
  const std::size_t S = geo_a.psi.size();
  SurfaceField surf(S);
  for (std::size_t i = 0; i < S; ++i) {
    const double na = geo_a.surface.norm[i], nb = geo_b.surface.norm[i];
    const double ga = geo_a.dpsi[0][i] * geo_a.dpsi[0][i] + geo_a.dpsi[1][i] * geo_a.dpsi[1][i];
    const double gb = geo_b.dpsi[0][i] * geo_b.dpsi[0][i] + geo_b.dpsi[1][i] * geo_b.dpsi[1][i];
    surf[i] = params.sigma * (gb - ga) / (na + nb);
  }
  if (params.kappa > 0.0) {
    auto ma = multiplier(disc, a.psi, Symbol::one_minus_lap);
    auto mb = multiplier(disc, b.psi, Symbol::one_minus_lap);
    for (std::size_t i = 0; i < S; ++i) surf[i] += 0.5 * params.kappa * (mb[i] - ma[i]) * (mb[i] + ma[i]);
  }
  return disc.integrate(bulk) + disc.integrate(surf) + (b.dissipation - a.dissipation);
}

std::vector<double> fornberg_weights(double x0, const std::vector<double>& x, int m) {
  const int n = static_cast<int>(x.size()) - 1;
  if (m > n) throw InsufficientHistory("not enough nodes for the requested derivative");
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0, c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = c[i][m];
  return w;
}

double energy_e4(const Discretization& disc, const Params& params, const std::vector<Snapshot>& window) {
  if (window.size() < 5) throw InsufficientHistory("E4 needs 5 consecutive snapshots");
  std::vector<Snapshot> w(window.end() - 5, window.end());
  std::vector<double> times;
  for (const auto& s : w) {
    if (!s.state || !s.tendency) throw InsufficientHistory("snapshot without state or tendency");
    times.push_back(s.state->t);
  }
  const State& mid = *w[2].state;
  const Tendency& kmid = *w[2].tendency;
  const double t0 = times[2];

  double total = 0.0;
  auto bulk = [&](int l, const std::function<const VolumeField&(const State&, const Tendency&, int)>& get,
                  const std::vector<double>* wts) {
    // l-th time derivative of the 12 components of (v, F), norm of order 4 - l
    double acc = 0.0;
    for (int comp = 0; comp < 12; ++comp) {
      VolumeField f;
      if (!wts) {
        f = get(mid, kmid, comp);
      } else {
        f = VolumeField(mid.v[0].size());
        for (int i = 0; i < 5; ++i) f.axpy((*wts)[i], get(*w[i].state, *w[i].tendency, comp));
      }
      const double nrm = sobolev_norm_interior(disc, f, 4 - l);
      acc += nrm * nrm;
    }
    return acc;
  };
  auto state_comp = [](const State& s, const Tendency&, int c) -> const VolumeField& {
    return c < 3 ? s.v[c] : s.F[(c - 3) / 3][(c - 3) % 3];
  };
  auto rate_comp = [](const State&, const Tendency& k, int c) -> const VolumeField& {
    return c < 3 ? k.dv[c] : k.dF[(c - 3) / 3][(c - 3) % 3];
  };
  auto surf = [&](int l, const SurfaceField& f) {
    double acc = 0.0;
    if (params.sigma > 0.0) {
      const double a = sobolev_norm_surface(disc, f, 5 - l);
      acc += params.sigma * a * a;
    }
    if (params.kappa > 0.0) {
      const double b = sobolev_norm_surface(disc, f, 6 - l);
      acc += params.kappa * b * b;
    }
    return acc;
  };

  total += bulk(0, state_comp, nullptr);
  total += bulk(1, rate_comp, nullptr);
  total += surf(0, mid.psi);
  total += surf(1, kmid.dpsi);
  for (int l = 2; l <= 4; ++l) {
    auto wts = fornberg_weights(t0, times, l - 1);
    total += bulk(l, rate_comp, &wts);
    SurfaceField p(mid.psi.size());
    for (int i = 0; i < 5; ++i) p.axpy(wts[i], w[i].tendency->dpsi);
    total += surf(l, p);
  }
  return total;
}

double tangential_norm(const Discretization& disc, const VolumeField& f, int m) {
  const auto& w = disc.vertical_weights();
  const std::size_t h = disc.half_size();
  auto spec = disc.forward(f);
  double total = 0.0;
  for (int i2 = 0; i2 < disc.ny(); ++i2)
    for (int i1 = 0; i1 < disc.nx_half(); ++i1) {
      const double mult = (i1 == 0 || 2 * i1 == disc.nx()) ? 1.0 : 2.0;
      const double k1 = disc.k1_deriv(i1), k2 = disc.k2_deriv(i2);
      double weight = 0.0;
      for (int a = 0; a <= m; ++a) weight += std::pow(k1 * k1, a) * std::pow(k2 * k2, m - a);
      double vert = 0.0;
      for (int k = 0; k < disc.nz(); ++k)
        vert += w[k] * std::norm(spec[k * h + i1 + static_cast<std::size_t>(disc.nx_half()) * i2]);
      total += mult * weight * vert;
    }
  return 2.0 * std::numbers::pi * std::sqrt(total);
}

HodgeTerms hodge_terms(const Discretization& disc, const VectorField& X, const FlattenedGeometry& geo) {
  HodgeTerms h;
  h.div = sobolev_norm_interior(disc, div_phi(disc, X, geo, Dealias::no), 3);
  auto curl = curl_phi(disc, X, geo, Dealias::no);
  double c2 = 0.0, t2 = 0.0, l2 = 0.0, f2 = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double a = sobolev_norm_interior(disc, curl[c], 3);
    const double t = tangential_norm(disc, X[c], 4);
    const double l = sobolev_norm_interior(disc, X[c], 0);
    const double f = sobolev_norm_interior(disc, X[c], 4);
    c2 += a * a;
    t2 += t * t;
    l2 += l * l;
    f2 += f * f;
  }
  h.curl = std::sqrt(c2);
  h.tangential = std::sqrt(t2);
  h.l2 = std::sqrt(l2);
  h.full = std::sqrt(f2);
  return h;
}

HodgeReport hodge_decomposition_report(const Discretization& disc, const State& s, const FlattenedGeometry& geo) {
  HodgeReport r;
  r.v = hodge_terms(disc, s.v, geo);
  for (int j = 0; j < 3; ++j) r.F[j] = hodge_terms(disc, s.F[j], geo);
  return r;
}

namespace {

struct Sample {
  VectorField v;
  TensorField F;
  SurfaceField psi;
};

double distance(const Discretization& disc, const Sample& a, const Sample& b) {
  double dv = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double x = sobolev_norm_interior(disc, a.v[c] - b.v[c], 0);
    dv += x * x;
  }
  double total = std::sqrt(dv);
  for (int k = 0; k < 3; ++k) {
    double df = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double x = sobolev_norm_interior(disc, a.F[k][c] - b.F[k][c], 0);
      df += x * x;
    }
    total += std::sqrt(df);
  }
  return total + sobolev_norm_surface(disc, a.psi - b.psi, 1.0);
}

}  // namespace

KappaStudy kappa_convergence_study(const RunConfig& config, const std::vector<double>& kappas) {
  if (kappas.size() < 3) throw ConfigError("kappas", "at least 3 kappa values are required");
  for (double k : kappas)
    if (!(k >= 0.0)) throw ConfigError("kappas", "kappa must be >= 0");
  KappaStudy study;
  const Grid g = make_grid(config.nx, config.ny, config.nz, config.params.b);

  double dt = config.dt.value_or(std::numeric_limits<double>::infinity());
  if (!config.dt) {
    for (double k : kappas) {
      Params p = config.params;
      p.kappa = k;
      Model m(g, p, config.pressure);
      State s0 = build_initial_data(m, config.init);
      dt = std::min(dt, cfl_dt(m, s0, config.safety));
    }
  }
  // round so that T is an integer number of steps
  const double steps = std::ceil(config.T / dt - 1e-9);
  dt = config.T / steps;
  study.dt = dt;

  std::vector<Sample> previous;
  bool previous_ok = false;
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    Params p = config.params;
    p.kappa = kappas[i];
    Model model(g, p, config.pressure);
    RunConfig member = config;
    member.params = p;
    member.dt = dt;
    member.snapshots = false;
    if (!config.output_dir.empty())
      member.output_dir = (std::filesystem::path(config.output_dir) / ("kappa_" + std::to_string(i))).string();
    std::vector<Sample> samples;
    int count = 0;
    auto observer = [&](const State& s, const Tendency&) {
      if (count++ % config.cadence == 0) samples.push_back({s.v, s.F, s.psi});
    };
    RunResult r = run(model, member, observer);
    // the final time is always compared
    if (count > 0 && (count - 1) % config.cadence != 0)
      samples.push_back({r.final_state.v, r.final_state.F, r.final_state.psi});
    const bool ok = !r.breakdown;
    if (!ok) study.failures.push_back("kappa=" + std::to_string(kappas[i]) + ": " + r.cause);
    if (i > 0 && ok && previous_ok) {
      double d = 0.0;
      const std::size_t n = std::min(samples.size(), previous.size());
      for (std::size_t s = 0; s < n; ++s) d = std::max(d, distance(model.disc(), samples[s], previous[s]));
      study.pairs.push_back({kappas[i - 1], kappas[i], d});
    }
    previous = std::move(samples);
    previous_ok = ok;
  }
  study.strictly_decreasing = study.pairs.size() == kappas.size() - 1;
  for (std::size_t i = 1; i < study.pairs.size(); ++i)
    if (!(study.pairs[i].distance < study.pairs[i - 1].distance)) study.strictly_decreasing = false;

  if (!config.output_dir.empty()) {
    std::filesystem::create_directories(config.output_dir);
    std::ofstream out(std::filesystem::path(config.output_dir) / "kappa_study.csv");
    out << "kappa_a,kappa_b,distance\n" << std::setprecision(17);
    for (const auto& pr : study.pairs) out << pr.kappa_a << ',' << pr.kappa_b << ',' << pr.distance << '\n';
  }
  return study;
}

}  // namespace fbe
