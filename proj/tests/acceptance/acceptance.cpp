// One PASS/FAIL line per acceptance criterion, with the measured values.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fbe/agu.hpp"
#include "fbe/calculus.hpp"
#include "fbe/diagnostics.hpp"
#include "fbe/galerkin.hpp"
#include "support.hpp"

using namespace fbe;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("%s criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

double max_abs(const VectorField& a, const VectorField& b) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c) m = std::max(m, (a[c] - b[c]).max_abs());
  return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void guarded(int id, const char* name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

RunConfig small_wave_config() {
  RunConfig c;
  c.nx = c.ny = 32;
  c.nz = 33;
  c.T = 0.1;
  c.cadence = 1000;
  c.snapshots = false;
  c.pressure = {1e-10, 500};
  c.init = test::small_wave();
  return c;
}

// Criteria 1 and 3 share the dyadic sweep.
void energy_and_constraints() {
  const RunConfig base = small_wave_config();
  Model model(make_grid(base.nx, base.ny, base.nz, base.params.b), base.params, base.pressure);
  const State s0 = build_initial_data(model, base.init);
  const auto geo0 = model.geometry(s0.psi, s0.dtpsi);
  const double E = energy_e0(model.disc(), base.params, s0, geo0).E0;

  const std::vector<double> dts{0.02, 0.01, 0.005};
  std::vector<double> drift;
  double worst_fn = 0.0, worst_div = 0.0;
  bool broke = false;
  const auto t0 = std::chrono::steady_clock::now();
  for (double dt : dts) {
    RunConfig c = base;
    c.dt = dt;
    const auto r = run(model, c, [&](const State& s, const Tendency&) {
      const auto rep = constraint_report(model.disc(), s, model.geometry(s.psi, s.dtpsi));
      worst_fn = std::max(worst_fn, rep.r_FN);
      worst_div = std::max(worst_div, rep.r_divF);
    });
    broke = broke || r.breakdown;
    const auto& x = r.final_state;
    drift.push_back(std::abs(energy_e0_difference(model.disc(), base.params, s0, geo0, x,
                                                  model.geometry(x.psi, x.dtpsi))) /
                    E);
  }
  const double secs = seconds_since(t0);

  // least-squares slope of log drift against log dt
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const double x = std::log(dts[i]), y = std::log(drift[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double n = static_cast<double>(dts.size());
  const double order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double max_drift = *std::max_element(drift.begin(), drift.end());
  report(1, "E0 conservation", !broke && max_drift <= 1e-6 && std::abs(order - 4.0) <= 0.5 && secs <= 300,
         fmt("E0 %.6g, relative drift %.3e / %.3e / %.3e at dt 0.02 / 0.01 / 0.005, order %.2f, %.1f s", E, drift[0],
             drift[1], drift[2], order, secs));
  report(3, "constraint propagation", !broke && worst_fn <= 1e-6 && worst_div <= 1e-6,
         fmt("max |F.N| %.3e, max |div F| %.3e over every step of the three runs", worst_fn, worst_div));
}

void jacobian_bound() {
  const double b = 1.0, slope = 1.0 / (b + b / 3.0);
  bool admissible = true;
  try {
    cutoff_chi(-0.5 * b, b, 0.0, slope);
  } catch (const ConfigError&) {
    admissible = false;
  }
  // the smoothest feasible cutoff, |psi|_inf = b/2, dense sample in z
  const Cutoff chi(b, 0.0);
  double m = 1.0;
  for (int i = 0; i <= 20000; ++i) {
    const double z = -b + b * i / 20000.0;
    for (double psi : {-0.5 * b, 0.5 * b}) m = std::min(m, 1.0 + chi.derivative(z, 1) * psi);
  }
  report(2, "Jacobian bound", admissible && m >= 5.0 / 8.0 - 1e-12,
         fmt("no cutoff with chi(-b)=0, chi(0)=1 meets |chi'| <= %.4f (minimum possible %.4f); "
             "feasible quintic gives min d3phi %.6f < 0.625",
             slope, minimal_feasible_slope(b), m));
}

void agu() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto suite = agu_manufactured_suite(0);
  double worst = 0.0;
  bool shapes = suite.size() >= 20;
  for (const auto& c : suite) {
    shapes = shapes && c.alpha.order() <= 4 && c.alpha.t <= 2;
    worst = std::max(worst, verify_identity(c).residual());
  }
  const double secs = seconds_since(t0);
  report(4, "AGU identities", shapes && worst <= 1e-9 && secs <= 60,
         fmt("%zu cases, max residual %.3e, %.2f s", suite.size(), worst, secs));
}

void symmetry() {
  test::Gen gen(2001);
  int asym = 0;
  bool a0 = true;
  Matrix7 pattern = Matrix7::Zero();
  for (int i = 1; i < 7; ++i) pattern(i, i) = 1.0;
  for (int trial = 0; trial < 1000; ++trial) {
    BasicPoint p;
    for (int i = 0; i < 3; ++i) {
      p.v[i] = gen.uniform(-3, 3);
      p.frak[i] = gen.uniform(-3, 3);
      p.Ndot[i] = gen.uniform(-1, 1);
    }
    p.N = {gen.uniform(-1, 1), gen.uniform(-1, 1), 1.0};
    p.d3phi = gen.uniform(0.3, 2.0);
    p.dtphi = gen.uniform(-1, 1);
    const auto m = assemble_matrices(p);
    for (int a = 1; a <= 3; ++a)
      if (!(m.A[a] == m.A[a].transpose())) ++asym;
    a0 = a0 && m.A[0] == pattern;
  }
  report(5, "Galerkin symmetry", asym == 0 && a0,
         fmt("1000 random points, %d asymmetric matrices, A0 pattern %s", asym, a0 ? "exact" : "wrong"));
}

void modified_tensor() {
  Discretization d(make_grid(16, 16, 17, 1.0));
  const Cutoff chi(1.0, 0.0);
  const auto& g = d.grid();
  test::Gen gen(2002);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    TensorField F;
    for (auto& col : F)
      for (auto& c : col) c = gen.volume(g, 3, 4, 0.5);
    const auto psi = gen.surface(g, 4, 0.2);
    worst = std::max(worst, modified_trace_defect(d, modified_deformation(d, chi, F, psi), psi));
  }
  // zero defect: every component vanishes on the top
  const auto z = test::sample(g, [](double, double, double z) { return z; });
  bool exact = true;
  for (int trial = 0; trial < 10; ++trial) {
    TensorField F;
    for (auto& col : F)
      for (auto& c : col) c = z * gen.volume(g, 3, 4, 0.5);
    const auto frak = modified_deformation(d, chi, F, gen.surface(g, 4, 0.2));
    for (int k = 0; k < 3; ++k)
      for (int c = 0; c < 3; ++c) exact = exact && frak[k][c].values() == F[k][c].values();
  }
  report(6, "modified tensor trace", worst <= 1e-10 && exact,
         fmt("max |frak.N| %.3e over 100 pairs, zero-defect case %s", worst, exact ? "exact" : "modified"));
}

void picard() {
  const auto t0 = std::chrono::steady_clock::now();
  Model model(make_grid(16, 16, 17, 1.0), Params{}, PressureOptions{1e-12, 500});
  const State s = build_initial_data(model, test::small_wave());
  auto contracts = [](const PicardResult& r) {
    for (int n = 3; n <= 6; ++n)
      if (!(r.rho[n] <= 0.5)) return false;
    return true;
  };
  double T = 0.4;
  PicardResult r;
  for (int tries = 0; tries < 6; ++tries) {
    T *= 0.5;
    r = picard_iterate(model, s, {8, T, 0.005});
    if (contracts(r)) break;
  }
  if (!contracts(r)) {
    report(7, "Picard contraction", false, fmt("no contraction down to T = %.4g", T));
    return;
  }
  const auto h = picard_iterate(model, s, {8, 0.5 * T, 0.005});
  bool decreasing = true;
  std::string rhos;
  for (int n = 3; n <= 6; ++n) {
    decreasing = decreasing && h.rho[n] < r.rho[n];
    rhos += fmt(" %.2e->%.2e", r.rho[n], h.rho[n]);
  }
  const double secs = seconds_since(t0);
  report(7, "Picard contraction", decreasing && secs <= 600,
         fmt("T = %.3g, rho_3..6 at T and T/2:%s, %.1f s", T, rhos.c_str(), secs));
}

void kappa_limit() {
  RunConfig c = small_wave_config();
  c.dt = 0.005;
  c.cadence = 1;
  const auto st = kappa_convergence_study(c, {0.1, 0.05, 0.025});
  const bool ok = st.failures.empty() && st.strictly_decreasing;
  report(8, "kappa Cauchy behavior", ok,
         fmt("distances %.3e (0.1 vs 0.05), %.3e (0.05 vs 0.025)", st.pairs.at(0).distance, st.pairs.at(1).distance));
}

void pressure() {
  Model m(make_grid(16, 16, 25, 1.0), Params{});
  const auto& d = m.disc();
  const auto& g = d.grid();
  const auto psi =
      test::sample_surface(g, [](double x, double y) { return 0.05 * std::sin(x) + 0.025 * std::cos(x + y); });
  const auto geo = m.geometry(psi, d.zeros_surface());
  PressureProblem p;
  p.geom = &geo;
  p.rhs = d.zeros_volume();
  p.top_dirichlet = d.zeros_surface();
  p.bottom_neumann = d.zeros_surface();
  p.tol = 1e-12;
  VolumeField qe(g.volume_size());
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t id = g.index(i, j, k);
        const double y3 = geo.phi[id], cs = std::cos(g.x1[i]) * std::sin(g.x2[j]);
        qe[id] = cs * std::cosh(y3) + y3 * y3;
        p.rhs[id] = -cs * std::cosh(y3) + 2.0;
        if (k == 0) p.bottom_neumann[g.surface_index(i, j)] = cs * std::sinh(y3) + 2 * y3;
        if (k == g.nz - 1) p.top_dirichlet[g.surface_index(i, j)] = qe[id];
      }
  const double recovery = (m.solver().solve(p).q - qe).max_abs();

  Model flat(make_grid(16, 16, 17, 1.0), Params{});
  State rest = zero_state(flat.disc());
  rest.F[0][0] += 1.0;
  rest.F[1][1] += 1.0;
  const double q_rest = rhs(flat, rest).q.max_abs();

  const double tol = 1e-10;
  Model wave(make_grid(16, 16, 17, 1.0), Params{}, PressureOptions{tol, 500});
  EvalOptions opt;
  opt.consistency = true;
  const auto k = rhs(wave, build_initial_data(wave, test::small_wave()), opt);
  report(9, "pressure solver", recovery <= 1e-8 && q_rest <= 1e-12 && k.consistency_residual <= 10 * tol,
         fmt("manufactured error %.3e, rest-state |q| %.3e, consistency %.3e (tol %.0e)", recovery, q_rest,
             k.consistency_residual, tol));
}

void flat_reduction() {
  Model m(make_grid(16, 16, 17, 1.0), Params{});
  const auto& d = m.disc();
  const auto geo = flat_geometry(d, Cutoff(1.0, 0.0));
  test::Gen gen(2003);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = gen.volume(d.grid(), 5, 6);
    VectorField X{gen.volume(d.grid(), 5, 6), gen.volume(d.grid(), 5, 6), gen.volume(d.grid(), 5, 6)};
    worst = std::max(worst, max_abs(grad_phi(d, f, geo, Dealias::no), d.gradient(f)));
    const VolumeField div = d.d1(X[0]) + d.d2(X[1]) + d.d3(X[2]);
    worst = std::max(worst, (div_phi(d, X, geo, Dealias::no) - div).max_abs());
    const VectorField curl{d.d2(X[2]) - d.d3(X[1]), d.d3(X[0]) - d.d1(X[2]), d.d1(X[1]) - d.d2(X[0])};
    worst = std::max(worst, max_abs(curl_phi(d, X, geo, Dealias::no), curl));
  }
  State s = zero_state(d);
  s.F[0][0] += 0.5;
  s.F[1][1] += 0.5;
  const State x = step_rk4(m, s, 0.01);
  double fixed = (x.psi - s.psi).max_abs();
  for (int c = 0; c < 3; ++c) fixed = std::max(fixed, (x.v[c] - s.v[c]).max_abs());
  for (int j = 0; j < 3; ++j)
    for (int c = 0; c < 3; ++c) fixed = std::max(fixed, (x.F[j][c] - s.F[j][c]).max_abs());
  report(10, "flat reduction", worst <= 1e-12 && fixed <= 1e-12,
         fmt("operator mismatch %.3e, flat equilibrium moved %.3e after one step", worst, fixed));
}

}  // namespace

int main() {
  guarded(1, "E0 conservation", energy_and_constraints);
  guarded(2, "Jacobian bound", jacobian_bound);
  guarded(4, "AGU identities", agu);
  guarded(5, "Galerkin symmetry", symmetry);
  guarded(6, "modified tensor trace", modified_tensor);
  guarded(7, "Picard contraction", picard);
  guarded(8, "kappa Cauchy behavior", kappa_limit);
  guarded(9, "pressure solver", pressure);
  guarded(10, "flat reduction", flat_reduction);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
