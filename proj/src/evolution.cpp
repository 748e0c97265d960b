#include "fbe/evolution.hpp"

#include <deque>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

#include "fbe/calculus.hpp"
#include "fbe/diagnostics.hpp"
#include "fbe/snapshot.hpp"

namespace fbe {

Model::Model(const Grid& grid, Params params, PressureOptions pressure)
    : disc_(std::make_unique<Discretization>(grid)),
      chi_(grid.b, params.delta0),
      params_(params),
      pressure_(pressure),
      solver_(std::make_unique<PressureSolver>(*disc_)) {
  if (std::abs(params.b - grid.b) > 1e-14 * grid.b) throw ConfigError("b", "params.b differs from grid depth");
  if (!(params.sigma >= 0.0)) throw ConfigError("sigma", "sigma must be >= 0");
  if (!(params.kappa >= 0.0)) throw ConfigError("kappa", "kappa must be >= 0");
}

SurfaceField kinematic_rate(const Discretization& disc, const VectorField& v, const std::array<SurfaceField, 2>& dpsi) {
  const int top = disc.nz() - 1;
  auto v1 = level(disc, v[0], top);
  auto v2 = level(disc, v[1], top);
  auto v3 = level(disc, v[2], top);
  SurfaceField r(v1.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = -v1[i] * dpsi[0][i] - v2[i] * dpsi[1][i] + v3[i];
  disc.dealias(r);
  return r;
}

Coefficients nonlinear_coefficients(const Model& model, const State& s) {
  const Discretization& d = model.disc();
  Coefficients c;
  auto dpsi = d.horizontal_gradient(s.psi);
  auto rate = kinematic_rate(d, s.v, dpsi);
  c.geo = model.geometry(s.psi, rate);
  c.vbar = {s.v[0], s.v[1]};
  c.V = VolumeField(s.v[0].size());
  for (std::size_t i = 0; i < c.V.size(); ++i)
    c.V[i] = (-s.v[0][i] * c.geo.d1phi[i] - s.v[1][i] * c.geo.d2phi[i] + s.v[2][i] - c.geo.dtphi[i]) / c.geo.d3phi[i];
  c.frak = s.F;
  c.kin_dpsi = std::move(dpsi);
  c.sigma_H = mean_curvature(d, s.psi);
  c.sigma_H *= model.params().sigma;
  return c;
}

namespace {

// (vbar . dbar + V d3) f from a flat gradient
VolumeField transport(const Coefficients& c, const VectorField& g) {
  VolumeField out(g[0].size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = c.vbar[0][i] * g[0][i] + c.vbar[1][i] * g[1][i] + c.V[i] * g[2][i];
  return out;
}

// (X . grad^phi) f from a phi-gradient
VolumeField directional(const VectorField& X, const VectorField& gp) {
  VolumeField out(gp[0].size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = X[0][i] * gp[0][i] + X[1][i] * gp[1][i] + X[2][i] * gp[2][i];
  return out;
}

// [d_t, div^phi] v from the flat vertical derivatives of v
VolumeField time_commutator(const FlattenedGeometry& geo, const std::array<VectorField, 3>& gv) {
  VolumeField out(geo.phi.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double J = geo.d3phi[i];
    const double J2 = J * J;
    const double a1 = (geo.dt_d1phi[i] * J - geo.d1phi[i] * geo.dt_d3phi[i]) / J2;
    const double a2 = (geo.dt_d2phi[i] * J - geo.d2phi[i] * geo.dt_d3phi[i]) / J2;
    out[i] = -a1 * gv[0][2][i] - a2 * gv[1][2][i] - geo.dt_d3phi[i] / J2 * gv[2][2][i];
  }
  return out;
}

}  // namespace

Tendency evaluate(const Model& model, const State& s, const Coefficients& c, EvalOptions opt) {
  const Discretization& d = model.disc();
  const Params& p = model.params();
  const FlattenedGeometry& geo = c.geo;
  const int nz = d.nz();
  const std::size_t S = d.grid().surface_size();
  for (const auto& x : s.v) d.check(x);

  Tendency T;
  T.dpsi = kinematic_rate(d, s.v, c.kin_dpsi);

  std::array<VectorField, 3> gv, gpv;
  for (int i = 0; i < 3; ++i) {
    gv[i] = d.gradient(s.v[i]);
    gpv[i] = grad_phi_from_flat(d, gv[i], geo, Dealias::no);
  }
  std::array<std::array<VectorField, 3>, 3> gF, gpF;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      gF[j][i] = d.gradient(s.F[j][i]);
      gpF[j][i] = grad_phi_from_flat(d, gF[j][i], geo, Dealias::no);
    }

  // G = (frak_k . grad^phi) F_k - B(v)
  VectorField G;
  for (int i = 0; i < 3; ++i) {
    G[i] = -1.0 * transport(c, gv[i]);
    for (int k = 0; k < 3; ++k) G[i] += directional(c.frak[k], gpF[k][i]);
  }

  const VolumeField commutator = time_commutator(geo, gv);
  PressureProblem prob;
  prob.geom = &geo;
  prob.rhs = div_phi(d, G, geo, Dealias::no) + commutator;
  prob.bottom_neumann = level(d, G[2], 0);
  SurfaceField top = c.sigma_H;
  if (p.kappa > 0.0) {
    top.axpy(p.kappa, multiplier(d, s.psi, Symbol::one_minus_lap_sq));
    top.axpy(p.kappa, multiplier(d, T.dpsi, Symbol::one_minus_lap));
  }
  prob.top_dirichlet = top;
  prob.tol = model.pressure().tol;
  prob.max_iter = model.pressure().max_iter;
  const VolumeField* guess = opt.q_guess ? opt.q_guess : (s.q.size() == d.grid().volume_size() ? &s.q : nullptr);
  PressureResult pr = model.solver().solve(prob, guess);
  T.q = std::move(pr.q);
  T.pressure_iterations = pr.iterations;
  T.pressure_residual = pr.residual;

  auto gq = grad_phi(d, T.q, geo, Dealias::no);
  for (int i = 0; i < 3; ++i) T.dv[i] = G[i] - gq[i];

  if (opt.consistency) {
    VolumeField r = div_phi(d, T.dv, geo, Dealias::no) + commutator;
    double num = 0.0;
    for (int k = 1; k < nz - 1; ++k)
      for (std::size_t i = 0; i < S; ++i) num += r[k * S + i] * r[k * S + i];
    VolumeField b = model.solver().assemble(prob);
    double den = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) den += b[i] * b[i];
    T.consistency_residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  }

  for (int i = 0; i < 3; ++i) d.dealias(T.dv[i]);
  set_level(d, T.dv[2], 0, d.zeros_surface());

  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      T.dF[j][i] = directional(c.frak[j], gpv[i]) - transport(c, gF[j][i]);
      d.dealias(T.dF[j][i]);
    }
    set_level(d, T.dF[j][2], 0, d.zeros_surface());
  }

  if (p.kappa > 0.0) {
    const double n = sobolev_norm_surface(d, T.dpsi, 1.0);
    T.ddissipation = p.kappa * n * n;
  }
  return T;
}

Tendency rhs(const Model& model, const State& s, EvalOptions opt) {
  return evaluate(model, s, nonlinear_coefficients(model, s), opt);
}

namespace {

State combine(const State& s, double a, const Tendency& k) {
  State out;
  for (int i = 0; i < 3; ++i) {
    out.v[i] = s.v[i];
    out.v[i].axpy(a, k.dv[i]);
  }
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      out.F[j][i] = s.F[j][i];
      out.F[j][i].axpy(a, k.dF[j][i]);
    }
  out.psi = s.psi;
  out.psi.axpy(a, k.dpsi);
  out.dissipation = s.dissipation + a * k.ddissipation;
  out.q = k.q;
  out.dtpsi = k.dpsi;
  out.t = s.t + a;
  return out;
}

bool same_state(const State& a, const State& b) {
  return a.t == b.t && a.psi.values() == b.psi.values() && a.v[0].values() == b.v[0].values() &&
         a.F[0][0].values() == b.F[0][0].values() && a.dissipation == b.dissipation;
}

}  // namespace

Stepper::Stepper(const Model& model, CoefficientFn coefficients) : model_(model), coeffs_(std::move(coefficients)) {
  if (!coeffs_) coeffs_ = [&m = model_](const State& s) { return nonlinear_coefficients(m, s); };
}

Tendency Stepper::eval(const State& s, const VolumeField* guess) {
  EvalOptions opt;
  opt.q_guess = guess;
  return evaluate(model_, s, coeffs_(s), opt);
}

const Tendency& Stepper::tendency_at(const State& s) {
  if (!(cached_ && cached_state_ && same_state(*cached_state_, s))) {
    cached_ = eval(s, nullptr);
    cached_state_ = s;
  }
  return *cached_;
}

State Stepper::step(const State& s, double dt) {
  const Tendency k1 = tendency_at(s);
  const State y2 = combine(s, 0.5 * dt, k1);
  const Tendency k2 = eval(y2, &k1.q);
  const State y3 = combine(s, 0.5 * dt, k2);
  const Tendency k3 = eval(y3, &k2.q);
  const State y4 = combine(s, dt, k3);
  const Tendency k4 = eval(y4, &k3.q);

  State out;
  const double w1 = dt / 6.0, w2 = dt / 3.0;
  for (int i = 0; i < 3; ++i) {
    out.v[i] = s.v[i];
    out.v[i].axpy(w1, k1.dv[i]);
    out.v[i].axpy(w2, k2.dv[i]);
    out.v[i].axpy(w2, k3.dv[i]);
    out.v[i].axpy(w1, k4.dv[i]);
  }
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      out.F[j][i] = s.F[j][i];
      out.F[j][i].axpy(w1, k1.dF[j][i]);
      out.F[j][i].axpy(w2, k2.dF[j][i]);
      out.F[j][i].axpy(w2, k3.dF[j][i]);
      out.F[j][i].axpy(w1, k4.dF[j][i]);
    }
  out.psi = s.psi;
  out.psi.axpy(w1, k1.dpsi);
  out.psi.axpy(w2, k2.dpsi);
  out.psi.axpy(w2, k3.dpsi);
  out.psi.axpy(w1, k4.dpsi);
  out.dissipation =
      s.dissipation + w1 * k1.ddissipation + w2 * k2.ddissipation + w2 * k3.ddissipation + w1 * k4.ddissipation;
  out.t = s.t + dt;
  out.q = k4.q;

  Tendency next = eval(out, &k4.q);
  out.q = next.q;
  out.dtpsi = next.dpsi;
  cached_ = std::move(next);
  cached_state_ = out;
  return out;
}

State step_rk4(const Model& model, const State& s, double dt) {
  Stepper stepper(model);
  return stepper.step(s, dt);
}

double cfl_dt(const Model& model, const State& s, double safety) {
  if (!(safety > 0.0 && safety <= 1.0)) throw ConfigError("safety", "safety must lie in (0, 1]");
  const Discretization& d = model.disc();
  const Params& p = model.params();
  const double dx = 2.0 * std::numbers::pi / std::max(d.nx(), d.ny());
  double speed = dot_max_abs(s.v);
  for (int j = 0; j < 3; ++j) speed += dot_max_abs(s.F[j]);
  if (!std::isfinite(speed)) throw std::domain_error("non-finite speed in cfl_dt");
  double dt = std::numeric_limits<double>::infinity();
  if (speed > 0.0) dt = std::min(dt, dx / speed);
  if (p.sigma > 0.0) dt = std::min(dt, std::sqrt(dx * dx * dx / (2.0 * std::numbers::pi * p.sigma)));
  if (p.kappa > 0.0) {
    const double kmax = std::max(d.dealias_kmax_x(), d.dealias_kmax_y());
    dt = std::min(dt, dx * dx / (1.0 + p.kappa * std::pow(kmax, 4) * dx * dx));
  }
  if (!std::isfinite(dt)) throw ConfigError("params", "no time-step constraint is active (zero state, sigma = kappa = 0)");
  return safety * dt;
}

void write_diag_csv(const std::string& path, const std::vector<DiagRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("output_dir", "cannot write " + path);
  out << "t,E0,E4,r_divv,r_divF,r_FN,min_d3phi,dt\n";
  out << std::setprecision(17);
  for (const auto& r : rows)
    out << r.t << ',' << r.E0 << ',' << r.E4 << ',' << r.r_divv << ',' << r.r_divF << ',' << r.r_FN << ','
        << r.min_d3phi << ',' << r.dt << '\n';
}

RunResult run(const RunConfig& config, const StepObserver& observer) {
  Grid g = make_grid(config.nx, config.ny, config.nz, config.params.b);
  Model model(g, config.params, config.pressure);
  return run(model, config, observer);
}

RunResult run(const Model& model, const RunConfig& config, const StepObserver& observer) {
  if (!(config.T > 0.0)) throw ConfigError("T", "T must be > 0");
  if (!(config.safety > 0.0 && config.safety <= 1.0)) throw ConfigError("safety", "safety must lie in (0, 1]");
  if (config.cadence < 1) throw ConfigError("cadence", "cadence must be >= 1");
  if (config.dt && !(*config.dt > 0.0)) throw ConfigError("dt", "dt must be > 0");
  const Discretization& d = model.disc();
  const Params& p = model.params();
  const bool files = !config.output_dir.empty();
  std::filesystem::path dir(config.output_dir);
  if (files) {
    std::filesystem::create_directories(dir);
    if (config.snapshots) std::filesystem::create_directories(dir / "snapshots");
  }

  RunResult result;
  State s = build_initial_data(model, config.init);
  result.initial_state = s;
  Stepper stepper(model);

  struct Entry {
    State s;
    Tendency k;
  };
  std::deque<Entry> window;
  std::map<int, DiagRow> pending;
  auto emit = [&](int n, const State& st, double dt) {
    auto geo = model.geometry(st.psi, st.dtpsi);
    auto e = energy_e0(d, p, st, geo);
    auto c = constraint_report(d, st, geo);
    DiagRow row{st.t, e.E0, std::nan(""), c.r_divv, c.r_divF, c.r_FN, geo.c0, dt};
    pending[n] = row;
    if (files && config.snapshots) {
      std::ostringstream stem;
      stem << "state_" << std::setw(6) << std::setfill('0') << n;
      write_state((dir / "snapshots" / stem.str()).string(), d.grid(), p, st);
    }
  };
  auto flush_e4 = [&](int newest) {
    const int center = newest - 2;
    auto it = pending.find(center);
    if (it == pending.end() || window.size() < 5) return;
    std::vector<Snapshot> w;
    for (const auto& e : window) w.push_back({&e.s, &e.k});
    it->second.E4 = energy_e4(d, p, w);
  };

  int n = 0;
  const Tendency& k0 = stepper.tendency_at(s);
  if (observer) observer(s, k0);
  window.push_back({s, k0});
  emit(0, s, 0.0);
  const double eps = 1e-12 * config.T;
  try {
    while (s.t < config.T - eps) {
      double dt = config.dt ? *config.dt : cfl_dt(model, s, config.safety);
      if (s.t + dt > config.T - eps) dt = config.T - s.t;
      s = stepper.step(s, dt);
      ++n;
      const Tendency& k = stepper.tendency_at(s);
      if (observer) observer(s, k);
      window.push_back({s, k});
      if (window.size() > 5) window.pop_front();
      const bool last = s.t >= config.T - eps;
      if (n % config.cadence == 0 || last) emit(n, s, dt);
      flush_e4(n);
    }
  } catch (const DiffeomorphismBreakdown& e) {
    result.breakdown = true;
    result.cause = e.what();
    result.breakdown_time = s.t;
  } catch (const NonConvergence& e) {
    result.breakdown = true;
    result.cause = e.what();
    result.breakdown_time = s.t;
  }
  result.steps = n;
  result.final_state = s;
  for (auto& [idx, row] : pending) result.rows.push_back(row);
  if (files) write_diag_csv((dir / "diag.csv").string(), result.rows);
  return result;
}

}  // namespace fbe
