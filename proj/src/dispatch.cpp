#include "fbe/dispatch.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fbe/agu.hpp"
#include "fbe/calculus.hpp"
#include "fbe/config.hpp"
#include "fbe/diagnostics.hpp"
#include "fbe/galerkin.hpp"

namespace fbe {

using nlohmann::json;

namespace {

const char* name(Subcommand s) {
  switch (s) {
    case Subcommand::run: return "run";
    case Subcommand::verify: return "verify";
    case Subcommand::galerkin: return "galerkin";
    case Subcommand::picard: return "picard";
    case Subcommand::kappa_study: return "kappa-study";
    case Subcommand::norms: return "norms";
  }
  return "?";
}

std::filesystem::path prepare_dir(const std::string& dir) {
  std::filesystem::path p(dir.empty() ? "." : dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec || !std::filesystem::is_directory(p)) throw ConfigError("output_dir", "cannot create " + p.string());
  return p;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("output_dir", "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string alpha_string(const MultiIndex& a) {
  std::ostringstream s;
  s << '(' << a.t << ',' << a.x1 << ',' << a.x2 << ')';
  return s.str();
}

struct Context {
  const CommandSpec& cmd;
  Config config;
  std::filesystem::path dir;
  std::uint64_t seed = 0;
};

DispatchResult do_run(Context& ctx, std::ostream& out) {
  RunConfig rc = ctx.config.run;
  rc.output_dir = ctx.dir.string();
  const auto r = run(rc);
  json rec{{"status", r.breakdown ? "breakdown" : "ok"}, {"steps", r.steps}, {"t_final", r.final_state.t}};
  out << std::setprecision(6) << "steps " << r.steps << "  t " << r.final_state.t << "  rows " << r.rows.size() << '\n';
  if (!r.rows.empty()) {
    const auto& a = r.rows.front();
    const auto& b = r.rows.back();
    out << "E0 " << a.E0 << " -> " << b.E0 << "  r_divF " << b.r_divF << "  r_FN " << b.r_FN << "  min d3phi "
        << b.min_d3phi << '\n';
  }
  if (r.breakdown) {
    rec["error"] = {{"kind", "breakdown"}, {"cause", r.cause}, {"time", r.breakdown_time}};
    out << "breakdown at t = " << r.breakdown_time << ": " << r.cause << '\n';
    return {exit_breakdown, rec};
  }
  return {exit_ok, rec};
}

DispatchResult do_verify(Context& ctx, std::ostream& out) {
  if (ctx.cmd.verify_target != "agu") throw ConfigError("verify", "unknown target '" + ctx.cmd.verify_target + "'");
  const auto& lab = ctx.config.lab;
  const auto t0 = std::chrono::steady_clock::now();
  const auto cases = agu_manufactured_suite(ctx.seed, lab.agu_cases, lab.agu_points);
  out << std::left << std::setw(10) << "case" << std::setw(10) << "alpha" << std::setw(11) << "C1" << std::setw(11)
      << "C2" << std::setw(11) << "C3" << std::setw(11) << "Dcal" << std::setw(11) << "summed" << "ok\n";
  double worst = 0.0;
  json rows = json::array();
  std::ofstream csv(ctx.dir / "agu_residuals.csv");
  csv << "case,alpha_t,alpha_1,alpha_2,C1,C2,C3,Dcal,summed_max\n" << std::setprecision(6);
  out << std::scientific << std::setprecision(2);
  for (const auto& c : cases) {
    const auto v = verify_identity(c);
    const auto& s = v.single;
    const bool ok = v.residual() <= 1e-9;
    worst = std::max(worst, v.residual());
    out << std::setw(10) << c.name << std::setw(10) << alpha_string(c.alpha) << std::setw(11) << s.C[0]
        << std::setw(11) << s.C[1] << std::setw(11) << s.C[2] << std::setw(11) << s.Dcal << std::setw(11)
        << v.summed.max() << (ok ? "yes" : "NO") << '\n';
    csv << c.name << ',' << c.alpha.t << ',' << c.alpha.x1 << ',' << c.alpha.x2 << ',' << s.C[0] << ',' << s.C[1]
        << ',' << s.C[2] << ',' << s.Dcal << ',' << v.summed.max() << '\n';
    rows.push_back({{"case", c.name}, {"residual", v.residual()}});
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out << std::defaultfloat << "max residual " << worst << " over " << cases.size() << " cases in " << secs << " s\n";
  const bool pass = worst <= 1e-9;
  json rec{{"status", pass ? "ok" : "verification_failed"}, {"max_residual", worst}, {"cases", rows}};
  if (!pass) rec["error"] = {{"kind", "verification"}, {"message", "AGU residual above 1e-9"}};
  return {pass ? exit_ok : exit_verification, rec};
}

DispatchResult do_galerkin(Context& ctx, std::ostream& out) {
  const RunConfig& rc = ctx.config.run;
  GalerkinConfig g = ctx.config.lab.galerkin;
  if (ctx.cmd.m) g.m = *ctx.cmd.m;
  if (ctx.cmd.T) g.T = *ctx.cmd.T;
  if (g.m < 1 || g.m > 64) throw ConfigError("m", "m must be in [1, 64]");
  Model model(make_grid(rc.nx, rc.ny, rc.nz, rc.params.b), rc.params, rc.pressure);
  const State s = build_initial_data(model, rc.init);
  const auto r = galerkin_evolve(model, s, s, g.m, g.dt, g.T);

  double C = 0.0;
  for (std::size_t i = 1; i < r.t.size(); ++i)
    if (r.energy[0] > 0.0 && r.energy[i] > 0.0) C = std::max(C, std::log(r.energy[i] / r.energy[0]) / r.t[i]);
  {
    std::ofstream csv(ctx.dir / "galerkin.csv");
    csv << "t,Em\n" << std::setprecision(17);
    for (std::size_t i = 0; i < r.t.size(); ++i) csv << r.t[i] << ',' << r.energy[i] << '\n';
  }
  {
    std::ofstream csv(ctx.dir / "galerkin_coefficients.csv");
    csv << std::setprecision(17);
    for (std::size_t i = 0; i < r.t.size(); ++i) {
      csv << r.t[i];
      for (double x : r.coefficients[i]) csv << ',' << x;
      csv << '\n';
    }
  }
  out << "m " << g.m << "  steps " << r.t.size() - 1 << "  E(0) " << r.energy.front() << "  E(T) " << r.energy.back()
      << "  fitted C " << C << '\n';
  return {exit_ok, {{"status", "ok"}, {"m", g.m}, {"E0", r.energy.front()}, {"ET", r.energy.back()}, {"C", C}}};
}

DispatchResult do_picard(Context& ctx, std::ostream& out) {
  const RunConfig& rc = ctx.config.run;
  PicardOptions opt = ctx.config.lab.picard;
  if (ctx.cmd.n_max) opt.n_max = *ctx.cmd.n_max;
  if (ctx.cmd.T) opt.T = *ctx.cmd.T;
  Model model(make_grid(rc.nx, rc.ny, rc.nz, rc.params.b), rc.params, rc.pressure);
  const State s = build_initial_data(model, rc.init);
  const auto r = picard_iterate(model, s, opt);
  write_picard_csv((ctx.dir / "picard.csv").string(), r);
  bool contracting = true;
  out << std::setprecision(4) << "T " << opt.T << "  steps " << r.steps << "  dt " << r.dt << '\n';
  for (std::size_t n = 0; n < r.E3.size(); ++n) {
    out << "n " << n << "  [E]3 " << std::scientific << r.E3[n];
    if (!std::isnan(r.rho[n])) {
      out << "  rho " << r.rho[n];
      if (n >= 3) contracting = contracting && r.contracting(static_cast<int>(n));
    }
    out << std::defaultfloat << '\n';
  }
  if (!contracting) out << "no contraction (rho > 0.5 for some n >= 3); try a smaller T\n";
  out << "boundary defect of the last iterate " << r.boundary_defect << '\n';
  return {exit_ok,
          {{"status", "ok"}, {"contracting", contracting}, {"E3", r.E3}, {"boundary_defect", r.boundary_defect}}};
}

DispatchResult do_kappa_study(Context& ctx, std::ostream& out) {
  RunConfig rc = ctx.config.run;
  rc.output_dir = ctx.dir.string();
  const auto st = kappa_convergence_study(rc, ctx.config.lab.kappas);
  out << std::setprecision(6) << "dt " << st.dt << '\n';
  for (const auto& p : st.pairs) out << "kappa " << p.kappa_a << " vs " << p.kappa_b << "  distance " << p.distance << '\n';
  for (const auto& f : st.failures) out << "member failed: " << f << '\n';
  out << (st.strictly_decreasing ? "strictly decreasing\n" : "NOT strictly decreasing\n");
  json pairs = json::array();
  for (const auto& p : st.pairs) pairs.push_back({{"kappa_a", p.kappa_a}, {"kappa_b", p.kappa_b}, {"distance", p.distance}});
  json rec{{"pairs", pairs}, {"strictly_decreasing", st.strictly_decreasing}, {"failures", st.failures}};
  if (!st.failures.empty()) {
    rec["status"] = "breakdown";
    rec["error"] = {{"kind", "breakdown"}, {"members", st.failures}};
    return {exit_breakdown, rec};
  }
  if (!st.strictly_decreasing) {
    rec["status"] = "verification_failed";
    rec["error"] = {{"kind", "verification"}, {"message", "distances not strictly decreasing"}};
    return {exit_verification, rec};
  }
  rec["status"] = "ok";
  return {exit_ok, rec};
}

DispatchResult do_norms(Context& ctx, std::ostream& out) {
  const RunConfig& rc = ctx.config.run;
  Model model(make_grid(rc.nx, rc.ny, rc.nz, rc.params.b), rc.params, rc.pressure);
  const Discretization& d = model.disc();
  const State s = build_initial_data(model, rc.init);
  const auto geo = model.geometry(s.psi, s.dtpsi);
  const auto e = energy_e0(d, rc.params, s, geo);
  const auto c = constraint_report(d, s, geo);
  const auto h = hodge_decomposition_report(d, s, geo);
  auto vec_norm = [&](const VectorField& X, int k) {
    double a = 0.0;
    for (const auto& x : X) {
      const double n = sobolev_norm_interior(d, x, k);
      a += n * n;
    }
    return std::sqrt(a);
  };
  auto hodge = [](const HodgeTerms& t) {
    return json{{"div", t.div}, {"curl", t.curl}, {"tangential", t.tangential}, {"l2", t.l2}, {"full", t.full}};
  };
  json rec{{"status", "ok"},
           {"E0", e.E0},
           {"e0_literal", e.e0_literal},
           {"kinetic", e.kinetic},
           {"elastic", e.elastic},
           {"surface_sigma", e.surface_sigma},
           {"kappa_surface", e.kappa_surface},
           {"v_H4", vec_norm(s.v, 4)},
           {"F_H4", {vec_norm(s.F[0], 4), vec_norm(s.F[1], 4), vec_norm(s.F[2], 4)}},
           {"psi_H5", sobolev_norm_surface(d, s.psi, 5.0)},
           {"psi_H4.5", sobolev_norm_surface(d, s.psi, 4.5)},
           {"r_divv", c.r_divv},
           {"r_divF", c.r_divF},
           {"r_FN", c.r_FN},
           {"min_d3phi", geo.c0},
           {"hodge", {{"v", hodge(h.v)}, {"F1", hodge(h.F[0])}, {"F2", hodge(h.F[1])}, {"F3", hodge(h.F[2])}}}};
  write_json(ctx.dir / "norms.json", rec);
  out << rec.dump(2) << '\n';
  return {exit_ok, rec};
}

json error_record(const std::string& kind, const std::string& message, int code) {
  return {{"status", "error"}, {"error", {{"kind", kind}, {"message", message}}}, {"exit_code", code}};
}

}  // namespace

DispatchResult dispatch(const CommandSpec& cmd, std::ostream& out) {
  DispatchResult res;
  std::filesystem::path dir;
  try {
    Context ctx{cmd, {}, {}, 0};
    if (!cmd.config_path.empty())
      ctx.config = parse_config_file(cmd.config_path);
    else
      ctx.config = parse_config(json{{"grid", json::object()}});
    dir = prepare_dir(cmd.output_dir.empty() ? ctx.config.run.output_dir : cmd.output_dir);
    ctx.dir = dir;
    ctx.seed = cmd.seed.value_or(ctx.config.run.seed);
    ctx.config.run.seed = static_cast<unsigned>(ctx.seed);
    write_json(dir / "run_info.json", {{"subcommand", name(cmd.sub)}, {"seed", ctx.seed}, {"config", to_json(ctx.config)}});
    switch (cmd.sub) {
      case Subcommand::run: res = do_run(ctx, out); break;
      case Subcommand::verify: res = do_verify(ctx, out); break;
      case Subcommand::galerkin: res = do_galerkin(ctx, out); break;
      case Subcommand::picard: res = do_picard(ctx, out); break;
      case Subcommand::kappa_study: res = do_kappa_study(ctx, out); break;
      case Subcommand::norms: res = do_norms(ctx, out); break;
    }
    res.record["exit_code"] = res.exit_code;
  } catch (const ConfigError& e) {
    res = {exit_config, error_record("config", e.what(), exit_config)};
    res.record["error"]["path"] = e.path();
  } catch (const ShapeMismatch& e) {
    res = {exit_config, error_record("shape_mismatch", e.what(), exit_config)};
  } catch (const InsufficientHistory& e) {
    res = {exit_config, error_record("insufficient_history", e.what(), exit_config)};
  } catch (const ConstraintResidualTooLarge& e) {
    res = {exit_config, error_record("initial_constraints", e.what(), exit_config)};
  } catch (const DiffeomorphismBreakdown& e) {
    res = {exit_breakdown, error_record("breakdown", e.what(), exit_breakdown)};
    res.record["error"]["min_d3phi"] = e.min_jacobian();
  } catch (const NonConvergence& e) {
    res = {exit_breakdown, error_record("nonconvergence", e.what(), exit_breakdown)};
    res.record["error"]["residual"] = std::isfinite(e.residual()) ? json(e.residual()) : json(nullptr);
    res.record["error"]["iterations"] = e.iterations();
  }
  res.record["subcommand"] = name(cmd.sub);
  if (dir.empty() && !cmd.output_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cmd.output_dir, ec);
    if (!ec) dir = cmd.output_dir;
  }
  if (!dir.empty() && res.exit_code != exit_ok) {
    std::ofstream f(dir / "error.json");
    if (f) f << res.record.dump(2) << '\n';
  }
  return res;
}

}  // namespace fbe
