#include "fbe/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace fbe {

using nlohmann::json;

namespace {

// Walks one JSON object, remembers which keys were consumed and complains
// about the rest.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "config" : path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_[key].is_null();
  }
  const json& raw(const std::string& key) const { return j_[key]; }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& x = j_[key];
    if (!x.is_number()) throw ConfigError(at(key), "expected a number");
    const double v = x.get<double>();
    if (!std::isfinite(v)) throw ConfigError(at(key), "must be finite");
    return v;
  }
  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& x = j_[key];
    if (!x.is_number_integer()) throw ConfigError(at(key), "expected an integer");
    return x.get<int>();
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    if (!j_[key].is_boolean()) throw ConfigError(at(key), "expected true or false");
    return j_[key].get<bool>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    if (!j_[key].is_string()) throw ConfigError(at(key), "expected a string");
    return j_[key].get<std::string>();
  }
  const json& array(const std::string& key) {
    const json& x = j_[key];
    if (!x.is_array()) throw ConfigError(at(key), "expected an array");
    return x;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(at(k), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

SurfaceMode surface_mode(const json& j, const std::string& path) {
  Reader r(j, path);
  SurfaceMode m{r.integer("k1", 0), r.integer("k2", 0), r.number("amp", 0.0), r.number("amp_sin", 0.0)};
  r.finish();
  return m;
}

std::vector<SurfaceMode> surface_modes(Reader& r, const std::string& key) {
  std::vector<SurfaceMode> out;
  if (!r.has(key)) return out;
  const json& a = r.array(key);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(surface_mode(a[i], r.at(key) + "[" + std::to_string(i) + "]"));
  return out;
}

InitialData parse_init(const json& j, const std::string& path) {
  Reader r(j, path);
  InitialData d;
  d.psi = surface_modes(r, "psi");
  if (r.has("stream")) {
    const json& a = r.array("stream");
    for (std::size_t i = 0; i < a.size(); ++i) {
      Reader m(a[i], r.at("stream") + "[" + std::to_string(i) + "]");
      d.stream.push_back({m.integer("k1", 0), m.integer("k2", 0), m.number("a1", 0.0), m.number("a2", 0.0),
                          m.number("a3", 0.0)});
      m.finish();
    }
  }
  if (r.has("potential")) {
    const json& a = r.array("potential");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string p = r.at("potential") + "[" + std::to_string(i) + "]";
      Reader m(a[i], p);
      PotentialMode pm{m.integer("k1", 0), m.integer("k2", 0), m.number("amp", 0.0)};
      m.finish();
      if (pm.k1 == 0 && pm.k2 == 0) throw ConfigError(p, "potential mode needs k != 0");
      d.potential.push_back(pm);
    }
  }
  if (r.has("elastic")) {
    const json& a = r.array("elastic");
    if (a.size() > 3) throw ConfigError(r.at("elastic"), "at most 3 columns");
    for (std::size_t i = 0; i < a.size(); ++i) {
      Reader m(a[i], r.at("elastic") + "[" + std::to_string(i) + "]");
      d.elastic[i].c1 = m.number("c1", 0.0);
      d.elastic[i].c2 = m.number("c2", 0.0);
      d.elastic[i].h = surface_modes(m, "h");
      m.finish();
    }
  }
  r.finish();
  return d;
}

json modes_json(const std::vector<SurfaceMode>& ms) {
  json a = json::array();
  for (const auto& m : ms) a.push_back({{"k1", m.k1}, {"k2", m.k2}, {"amp", m.amp}, {"amp_sin", m.amp_sin}});
  return a;
}

}  // namespace

Config parse_config(const json& j) {
  Config c;
  RunConfig& run = c.run;
  Reader r(j, "");

  if (!r.has("grid")) throw ConfigError("grid", "missing");
  {
    Reader g(r.raw("grid"), "grid");
    run.nx = g.integer("nx", run.nx);
    run.ny = g.integer("ny", run.ny);
    run.nz = g.integer("nz", run.nz);
    g.finish();
  }
  if (run.nx < 8 || run.nx % 2) throw ConfigError("grid.nx", "nx must be even and >= 8");
  if (run.ny < 8 || run.ny % 2) throw ConfigError("grid.ny", "ny must be even and >= 8");
  if (run.nz < 9) throw ConfigError("grid.nz", "nz must be >= 9");

  Params& p = run.params;
  p.sigma = r.number("sigma", 0.5);
  p.kappa = r.number("kappa", 0.1);
  p.b = r.number("b", 1.0);
  p.delta0 = r.number("delta0", 0.0);
  if (!(p.sigma > 0.0)) throw ConfigError("sigma", "sigma must be > 0");
  if (p.kappa < 0.0) throw ConfigError("kappa", "kappa must be >= 0");
  if (!(p.b > 0.0)) throw ConfigError("b", "b must be > 0");
  if (p.delta0 < 0.0 || p.delta0 >= 0.5 * p.b) throw ConfigError("delta0", "delta0 must lie in [0, b/2)");

  run.T = r.number("T", run.T);
  if (!(run.T > 0.0)) throw ConfigError("T", "T must be > 0");
  run.safety = r.number("safety", 0.5);
  if (!(run.safety > 0.0 && run.safety <= 1.0)) throw ConfigError("safety", "safety must lie in (0, 1]");
  run.cadence = r.integer("cadence", run.cadence);
  if (run.cadence < 1) throw ConfigError("cadence", "cadence must be >= 1");
  if (r.has("dt")) {
    run.dt = r.number("dt", 0.0);
    if (!(*run.dt > 0.0)) throw ConfigError("dt", "dt must be > 0");
  }
  if (r.has("pressure")) {
    Reader q(r.raw("pressure"), "pressure");
    run.pressure.tol = q.number("tol", run.pressure.tol);
    run.pressure.max_iter = q.integer("max_iter", run.pressure.max_iter);
    q.finish();
    if (!(run.pressure.tol > 0.0)) throw ConfigError("pressure.tol", "tol must be > 0");
    if (run.pressure.max_iter < 1) throw ConfigError("pressure.max_iter", "max_iter must be >= 1");
  }
  if (r.has("init")) run.init = parse_init(r.raw("init"), "init");
  run.output_dir = r.string("output_dir", "");
  run.snapshots = r.boolean("snapshots", true);
  if (r.has("seed")) {
    const json& s = r.raw("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError("seed", "expected a non-negative integer");
    run.seed = s.get<unsigned>();
  }

  LabConfig& lab = c.lab;
  if (r.has("kappas")) {
    const json& a = r.array("kappas");
    lab.kappas.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_number()) throw ConfigError("kappas[" + std::to_string(i) + "]", "expected a number");
      lab.kappas.push_back(a[i].get<double>());
      if (lab.kappas.back() < 0.0) throw ConfigError("kappas[" + std::to_string(i) + "]", "kappa must be >= 0");
    }
  }
  if (r.has("galerkin")) {
    Reader g(r.raw("galerkin"), "galerkin");
    lab.galerkin.m = g.integer("m", lab.galerkin.m);
    lab.galerkin.dt = g.number("dt", lab.galerkin.dt);
    lab.galerkin.T = g.number("T", lab.galerkin.T);
    g.finish();
    if (lab.galerkin.m < 1 || lab.galerkin.m > 64) throw ConfigError("galerkin.m", "m must be in [1, 64]");
    if (!(lab.galerkin.dt > 0.0)) throw ConfigError("galerkin.dt", "dt must be > 0");
    if (lab.galerkin.T < 0.0) throw ConfigError("galerkin.T", "T must be >= 0");
  }
  if (r.has("picard")) {
    Reader g(r.raw("picard"), "picard");
    lab.picard.n_max = g.integer("n_max", lab.picard.n_max);
    lab.picard.T = g.number("T", lab.picard.T);
    if (g.has("dt")) lab.picard.dt = g.number("dt", 0.0);
    g.finish();
    if (lab.picard.n_max < 1) throw ConfigError("picard.n_max", "n_max must be >= 1");
    if (!(lab.picard.T > 0.0)) throw ConfigError("picard.T", "T must be > 0");
    if (lab.picard.dt && !(*lab.picard.dt > 0.0)) throw ConfigError("picard.dt", "dt must be > 0");
  }
  if (r.has("agu")) {
    Reader g(r.raw("agu"), "agu");
    lab.agu_cases = g.integer("cases", lab.agu_cases);
    lab.agu_points = g.integer("points", lab.agu_points);
    g.finish();
    if (lab.agu_cases < 1) throw ConfigError("agu.cases", "cases must be >= 1");
    if (lab.agu_points < 1) throw ConfigError("agu.points", "points must be >= 1");
  }
  r.finish();
  return c;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const Config& c) {
  const RunConfig& r = c.run;
  json init;
  init["psi"] = modes_json(r.init.psi);
  init["stream"] = json::array();
  for (const auto& s : r.init.stream)
    init["stream"].push_back({{"k1", s.k1}, {"k2", s.k2}, {"a1", s.a1}, {"a2", s.a2}, {"a3", s.a3}});
  init["potential"] = json::array();
  for (const auto& s : r.init.potential) init["potential"].push_back({{"k1", s.k1}, {"k2", s.k2}, {"amp", s.amp}});
  init["elastic"] = json::array();
  for (const auto& e : r.init.elastic) init["elastic"].push_back({{"c1", e.c1}, {"c2", e.c2}, {"h", modes_json(e.h)}});

  json j{{"grid", {{"nx", r.nx}, {"ny", r.ny}, {"nz", r.nz}}},
         {"sigma", r.params.sigma},
         {"kappa", r.params.kappa},
         {"b", r.params.b},
         {"delta0", r.params.delta0},
         {"T", r.T},
         {"safety", r.safety},
         {"cadence", r.cadence},
         {"pressure", {{"tol", r.pressure.tol}, {"max_iter", r.pressure.max_iter}}},
         {"init", init},
         {"output_dir", r.output_dir},
         {"snapshots", r.snapshots},
         {"seed", r.seed},
         {"kappas", c.lab.kappas},
         {"galerkin", {{"m", c.lab.galerkin.m}, {"dt", c.lab.galerkin.dt}, {"T", c.lab.galerkin.T}}},
         {"picard", {{"n_max", c.lab.picard.n_max}, {"T", c.lab.picard.T}}},
         {"agu", {{"cases", c.lab.agu_cases}, {"points", c.lab.agu_points}}}};
  if (r.dt) j["dt"] = *r.dt;
  if (c.lab.picard.dt) j["picard"]["dt"] = *c.lab.picard.dt;
  return j;
}

}  // namespace fbe
