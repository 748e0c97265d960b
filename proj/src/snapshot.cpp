#include "fbe/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace fbe {

namespace {

void write_le(std::ofstream& out, double x) {
  static_assert(sizeof(double) == 8);
  std::uint64_t u;
  std::memcpy(&u, &x, 8);
  if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
  out.write(reinterpret_cast<const char*>(&u), 8);
}

double read_le(std::ifstream& in) {
  std::uint64_t u = 0;
  in.read(reinterpret_cast<char*>(&u), 8);
  if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
  double x;
  std::memcpy(&x, &u, 8);
  return x;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw ConfigError("output_dir", "cannot write " + path);
  return out;
}

}  // namespace

void write_field(const std::string& stem, const Grid& grid, double time, const std::vector<const double*>& components,
                 std::size_t component_size) {
  const bool surface = component_size == grid.surface_size();
  nlohmann::json h{{"nx", grid.nx}, {"ny", grid.ny}, {"nz", surface ? 1 : grid.nz}, {"b", grid.b},
                   {"arity", components.size()}, {"time", time}};
  auto js = open_out(stem + ".json");
  js << h.dump(2) << "\n";
  auto bin = open_out(stem + ".bin", std::ios::out | std::ios::binary);
  for (const double* c : components)
    for (std::size_t i = 0; i < component_size; ++i) write_le(bin, c[i]);
}

void write_field(const std::string& stem, const Grid& grid, double time, const VolumeField& f) {
  write_field(stem, grid, time, {f.data()}, f.size());
}

void write_field(const std::string& stem, const Grid& grid, double time, const SurfaceField& f) {
  write_field(stem, grid, time, {f.data()}, f.size());
}

void write_field(const std::string& stem, const Grid& grid, double time, const VectorField& f) {
  write_field(stem, grid, time, {f[0].data(), f[1].data(), f[2].data()}, f[0].size());
}

std::vector<double> read_field(const std::string& stem, SnapshotHeader& header) {
  std::ifstream js(stem + ".json");
  if (!js) throw ConfigError("snapshot", "cannot read " + stem + ".json");
  nlohmann::json h = nlohmann::json::parse(js);
  header.nx = h.at("nx");
  header.ny = h.at("ny");
  header.nz = h.at("nz");
  header.b = h.at("b");
  header.arity = h.at("arity");
  header.time = h.at("time");
  const std::size_t n = static_cast<std::size_t>(header.nx) * header.ny * header.nz * header.arity;
  std::ifstream bin(stem + ".bin", std::ios::binary);
  if (!bin) throw ConfigError("snapshot", "cannot read " + stem + ".bin");
  std::vector<double> data(n);
  for (auto& x : data) x = read_le(bin);
  if (!bin) throw ConfigError("snapshot", stem + ".bin is truncated");
  return data;
}

void write_state(const std::string& stem, const Grid& grid, const Params& params, const State& s) {
  write_field(stem + "_v", grid, s.t, s.v);
  for (int j = 0; j < 3; ++j) write_field(stem + "_F" + std::to_string(j + 1), grid, s.t, s.F[j]);
  write_field(stem + "_q", grid, s.t, s.q);
  write_field(stem + "_psi", grid, s.t, s.psi);
  write_field(stem + "_dtpsi", grid, s.t, s.dtpsi);
  nlohmann::json m{{"t", s.t},
                   {"sigma", params.sigma},
                   {"kappa", params.kappa},
                   {"b", params.b},
                   {"delta0", params.delta0},
                   {"dissipation", s.dissipation},
                   {"grid", {{"nx", grid.nx}, {"ny", grid.ny}, {"nz", grid.nz}}}};
  auto out = open_out(stem + "_manifest.json");
  out << m.dump(2) << "\n";
}

State read_state(const std::string& stem, const Grid& grid) {
  SnapshotHeader h;
  auto expect = [&](const std::string& name, int arity, bool surface) {
    auto data = read_field(stem + "_" + name, h);
    if (h.nx != grid.nx || h.ny != grid.ny || h.nz != (surface ? 1 : grid.nz) || h.arity != arity)
      throw ShapeMismatch("snapshot " + name + " does not match grid");
    return data;
  };
  const std::size_t n = grid.volume_size(), S = grid.surface_size();
  State s;
  auto v = expect("v", 3, false);
  for (int c = 0; c < 3; ++c) s.v[c] = VolumeField(std::vector<double>(v.begin() + c * n, v.begin() + (c + 1) * n));
  for (int j = 0; j < 3; ++j) {
    auto f = expect("F" + std::to_string(j + 1), 3, false);
    for (int c = 0; c < 3; ++c)
      s.F[j][c] = VolumeField(std::vector<double>(f.begin() + c * n, f.begin() + (c + 1) * n));
  }
  s.q = VolumeField(expect("q", 1, false));
  s.psi = SurfaceField(expect("psi", 1, true));
  s.dtpsi = SurfaceField(expect("dtpsi", 1, true));
  if (s.psi.size() != S) throw ShapeMismatch("snapshot psi does not match grid");
  s.t = h.time;
  std::ifstream js(stem + "_manifest.json");
  if (js) s.dissipation = nlohmann::json::parse(js).value("dissipation", 0.0);
  return s;
}

}  // namespace fbe
