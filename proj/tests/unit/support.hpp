#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "fbe/evolution.hpp"
#include "fbe/grid.hpp"
#include "fbe/state.hpp"

namespace fbe::test {

// Seeded generators for property tests. Every test names its seed.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
  std::mt19937_64& rng() { return rng_; }

  // random trigonometric polynomial with |k| <= kmax, sup norm at most amp
  SurfaceField surface(const Grid& g, int kmax, double amp, int terms = 4) {
    SurfaceField f(g.surface_size());
    double total = 0.0;
    std::vector<std::array<double, 4>> t;
    for (int n = 0; n < terms; ++n) {
      t.push_back({double(integer(-kmax, kmax)), double(integer(-kmax, kmax)), uniform(-1, 1), uniform(0, 6.3)});
      total += std::abs(t.back()[2]);
    }
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        double s = 0.0;
        for (auto& c : t) s += c[2] * std::cos(c[0] * g.x1[i] + c[1] * g.x2[j] + c[3]);
        f[g.surface_index(i, j)] = amp * s / total;
      }
    return f;
  }

  // trig polynomial in x times a polynomial of degree <= deg in z
  VolumeField volume(const Grid& g, int kmax, int deg, double amp = 1.0) {
    VolumeField f(g.volume_size());
    const double k1 = integer(-kmax, kmax), k2 = integer(-kmax, kmax), ph = uniform(0, 6.3);
    std::vector<double> c(deg + 1);
    for (auto& x : c) x = uniform(-1, 1);
    for (int k = 0; k < g.nz; ++k) {
      double p = 0.0;
      for (int n = deg; n >= 0; --n) p = p * g.z[k] + c[n];
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f[g.index(i, j, k)] = amp * p * std::cos(k1 * g.x1[i] + k2 * g.x2[j] + ph);
    }
    return f;
  }

 private:
  std::mt19937_64 rng_;
};

template <class F>
VolumeField sample(const Grid& g, F f) {
  VolumeField out(g.volume_size());
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) out[g.index(i, j, k)] = f(g.x1[i], g.x2[j], g.z[k]);
  return out;
}

template <class F>
SurfaceField sample_surface(const Grid& g, F f) {
  SurfaceField out(g.surface_size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out[g.surface_index(i, j)] = f(g.x1[i], g.x2[j]);
  return out;
}

// elastic surface wave: psi0 = 0.01 sin x1, one potential mode, F columns e1, e2 scaled
inline InitialData small_wave() {
  InitialData d;
  d.psi = {{1, 0, 0.0, 0.01}};
  d.potential = {{2, 0, 0.05}};
  d.elastic[0].c1 = 0.5;
  d.elastic[1].c2 = 0.5;
  return d;
}

}  // namespace fbe::test
