#pragma once

#include <array>

#include "fbe/geometry.hpp"
#include "fbe/grid.hpp"

namespace fbe {

enum class Dealias { yes, no };

/// Orders of d_t, d_1, d_2.
struct MultiIndex {
  int t = 0;
  int x1 = 0;
  int x2 = 0;
  int order() const { return t + x1 + x2; }
};

/// (d1^phi f, d2^phi f, d3^phi f) with
/// d_tau^phi = d_tau - (d_tau phi / d3 phi) d3, d3^phi = d3 / d3 phi.
VectorField grad_phi(const Discretization& disc, const VolumeField& f, const FlattenedGeometry& geo,
                     Dealias mode = Dealias::yes);
/// Same, from an already computed flat gradient.
VectorField grad_phi_from_flat(const Discretization& disc, const VectorField& flat, const FlattenedGeometry& geo,
                               Dealias mode = Dealias::yes);

VolumeField div_phi(const Discretization& disc, const VectorField& X, const FlattenedGeometry& geo,
                    Dealias mode = Dealias::yes);
VectorField curl_phi(const Discretization& disc, const VectorField& X, const FlattenedGeometry& geo,
                     Dealias mode = Dealias::yes);

/// d_t f + vbar . dbar f + (v.N - d_t phi) d3 f / d3 phi
VolumeField material_derivative(const Discretization& disc, const VolumeField& f, const VolumeField& dtf,
                                const VectorField& v, const FlattenedGeometry& geo, Dealias mode = Dealias::yes);

/// -div(grad psi / sqrt(1 + |grad psi|^2)), so that q = sigma * H on the surface.
SurfaceField mean_curvature(const Discretization& disc, const SurfaceField& psi);

enum class Symbol { one_minus_lap, one_minus_lap_sq, bracket };

/// Fourier multiplier with symbol 1+|k|^2, (1+|k|^2)^2 or sqrt(1+|k|^2).
SurfaceField multiplier(const Discretization& disc, const SurfaceField& f, Symbol symbol);

/// (2 pi)^2 sum_k (1+|k|^2)^s |f_k|^2, square-rooted.
double sobolev_norm_surface(const Discretization& disc, const SurfaceField& f, double s);
/// sqrt(sum over |gamma| <= s of ||d^gamma f||^2_{L^2(Omega)}) with flat derivatives.
double sobolev_norm_interior(const Discretization& disc, const VolumeField& f, int s);

double dot_max_abs(const VectorField& a);

}  // namespace fbe
