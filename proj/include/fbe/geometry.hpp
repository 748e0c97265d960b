#pragma once

#include <array>
#include <optional>
#include <vector>

#include "fbe/grid.hpp"

namespace fbe {

/// Vertical cutoff chi on [-b, 0] with chi(-b) = 0 and chi(0) = 1.
///
/// delta0 == 0 selects one global quintic smoothstep over the whole depth,
/// which is a polynomial and therefore resolved exactly by the Chebyshev
/// nodes. delta0 in (0, b/2) gives the plateau form: 1 on (-delta0, 0], 0 on
/// [-b, -b+delta0], quintic ramp in between (C^2 at the joints).
class Cutoff {
 public:
  Cutoff(double b, double delta0);

  double b() const { return b_; }
  double delta0() const { return delta0_; }
  double ramp_length() const { return b_ - 2.0 * delta0_; }
  /// max |chi'| = 15 / (8 L).
  double max_slope() const { return 15.0 / (8.0 * ramp_length()); }

  double value(double z) const { return derivative(z, 0); }
  double slope(double z) const { return derivative(z, 1); }
  double curvature(double z) const { return derivative(z, 2); }
  /// n-th derivative in z, any n >= 0 (zero beyond 5).
  double derivative(double z, int n) const;

  std::vector<double> profile(const Grid& g, int n = 0) const;

 private:
  double b_;
  double delta0_;
};

/// chi(z) after checking that the ramp can honor |chi'| <= slope_bound.
/// Throws ConfigError if delta0 is outside [0, b/2) or the bound is not
/// reachable with this ramp length.
double cutoff_chi(double z, double b, double delta0, double slope_bound);

/// Smallest slope bound any C^1 cutoff with chi(-b)=0, chi(0)=1 can meet: 1/b.
inline double minimal_feasible_slope(double b) { return 1.0 / b; }

struct SurfaceNormals {
  std::array<SurfaceField, 3> N;
  SurfaceField norm;  // |N| = sqrt(1 + |grad psi|^2)
};

SurfaceNormals surface_normals(const Discretization& disc, const SurfaceField& psi);

/// phi = x3 + chi(x3) psi and everything derived from it. Horizontal and time
/// derivatives of phi are exact products of surface data with chi profiles.
struct FlattenedGeometry {
  VolumeField phi;
  VolumeField d1phi;
  VolumeField d2phi;
  VolumeField d3phi;
  VolumeField dtphi;
  VolumeField dt_d1phi;
  VolumeField dt_d2phi;
  VolumeField dt_d3phi;
  SurfaceField psi;
  SurfaceField dtpsi;
  std::array<SurfaceField, 2> dpsi;    // horizontal gradient of psi
  std::array<SurfaceField, 2> ddtpsi;  // horizontal gradient of dtpsi
  SurfaceNormals surface;
  double c0 = 1.0;  // min d3phi
  double delta0 = 0.0;

  /// Interior normal (-d1phi, -d2phi, 1).
  VectorField interior_normal() const;
};

struct GeometryOptions {
  double floor = 0.05;
};

/// Throws DiffeomorphismBreakdown if |psi| >= b/2 or min d3phi <= floor.
FlattenedGeometry build_geometry(const Discretization& disc, const Cutoff& chi, const SurfaceField& psi,
                                 const SurfaceField& dtpsi, GeometryOptions opt = {});

/// Flat geometry psi = 0, dtpsi = 0.
FlattenedGeometry flat_geometry(const Discretization& disc, const Cutoff& chi);

}  // namespace fbe
