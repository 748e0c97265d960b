#pragma once

#include <vector>

#include "fbe/geometry.hpp"
#include "fbe/grid.hpp"

namespace fbe {

struct Params {
  double sigma = 0.5;
  double kappa = 0.1;
  double b = 1.0;
  double delta0 = 0.0;
};

struct State {
  VectorField v;
  TensorField F;  // F[j] is column j
  VolumeField q;
  SurfaceField psi;
  SurfaceField dtpsi;
  double t = 0.0;
  double dissipation = 0.0;  // int_0^t int_Sigma kappa |<d> dt psi|^2
};

State zero_state(const Discretization& disc);

/// One Fourier term of a surface field: amp * cos(k1 x1 + k2 x2) + amp_sin * sin(...).
struct SurfaceMode {
  int k1 = 0;
  int k2 = 0;
  double amp = 0.0;
  double amp_sin = 0.0;
};

SurfaceField surface_from_modes(const Discretization& disc, const std::vector<SurfaceMode>& modes);

/// Velocity potential term A = (a1 (y3+b) c, a2 (y3+b) c, a3 c), c = cos(k.ybar);
/// the velocity is the physical curl of the sum of such terms, pulled back.
struct StreamMode {
  int k1 = 0;
  int k2 = 0;
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
};

/// Irrotational term u = grad(amp cosh(|k|(y3+b))/cosh(|k|b) cos(k.ybar)).
/// Harmonic, so divergence free, and u3 = 0 on the bottom.
struct PotentialMode {
  int k1 = 0;
  int k2 = 0;
  double amp = 0.0;
};

/// Column j of F is the Piola image of W = (c1 + d2 h, c2 - d1 h, 0) with
/// h = sum of amp cos(k.xbar) terms.
struct ElasticColumn {
  double c1 = 0.0;
  double c2 = 0.0;
  std::vector<SurfaceMode> h;
};

struct InitialData {
  std::vector<SurfaceMode> psi;
  std::vector<StreamMode> stream;
  std::vector<PotentialMode> potential;
  std::array<ElasticColumn, 3> elastic;
};

struct ConstraintReport {
  double r_divv = 0.0;
  double r_divF = 0.0;
  double r_FN = 0.0;
  double r_bottom = 0.0;
  double max() const { return std::max(std::max(r_divv, r_divF), std::max(r_FN, r_bottom)); }
};

ConstraintReport constraint_report(const Discretization& disc, const State& s, const FlattenedGeometry& geo);

class Model;

/// Builds (v, F, psi) from the specs, then q and dtpsi through one tendency
/// evaluation. Throws ConfigError if |psi0| >= b/3 and
/// ConstraintResidualTooLarge if a residual exceeds `tolerance`.
State build_initial_data(const Model& model, const InitialData& data, double tolerance = 1e-8);

/// (v, F, psi) part of build_initial_data without the pressure solve.
State build_kinematic_data(const Discretization& disc, const Cutoff& chi, const InitialData& data);

}  // namespace fbe
