#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fbe/evolution.hpp"

namespace fbe {

/// Point values of the basic state entering the coefficient matrices.
struct BasicPoint {
  std::array<double, 3> v{};     // basic velocity
  std::array<double, 3> frak{};  // column k of the modified tensor
  std::array<double, 3> N{};     // (-d1 phi, -d2 phi, 1) of the basic state
  std::array<double, 3> Ndot{};  // same from the previous iterate
  double d3phi = 1.0;
  double dtphi = 0.0;
};

using Matrix7 = Eigen::Matrix<double, 7, 7>;

/// A0 dt U + sum_i Ai di U = 0 with U = (q, v1, v2, v3, F1k, F2k, F3k).
struct CoefficientMatrices {
  std::array<Matrix7, 4> A;
};

/// Throws DiffeomorphismBreakdown when d3phi <= 0.
CoefficientMatrices assemble_matrices(const BasicPoint& p);

/// chi(x3) sum_k g^(k) exp(<k> x3) e^{i k.xbar}; its trace on the top is g.
VolumeField extension_operator(const Discretization& disc, const Cutoff& chi, const SurfaceField& g);

/// Rows 1-2 of each column copied; row 3 corrected by the extension of the
/// boundary defect F1k d1psi + F2k d2psi - F3k, so that frak_k . N = 0 on top.
TensorField modified_deformation(const Discretization& disc, const Cutoff& chi, const TensorField& F,
                                 const SurfaceField& psi);

/// max over the top and k of |frak_k . N|.
double modified_trace_defect(const Discretization& disc, const TensorField& frak, const SurfaceField& psi);

/// L2-orthonormal tensor modes (real horizontal Fourier x Legendre in x3),
/// the first m in order of |k|^2 + n^2.
class GalerkinBasis {
 public:
  GalerkinBasis(const Discretization& disc, int m);
  int size() const { return static_cast<int>(modes_.size()); }
  const VolumeField& mode(int l) const { return modes_[l]; }
  std::vector<double> coefficients(const VolumeField& f) const;
  VolumeField project(const VolumeField& f) const;
  /// projection onto the traces' horizontal span
  SurfaceField project_surface(const SurfaceField& g) const;
  int surface_size() const { return static_cast<int>(surface_.size()); }

 private:
  const Discretization& disc_;
  std::vector<VolumeField> modes_;
  std::vector<SurfaceField> surface_;
};

struct GalerkinResult {
  std::vector<double> t;
  std::vector<double> energy;  // E^m = ||(v,F)||_0^2 + kappa |psi|_2^2 + int kappa |dt psi|_1^2
  std::vector<std::vector<double>> coefficients;  // per time: v (3m), F (9m), then psi
  State final_state;
  int m = 0;
};

/// Projected frozen-coefficient linear system around `basic`, RK4 with step dt.
/// Throws NonConvergence if a step produces non-finite values.
GalerkinResult galerkin_evolve(const Model& model, const State& basic, const State& initial, int m, double dt,
                               double T);

/// Basic-state samples on a uniform time grid with their rates.
struct Trajectory {
  double dt = 0.0;
  std::vector<State> states;
  std::vector<Tendency> rates;
  /// Cubic Hermite value at t (v, F, psi) and the derivative of psi.
  State at(double t, SurfaceField* dtpsi = nullptr) const;
};

/// Coefficients of the linearized system: geometry, transport and modified
/// tensor from `basic` at time t, the normal inside the material derivative
/// from `previous`.
Coefficients picard_coefficients(const Model& model, const Trajectory& basic, const Trajectory& previous, double t);

struct PicardOptions {
  int n_max = 7;
  double T = 0.05;
  std::optional<double> dt;  // default min(CFL, T / 20)
};

struct PicardResult {
  std::vector<double> E3;   // sup_t [E]_3^[n], n = 0 .. n_max - 1
  std::vector<double> rho;  // E3[n] / (E3[n-1] + E3[n-2]); NaN for n < 2
  std::vector<State> finals;  // iterate n at time T, n = 0 .. n_max
  double dt = 0.0;
  int steps = 0;
  double boundary_defect = 0.0;  // sup_t max |F_k . N| of the last iterate
  bool contracting(int n, double bound = 0.5) const { return rho[n] <= bound; }
};

/// Iterates from the zero state. Throws on linear-solve failure.
PicardResult picard_iterate(const Model& model, const State& initial, const PicardOptions& opt);

/// Writes n, E3, rho, contracting.
void write_picard_csv(const std::string& path, const PicardResult& r);

}  // namespace fbe
