#pragma once

#include <string>
#include <vector>

#include "fbe/evolution.hpp"
#include "fbe/state.hpp"

namespace fbe {

struct EnergyRecord {
  double t = 0.0;
  double E0 = 0.0;
  double e0_literal = 0.0;  // same with the surface tension term halved
  double E4 = std::nan("");
  double kinetic = 0.0;
  double elastic = 0.0;
  double surface_sigma = 0.0;  // sigma * area
  double kappa_surface = 0.0;  // (kappa/2) |(1 - lap) psi|^2
  double dissipation = 0.0;
};

/// E0 = 1/2 int (|v|^2 + sum |F_k|^2) d3phi + sigma int |N|
///      + kappa/2 int |(1-lap) psi|^2 + accumulated dissipation.
EnergyRecord energy_e0(const Discretization& disc, const Params& params, const State& s, const FlattenedGeometry& geo);

/// E0(b) - E0(a), assembled from pointwise differences of the integrands.
double energy_e0_difference(const Discretization& disc, const Params& params, const State& a,
                            const FlattenedGeometry& geo_a, const State& b, const FlattenedGeometry& geo_b);

struct Snapshot {
  const State* state = nullptr;
  const Tendency* tendency = nullptr;
};

/// E4 at the middle of a window of 5 consecutive snapshots. First time
/// derivatives come from the tendencies, higher ones from finite differences
/// of the tendencies on the (possibly nonuniform) time stamps.
/// Throws InsufficientHistory for fewer than 5 snapshots.
double energy_e4(const Discretization& disc, const Params& params, const std::vector<Snapshot>& window);

/// Finite-difference weights for the m-th derivative at x0 on nodes x.
std::vector<double> fornberg_weights(double x0, const std::vector<double>& x, int m);

struct HodgeTerms {
  double div = 0.0;         // ||div^phi X||_3
  double curl = 0.0;        // ||curl^phi X||_3
  double tangential = 0.0;  // ||dbar^4 X||_0
  double l2 = 0.0;          // ||X||_0
  double full = 0.0;        // ||X||_4
  double sum() const { return div + curl + tangential + l2; }
};

struct HodgeReport {
  HodgeTerms v;
  std::array<HodgeTerms, 3> F;
};

HodgeTerms hodge_terms(const Discretization& disc, const VectorField& X, const FlattenedGeometry& geo);
HodgeReport hodge_decomposition_report(const Discretization& disc, const State& s, const FlattenedGeometry& geo);

/// sqrt(sum over a+b = m of ||d1^a d2^b f||_0^2)
double tangential_norm(const Discretization& disc, const VolumeField& f, int m);

struct KappaPair {
  double kappa_a = 0.0;
  double kappa_b = 0.0;
  double distance = 0.0;
};

struct KappaStudy {
  std::vector<KappaPair> pairs;
  bool strictly_decreasing = false;
  std::vector<std::string> failures;  // members that broke down
  double dt = 0.0;
};

/// Runs the same data for each kappa with one common fixed step and reports
/// sup_t (||dv||_0 + sum ||dF_k||_0 + |dpsi|_1) for consecutive kappas.
/// Writes kappa_study.csv when config.output_dir is set.
KappaStudy kappa_convergence_study(const RunConfig& config, const std::vector<double>& kappas);

}  // namespace fbe
