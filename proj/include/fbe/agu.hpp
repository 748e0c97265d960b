#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fbe/calculus.hpp"
#include "fbe/geometry.hpp"
#include "fbe/grid.hpp"
#include "fbe/jet.hpp"

namespace fbe {

/// amp * sin(omega t + k1 x1 + k2 x2 + phase) * Z(x3)
struct ManufacturedTerm {
  enum class Vertical { one, exp, cos };
  double amp = 1.0;
  double omega = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double phase = 0.0;
  Vertical z = Vertical::one;
  double mu = 0.0;
  double zphase = 0.0;  // cos(mu x3 + zphase)
};

using ManufacturedScalar = std::vector<ManufacturedTerm>;

/// Jet of a manufactured scalar at (t, x1, x2, x3).
Jet manufactured_jet(const ManufacturedScalar& f, const std::array<double, 4>& point);

/// Analytic inputs of the good-unknown identities. psi must not depend on x3.
struct AguCase {
  std::string name;
  ManufacturedScalar f;
  ManufacturedScalar psi;
  std::array<ManufacturedScalar, 3> v;
  double b = 1.0;
  double delta0 = 0.0;
  MultiIndex alpha;
  std::vector<std::array<double, 4>> points;
};

/// All fields of a case expanded at one point; phi = x3 + chi(x3) psi.
struct AguJets {
  Jet f;
  Jet phi;
  std::array<Jet, 3> v;
};

AguJets agu_jets(const AguCase& c, const std::array<double, 4>& point);

/// D^alpha as a jet.
Jet apply_alpha(const Jet& g, const MultiIndex& alpha);

/// D^alpha f - D^alpha phi d3^phi f; f itself for alpha = 0.
Jet good_unknown(const Jet& f, const Jet& phi, const MultiIndex& alpha);

/// Reading of the unit index beta in [D^(alpha-beta), 1/(d3 phi)^2] D^beta d3 phi:
/// one unit direction contained in alpha, or the sum over all of them.
enum class BetaReading { single, summed };

/// C_i(f), i = 1, 2, 3 (zero for alpha = 0).
Jet commutator_C(const AguJets& in, const MultiIndex& alpha, int i, BetaReading reading = BetaReading::single);

/// Dcal(f) of the material derivative identity (zero for alpha = 0).
Jet commutator_Dcal(const AguJets& in, const MultiIndex& alpha, BetaReading reading = BetaReading::single);

struct IdentityResidual {
  std::array<double, 3> C{};  // |D^a d_i^phi f - d_i^phi(AGU) - C_i(f)|
  double Dcal = 0.0;          // |D^a D_t^phi f - D_t^phi(AGU) - Dcal(f)|
  double max() const;
};

struct AguVerification {
  IdentityResidual single;
  IdentityResidual summed;
  BetaReading selected = BetaReading::single;
  /// max residual of the selected reading
  double residual() const { return selected == BetaReading::single ? single.max() : summed.max(); }
};

/// Both identities for both readings, sup over the sample points of the case.
/// The selected reading is the one with the smaller residual.
AguVerification verify_identity(const AguCase& c);

/// Randomized band-limited manufactured cases, |alpha| <= 4, alpha_t <= 2.
std::vector<AguCase> agu_manufactured_suite(std::uint64_t seed, int count = 24, int points_per_case = 3);

/// Grid good unknown from a time history of (f, phi) snapshots, evaluated at
/// the time of the last snapshot. Time derivatives use finite-difference
/// weights on the snapshot times, horizontal ones are spectral.
/// Throws InsufficientHistory with fewer than alpha.t + 1 snapshots.
struct FieldSample {
  double t = 0.0;
  VolumeField f;
  VolumeField phi;
};
VolumeField good_unknown(const Discretization& disc, const std::vector<FieldSample>& history, const MultiIndex& alpha);

}  // namespace fbe
