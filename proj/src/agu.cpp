#include "fbe/agu.hpp"

#include <algorithm>
#include <numbers>
#include <random>

#include "fbe/diagnostics.hpp"

namespace fbe {

namespace {

constexpr int kT = 0, kX3 = 3;

Jet linear(const std::array<double, 4>& p, const std::array<double, 4>& coef, double shift) {
  Jet out = Jet::constant(shift);
  for (int v = 0; v < 4; ++v)
    if (coef[v] != 0.0) out += coef[v] * Jet::variable(v, p[v]);
  return out;
}

Jet dtau_phi(const Jet& g, const Jet& phi, int tau) { return g.d(tau) - (phi.d(tau) / phi.d(kX3)) * g.d(kX3); }
Jet d3_phi(const Jet& g, const Jet& phi) { return g.d(kX3) / phi.d(kX3); }

// [D^a, g] h
Jet comm(const MultiIndex& a, const Jet& g, const Jet& h) { return apply_alpha(g * h, a) - g * apply_alpha(h, a); }
// [D^a, g, h]
Jet triple(const MultiIndex& a, const Jet& g, const Jet& h) {
  return apply_alpha(g * h, a) - apply_alpha(g, a) * h - g * apply_alpha(h, a);
}

std::vector<MultiIndex> unit_indices(const MultiIndex& a, BetaReading reading) {
  std::vector<MultiIndex> out;
  if (a.t > 0) out.push_back({1, 0, 0});
  if (a.x1 > 0) out.push_back({0, 1, 0});
  if (a.x2 > 0) out.push_back({0, 0, 1});
  if (reading == BetaReading::single && out.size() > 1) out.resize(1);
  return out;
}

// sum over beta of [D^(a-b), 1/J^2] D^b J
Jet beta_term(const MultiIndex& a, const Jet& J, BetaReading reading) {
  const Jet iJ2 = reciprocal(J * J);
  Jet out = Jet::constant(0.0);
  for (const auto& b : unit_indices(a, reading)) {
    const MultiIndex rest{a.t - b.t, a.x1 - b.x1, a.x2 - b.x2};
    out += comm(rest, iJ2, apply_alpha(J, b));
  }
  return out;
}

Jet normal_dot(const std::array<Jet, 3>& v, const Jet& phi) { return v[2] - v[0] * phi.d(1) - v[1] * phi.d(2); }

Jet material(const Jet& g, const AguJets& in) {
  const Jet W = normal_dot(in.v, in.phi) - in.phi.d(kT);
  return g.d(kT) + in.v[0] * g.d(1) + in.v[1] * g.d(2) + (W / in.phi.d(kX3)) * g.d(kX3);
}

}  // namespace

Jet manufactured_jet(const ManufacturedScalar& f, const std::array<double, 4>& p) {
  Jet out = Jet::constant(0.0);
  for (const auto& t : f) {
    Jet term = sin(linear(p, {t.omega, t.k1, t.k2, 0.0}, t.phase));
    switch (t.z) {
      case ManufacturedTerm::Vertical::one:
        break;
      case ManufacturedTerm::Vertical::exp:
        term = term * exp(linear(p, {0.0, 0.0, 0.0, t.mu}, 0.0));
        break;
      case ManufacturedTerm::Vertical::cos:
        term = term * cos(linear(p, {0.0, 0.0, 0.0, t.mu}, t.zphase));
        break;
    }
    out += t.amp * term;
  }
  return out;
}

AguJets agu_jets(const AguCase& c, const std::array<double, 4>& p) {
  for (const auto& t : c.psi)
    if (t.z != ManufacturedTerm::Vertical::one) throw ConfigError("psi", "surface data must not depend on x3");
  AguJets in;
  in.f = manufactured_jet(c.f, p);
  for (int i = 0; i < 3; ++i) in.v[i] = manufactured_jet(c.v[i], p);
  const Cutoff chi(c.b, c.delta0);
  std::vector<double> derivs(Jet::kJetDegree + 1);
  for (int n = 0; n <= Jet::kJetDegree; ++n) derivs[n] = chi.derivative(p[3], n);
  const Jet x3 = Jet::variable(kX3, p[3]);
  in.phi = x3 + compose(x3, derivs) * manufactured_jet(c.psi, p);
  return in;
}

Jet apply_alpha(const Jet& g, const MultiIndex& a) {
  Jet out = g;
  for (int i = 0; i < a.t; ++i) out = out.d(kT);
  for (int i = 0; i < a.x1; ++i) out = out.d(1);
  for (int i = 0; i < a.x2; ++i) out = out.d(2);
  return out;
}

Jet good_unknown(const Jet& f, const Jet& phi, const MultiIndex& a) {
  if (a.order() == 0) return f;
  return apply_alpha(f, a) - apply_alpha(phi, a) * d3_phi(f, phi);
}

Jet commutator_C(const AguJets& in, const MultiIndex& a, int i, BetaReading reading) {
  if (i < 1 || i > 3) throw std::out_of_range("commutator_C index must be 1, 2 or 3");
  if (a.order() == 0) return Jet::constant(0.0);
  const Jet& phi = in.phi;
  const Jet J = phi.d(kX3);
  const Jet iJ = reciprocal(J);
  const Jet d3f = in.f.d(kX3);
  const Jet Dphi = apply_alpha(phi, a);
  const Jet beta = beta_term(a, J, reading);
  const Jet d3pf = d3f * iJ;
  if (i == 3) return Dphi * d3_phi(d3pf, phi) + triple(a, iJ, d3f) - d3f * beta;
  const Jet dtp = phi.d(i);
  return Dphi * dtau_phi(d3pf, phi, i) - triple(a, dtp * iJ, d3f) - d3f * triple(a, dtp, iJ) + d3f * dtp * beta;
}

Jet commutator_Dcal(const AguJets& in, const MultiIndex& a, BetaReading reading) {
  if (a.order() == 0) return Jet::constant(0.0);
  const Jet& phi = in.phi;
  const Jet J = phi.d(kX3);
  const Jet iJ = reciprocal(J);
  const Jet d3f = in.f.d(kX3);
  const Jet vN = normal_dot(in.v, phi);
  const Jet W = vN - phi.d(kT);
  const Jet beta = beta_term(a, J, reading);

  Jet out = apply_alpha(phi, a) * material(d3f * iJ, in);
  out += comm(a, in.v[0], in.f.d(1)) + comm(a, in.v[1], in.f.d(2));
  out += triple(a, iJ * W, d3f);
  out += triple(a, iJ, W) * d3f;
  out -= W * d3f * beta;
  // [D^a, v] N = D^a(v.N) - v . D^a N
  const Jet vDN = -1.0 * (in.v[0] * apply_alpha(phi.d(1), a) + in.v[1] * apply_alpha(phi.d(2), a));
  out += iJ * d3f * (apply_alpha(vN, a) - vDN);
  return out;
}

double IdentityResidual::max() const { return std::max({C[0], C[1], C[2], Dcal}); }

AguVerification verify_identity(const AguCase& c) {
  AguVerification out;
  for (const auto& p : c.points) {
    const AguJets in = agu_jets(c, p);
    const Jet G = good_unknown(in.f, in.phi, c.alpha);
    for (BetaReading r : {BetaReading::single, BetaReading::summed}) {
      IdentityResidual& res = r == BetaReading::single ? out.single : out.summed;
      for (int i = 1; i <= 3; ++i) {
        const Jet lhs = apply_alpha(i == 3 ? d3_phi(in.f, in.phi) : dtau_phi(in.f, in.phi, i), c.alpha);
        const Jet rhs = (i == 3 ? d3_phi(G, in.phi) : dtau_phi(G, in.phi, i)) + commutator_C(in, c.alpha, i, r);
        res.C[i - 1] = std::max(res.C[i - 1], std::abs(lhs.value() - rhs.value()));
      }
      const Jet lhs = apply_alpha(material(in.f, in), c.alpha);
      const Jet rhs = material(G, in) + commutator_Dcal(in, c.alpha, r);
      res.Dcal = std::max(res.Dcal, std::abs(lhs.value() - rhs.value()));
    }
  }
  out.selected = out.single.max() <= out.summed.max() ? BetaReading::single : BetaReading::summed;
  return out;
}

std::vector<AguCase> agu_manufactured_suite(std::uint64_t seed, int count, int points_per_case) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  auto integer = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
  const double two_pi = 2.0 * std::numbers::pi;

  auto term = [&](bool surface) {
    ManufacturedTerm t;
    t.amp = uni(0.3, 1.0);
    t.omega = uni(-1.0, 1.0);
    t.k1 = integer(-2, 2);
    t.k2 = integer(-2, 2);
    t.phase = uni(0.0, two_pi);
    if (!surface) {
      t.z = integer(0, 1) ? ManufacturedTerm::Vertical::exp : ManufacturedTerm::Vertical::cos;
      t.mu = t.z == ManufacturedTerm::Vertical::exp ? uni(-1.0, 1.0) : uni(0.5, std::numbers::pi);
      t.zphase = uni(0.0, two_pi);
    }
    return t;
  };
  auto scalar = [&](int n, bool surface) {
    ManufacturedScalar s;
    for (int i = 0; i < n; ++i) s.push_back(term(surface));
    return s;
  };

  // fixed multi-indices first so every pattern appears, then random ones
  const std::vector<MultiIndex> fixed{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}, {0, 2, 0}, {0, 1, 1}, {2, 1, 0},
                                      {1, 1, 1}, {2, 1, 1}, {0, 4, 0}, {0, 2, 2}, {1, 3, 0}, {2, 0, 2}};
  std::vector<AguCase> out;
  for (int n = 0; n < count; ++n) {
    AguCase c;
    c.name = "case" + std::to_string(n);
    c.b = 1.0;
    if (n < static_cast<int>(fixed.size())) {
      c.alpha = fixed[n];
    } else {
      do {
        c.alpha = {integer(0, 2), integer(0, 4), integer(0, 4)};
      } while (c.alpha.order() == 0 || c.alpha.order() > 4);
    }
    c.f = scalar(integer(1, 3), false);
    c.psi = scalar(integer(1, 2), true);
    double total = 0.0;
    for (const auto& t : c.psi) total += t.amp;
    const double scale = uni(0.02, 0.1) / total;  // keeps |psi| well under b/3
    for (auto& t : c.psi) t.amp *= scale;
    for (auto& vi : c.v) vi = scalar(integer(1, 2), false);
    for (int k = 0; k < points_per_case; ++k)
      c.points.push_back({uni(0.0, 1.0), uni(0.0, two_pi), uni(0.0, two_pi), uni(-0.9 * c.b, -0.1 * c.b)});
    out.push_back(std::move(c));
  }
  return out;
}

VolumeField good_unknown(const Discretization& disc, const std::vector<FieldSample>& history, const MultiIndex& a) {
  if (history.empty()) throw InsufficientHistory("good unknown needs at least one snapshot");
  if (a.t < 0 || a.x1 < 0 || a.x2 < 0) throw ConfigError("alpha", "multi-index entries must be >= 0");
  const FieldSample& last = history.back();
  disc.check(last.f);
  disc.check(last.phi);
  if (a.order() == 0) return last.f;
  if (static_cast<int>(history.size()) < a.t + 1)
    throw InsufficientHistory("time derivative of order " + std::to_string(a.t) + " needs " + std::to_string(a.t + 1) +
                              " snapshots, got " + std::to_string(history.size()));

  VolumeField f = last.f, phi = last.phi;
  if (a.t > 0) {
    std::vector<double> times;
    for (const auto& s : history) times.push_back(s.t);
    const auto w = fornberg_weights(last.t, times, a.t);
    f = VolumeField(last.f.size());
    phi = VolumeField(last.f.size());
    for (std::size_t i = 0; i < history.size(); ++i) {
      f.axpy(w[i], history[i].f);
      phi.axpy(w[i], history[i].phi);
    }
  }
  for (int i = 0; i < a.x1; ++i) {
    f = disc.d1(f);
    phi = disc.d1(phi);
  }
  for (int i = 0; i < a.x2; ++i) {
    f = disc.d2(f);
    phi = disc.d2(phi);
  }
  const VolumeField d3f = disc.d3(last.f);
  const VolumeField d3p = disc.d3(last.phi);
  VolumeField out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f[i] - phi[i] * d3f[i] / d3p[i];
  return out;
}

}  // namespace fbe
