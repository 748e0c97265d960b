#include "fbe/jet.hpp"

#include <cmath>
#include <stdexcept>

namespace fbe {

namespace {

constexpr int D = Jet::kJetDegree;

struct Table {
  std::vector<Jet::Exponent> exps;
  std::vector<int> deg;
  std::vector<int> lookup;  // (D+1)^4 dense map, -1 where degree > D
  std::vector<double> fact;

  Table() {
    lookup.assign((D + 1) * (D + 1) * (D + 1) * (D + 1), -1);
    for (int total = 0; total <= D; ++total)
      for (int a = total; a >= 0; --a)
        for (int b = total - a; b >= 0; --b)
          for (int c = total - a - b; c >= 0; --c) {
            const int e = total - a - b - c;
            lookup[key({a, b, c, e})] = static_cast<int>(exps.size());
            exps.push_back({a, b, c, e});
            deg.push_back(total);
          }
    fact.resize(D + 1);
    fact[0] = 1.0;
    for (int i = 1; i <= D; ++i) fact[i] = fact[i - 1] * i;
  }
  static int key(const Jet::Exponent& e) { return ((e[0] * (D + 1) + e[1]) * (D + 1) + e[2]) * (D + 1) + e[3]; }
};

const Table& table() {
  static const Table t;
  return t;
}

}  // namespace

Jet::Jet() : c_(table().exps.size(), 0.0) {}

Jet Jet::constant(double c) {
  Jet j;
  j.c_[0] = c;
  return j;
}

Jet Jet::variable(int var, double value) {
  if (var < 0 || var >= kVars) throw std::out_of_range("jet variable");
  Jet j = constant(value);
  Exponent e{0, 0, 0, 0};
  e[var] = 1;
  j.c_[index(e)] = 1.0;
  return j;
}

std::size_t Jet::size() { return table().exps.size(); }
const Jet::Exponent& Jet::exponent(std::size_t i) { return table().exps[i]; }

std::size_t Jet::index(const Exponent& e) {
  int total = 0;
  for (int x : e) {
    if (x < 0) throw std::out_of_range("negative jet exponent");
    total += x;
  }
  if (total > D) throw std::out_of_range("jet exponent beyond truncation degree");
  return static_cast<std::size_t>(table().lookup[Table::key(e)]);
}

double Jet::derivative(const Exponent& e) const {
  int total = 0;
  double f = 1.0;
  for (int x : e) {
    total += x;
    if (x <= D) f *= table().fact[x];
  }
  if (total > degree_) throw std::out_of_range("derivative order exceeds the valid jet degree");
  return c_[index(e)] * f;
}

Jet Jet::d(int var) const {
  if (degree_ < 1) throw std::out_of_range("jet has no derivatives left");
  const auto& t = table();
  Jet out;
  out.degree_ = degree_ - 1;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    const Exponent& e = t.exps[i];
    if (e[var] == 0 || t.deg[i] > degree_) continue;
    Exponent f = e;
    --f[var];
    out.c_[t.lookup[Table::key(f)]] += e[var] * c_[i];
  }
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  degree_ = std::min(degree_, o.degree_);
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  degree_ = std::min(degree_, o.degree_);
  return *this;
}

Jet& Jet::operator*=(double a) {
  for (auto& x : c_) x *= a;
  return *this;
}

Jet& Jet::operator+=(double a) {
  c_[0] += a;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  const auto& t = table();
  Jet out;
  out.degree_ = std::min(a.degree_, b.degree_);
  const int top = out.degree_;
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i] == 0.0 || t.deg[i] > top) continue;
    const auto& ei = t.exps[i];
    for (std::size_t j = 0; j < b.c_.size(); ++j) {
      if (t.deg[i] + t.deg[j] > top) break;  // monomials are sorted by degree
      if (b.c_[j] == 0.0) continue;
      const auto& ej = t.exps[j];
      out.c_[t.lookup[Table::key({ei[0] + ej[0], ei[1] + ej[1], ei[2] + ej[2], ei[3] + ej[3]})]] += a.c_[i] * b.c_[j];
    }
  }
  return out;
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

Jet compose(const Jet& u, std::span<const double> derivs) {
  // sum_n g^(n)(u0)/n! h^n with h = u - u0 nilpotent up to the valid degree
  Jet h = u;
  h.c_[0] = 0.0;
  Jet out = Jet::constant(derivs.empty() ? 0.0 : derivs[0]);
  out.degree_ = u.degree_;
  Jet power = Jet::constant(1.0);
  const auto& f = table().fact;
  for (int n = 1; n <= u.degree_ && n < static_cast<int>(derivs.size()); ++n) {
    power = power * h;
    out += (derivs[n] / f[n]) * power;
  }
  out.degree_ = u.degree_;
  return out;
}

namespace {

std::vector<double> cyclic(double s, double c, bool sine) {
  // derivatives of sin or cos: value, first, second, ...
  std::vector<double> d(D + 1);
  const double seq_sin[4] = {s, c, -s, -c};
  const double seq_cos[4] = {c, -s, -c, s};
  for (int n = 0; n <= D; ++n) d[n] = sine ? seq_sin[n % 4] : seq_cos[n % 4];
  return d;
}

}  // namespace

Jet sin(const Jet& u) { return compose(u, cyclic(std::sin(u.value()), std::cos(u.value()), true)); }
Jet cos(const Jet& u) { return compose(u, cyclic(std::sin(u.value()), std::cos(u.value()), false)); }

Jet exp(const Jet& u) {
  std::vector<double> d(D + 1, std::exp(u.value()));
  return compose(u, d);
}

Jet reciprocal(const Jet& u) {
  const double u0 = u.value();
  if (u0 == 0.0) throw std::domain_error("reciprocal of a jet with zero value");
  std::vector<double> d(D + 1);
  // d^n (1/u) = (-1)^n n! / u^(n+1)
  double p = 1.0 / u0, f = 1.0;
  for (int n = 0; n <= D; ++n) {
    d[n] = ((n % 2) ? -1.0 : 1.0) * f * p;
    p /= u0;
    f *= (n + 1);
  }
  return compose(u, d);
}

}  // namespace fbe
