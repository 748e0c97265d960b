#pragma once

#include <array>
#include <span>
#include <vector>

namespace fbe {

/// Truncated multivariate Taylor polynomial in (t, x1, x2, x3) about a point.
/// Coefficients are stored per monomial up to total degree kJetDegree; each
/// jet also carries the degree up to which its coefficients are valid, which
/// drops by one with every derivative.
class Jet {
 public:
  static constexpr int kVars = 4;
  static constexpr int kJetDegree = 8;
  using Exponent = std::array<int, kVars>;

  Jet();
  static Jet constant(double c);
  /// x_var about `value`.
  static Jet variable(int var, double value);

  double value() const { return c_[0]; }
  int degree() const { return degree_; }
  /// Partial derivative d^e at the expansion point.
  double derivative(const Exponent& e) const;
  /// Partial derivative as a jet; the valid degree drops by one.
  Jet d(int var) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double a);
  Jet& operator+=(double a);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a += -s; }
  friend Jet operator-(double s, const Jet& a) { return (-1.0 * a) += s; }
  friend Jet operator-(const Jet& a) { return -1.0 * a; }
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet compose(const Jet& u, std::span<const double> derivs);

  static std::size_t size();
  static const Exponent& exponent(std::size_t i);
  static std::size_t index(const Exponent& e);

 private:
  std::vector<double> c_;
  int degree_ = kJetDegree;
};

/// g(u) from the derivatives g(u0), g'(u0), ... of a univariate function at
/// u0 = u.value(). Missing higher derivatives are taken as zero.
Jet compose(const Jet& u, std::span<const double> derivs);

Jet sin(const Jet& u);
Jet cos(const Jet& u);
Jet exp(const Jet& u);
Jet reciprocal(const Jet& u);

}  // namespace fbe
