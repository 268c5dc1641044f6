#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace pmean {

using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q", an integer, or a decimal literal (optionally with exponent)
/// exactly: "0.6" becomes 3/5.  Throws ParseError.
Rational parse_rational(const std::string& text);

std::string to_string(const Rational& r);
double to_double(const Rational& r);

/// Polynomial with exact rational coefficients, lowest degree first.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> coefficients);

  const std::vector<Rational>& coefficients() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }

  Rational operator()(const Rational& x) const;
  Polynomial derivative() const;
  /// Antiderivative with zero constant term.
  Polynomial antiderivative() const;
  /// p(u + v x)
  Polynomial compose_linear(const Rational& u, const Rational& v) const;
  std::vector<double> to_doubles() const;

  Polynomial& operator+=(const Polynomial& other);
  friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
  friend Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs);
  friend Polynomial operator*(const Rational& s, const Polynomial& p);
  friend bool operator==(const Polynomial& lhs, const Polynomial& rhs) { return lhs.c_ == rhs.c_; }

 private:
  void trim();
  std::vector<Rational> c_;
};

/// Horner evaluation of double coefficients, lowest degree first.
double horner(const std::vector<double>& c, double x);

}  // namespace pmean
