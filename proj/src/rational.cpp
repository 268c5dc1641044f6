#include "pmean/rational.hpp"

#include "pmean/errors.hpp"

#include <cctype>

namespace pmean {

namespace {

using boost::multiprecision::cpp_int;

cpp_int parse_integer(const std::string& digits, const std::string& whole) {
  if (digits.empty()) throw ParseError("expected digits in rational literal '" + whole + "'");
  for (char ch : digits)
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      throw ParseError("unexpected character '" + std::string(1, ch) + "' in rational literal '" + whole + "'");
  // cpp_int reads a leading 0 as an octal prefix.
  const auto first = digits.find_first_not_of('0');
  return first == std::string::npos ? cpp_int(0) : cpp_int(digits.substr(first));
}

Rational parse_decimal(std::string s, const std::string& whole) {
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.erase(0, 1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    const std::string exp_text = s.substr(e + 1);
    try {
      std::size_t used = 0;
      exponent = std::stol(exp_text, &used);
      if (used != exp_text.size()) throw ParseError("bad exponent");
    } catch (const std::exception&) {
      throw ParseError("malformed exponent in rational literal '" + whole + "'");
    }
    s.erase(e);
  }
  std::string int_part = s;
  std::string frac_part;
  if (auto dot = s.find('.'); dot != std::string::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) throw ParseError("empty rational literal '" + whole + "'");
  const cpp_int mantissa = parse_integer(int_part + frac_part, whole);
  exponent -= static_cast<long>(frac_part.size());
  Rational r(mantissa);
  const cpp_int ten_power = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(std::labs(exponent)));
  if (exponent >= 0)
    r *= Rational(ten_power);
  else
    r /= Rational(ten_power);
  return negative ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw ParseError("empty rational literal");
  if (auto slash = s.find('/'); slash != std::string::npos) {
    const Rational num = parse_decimal(s.substr(0, slash), text);
    const Rational den = parse_decimal(s.substr(slash + 1), text);
    if (den == 0) throw ParseError("zero denominator in rational literal '" + text + "'");
    return num / den;
  }
  return parse_decimal(s, text);
}

std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Polynomial::Polynomial(std::vector<Rational> coefficients) : c_(std::move(coefficients)) { trim(); }

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational Polynomial::operator()(const Rational& x) const {
  Rational acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  std::vector<Rational> d;
  for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * static_cast<int>(i));
  return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
  if (c_.empty()) return {};
  std::vector<Rational> a(c_.size() + 1);
  for (std::size_t i = 0; i < c_.size(); ++i) a[i + 1] = c_[i] / static_cast<int>(i + 1);
  return Polynomial(std::move(a));
}

Polynomial Polynomial::compose_linear(const Rational& u, const Rational& v) const {
  // Horner in polynomial arithmetic: acc = acc * (u + v x) + c_i
  const Polynomial lin({u, v});
  Polynomial acc;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * lin + Polynomial({*it});
  return acc;
}

std::vector<double> Polynomial::to_doubles() const {
  std::vector<double> d;
  d.reserve(c_.size());
  for (const auto& r : c_) d.push_back(to_double(r));
  return d;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.c_.size() > c_.size()) c_.resize(other.c_.size());
  for (std::size_t i = 0; i < other.c_.size(); ++i) c_[i] += other.c_[i];
  trim();
  return *this;
}

Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
  if (lhs.c_.empty() || rhs.c_.empty()) return {};
  std::vector<Rational> out(lhs.c_.size() + rhs.c_.size() - 1);
  for (std::size_t i = 0; i < lhs.c_.size(); ++i)
    for (std::size_t j = 0; j < rhs.c_.size(); ++j) out[i + j] += lhs.c_[i] * rhs.c_[j];
  return Polynomial(std::move(out));
}

Polynomial operator*(const Rational& s, const Polynomial& p) {
  std::vector<Rational> out = p.c_;
  for (auto& x : out) x *= s;
  return Polynomial(std::move(out));
}

double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace pmean
