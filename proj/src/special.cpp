#include "pmean/special.hpp"

#include <boost/math/special_functions/owens_t.hpp>

#include <cmath>
#include <limits>

namespace pmean::special {

namespace {

constexpr double kInvSqrtPi = 0.564189583547756286948079451560772586;

// Continued fraction for erfcx at large positive x, evaluated with the
// modified Lentz algorithm:
//   erfcx(x) = (1/sqrt(pi)) / (x + (1/2)/(x + 1/(x + (3/2)/(x + 2/(x + ...)))))
double erfcx_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double f = x;
  double c = x;
  double d = 0.0;
  for (int n = 1; n < 500; ++n) {
    const double a = 0.5 * n;
    d = x + a * d;
    if (std::abs(d) < tiny) d = tiny;
    c = x + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return kInvSqrtPi / f;
}

}  // namespace

double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) {
    // erfcx(x) = 2 exp(x^2) - erfcx(-x)
    if (x < -26.6) return std::numeric_limits<double>::infinity();
    return 2.0 * std::exp(x * x) - erfcx(-x);
  }
  if (x < 4.0) return std::exp(x * x) * std::erfc(x);
  return erfcx_continued_fraction(x);
}

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_log_cdf(double x) {
  if (x > 5.0) return std::log1p(-0.5 * std::erfc(x / kSqrt2));
  if (x > -5.0) return std::log(0.5 * std::erfc(-x / kSqrt2));
  // Phi(x) = erfcx(-x/sqrt2) exp(-x^2/2) / 2
  return std::log(0.5 * erfcx(-x / kSqrt2)) - 0.5 * x * x;
}

double normal_pdf_over_cdf(double x) {
  // phi(x)/Phi(x) = sqrt(2/pi) / erfcx(-x/sqrt2)
  constexpr double sqrt_2_over_pi = 0.797884560802865355879892119868763737;
  if (x > 38.0) return 0.0;
  return sqrt_2_over_pi / erfcx(-x / kSqrt2);
}

double owens_t(double h, double a) { return boost::math::owens_t(h, a); }

}  // namespace pmean::special
