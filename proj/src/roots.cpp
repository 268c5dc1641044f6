#include "pmean/roots.hpp"

#include "pmean/errors.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace pmean {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

RootResult brent(const std::function<double(double)>& f, double a, double b, double fa, double fb,
                 double x_tol, double f_tol, std::size_t max_iterations) {
  if (std::isnan(fa) || std::isnan(fb)) throw DomainError("brent: function value is NaN at bracket end");
  if (fa == 0.0) return {a, fa, a, a, 0};
  if (fb == 0.0) return {b, fb, b, b, 0};
  if ((fa > 0.0) == (fb > 0.0)) throw DomainError("brent: bracket does not straddle a sign change");

  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  std::size_t it = 0;
  for (; it < max_iterations; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * kEps * std::abs(b) + 0.5 * x_tol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || std::abs(fb) <= f_tol) break;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p;
      double q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0)
        q = -q;
      else
        p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
    if (std::isnan(fb)) throw DomainError("brent: function value is NaN inside bracket");
  }
  const double lo = std::min(b, c);
  const double hi = std::max(b, c);
  return {b, fb, lo, hi, it};
}

RootResult bisect(const std::function<double(double)>& f, double a, double b, double x_tol,
                  std::size_t max_iterations) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return {a, fa, a, a, 0};
  if (fb == 0.0) return {b, fb, b, b, 0};
  if ((fa > 0.0) == (fb > 0.0)) throw DomainError("bisect: bracket does not straddle a sign change");
  std::size_t it = 0;
  double fm = fa;
  while (it < max_iterations && std::abs(b - a) > x_tol) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    fm = f(m);
    ++it;
    if (fm == 0.0) return {m, 0.0, m, m, it};
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  const double mid = 0.5 * (a + b);
  return {mid, std::abs(fa) < std::abs(fb) ? fa : fb, std::min(a, b), std::max(a, b), it};
}

}  // namespace pmean
