#pragma once

#include <cstddef>
#include <functional>

namespace pmean {

struct RootResult {
  double root = 0.0;
  double value = 0.0;  // f(root)
  double lower = 0.0;  // final bracket
  double upper = 0.0;
  std::size_t iterations = 0;
};

/// Brent's method on a bracket [a, b] with f(a), f(b) of opposite sign (or
/// one of them zero).  Stops when |f| <= f_tol or the bracket is narrower than
/// x_tol + 4 eps |x|.  Throws DomainError when the bracket is invalid.
RootResult brent(const std::function<double(double)>& f, double a, double b, double fa, double fb,
                 double x_tol, double f_tol, std::size_t max_iterations = 200);

/// Plain bisection for a monotone predicate-style function; returns the
/// bracket midpoint after the interval shrinks below x_tol.
RootResult bisect(const std::function<double(double)>& f, double a, double b, double x_tol,
                  std::size_t max_iterations = 400);

}  // namespace pmean
