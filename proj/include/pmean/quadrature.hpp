#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace pmean {

/// A real integrand on a (possibly infinite) interval.
///
/// `singular_lower` / `singular_upper` mark endpoints where the integrand may
/// blow up or vanish non-smoothly (y^(p-1) for p < 2, log y near 0, density
/// singularities).  `breakpoints` are interior abscissae where the integrand
/// has kinks or jumps.  `length_scale` is the width over which the integrand
/// varies appreciably; it anchors the maps used for infinite and very wide
/// ranges.
struct Integrand {
  std::function<double(double)> eval;
  double lower = 0.0;
  double upper = 0.0;
  bool singular_lower = false;
  bool singular_upper = false;
  double length_scale = 1.0;
  std::vector<double> breakpoints;
  /// Optional evaluations at lower + d and upper - d from the offset d alone,
  /// used next to singular finite ends where lower + d would round.
  std::function<double(double)> eval_from_lower;
  std::function<double(double)> eval_from_upper;
};

struct QuadResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
};

inline constexpr double kDefaultTolRel = 1e-10;
inline constexpr double kDefaultTolAbs = 1e-13;
inline constexpr std::size_t kDefaultEvaluationBudget = 200000;

/// Adaptive Gauss-Kronrod (10/21) integration with global subdivision.
///
/// Infinite endpoints are mapped to a finite range with
/// x = a + w * expm1(t / (1 - t)); ranges wider than 1e6 length scales use
/// x = a + w * expm1(t).  Singular endpoints start from a geometrically graded
/// mesh.  Throws AccuracyError when the error estimate cannot be brought
/// below max(tol_abs, tol_rel * |value|) within `max_evaluations`, and
/// IntegrandError when the integrand returns a non-finite value.
QuadResult integrate(const Integrand& g, double tol_rel = kDefaultTolRel,
                     double tol_abs = kDefaultTolAbs,
                     std::size_t max_evaluations = kDefaultEvaluationBudget);

/// Cutoff for a right tail together with a certified bound on the integral
/// of |g| beyond it.
struct TailCutoff {
  double cutoff = 0.0;
  double tail_bound = 0.0;
};

/// Cutoff X such that the integral over [X, inf) of
/// coefficient * y^(-1-decay) * (log y if log_weight) is at most `target`.
/// Throws DomainError when decay < 1e-3 (too close to the moment ceiling) or
/// when the cutoff would exceed the double range.
TailCutoff algebraic_tail_cutoff(double coefficient, double decay, double target,
                                 bool log_weight = false);

/// Integrates g on [g.lower, cutoff] and inflates the error estimate by the
/// certified tail bound.  The caller guarantees tail_bound bounds the
/// integral of |g| over (cutoff, g.upper).
QuadResult integrate_tail_truncated(const Integrand& g, const TailCutoff& tail,
                                    double tol_rel = kDefaultTolRel,
                                    double tol_abs = kDefaultTolAbs,
                                    std::size_t max_evaluations = kDefaultEvaluationBudget);

}  // namespace pmean
