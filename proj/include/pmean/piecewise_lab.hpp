#pragma once

#include "pmean/criteria.hpp"
#include "pmean/piecewise.hpp"

#include <json.hpp>

#include <string>

namespace pmean {

/// Density lambda on [0, 1), 1 - lambda on [1, 2).
PiecewisePolyDensity step_density(const Rational& lambda);

/// f(x) = h - h^2 x / 2 on [0, 2/h).
PiecewisePolyDensity linear_density(const Rational& h);
PiecewisePolyDensity linear_density(double h);

struct CounterexampleReport {
  Rational lambda;
  PiecewisePolyDensity summand;
  PiecewisePolyDensity sum;
  SkewVerdict summand_verdict;
  double median = 0.0;         // root of the exact CDF of the sum
  double median_engine = 0.0;  // p-mean solver at p = 1
  DnuIntegral dnu;             // derivative-sign integral of the sum at p = 1
  bool sum_refuted = false;    // dnu certified negative
  std::string conclusion;
};

/// Two independent copies of step_density(lambda) and their sum.
/// Throws DomainError unless 1/2 < lambda < 1.
CounterexampleReport counterexample_report(const Rational& lambda);

struct ClosureReport {
  Rational h1;
  Rational h2;
  SkewVerdict first;
  SkewVerdict second;
  PiecewisePolyDensity sum;
  SkewVerdict sum_verdict;
};

/// Convolves two decreasing linear densities and certifies the sum
/// numerically over p in [1, 12].
ClosureReport linear_closure_check(const Rational& h1, const Rational& h2);

nlohmann::json to_json(const CounterexampleReport& r);
nlohmann::json to_json(const ClosureReport& r);

}  // namespace pmean
