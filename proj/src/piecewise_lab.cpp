#include "pmean/piecewise_lab.hpp"

#include "pmean/errors.hpp"
#include "pmean/roots.hpp"

#include <cmath>

namespace pmean {

PiecewisePolyDensity step_density(const Rational& lambda) {
  return PiecewisePolyDensity({{Rational(0), Rational(1), Polynomial({lambda})},
                               {Rational(1), Rational(2), Polynomial({Rational(1) - lambda})}});
}

PiecewisePolyDensity linear_density(const Rational& h) {
  if (!(h > 0)) throw DomainError("linear density needs h > 0");
  return PiecewisePolyDensity({{Rational(0), Rational(2) / h, Polynomial({h, -h * h / 2})}});
}

PiecewisePolyDensity linear_density(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("linear density needs h > 0");
  return linear_density(Rational(h));
}

CounterexampleReport counterexample_report(const Rational& lambda) {
  if (!(lambda > Rational(1, 2) && lambda < 1)) throw DomainError("lambda must lie in (1/2, 1)");
  const PiecewisePolyDensity x = step_density(lambda);
  PiecewisePolyDensity z = convolve(x, x);
  CounterexampleReport r{lambda, x, z, {}, 0.0, 0.0, {}, false, {}};

  const DistributionSpec sx = DistributionSpec::piecewise(x);
  r.summand_verdict = check_monotone_density(sx).value_or(SkewVerdict{});
  if (r.summand_verdict.distribution.empty()) r.summand_verdict.distribution = sx.describe();

  const DistributionSpec sz = DistributionSpec::piecewise(z);
  const double lo = to_double(z.lower());
  const double hi = to_double(z.upper());
  auto excess = [&](double t) { return z.cdf(t) - 0.5; };
  r.median = bisect(excess, lo, hi, 1e-15).root;

  const PMeanPoint pt = solve_pmean(sz, 1.0, 1e-13);
  r.median_engine = pt.nu;
  r.dnu = dnu_integral(sz, 1.0, pt.nu, pt.nu_error);
  r.sum_refuted = r.dnu.sign == DnuSign::decreasing;
  const bool summand_ok = r.summand_verdict.conclusion == Conclusion::truly_positive;
  if (summand_ok && r.sum_refuted) {
    r.conclusion = "summands truly positively skewed; sum not truly positively skewed at p = 1";
  } else if (r.sum_refuted) {
    r.conclusion = "sum not truly positively skewed at p = 1";
  } else {
    r.conclusion = "no refutation at p = 1 (derivative sign " + to_string(r.dnu.sign) + ")";
  }
  return r;
}

ClosureReport linear_closure_check(const Rational& h1, const Rational& h2) {
  const PiecewisePolyDensity f = linear_density(h1);
  const PiecewisePolyDensity g = linear_density(h2);
  ClosureReport r{h1, h2, {}, {}, convolve(f, g), {}};
  r.first = check_monotone_density(DistributionSpec::piecewise(f)).value_or(SkewVerdict{});
  r.second = check_monotone_density(DistributionSpec::piecewise(g)).value_or(SkewVerdict{});
  r.sum_verdict = numeric_certify(DistributionSpec::piecewise(r.sum), make_grid(1.0, 12.0, 0.5));
  return r;
}

nlohmann::json to_json(const CounterexampleReport& r) {
  nlohmann::json out;
  out["lambda"] = to_string(r.lambda);
  out["summand"] = r.summand.to_json();
  out["summand_verdict"] = to_json(r.summand_verdict);
  out["sum"] = r.sum.to_json();
  out["median"] = r.median;
  out["median_engine"] = r.median_engine;
  out["dnu_integral"] = {{"upper", r.dnu.upper},
                         {"lower", r.dnu.lower},
                         {"difference", r.dnu.difference},
                         {"error", r.dnu.error},
                         {"sign", to_string(r.dnu.sign)}};
  out["sum_refuted_at_p1"] = r.sum_refuted;
  out["conclusion"] = r.conclusion;
  return out;
}

nlohmann::json to_json(const ClosureReport& r) {
  nlohmann::json out;
  out["h1"] = to_string(r.h1);
  out["h2"] = to_string(r.h2);
  out["first_verdict"] = to_json(r.first);
  out["second_verdict"] = to_json(r.second);
  out["sum"] = r.sum.to_json();
  out["sum_verdict"] = to_json(r.sum_verdict);
  return out;
}

}  // namespace pmean
