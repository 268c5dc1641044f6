#include "pmean/errors.hpp"
#include "pmean/pmean.hpp"

#include "support/frozen.hpp"
#include "support/oracles.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using pmean::DistributionSpec;
using pmean::DnuSign;
using pmean::solve_pmean;

TEST(Balance, Examples) {
  const auto e = DistributionSpec::exponential(1);
  EXPECT_NEAR(pmean::balance(e, std::log(2.0), 1), 0, 1e-15);
  EXPECT_NEAR(pmean::balance(e, 1, 2), 0, 1e-12);
  for (double p : {1.0, 1.5, 2.0, 3.7, 6.0}) EXPECT_NEAR(pmean::balance(DistributionSpec::normal(), 0, p), 0, 1e-12);
  EXPECT_GT(pmean::balance(e, 0.5, 2), 0);
  EXPECT_LT(pmean::balance(e, 1.5, 2), 0);
}

TEST(Balance, OutsidePDomainThrows) {
  EXPECT_THROW(pmean::balance(DistributionSpec::levy(), 1, 1.5), pmean::DomainError);
  EXPECT_THROW(solve_pmean(DistributionSpec::levy(), 1.6), pmean::DomainError);
  EXPECT_THROW(solve_pmean(DistributionSpec::pareto(1, 2), 3.0), pmean::DomainError);
  EXPECT_THROW(solve_pmean(DistributionSpec::normal(), 0.5), pmean::DomainError);
}

TEST(PDomain, CeilingFromMomentSup) {
  const auto d = pmean::p_domain(DistributionSpec::levy());
  EXPECT_EQ(d.lo, 1.0);
  EXPECT_EQ(d.hi, 1.5);
  EXPECT_TRUE(d.include_mode);
  EXPECT_EQ(pmean::p_domain(DistributionSpec::weibull(2)).hi, pmean::kInf);
  EXPECT_FALSE(pmean::p_domain(DistributionSpec::exponential()).include_mode);
}

TEST(Solve, Examples) {
  EXPECT_NEAR(solve_pmean(DistributionSpec::weibull(3, 1), 1).nu, std::cbrt(std::log(2.0)), 1e-8);
  const double inv = boost::math::erfc_inv(0.5);
  EXPECT_NEAR(solve_pmean(DistributionSpec::levy(0, 1), 1).nu, 1 / (2 * inv * inv), 1e-6);
  EXPECT_NEAR(solve_pmean(DistributionSpec::gamma(2, 1), 2).nu, 2, 1e-8);
}

TEST(Solve, FrozenReferenceValues) {
  EXPECT_NEAR(solve_pmean(DistributionSpec::levy(), 1.2, 1e-12).nu, frozen::kLevyNu12, 1e-9 * frozen::kLevyNu12);
  EXPECT_NEAR(solve_pmean(DistributionSpec::levy(), 1.4, 1e-12).nu, frozen::kLevyNu14, 1e-8 * frozen::kLevyNu14);
  EXPECT_NEAR(solve_pmean(DistributionSpec::chi_squared(5), 1).nu, frozen::kChi2_5Nu1, 1e-9);
  EXPECT_NEAR(solve_pmean(DistributionSpec::chi_squared(5), 3).nu, frozen::kChi2_5Nu3, 1e-9);
  EXPECT_NEAR(solve_pmean(DistributionSpec::skew_normal(5), 1).nu, frozen::kSkewNormal5Nu1, 1e-9);
  EXPECT_NEAR(solve_pmean(DistributionSpec::skew_normal(5), 3).nu, frozen::kSkewNormal5Nu3, 1e-9);
  EXPECT_NEAR(solve_pmean(DistributionSpec::log_logistic(1.5), 2).nu, frozen::kLogLogistic15Nu2, 1e-9);
  EXPECT_NEAR(solve_pmean(DistributionSpec::weibull(0.5), 1.5).nu, frozen::kWeibullHalfNu15, 1e-9);
  EXPECT_NEAR(solve_pmean(DistributionSpec::weibull(2), 4).nu, frozen::kWeibull2Nu4, 1e-9);
}

TEST(Solve, AgreesWithDoubleExponentialOracle) {
  struct Case {
    DistributionSpec d;
    double p;
  };
  for (const auto& c : {Case{DistributionSpec::gamma(0.5), 2.5}, Case{DistributionSpec::beta(2, 5), 4.0},
                        Case{DistributionSpec::weibull(1.7, 2.0), 3.3}, Case{DistributionSpec::log_logistic(4), 2.5}}) {
    const auto s = c.d.support();
    const double nu = solve_pmean(c.d, c.p).nu;
    const double ref = oracle::pmean([&](double x) { return c.d.pdf(x); }, s.lower, s.upper, c.p, c.d.quantile(0.05),
                                     c.d.quantile(0.95));
    EXPECT_NEAR(nu, ref, 1e-9 * std::max(1.0, std::abs(ref))) << c.d.describe() << " p=" << c.p;
  }
}

TEST(Solve, ResidualWithinTolerance) {
  for (double p : {1.0, 1.3, 2.0, 4.5}) {
    const auto pt = solve_pmean(DistributionSpec::chi_squared(4), p, 1e-10);
    EXPECT_LE(std::abs(pt.balance_residual), 1e-10);
    EXPECT_TRUE(pt.solved);
  }
}

TEST(DnuSign, Examples) {
  EXPECT_EQ(pmean::dnu_sign(DistributionSpec::exponential(1), 2), DnuSign::increasing);
  EXPECT_EQ(pmean::dnu_sign(DistributionSpec::normal(), 3), DnuSign::flat);
  EXPECT_EQ(pmean::dnu_sign(DistributionSpec::skew_normal(-2), 2), DnuSign::decreasing);
  EXPECT_EQ(pmean::dnu_sign(DistributionSpec::weibull(6), 1), DnuSign::decreasing);
}

TEST(DnuSign, IntegralFormMatchesOracle) {
  const auto d = DistributionSpec::gamma(3);
  const double p = 2.5;
  const double nu = solve_pmean(d, p).nu;
  const auto r = pmean::dnu_integral(d, p, nu);
  const auto up = [&](double y) { return y <= 0 ? 0.0 : std::pow(y, p - 1) * std::log(y) * d.pdf(nu + y); };
  const auto lo = [&](double y) { return y <= 0 ? 0.0 : std::pow(y, p - 1) * std::log(y) * d.pdf(nu - y); };
  EXPECT_NEAR(r.upper, oracle::integrate(up, 0, pmean::kInf), 1e-10);
  EXPECT_NEAR(r.lower, oracle::integrate(lo, 0, nu), 1e-10);
  EXPECT_EQ(r.sign, DnuSign::increasing);
}

TEST(TraceCurve, UniformApproachesMidpoint) {
  const auto c = pmean::trace_curve(DistributionSpec::uniform(), {1, 2, 5, 10, 25, 50});
  ASSERT_EQ(c.points.size(), 6u);
  for (const auto& pt : c.points) EXPECT_NEAR(pt.nu, 0.5, 1e-9);
  EXPECT_LT(std::abs(c.points.back().nu - 0.5), 0.01);
  // skewed bounded support: nu_p moves towards (L+R)/2
  const auto b = pmean::trace_curve(DistributionSpec::beta(2, 5), {1, 2, 5, 10, 25, 50});
  for (std::size_t i = 1; i < b.points.size(); ++i) EXPECT_GT(b.points[i].nu, b.points[i - 1].nu);
  EXPECT_LT(std::abs(b.points.back().nu - 0.5), std::abs(b.points.front().nu - 0.5));
}

TEST(TraceCurve, SymmetricIsFlatAtCentre) {
  const auto c = pmean::trace_curve(DistributionSpec::skew_normal(0), pmean::make_grid(1, 5, 0.5));
  for (const auto& pt : c.points) EXPECT_NEAR(pt.nu, 0, 1e-8);
}

TEST(TraceCurve, WeibullBelowThresholdIncreasing) {
  const auto d = DistributionSpec::weibull(3.2, 1);
  const auto c = pmean::trace_curve(d, pmean::make_grid(1, 8, 0.5));
  ASSERT_EQ(c.points.size(), 15u);
  EXPECT_GT(c.points.front().nu, *d.analytic_facts().mode);
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    EXPECT_GT(c.points[i].nu - c.points[i - 1].nu, 10 * 1e-10) << c.points[i].p;
    EXPECT_EQ(c.points[i].dnu_sign, DnuSign::increasing);
  }
}

TEST(TraceCurve, MedianAndMeanIdentities) {
  for (const auto& d : {DistributionSpec::gamma(2.5), DistributionSpec::weibull(1.5), DistributionSpec::beta(2, 5),
                        DistributionSpec::chi_squared(7), DistributionSpec::log_logistic(3)}) {
    const auto c = pmean::trace_curve(d, {1, 2});
    EXPECT_NEAR(c.points[0].nu, d.median(), 1e-8) << d.describe();
    EXPECT_NEAR(c.points[1].nu, *d.analytic_facts().mean, 1e-8) << d.describe();
  }
}

TEST(TraceCurve, GridHelpers) {
  const auto g = pmean::make_grid(1, 3, 0.25);
  ASSERT_EQ(g.size(), 9u);
  EXPECT_EQ(g.back(), 3.0);
  const auto clipped = pmean::clip_to_domain(DistributionSpec::levy(), g);
  EXPECT_TRUE(clipped.clipped);
  EXPECT_NEAR(clipped.ceiling, 1.45, 1e-15);
  EXPECT_EQ(clipped.grid.back(), 1.25);
  EXPECT_FALSE(pmean::clip_to_domain(DistributionSpec::normal(), g).clipped);
}

TEST(TraceCurve, ContinuityUnderRefinement) {
  const auto d = DistributionSpec::gamma(1.5);
  const auto coarse = pmean::trace_curve(d, pmean::make_grid(1, 5, 1.0), 1e-11, false);
  const auto fine = pmean::trace_curve(d, pmean::make_grid(1, 5, 0.25), 1e-11, false);
  double coarse_err = 0, fine_err = 0;
  // midpoint interpolation error on each grid, measured against the finer solve
  for (std::size_t i = 0; i + 1 < coarse.points.size(); ++i) {
    const double mid = 0.5 * (coarse.points[i].nu + coarse.points[i + 1].nu);
    coarse_err = std::max(coarse_err, std::abs(mid - fine.points[4 * i + 2].nu));
  }
  const auto finest = pmean::trace_curve(d, pmean::make_grid(1, 5, 0.125), 1e-11, false);
  for (std::size_t i = 0; i + 1 < fine.points.size(); ++i) {
    const double mid = 0.5 * (fine.points[i].nu + fine.points[i + 1].nu);
    fine_err = std::max(fine_err, std::abs(mid - finest.points[2 * i + 1].nu));
  }
  EXPECT_LT(fine_err, coarse_err / 4);
}

TEST(TraceCurve, HalfLineDivergence) {
  const auto e = DistributionSpec::exponential(1);
  EXPECT_GE(solve_pmean(e, 30).nu - solve_pmean(e, 10).nu, 1.0);
}

TEST(TraceCurve, SignAgreesWithFiniteDifference) {
  for (const auto& d : {DistributionSpec::gamma(2), DistributionSpec::skew_normal(-1.5), DistributionSpec::levy()}) {
    const auto grid = pmean::clip_to_domain(d, pmean::make_grid(1, 4, 0.25)).grid;
    const auto c = pmean::trace_curve(d, grid);
    for (const auto& pt : c.points) {
      if (!pt.dnu_dp || pt.dnu_sign == DnuSign::unknown || pt.dnu_sign == DnuSign::flat) continue;
      const double unc = 10 * (pt.nu_error + 1e-10) / 0.25;
      if (std::abs(*pt.dnu_dp) <= unc) continue;
      EXPECT_EQ(pt.dnu_sign, *pt.dnu_dp > 0 ? DnuSign::increasing : DnuSign::decreasing)
          << d.describe() << " p=" << pt.p;
    }
  }
}

TEST(Discrete, BinomialMedianAndMean) {
  const std::vector<pmean::Atom> binom = {{0, 4.0 / 9}, {1, 4.0 / 9}, {2, 1.0 / 9}};
  EXPECT_EQ(pmean::discrete_pmean(binom, 1), 1.0);
  EXPECT_NEAR(pmean::discrete_pmean(binom, 2), 2.0 / 3, 1e-15);
  const std::vector<pmean::Atom> bern = {{0, 2.0 / 3}, {1, 1.0 / 3}};
  EXPECT_NEAR(pmean::discrete_pmean(bern, 2), 1.0 / 3, 1e-15);
  double prev = -1;
  for (double p : {1.0, 2.0, 3.0, 4.0}) {
    const double nu = pmean::discrete_pmean(bern, p);
    EXPECT_GT(nu, prev) << p;
    prev = nu;
  }
  EXPECT_EQ(pmean::discrete_pmean({{3.5, 1.0}}, 2.7), 3.5);
}

TEST(Discrete, LeftMedianOnFlatCdf) {
  EXPECT_EQ(pmean::discrete_pmean({{0, 0.5}, {1, 0.5}}, 1), 0.0);
}

TEST(Empirical, Examples) {
  EXPECT_NEAR(pmean::empirical_pmean({0, 0, 3}, 2), 1.0, 1e-14);
  EXPECT_EQ(pmean::empirical_pmean({1, 2, 4, 8}, 1), 2.0);
  std::mt19937_64 g(42);
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = ex(g);
  double m = 0, v = 0;
  for (double x : xs) m += x;
  m /= xs.size();
  for (double x : xs) v += (x - m) * (x - m);
  const double sd = std::sqrt(v / (xs.size() - 1));
  const double nu = pmean::empirical_pmean(xs, 2);
  EXPECT_NEAR(nu, m, 1e-10);
  EXPECT_LT(std::abs(nu - 1), 3 * sd / std::sqrt(double(xs.size())));
}

TEST(Affine, Examples) {
  const auto r = pmean::verify_affine_equivariance(DistributionSpec::weibull(2, 1), 3, -1, {1, 2, 4});
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.max_deviation, 1e-7);
  EXPECT_EQ(pmean::verify_affine_equivariance(DistributionSpec::gamma(3), 1, 0, {1, 2.5}).max_deviation, 0.0);
  EXPECT_NEAR(solve_pmean(DistributionSpec::exponential(1).affine(2, 5), 2).nu, 7, 1e-9);
  const auto neg = pmean::verify_affine_equivariance(DistributionSpec::skew_normal(2), -1.5, 0.3, {1, 2, 3.5});
  EXPECT_TRUE(neg.pass) << neg.max_deviation;
}

TEST(Properties, BalanceStrictlyDecreasing) {
  auto rng = oracle::rng(99);
  const std::vector<DistributionSpec> specs = {DistributionSpec::gamma(2), DistributionSpec::weibull(0.8),
                                               DistributionSpec::levy(), DistributionSpec::skew_normal(-3),
                                               DistributionSpec::beta(2, 5)};
  for (int i = 0; i < 200; ++i) {
    const auto& d = specs[i % specs.size()];
    const double hi = std::min(6.0, pmean::p_domain(d).hi - 0.05);
    const double p = oracle::uniform(rng, 1.05, hi);
    const double a = d.quantile(oracle::uniform(rng, 0.05, 0.9));
    const double b = a + std::max(1e-3, oracle::uniform(rng, 0.0, 0.5)) * d.spread();
    if (!d.support().contains(b)) continue;
    EXPECT_GT(pmean::balance(d, a, p), pmean::balance(d, b, p)) << d.describe() << " p=" << p;
  }
}

TEST(Properties, SolutionsStayInsideSupport) {
  for (const auto& d : {DistributionSpec::beta(0.5, 0.5), DistributionSpec::beta(5, 1), DistributionSpec::uniform(2, 3),
                        DistributionSpec::weibull(0.5)}) {
    for (double p : {1.0, 2.0, 8.0, 40.0}) {
      const double nu = solve_pmean(d, p).nu;
      EXPECT_TRUE(d.support().contains(nu)) << d.describe() << " p=" << p;
    }
  }
}
