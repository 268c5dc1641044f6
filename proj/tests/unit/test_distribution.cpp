#include "pmean/distribution.hpp"
#include "pmean/errors.hpp"

#include "support/oracles.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/pareto.hpp>
#include <boost/math/distributions/skew_normal.hpp>
#include <boost/math/distributions/weibull.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

using pmean::DistributionSpec;
using pmean::parse_distribution;

namespace {

std::vector<DistributionSpec> defaults() {
  return {DistributionSpec::levy(),          DistributionSpec::chi_squared(3), DistributionSpec::weibull(2.5),
          DistributionSpec::skew_normal(3),  DistributionSpec::log_logistic(3), DistributionSpec::gamma(2.5),
          DistributionSpec::exponential(1),  DistributionSpec::uniform(),       DistributionSpec::normal(),
          DistributionSpec::pareto(1, 3),    DistributionSpec::beta(2, 5)};
}

double mass(const DistributionSpec& d) {
  const auto s = d.support();
  const auto f = [&](double x) { return d.pdf(x); };
  if (s.lower_finite() && s.upper_finite()) return oracle::integrate(f, s.lower, s.upper);
  if (s.lower_finite()) {
    // split at the median so exp_sinh sees only the tail
    const double m = d.median();
    return oracle::integrate(f, s.lower, m) + oracle::integrate(f, m, s.upper);
  }
  const double m = d.median();
  return oracle::integrate([&](double t) { return d.pdf(m - t); }, 0, pmean::kInf) + oracle::integrate(f, m, s.upper);
}

}  // namespace

TEST(Distribution, PdfExamples) {
  EXPECT_NEAR(DistributionSpec::levy(0, 1).pdf(1), std::sqrt(1 / (2 * M_PI)) * std::exp(-0.5), 1e-15);
  EXPECT_NEAR(DistributionSpec::weibull(1, 1).pdf(0.7), std::exp(-0.7), 1e-15);
  EXPECT_NEAR(DistributionSpec::skew_normal(0).pdf(0), 1 / std::sqrt(2 * M_PI), 1e-15);
  EXPECT_EQ(DistributionSpec::weibull(2).pdf(-1), 0.0);
}

TEST(Distribution, LogPdfExamples) {
  const double x = 100;
  EXPECT_NEAR(DistributionSpec::levy(0, 1).log_pdf(x), -1.0 / 200 - 1.5 * std::log(x) + 0.5 * std::log(1 / (2 * M_PI)),
              1e-13);
  EXPECT_NEAR(DistributionSpec::weibull(2, 1).log_pdf(3), std::log(2.0) + std::log(3.0) - 9, 1e-13);
  for (const auto& d : defaults()) {
    const auto s = d.support();
    if (s.lower_finite()) {
      EXPECT_EQ(d.log_pdf(s.lower - 1), -pmean::kInf) << d.describe();
    }
  }
  // far tail where pdf underflows
  EXPECT_NEAR(DistributionSpec::weibull(2, 1).log_pdf(40), std::log(2.0) + std::log(40.0) - 1600, 1e-10);
}

TEST(Distribution, LogPdfDerivative) {
  EXPECT_NEAR(DistributionSpec::exponential(1).log_pdf_derivative(0.3), -1, 1e-14);
  EXPECT_NEAR(DistributionSpec::exponential(1).log_pdf_derivative(7), -1, 1e-14);
  for (double k : {0.7, 2.0, 3.5})
    for (double x : {0.2, 1.0, 2.4})
      EXPECT_NEAR(DistributionSpec::weibull(k, 1).log_pdf_derivative(x), (k - 1) / x - k * std::pow(x, k - 1), 1e-12);
  const auto ll = DistributionSpec::log_logistic(1.5);
  const double mode = *ll.analytic_facts().mode;
  EXPECT_NEAR(mode, std::pow(0.5 / 2.5, 1 / 1.5), 1e-14);
  EXPECT_NEAR(ll.log_pdf_derivative(mode), 0, 1e-12);
  EXPECT_THROW(DistributionSpec::weibull(2).log_pdf_derivative(0), pmean::DomainError);
  EXPECT_THROW(DistributionSpec::uniform().log_pdf_derivative(1.5), pmean::DomainError);
}

TEST(Distribution, CdfExamples) {
  for (double k : {0.5, 1.5, 3.0}) EXPECT_NEAR(DistributionSpec::weibull(k, 1).cdf(std::pow(std::log(2), 1 / k)), 0.5, 1e-15);
  EXPECT_NEAR(DistributionSpec::uniform(0, 1).cdf(0.25), 0.25, 1e-16);
  EXPECT_NEAR(DistributionSpec::levy(0, 1).cdf(1e12), 1.0, 1e-6);
  EXPECT_NEAR(DistributionSpec::levy(0, 1).sf(1e12), std::sqrt(2 / (M_PI * 1e12)), 1e-12);
  EXPECT_NEAR(DistributionSpec::levy(0, 1).cdf(2), boost::math::erfc(std::sqrt(1 / 4.0)), 1e-15);
}

TEST(Distribution, AnalyticFacts) {
  const auto w = DistributionSpec::weibull(3, 1).analytic_facts();
  EXPECT_NEAR(*w.mode, std::cbrt(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(*w.median, std::cbrt(std::log(2.0)), 1e-15);
  EXPECT_NEAR(*w.mode, 0.87358, 5e-6);
  EXPECT_NEAR(*w.median, 0.88500, 5e-6);
  const auto l = DistributionSpec::levy(0, 1).analytic_facts();
  EXPECT_DOUBLE_EQ(*l.mode, 1.0 / 3.0);
  EXPECT_EQ(l.moment_sup, 0.5);
  EXPECT_EQ(DistributionSpec::pareto(1, 2.5).moment_sup(), 2.5);
  EXPECT_EQ(DistributionSpec::gamma(3).moment_sup(), pmean::kInf);
}

// theta+ from the closed form; f'' must change sign there.
TEST(Distribution, LogLogisticInflectionPoints) {
  const double b = 1.5;
  const double theta_plus =
      std::pow((2 * b * b - 2 + b * std::sqrt(3 * b * b - 3)) / (b * b + 3 * b + 2), 1 / b);
  const auto d = DistributionSpec::log_logistic(b);
  const auto pts = *d.analytic_facts().inflection_points;
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_NEAR(pts[0], theta_plus, 1e-13);
  const auto f2 = [&](double x) {
    const double h = 1e-4;
    return d.pdf(x + h) - 2 * d.pdf(x) + d.pdf(x - h);
  };
  EXPECT_LT(f2(theta_plus - 0.01), 0);
  EXPECT_GT(f2(theta_plus + 0.01), 0);
}

TEST(Distribution, PdfsAgreeWithBoost) {
  namespace bm = boost::math;
  for (double x : {0.1, 0.8, 1.7, 4.2}) {
    EXPECT_NEAR(DistributionSpec::weibull(2.5, 1.3).pdf(x), bm::pdf(bm::weibull(2.5, 1.3), x), 1e-14);
    EXPECT_NEAR(DistributionSpec::chi_squared(5).pdf(x), bm::pdf(bm::chi_squared(5), x), 1e-14);
    EXPECT_NEAR(DistributionSpec::gamma(2.5, 0.7).pdf(x), bm::pdf(bm::gamma_distribution<>(2.5, 0.7), x), 1e-14);
    EXPECT_NEAR(DistributionSpec::skew_normal(-3).pdf(x - 2), bm::pdf(bm::skew_normal(0, 1, -3), x - 2), 1e-14);
    EXPECT_NEAR(DistributionSpec::normal(1, 2).pdf(x), bm::pdf(bm::normal(1, 2), x), 1e-15);
    EXPECT_NEAR(DistributionSpec::pareto(0.05, 3).pdf(x), bm::pdf(bm::pareto(0.05, 3), x), 1e-12);
    EXPECT_NEAR(DistributionSpec::beta(2, 5).pdf(x / 5), bm::pdf(bm::beta_distribution<>(2, 5), x / 5), 1e-13);
    EXPECT_NEAR(DistributionSpec::skew_normal(4).cdf(x - 1), bm::cdf(bm::skew_normal(0, 1, 4), x - 1), 1e-14);
  }
}

TEST(Distribution, DensitiesIntegrateToOne) {
  for (const auto& d : defaults()) EXPECT_NEAR(mass(d), 1.0, 1e-8) << d.describe();
}

TEST(Distribution, CdfDerivativeIsPdf) {
  auto rng = oracle::rng(7);
  for (const auto& d : defaults()) {
    for (int i = 0; i < 50; ++i) {
      const double x = d.quantile(oracle::uniform(rng, 0.02, 0.98));
      const double h = 1e-5 * std::max(1.0, std::abs(x));
      const double fd = (d.cdf(x + h) - d.cdf(x - h)) / (2 * h);
      EXPECT_NEAR(fd, d.pdf(x), 1e-6 * std::max(1.0, d.pdf(x))) << d.describe() << " at " << x;
    }
  }
}

TEST(Distribution, ClosedFormMediansHalveTheMass) {
  for (const auto& d : defaults()) {
    if (auto m = d.analytic_facts().median) {
      EXPECT_NEAR(d.cdf(*m), 0.5, 1e-10) << d.describe();
    }
  }
}

// The standard Levy median solves erfc(sqrt(1/(2m))) = 1/2.
TEST(Distribution, LevyMedianQuantileOracle) {
  const double inv = boost::math::erfc_inv(0.5);
  const double oracle_median = 1 / (2 * inv * inv);
  EXPECT_NEAR(DistributionSpec::levy().median(), oracle_median, 1e-10);
  EXPECT_NEAR(oracle_median, 2.19810933832, 1e-10);
}

TEST(Distribution, AffineTransportOfFacts) {
  const auto w = DistributionSpec::weibull(2.5);
  const auto t = w.affine(3, -1);
  EXPECT_NEAR(*t.analytic_facts().mode, 3 * *w.analytic_facts().mode - 1, 1e-14);
  EXPECT_NEAR(*t.analytic_facts().median, 3 * *w.analytic_facts().median - 1, 1e-14);
  const auto r = w.affine(-2, 1);
  EXPECT_NEAR(*r.analytic_facts().mode, -2 * *w.analytic_facts().mode + 1, 1e-14);
  EXPECT_NEAR(r.support().upper, 1.0, 0);
  EXPECT_NEAR(r.pdf(0.3), w.pdf((0.3 - 1) / -2) / 2, 1e-15);
  EXPECT_NEAR(r.cdf(0.3), w.sf((0.3 - 1) / -2), 1e-15);
}

TEST(Distribution, SkewNormalMirror) {
  for (double a : {0.5, 2.0, 5.0})
    for (double x : {-3.0, -0.4, 0.0, 1.1, 2.7})
      EXPECT_NEAR(DistributionSpec::skew_normal(a).pdf(x), DistributionSpec::skew_normal(-a).pdf(-x), 1e-12);
}

TEST(Distribution, QuantileInvertsCdf) {
  for (const auto& d : defaults())
    for (double u : {1e-6, 0.1, 0.5, 0.9, 1 - 1e-6}) {
      const double x = d.quantile(u);
      EXPECT_NEAR(d.cdf(x), u, 1e-9) << d.describe();
    }
}

TEST(Distribution, MiniLanguage) {
  const auto w = parse_distribution("weibull(k=2.5,lambda=1)");
  EXPECT_EQ(w.family(), pmean::Family::weibull);
  EXPECT_EQ(w.params().at("k"), 2.5);
  EXPECT_EQ(parse_distribution(" levy( mu = 0 , lambda = 1 ) ").family(), pmean::Family::levy);
  EXPECT_NEAR(parse_distribution("skew_normal(alpha=-3)").pdf(0.4), DistributionSpec::skew_normal(-3).pdf(0.4), 0);
  const auto shifted = parse_distribution("exponential(rate=2,loc=1,scale=3)");
  EXPECT_NEAR(shifted.support().lower, 1.0, 0);
  EXPECT_NEAR(shifted.median(), 1 + 3 * std::log(2.0) / 2, 1e-14);
  EXPECT_EQ(parse_distribution(w.describe()).describe(), w.describe());
}

TEST(Distribution, MiniLanguageErrorsNameTokenAndGrammar) {
  for (const std::string bad : {"weibul(k=2)", "weibull(k=)", "weibull k=2", "weibull(k=2", "weibull(q=2)"}) {
    try {
      parse_distribution(bad);
      FAIL() << bad;
    } catch (const pmean::ParseError& e) {
      const std::string msg = e.what();
      EXPECT_NE(msg.find("family(name=value,...)"), std::string::npos) << msg;
    } catch (const pmean::ConstructionError& e) {
      EXPECT_EQ(bad, "weibull(q=2)") << e.what();
    }
  }
  try {
    parse_distribution("weibul(k=2)");
  } catch (const pmean::ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("weibul"), std::string::npos);
  }
}

TEST(Distribution, ParameterDomains) {
  EXPECT_THROW(DistributionSpec::weibull(-1), pmean::ConstructionError);
  EXPECT_THROW(DistributionSpec::weibull(2, 0), pmean::ConstructionError);
  EXPECT_THROW(DistributionSpec::levy(0, -1), pmean::ConstructionError);
  EXPECT_THROW(DistributionSpec::log_logistic(0), pmean::ConstructionError);
  EXPECT_THROW(DistributionSpec::chi_squared(0), pmean::ConstructionError);
  EXPECT_THROW(parse_distribution("chi_squared(k=2.5)"), pmean::ConstructionError);
  EXPECT_THROW(DistributionSpec::uniform(1, 1), pmean::ConstructionError);
  EXPECT_THROW(DistributionSpec::weibull(2).affine(0, 1), pmean::ConstructionError);
}

TEST(Distribution, UserDensityNormalizationChecked) {
  pmean::UserDensity u;
  u.pdf = [](double x) { return x > 0 && x < 1 ? 2 * x : 0.0; };
  u.support = {0, 1};
  const auto d = DistributionSpec::user(u);
  EXPECT_NEAR(d.cdf(0.5), 0.25, 1e-10);
  EXPECT_NEAR(d.median(), std::sqrt(0.5), 1e-9);
  pmean::UserDensity bad = u;
  bad.pdf = [](double x) { return x > 0 && x < 1 ? 1.5 : 0.0; };
  EXPECT_THROW(DistributionSpec::user(bad), pmean::ConstructionError);
}

TEST(Distribution, OffsetDensityNearSupportEnds) {
  // beta(1/2, 1/2) next to 1: 1 - d rounds to 1 for d below eps.
  const auto b = DistributionSpec::beta(0.5, 0.5);
  for (double d : {1e-3, 1e-10, 1e-20, 1e-200}) {
    const double ref = 1 / (M_PI * std::sqrt(d * (1 - d)));
    EXPECT_NEAR(b.pdf_from_upper(d) / ref, 1.0, 1e-13) << d;
    EXPECT_NEAR(b.pdf_from_lower(d) / ref, 1.0, 1e-13) << d;
  }
  // a mirrored, shifted image swaps the ends
  const auto m = DistributionSpec::beta(0.5, 3).affine(-2, 7);
  for (double d : {0.25, 1e-9, 1e-30}) {
    const double ref = boost::math::pdf(boost::math::beta_distribution<>(0.5, 3), d / 2) / 2;
    EXPECT_NEAR(m.pdf_from_upper(d) / ref, 1.0, 1e-12) << d;
  }
  const auto g = DistributionSpec::gamma(2).affine(1, 1e6);
  EXPECT_NEAR(g.pdf_from_lower(1e-12), 1e-12 * std::exp(-1e-12), 1e-26);
}
