#include "pmean/errors.hpp"
#include "pmean/quadrature.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

using pmean::Integrand;
using pmean::integrate;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Integrand make(std::function<double(double)> f, double a, double b, bool sing_a = false, bool sing_b = false) {
  Integrand g;
  g.eval = std::move(f);
  g.lower = a;
  g.upper = b;
  g.singular_lower = sing_a;
  g.singular_upper = sing_b;
  return g;
}

double levy_pdf(double x) {
  return x <= 0 ? 0.0 : std::sqrt(1 / (2 * M_PI)) * std::exp(-1 / (2 * x)) * std::pow(x, -1.5);
}

}  // namespace

TEST(Quadrature, ExponentialOnHalfLine) {
  const auto r = integrate(make([](double y) { return std::exp(-y); }, 0, kInf));
  EXPECT_NEAR(r.value, 1.0, 1e-12);
  EXPECT_GE(r.abs_error_estimate, 0.0);
  EXPECT_GT(r.evaluations, 0u);
}

TEST(Quadrature, PowerTimesLogSingularity) {
  const auto r = integrate(make([](double y) { return std::pow(y, 0.2) * std::log(y); }, 0, 1, true));
  EXPECT_NEAR(r.value, -1.0 / (1.2 * 1.2), 1e-10);
}

TEST(Quadrature, LevyDensityNormalizes) {
  Integrand g = make(levy_pdf, 0, kInf, true);
  g.length_scale = 1.0;
  const pmean::TailCutoff tail = pmean::algebraic_tail_cutoff(std::sqrt(1 / (2 * M_PI)), 0.5, 1e-11);
  const auto r = pmean::integrate_tail_truncated(g, tail);
  EXPECT_NEAR(r.value, 1.0, 1e-9);
  EXPECT_GE(r.abs_error_estimate, tail.tail_bound);
}

// Thirty closed forms: powers and power-log on (0,1), exponentials on (0,inf).
TEST(Quadrature, ClosedFormBattery) {
  int checked = 0;
  for (double a : {-0.9, -0.5, -0.2, 0.0, 0.5, 1.0, 2.0, 3.5, 5.0, 8.0}) {
    const auto r = integrate(make([a](double y) { return std::pow(y, a); }, 0, 1, a < 0));
    EXPECT_NEAR(r.value, 1 / (a + 1), std::max(1e-13, 1e-10 / (a + 1))) << "y^" << a;
    ++checked;
  }
  for (double a : {-0.5, 0.0, 0.4, 1.0, 2.0, 3.0, 4.5, 6.0, 7.0, 9.0}) {
    const auto r = integrate(make([a](double y) { return y <= 0 ? 0.0 : std::pow(y, a) * std::log(y); }, 0, 1, true));
    EXPECT_NEAR(r.value, -1 / ((a + 1) * (a + 1)), 1e-10 * std::max(1.0, 1 / ((a + 1) * (a + 1)))) << "log " << a;
    ++checked;
  }
  for (double b : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 200.0, 1000.0}) {
    Integrand g = make([b](double y) { return b * std::exp(-b * y); }, 0, kInf);
    g.length_scale = 1 / b;
    EXPECT_NEAR(integrate(g).value, 1.0, 1e-11) << "rate " << b;
    ++checked;
  }
  EXPECT_EQ(checked, 30);
}

TEST(Quadrature, GaussianOnWholeLine) {
  Integrand g = make([](double x) { return std::exp(-0.5 * x * x); }, -kInf, kInf);
  EXPECT_NEAR(integrate(g).value, std::sqrt(2 * M_PI), 1e-11);
}

TEST(Quadrature, BreakpointsAndJumps) {
  Integrand g = make([](double x) { return x < 0.3 ? 1.0 : (x < 0.7 ? 3.0 : std::abs(x - 0.85)); }, 0, 1);
  g.breakpoints = {0.3, 0.7, 0.85};
  const double exact = 0.3 + 1.2 + 0.5 * 0.15 * 0.15 * 2;
  EXPECT_NEAR(integrate(g).value, exact, 1e-13);
}

TEST(Quadrature, AgreesWithDoubleExponentialOracle) {
  const auto f = [](double x) { return std::pow(x, 0.3) * std::exp(-x) * std::log1p(x); };
  EXPECT_NEAR(integrate(make(f, 0, kInf, true)).value, oracle::integrate(f, 0, kInf), 1e-10);
}

TEST(Quadrature, AdditivityOverRandomSplits) {
  auto rng = oracle::rng(20240611);
  const auto f = [](double y) { return std::pow(y, -0.4) * std::exp(-y) * (1 + std::sin(3 * y)); };
  for (int i = 0; i < 20; ++i) {
    const double a = 0.0, c = oracle::uniform(rng, 2, 12), b = oracle::uniform(rng, 0.05, c - 0.05);
    const auto whole = integrate(make(f, a, c, true));
    const auto left = integrate(make(f, a, b, true));
    const auto right = integrate(make(f, b, c));
    const double err = whole.abs_error_estimate + left.abs_error_estimate + right.abs_error_estimate;
    EXPECT_LE(std::abs(whole.value - left.value - right.value), std::max(err, 4e-15 * std::abs(whole.value)))
        << "split " << b << " of (0," << c << ")";
  }
}

TEST(Quadrature, Deterministic) {
  Integrand g = make([](double y) { return std::pow(y, 0.7) * std::exp(-y * y) * std::log(y + 2); }, 0, kInf, true);
  const auto r1 = integrate(g);
  const auto r2 = integrate(g);
  EXPECT_EQ(r1.value, r2.value);
  EXPECT_EQ(r1.abs_error_estimate, r2.abs_error_estimate);
  EXPECT_EQ(r1.evaluations, r2.evaluations);
}

TEST(Quadrature, NaNRaisesIntegrandErrorWithAbscissa) {
  Integrand g = make([](double y) { return y > 0.5 ? std::nan("") : 1.0; }, 0, 1);
  try {
    integrate(g);
    FAIL() << "expected IntegrandError";
  } catch (const pmean::IntegrandError& e) {
    EXPECT_GT(e.abscissa(), 0.5);
    EXPECT_LE(e.abscissa(), 1.0);
  }
}

TEST(Quadrature, BudgetExhaustionRaisesAccuracyError) {
  Integrand g = make([](double y) { return std::sin(1 / y) / y; }, 1e-6, 1);
  try {
    integrate(g, 1e-12, 1e-15, 2000);
    FAIL() << "expected AccuracyError";
  } catch (const pmean::AccuracyError& e) {
    EXPECT_TRUE(std::isfinite(e.best_estimate()));
    EXPECT_GT(e.error_estimate(), 0.0);
  }
}

TEST(Quadrature, AlgebraicTailBound) {
  const double c = 0.4, d = 0.3, target = 1e-10;
  const auto t = pmean::algebraic_tail_cutoff(c, d, target);
  EXPECT_LE(t.tail_bound, target * (1 + 1e-12));
  EXPECT_NEAR(t.tail_bound, c * std::pow(t.cutoff, -d) / d, 1e-12 * t.tail_bound);

  const auto tl = pmean::algebraic_tail_cutoff(c, d, target, true);
  const double x = tl.cutoff;
  EXPECT_GE(tl.tail_bound, c * std::pow(x, -d) * (d * std::log(x) + 1) / (d * d) * (1 - 1e-9));
  EXPECT_LE(tl.tail_bound, target * (1 + 1e-12));
  EXPECT_THROW(pmean::algebraic_tail_cutoff(c, 5e-4, target), pmean::DomainError);
}

// Levy, p = 1.4: weight y^0.4 against a y^-1.5 tail.
TEST(Quadrature, LevyWeightedTailTruncation) {
  const double a = 5.0;
  Integrand g = make([a](double y) { return std::pow(y, 0.4) * levy_pdf(a + y); }, 0, kInf);
  g.length_scale = a;
  const auto tail = pmean::algebraic_tail_cutoff(std::sqrt(1 / (2 * M_PI)), 0.1, 1e-10);
  const auto r = pmean::integrate_tail_truncated(g, tail, 1e-10, 1e-13);
  // Oracle in s with y = e^s: integrand e^(1.4 s) f(a + e^s), summed in logs.
  const double ref = oracle::integrate(
      [a](double s) {
        const double log_x = s + std::log1p(a * std::exp(-s));
        const double x = std::exp(log_x);
        return std::exp(1.4 * s - 0.5 * std::log(2 * M_PI) - 1.5 * log_x - 0.5 / x);
      },
      -40, 700);
  EXPECT_TRUE(std::isfinite(r.value));
  EXPECT_NEAR(r.value, ref, 2e-9 * ref);
}

TEST(Quadrature, UniformNeedsNoTruncation) {
  Integrand g = make([](double) { return 1.0; }, 0, 1);
  EXPECT_EQ(integrate(g).value, integrate_tail_truncated(g, {1.0, 0.0}).value);
}
