#include "pmean/special.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/owens_t.hpp>
#include <gtest/gtest.h>

#include <cmath>

namespace sp = pmean::special;

TEST(Special, ErfcxMatchesScaledErfc) {
  for (double x : {-3.0, -0.5, 0.0, 0.3, 1.0, 2.5, 5.0, 10.0}) {
    const double ref = std::exp(x * x) * boost::math::erfc(x);
    EXPECT_NEAR(sp::erfcx(x), ref, 1e-14 * std::abs(ref)) << x;
  }
}

TEST(Special, ErfcxLargeArgumentAsymptote) {
  // exp(x^2) erfc(x) ~ 1/(x sqrt(pi)) (1 - 1/(2x^2) + 3/(4x^4) - 15/(8x^6))
  for (double x : {50.0, 1e3, 1e6}) {
    const double ref = 1.0 / (x * std::sqrt(sp::kPi)) * (1.0 - 0.5 / (x * x) + 0.75 / std::pow(x, 4) - 1.875 / std::pow(x, 6));
    EXPECT_NEAR(sp::erfcx(x) / ref, 1.0, 1e-12) << x;
  }
}

TEST(Special, NormalCdfBothTails) {
  for (double x : {-38.0, -20.0, -8.0, -1.0, 0.0, 1.0, 8.0}) {
    const double ref = 0.5 * boost::math::erfc(-x / std::sqrt(2.0));
    EXPECT_NEAR(sp::normal_cdf(x), ref, 1e-14 * ref) << x;
  }
  EXPECT_EQ(sp::normal_cdf(0.0), 0.5);
}

TEST(Special, NormalLogCdfFiniteFarLeft) {
  // log Phi(x) ~ -x^2/2 - log(-x) - log sqrt(2 pi) for x -> -inf
  const double x = -200.0;
  const double ref = -0.5 * x * x - std::log(-x) - sp::kLogSqrt2Pi - 1.0 / (x * x);
  EXPECT_NEAR(sp::normal_log_cdf(x), ref, 1e-8);
  EXPECT_TRUE(std::isfinite(sp::normal_log_cdf(-1e4)));
  EXPECT_NEAR(sp::normal_log_cdf(3.0), std::log(0.5 * boost::math::erfc(-3.0 / std::sqrt(2.0))), 1e-15);
}

TEST(Special, PdfOverCdf) {
  for (double x : {-30.0, -5.0, 0.0, 2.0}) {
    const double ref = sp::normal_pdf(x) / (0.5 * boost::math::erfc(-x / std::sqrt(2.0)));
    EXPECT_NEAR(sp::normal_pdf_over_cdf(x), ref, 1e-12 * ref) << x;
  }
}

TEST(Special, OwensTSpecialValues) {
  // T(0, a) = atan(a) / (2 pi); T(h, 1) = Phi(h)(1 - Phi(h)) / 2
  EXPECT_NEAR(sp::owens_t(0.0, 2.0), std::atan(2.0) / (2 * sp::kPi), 1e-15);
  const double h = 0.7;
  EXPECT_NEAR(sp::owens_t(h, 1.0), 0.5 * sp::normal_cdf(h) * (1 - sp::normal_cdf(h)), 1e-15);
}
