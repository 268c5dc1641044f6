#pragma once

// Special functions needed by the distribution registry.  Everything here is
// accurate to a few ulp in both tails, including where the plain erfc
// underflows.

namespace pmean::special {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kSqrt2 = 1.41421356237309504880168872420969808;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736405617639;  // log(sqrt(2 pi))
inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;  // 1/sqrt(2 pi)

/// Scaled complementary error function exp(x^2) erfc(x).
double erfcx(double x);

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal distribution function, accurate in both tails.
double normal_cdf(double x);

/// log of the standard normal distribution function; finite for all finite x.
double normal_log_cdf(double x);

/// phi(x)/Phi(x), the reciprocal of the reflected Mills ratio.
double normal_pdf_over_cdf(double x);

/// Owen's T function T(h, a).
double owens_t(double h, double a);

}  // namespace pmean::special
