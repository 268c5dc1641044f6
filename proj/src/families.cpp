#include "model.hpp"

#include "pmean/errors.hpp"
#include "pmean/piecewise.hpp"
#include "pmean/quadrature.hpp"
#include "pmean/special.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pmean::detail {

double Model::pdf(double x) const {
  const double lp = log_pdf(x);
  return lp == -kInf ? 0.0 : std::exp(lp);
}

std::optional<double> Model::dlog_pdf(double) const { return std::nullopt; }

std::optional<double> Model::quantile(double) const { return std::nullopt; }

double Model::quantile_by_bisection(double u) const {
  const Support s = support();
  if (u <= 0.0) return s.lower;
  if (u >= 1.0) return s.upper;
  double lo = s.lower_finite() ? s.lower : -1.0;
  double hi = s.upper_finite() ? s.upper : 1.0;
  if (!s.lower_finite()) {
    if (s.upper_finite()) lo = std::min(lo, s.upper - 1.0);
    for (int i = 0; i < 2000 && cdf(lo) >= u; ++i) lo *= 2.0;
  }
  if (!s.upper_finite()) {
    if (s.lower_finite()) hi = std::max(hi, s.lower + 1.0);
    for (int i = 0; i < 2000 && cdf(hi) < u; ++i) hi = hi > 0 ? hi * 2.0 : hi + 1.0;
  }
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(mid))) break;
    if (cdf(mid) >= u)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

namespace {

using special::kLogSqrt2Pi;
using special::kPi;

double skewness_from_raw(double m1, double m2, double m3) {
  const double var = m2 - m1 * m1;
  return (m3 - 3.0 * m1 * var - m1 * m1 * m1) / (var * std::sqrt(var));
}

// Standard Levy: f(x) = (2 pi)^(-1/2) x^(-3/2) exp(-1/(2x)), x > 0.
class Levy final : public Model {
 public:
  Levy() : median_(quantile_by_bisection(0.5)) {}
  Support support() const override { return {0.0, kInf}; }
  double log_pdf(double x) const override {
    if (!(x > 0.0) || x == kInf) return -kInf;
    return -kLogSqrt2Pi - 1.5 * std::log(x) - 0.5 / x;
  }
  std::optional<double> dlog_pdf(double x) const override { return -1.5 / x + 0.5 / (x * x); }
  double cdf(double x) const override { return x <= 0.0 ? 0.0 : std::erfc(std::sqrt(0.5 / x)); }
  double sf(double x) const override { return x <= 0.0 ? 1.0 : std::erf(std::sqrt(0.5 / x)); }
  AnalyticFacts facts() const override {
    AnalyticFacts f;
    f.mode = 1.0 / 3.0;
    f.median = median_;
    f.moment_sup = 0.5;
    // f'' = 0  <=>  15 x^2 - 10 x + 1 = 0
    const double r = std::sqrt(40.0);
    f.inflection_points = std::vector<double>{(10.0 - r) / 30.0, (10.0 + r) / 30.0};
    return f;
  }
  std::optional<TailEnvelope> right_tail() const override {
    return TailEnvelope{special::kInvSqrt2Pi, 0.0, 0.5};
  }
  std::optional<double> right_log_slope_limit() const override { return 0.0; }
  std::optional<double> left_log_slope_limit() const override { return kInf; }

 private:
  double median_;
};

class Gamma final : public Model {
 public:
  explicit Gamma(double a) : a_(a), log_norm_(std::lgamma(a)) {}
  Support support() const override { return {0.0, kInf}; }
  double log_pdf(double x) const override {
    if (!(x > 0.0) || x == kInf) return -kInf;
    return (a_ - 1.0) * std::log(x) - x - log_norm_;
  }
  std::optional<double> dlog_pdf(double x) const override { return (a_ - 1.0) / x - 1.0; }
  double cdf(double x) const override { return x <= 0.0 ? 0.0 : boost::math::gamma_p(a_, x); }
  double sf(double x) const override { return x <= 0.0 ? 1.0 : boost::math::gamma_q(a_, x); }
  std::optional<double> quantile(double u) const override {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return kInf;
    return boost::math::gamma_p_inv(a_, u);
  }
  AnalyticFacts facts() const override {
    AnalyticFacts f;
    if (a_ > 1.0) f.mode = a_ - 1.0;
    if (a_ <= 1.0) f.boundary_mode = 0.0;
    f.mean = a_;
    f.skewness = 2.0 / std::sqrt(a_);
    // f''/f = ((a-1)/x - 1)^2 - (a-1)/x^2 vanishes at x = (a-1) +- sqrt(a-1).
    std::vector<double> pts;
    if (a_ > 1.0) {
      const double r = std::sqrt(a_ - 1.0);
      if (a_ - 1.0 - r > 0.0) pts.push_back(a_ - 1.0 - r);
      pts.push_back(a_ - 1.0 + r);
    }
    f.inflection_points = pts;
    return f;
  }
  std::optional<double> right_log_slope_limit() const override { return -1.0; }
  std::optional<double> left_log_slope_limit() const override {
    return a_ > 1.0 ? kInf : (a_ == 1.0 ? -1.0 : -kInf);
  }

 private:
  double a_;
  double log_norm_;
};

class Weibull final : public Model {
 public:
  explicit Weibull(double k) : k_(k) {}
  Support support() const override { return {0.0, kInf}; }
  double log_pdf(double x) const override {
    if (!(x > 0.0) || x == kInf) return -kInf;
    return std::log(k_) + (k_ - 1.0) * std::log(x) - std::pow(x, k_);
  }
  std::optional<double> dlog_pdf(double x) const override {
    return (k_ - 1.0) / x - k_ * std::pow(x, k_ - 1.0);
  }
  double cdf(double x) const override { return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x, k_)); }
  double sf(double x) const override { return x <= 0.0 ? 1.0 : std::exp(-std::pow(x, k_)); }
  std::optional<double> quantile(double u) const override {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return kInf;
    return std::pow(-std::log1p(-u), 1.0 / k_);
  }
  AnalyticFacts facts() const override {
    AnalyticFacts f;
    if (k_ > 1.0)
      f.mode = std::pow((k_ - 1.0) / k_, 1.0 / k_);
    else
      f.boundary_mode = 0.0;
    f.median = std::pow(std::numbers::ln2, 1.0 / k_);
    const double g1 = std::tgamma(1.0 + 1.0 / k_);
    const double g2 = std::tgamma(1.0 + 2.0 / k_);
    const double g3 = std::tgamma(1.0 + 3.0 / k_);
    f.mean = g1;
    f.skewness = skewness_from_raw(g1, g2, g3);
    // With u = x^k: k u^2 - 3(k-1) u + (k-1)(k-2)/k = 0.
    std::vector<double> pts;
    if (k_ > 1.0) {
      const double disc = std::sqrt((k_ - 1.0) * (5.0 * k_ - 1.0));
      const double lo = (3.0 * (k_ - 1.0) - disc) / (2.0 * k_);
      const double hi = (3.0 * (k_ - 1.0) + disc) / (2.0 * k_);
      if (lo > 0.0) pts.push_back(std::pow(lo, 1.0 / k_));
      pts.push_back(std::pow(hi, 1.0 / k_));
    }
    f.inflection_points = pts;
    return f;
  }
  std::optional<double> right_log_slope_limit() const override {
    return k_ > 1.0 ? -kInf : (k_ == 1.0 ? -1.0 : 0.0);
  }
  std::optional<double> left_log_slope_limit() const override {
    return k_ > 1.0 ? kInf : (k_ == 1.0 ? -1.0 : -kInf);
  }

 private:
  double k_;
};

// f(x) = 2 phi(x) Phi(alpha x)
class SkewNormal final : public Model {
 public:
  explicit SkewNormal(double alpha) : alpha_(alpha) {}
  Support support() const override { return {-kInf, kInf}; }
  double log_pdf(double x) const override {
    if (!std::isfinite(x)) return -kInf;
    return std::numbers::ln2 - kLogSqrt2Pi - 0.5 * x * x + special::normal_log_cdf(alpha_ * x);
  }
  std::optional<double> dlog_pdf(double x) const override {
    return -x + alpha_ * special::normal_pdf_over_cdf(alpha_ * x);
  }
  double cdf(double x) const override {
    if (x == -kInf) return 0.0;
    if (x == kInf) return 1.0;
    const double a = std::abs(alpha_);
    const double t = 2.0 * special::owens_t(x, a);
    const double v = alpha_ >= 0.0 ? special::normal_cdf(x) - t : special::normal_cdf(x) + t;
    return std::clamp(v, 0.0, 1.0);
  }
  double sf(double x) const override {
    if (x == -kInf) return 1.0;
    if (x == kInf) return 0.0;
    const double a = std::abs(alpha_);
    const double t = 2.0 * special::owens_t(x, a);
    const double v = alpha_ >= 0.0 ? special::normal_cdf(-x) + t : special::normal_cdf(-x) - t;
    return std::clamp(v, 0.0, 1.0);
  }
  AnalyticFacts facts() const override {
    AnalyticFacts f;
    const double delta = alpha_ / std::sqrt(1.0 + alpha_ * alpha_);
    const double m = delta * std::sqrt(2.0 / kPi);
    f.mean = m;
    f.skewness = 0.5 * (4.0 - kPi) * m * m * m / std::pow(1.0 - m * m, 1.5);
    if (alpha_ == 0.0) {
      f.mode = 0.0;
      f.median = 0.0;
      f.skewness = 0.0;
      f.inflection_points = std::vector<double>{-1.0, 1.0};
    }
    return f;
  }
  std::optional<double> right_log_slope_limit() const override { return -kInf; }
  std::optional<double> left_log_slope_limit() const override { return kInf; }

 private:
  double alpha_;
};

// f(x) = beta x^(beta-1) / (1 + x^beta)^2, x > 0.
class LogLogistic final : public Model {
 public:
  explicit LogLogistic(double beta) : beta_(beta) {}
  Support support() const override { return {0.0, kInf}; }
  double log_pdf(double x) const override {
    if (!(x > 0.0) || x == kInf) return -kInf;
    const double lx = std::log(x);
    // log(1 + x^beta) without overflow
    const double bl = beta_ * lx;
    const double log1p_pow = bl > 0.0 ? bl + std::log1p(std::exp(-bl)) : std::log1p(std::exp(bl));
    return std::log(beta_) + (beta_ - 1.0) * lx - 2.0 * log1p_pow;
  }
  std::optional<double> dlog_pdf(double x) const override {
    const double xb = std::pow(x, beta_);
    const double frac = std::isinf(xb) ? 1.0 : xb / (1.0 + xb);
    return ((beta_ - 1.0) - 2.0 * beta_ * frac) / x;
  }
  double cdf(double x) const override { return x <= 0.0 ? 0.0 : 1.0 / (1.0 + std::pow(x, -beta_)); }
  double sf(double x) const override { return x <= 0.0 ? 1.0 : 1.0 / (1.0 + std::pow(x, beta_)); }
  std::optional<double> quantile(double u) const override {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return kInf;
    return std::pow(u / (1.0 - u), 1.0 / beta_);
  }
  AnalyticFacts facts() const override {
    AnalyticFacts f;
    f.median = 1.0;
    f.moment_sup = beta_;
    if (beta_ > 1.0) {
      f.mode = std::pow((beta_ - 1.0) / (beta_ + 1.0), 1.0 / beta_);
      f.mean = (kPi / beta_) / std::sin(kPi / beta_);
      const double den = beta_ * beta_ + 3.0 * beta_ + 2.0;
      const double root = beta_ * std::sqrt(3.0 * beta_ * beta_ - 3.0);
      const double lo = (2.0 * beta_ * beta_ - 2.0 - root) / den;
      const double hi = (2.0 * beta_ * beta_ - 2.0 + root) / den;
      std::vector<double> pts;
      if (lo > 0.0) pts.push_back(std::pow(lo, 1.0 / beta_));
      pts.push_back(std::pow(hi, 1.0 / beta_));
      f.inflection_points = pts;
    } else {
      f.boundary_mode = 0.0;
    }
    return f;
  }
  std::optional<TailEnvelope> right_tail() const override { return TailEnvelope{beta_, 0.0, beta_}; }
  std::optional<double> right_log_slope_limit() const override { return 0.0; }
  std::optional<double> left_log_slope_limit() const override {
    return beta_ > 1.0 ? kInf : (beta_ == 1.0 ? -2.0 : -kInf);
  }

 private:
  double beta_;
};

class Exponential final : public Model {
 public:
  Support support() const override { return {0.0, kInf}; }
  double log_pdf(double x) const override { return x > 0.0 && x < kInf ? -x : -kInf; }
  std::optional<double> dlog_pdf(double) const override { return -1.0; }
  double cdf(double x) const override { return x <= 0.0 ? 0.0 : -std::expm1(-x); }
  double sf(double x) const override { return x <= 0.0 ? 1.0 : std::exp(-x); }
  std::optional<double> quantile(double u) const override {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return kInf;
    return -std::log1p(-u);
  }
  AnalyticFacts facts() const override {
    AnalyticFacts f;
    f.boundary_mode = 0.0;
    f.median = std::numbers::ln2;
    f.mean = 1.0;
    f.skewness = 2.0;
    f.inflection_points = std::vector<double>{};
    return f;
  }
  std::optional<double> right_log_slope_limit() const override { return -1.0; }
  std::optional<double> left_log_slope_limit() const override { return -1.0; }
};

class Uniform final : public Model {
 public:
  Support support() const override { return {0.0, 1.0}; }
  double log_pdf(double x) const override { return x > 0.0 && x < 1.0 ? 0.0 : -kInf; }
  std::optional<double> dlog_pdf(double) const override { return 0.0; }
  double cdf(double x) const override { return std::clamp(x, 0.0, 1.0); }
  double sf(double x) const override { return std::clamp(1.0 - x, 0.0, 1.0); }
  std::optional<double> quantile(double u) const override { return std::clamp(u, 0.0, 1.0); }
  AnalyticFacts facts() const override {
    AnalyticFacts f;
    f.median = 0.5;
    f.mean = 0.5;
    f.skewness = 0.0;
    f.inflection_points = std::vector<double>{};
    return f;
  }
  std::optional<double> right_log_slope_limit() const override { return 0.0; }
  std::optional<double> left_log_slope_limit() const override { return 0.0; }
};

class Normal final : public Model {
 public:
  Support support() const override { return {-kInf, kInf}; }
  double log_pdf(double x) const override { return std::isfinite(x) ? -kLogSqrt2Pi - 0.5 * x * x : -kInf; }
  std::optional<double> dlog_pdf(double x) const override { return -x; }
  double cdf(double x) const override { return special::normal_cdf(x); }
  double sf(double x) const override { return special::normal_cdf(-x); }
  AnalyticFacts facts() const override {
    AnalyticFacts f;
    f.mode = 0.0;
    f.median = 0.0;
    f.mean = 0.0;
    f.skewness = 0.0;
    f.inflection_points = std::vector<double>{-1.0, 1.0};
    return f;
  }
  std::optional<double> right_log_slope_limit() const override { return -kInf; }
  std::optional<double> left_log_slope_limit() const override { return kInf; }
};

// Pareto with unit scale: f(x) = lambda x^(-lambda-1), x > 1.
class Pareto final : public Model {
 public:
  explicit Pareto(double lambda) : lambda_(lambda) {}
  Support support() const override { return {1.0, kInf}; }
  double log_pdf(double x) const override {
    if (!(x > 1.0) || x == kInf) return -kInf;
    return std::log(lambda_) - (lambda_ + 1.0) * std::log(x);
  }
  std::optional<double> dlog_pdf(double x) const override { return -(lambda_ + 1.0) / x; }
  double cdf(double x) const override { return x <= 1.0 ? 0.0 : -std::expm1(-lambda_ * std::log(x)); }
  double sf(double x) const override { return x <= 1.0 ? 1.0 : std::exp(-lambda_ * std::log(x)); }
  std::optional<double> quantile(double u) const override {
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return kInf;
    return std::exp(-std::log1p(-u) / lambda_);
  }
  AnalyticFacts facts() const override {
    AnalyticFacts f;
    f.boundary_mode = 1.0;
    f.median = std::exp(std::numbers::ln2 / lambda_);
    f.moment_sup = lambda_;
    if (lambda_ > 1.0) f.mean = lambda_ / (lambda_ - 1.0);
    if (lambda_ > 3.0)
      f.skewness = 2.0 * (1.0 + lambda_) / (lambda_ - 3.0) * std::sqrt((lambda_ - 2.0) / lambda_);
    f.inflection_points = std::vector<double>{};
    return f;
  }
  std::optional<TailEnvelope> right_tail() const override { return TailEnvelope{lambda_, 0.0, lambda_}; }
  std::optional<double> right_log_slope_limit() const override { return 0.0; }
  std::optional<double> left_log_slope_limit() const override { return -(lambda_ + 1.0); }

 private:
  double lambda_;
};

class Beta final : public Model {
 public:
  Beta(double a, double b) : a_(a), b_(b), log_norm_(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)) {}
  Support support() const override { return {0.0, 1.0}; }
  double log_pdf(double x) const override {
    if (!(x > 0.0 && x < 1.0)) return -kInf;
    return (a_ - 1.0) * std::log(x) + (b_ - 1.0) * std::log1p(-x) - log_norm_;
  }
  double pdf_from_upper(double d) const override {
    if (!(d > 0.0 && d < 1.0)) return 0.0;
    return std::exp((a_ - 1.0) * std::log1p(-d) + (b_ - 1.0) * std::log(d) - log_norm_);
  }
  std::optional<double> dlog_pdf(double x) const override { return (a_ - 1.0) / x - (b_ - 1.0) / (1.0 - x); }
  double cdf(double x) const override {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return boost::math::ibeta(a_, b_, x);
  }
  double sf(double x) const override {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    return boost::math::ibetac(a_, b_, x);
  }
  std::optional<double> quantile(double u) const override {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return boost::math::ibeta_inv(a_, b_, u);
  }
  AnalyticFacts facts() const override {
    AnalyticFacts f;
    if (a_ > 1.0 && b_ > 1.0) f.mode = (a_ - 1.0) / (a_ + b_ - 2.0);
    if (a_ <= 1.0 && b_ > 1.0) f.boundary_mode = 0.0;
    if (b_ <= 1.0 && a_ > 1.0) f.boundary_mode = 1.0;
    if (a_ == b_) f.median = 0.5;
    f.mean = a_ / (a_ + b_);
    f.skewness = 2.0 * (b_ - a_) * std::sqrt(a_ + b_ + 1.0) / ((a_ + b_ + 2.0) * std::sqrt(a_ * b_));
    return f;
  }
  std::optional<double> right_log_slope_limit() const override {
    return b_ > 1.0 ? -kInf : (b_ == 1.0 ? a_ - 1.0 : kInf);
  }
  std::optional<double> left_log_slope_limit() const override {
    return a_ > 1.0 ? kInf : (a_ == 1.0 ? -(b_ - 1.0) : -kInf);
  }

 private:
  double a_;
  double b_;
  double log_norm_;
};

class Piecewise final : public Model {
 public:
  explicit Piecewise(PiecewisePolyDensity d) : d_(std::move(d)) {}
  Support support() const override { return {to_double(d_.lower()), to_double(d_.upper())}; }
  double pdf(double x) const override { return d_.pdf(x); }
  double log_pdf(double x) const override {
    const double v = d_.pdf(x);
    return v > 0.0 ? std::log(v) : -kInf;
  }
  std::optional<double> dlog_pdf(double x) const override {
    const double v = d_.pdf(x);
    if (!(v > 0.0)) return std::nullopt;
    return d_.pdf_derivative(x) / v;
  }
  double cdf(double x) const override { return d_.cdf(x); }
  AnalyticFacts facts() const override {
    AnalyticFacts f;
    f.mean = to_double(d_.mean_exact());
    if (d_.certified_non_increasing()) f.boundary_mode = to_double(d_.lower());
    return f;
  }
  std::vector<double> breakpoints() const override { return d_.breakpoints(); }
  const PiecewisePolyDensity* piecewise() const override { return &d_; }

 private:
  PiecewisePolyDensity d_;
};

class User final : public Model {
 public:
  explicit User(UserDensity d) : d_(std::move(d)) {}
  Support support() const override { return d_.support; }
  double pdf(double x) const override { return d_.support.contains(x) ? d_.pdf(x) : 0.0; }
  double log_pdf(double x) const override {
    const double v = pdf(x);
    return v > 0.0 ? std::log(v) : -kInf;
  }
  double cdf(double x) const override {
    if (d_.cdf) return d_.cdf(x);
    if (x <= d_.support.lower) return 0.0;
    if (x >= d_.support.upper) return 1.0;
    Integrand g;
    g.eval = [this](double t) { return pdf(t); };
    g.lower = d_.support.lower;
    g.upper = x;
    g.singular_lower = d_.support.lower_finite();
    g.breakpoints = d_.breakpoints;
    return std::clamp(integrate(g, 1e-12, 1e-15).value, 0.0, 1.0);
  }
  AnalyticFacts facts() const override {
    AnalyticFacts f;
    f.moment_sup = d_.moment_sup;
    return f;
  }
  std::vector<double> breakpoints() const override { return d_.breakpoints; }
  std::optional<TailEnvelope> right_tail() const override { return d_.right_tail; }

 private:
  UserDensity d_;
};

}  // namespace

std::shared_ptr<const Model> make_levy() { return std::make_shared<Levy>(); }
std::shared_ptr<const Model> make_gamma(double shape) { return std::make_shared<Gamma>(shape); }
std::shared_ptr<const Model> make_weibull(double k) { return std::make_shared<Weibull>(k); }
std::shared_ptr<const Model> make_skew_normal(double alpha) { return std::make_shared<SkewNormal>(alpha); }
std::shared_ptr<const Model> make_log_logistic(double beta) { return std::make_shared<LogLogistic>(beta); }
std::shared_ptr<const Model> make_exponential() { return std::make_shared<Exponential>(); }
std::shared_ptr<const Model> make_uniform() { return std::make_shared<Uniform>(); }
std::shared_ptr<const Model> make_normal() { return std::make_shared<Normal>(); }
std::shared_ptr<const Model> make_pareto(double lambda) { return std::make_shared<Pareto>(lambda); }
std::shared_ptr<const Model> make_beta(double a, double b) { return std::make_shared<Beta>(a, b); }
std::shared_ptr<const Model> make_piecewise(const PiecewisePolyDensity& density) {
  return std::make_shared<Piecewise>(density);
}

std::shared_ptr<const Model> make_user(UserDensity density) {
  if (!density.pdf) throw ConstructionError("user density needs a pdf callback");
  if (!(density.support.lower < density.support.upper))
    throw ConstructionError("user density support must satisfy lower < upper");
  if (!(density.moment_sup > 0.0)) throw ConstructionError("user density moment_sup must be positive");
  auto model = std::make_shared<User>(std::move(density));
  Integrand g;
  g.eval = [&model](double t) { return model->pdf(t); };
  g.lower = model->support().lower;
  g.upper = model->support().upper;
  g.singular_lower = model->support().lower_finite();
  g.singular_upper = model->support().upper_finite();
  g.breakpoints = model->breakpoints();
  double total = 0.0;
  try {
    total = integrate(g, 1e-9, 1e-12).value;
  } catch (const AccuracyError& e) {
    if (e.error_estimate() > 1e-7) throw ConstructionError(std::string("user density normalization: ") + e.what());
    total = e.best_estimate();
  } catch (const IntegrandError& e) {
    throw ConstructionError(std::string("user density normalization: ") + e.what());
  }
  if (std::abs(total - 1.0) > 1e-6)
    throw ConstructionError("user density integrates to " + std::to_string(total) + ", expected 1 within 1e-6");
  return model;
}

}  // namespace pmean::detail
