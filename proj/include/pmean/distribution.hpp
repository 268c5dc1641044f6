#pragma once

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pmean {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Open support interval (lower, upper); either end may be infinite.
struct Support {
  double lower = -kInf;
  double upper = kInf;

  bool contains(double x) const { return x > lower && x < upper; }
  bool lower_finite() const { return lower > -kInf; }
  bool upper_finite() const { return upper < kInf; }
};

enum class Family {
  levy,
  chi_squared,
  weibull,
  skew_normal,
  log_logistic,
  gamma,
  exponential,
  uniform,
  normal,
  pareto,
  beta,
  piecewise,
  user_density,
};

std::string to_string(Family f);

struct AnalyticFacts {
  std::optional<double> mode;           // interior mode, when unique
  std::optional<double> boundary_mode;  // supremum of the density sits at a finite support end
  std::optional<double> median;
  std::optional<double> mean;
  std::optional<double> skewness;  // third standardized moment
  double moment_sup = kInf;
  std::optional<std::vector<double>> inflection_points;  // ascending; empty list = none
};

/// Envelope f(x) <= coefficient * |x - anchor|^(-1 - decay) on the tail side
/// beyond `anchor`.
struct TailEnvelope {
  double coefficient = 0.0;
  double anchor = 0.0;
  double decay = 0.0;
};

/// Density supplied as a callback.  `cdf` is optional; when absent it is
/// computed by quadrature from the lower support end.
struct UserDensity {
  std::function<double(double)> pdf;
  Support support;
  std::function<double(double)> cdf;
  double moment_sup = kInf;
  std::string name = "user";
  std::vector<double> breakpoints;
  std::optional<TailEnvelope> right_tail;
};

class PiecewisePolyDensity;

namespace detail {
class Model;
}

/// Immutable description of a univariate continuous distribution.
///
/// Every member is the affine image a*S + b of a standard member S.  Family
/// parameters that act as scale or location are folded into (a, b); the
/// `loc` and `scale` keys of the mini-language compose on top of them.
class DistributionSpec {
 public:
  static DistributionSpec levy(double mu = 0.0, double lambda = 1.0);
  static DistributionSpec chi_squared(int k);
  static DistributionSpec weibull(double k, double lambda = 1.0);
  static DistributionSpec skew_normal(double alpha);
  static DistributionSpec log_logistic(double beta, double alpha = 1.0);
  static DistributionSpec gamma(double shape, double scale = 1.0);
  static DistributionSpec exponential(double rate = 1.0);
  static DistributionSpec uniform(double a = 0.0, double b = 1.0);
  static DistributionSpec normal(double mu = 0.0, double sigma = 1.0);
  static DistributionSpec pareto(double k, double lambda);
  static DistributionSpec beta(double a, double b);
  static DistributionSpec piecewise(const PiecewisePolyDensity& density);
  static DistributionSpec user(UserDensity density);

  /// Builds a family from named parameters, as in the mini-language.
  static DistributionSpec from_params(Family family, const std::map<std::string, double>& params);

  Family family() const { return family_; }
  const std::map<std::string, double>& params() const { return params_; }
  /// Effective affine map x = scale * s + location from the standard member.
  double location() const { return b_; }
  double scale() const { return a_; }

  /// Distribution of c*X + s.  c may be negative.
  DistributionSpec affine(double c, double s) const;

  Support support() const;
  double pdf(double x) const;
  /// Density at lower + d and upper - d computed from the offset d, so points
  /// next to a finite support end do not round onto it.
  double pdf_from_lower(double d) const;
  double pdf_from_upper(double d) const;
  double log_pdf(double x) const;
  /// d/dx log f; throws DomainError unless x is interior to the support.
  double log_pdf_derivative(double x) const;
  double cdf(double x) const;
  /// 1 - cdf, accurate in the right tail.
  double sf(double x) const;
  /// Left-continuous inverse inf{x : cdf(x) >= u}.
  double quantile(double u) const;

  AnalyticFacts analytic_facts() const;
  double moment_sup() const;
  /// Median from the closed form when available, else the left quantile at 1/2.
  double median() const;
  /// Interior mode: closed form, else a numerical search.  Empty when the
  /// density peaks at a support end or is not unimodal on the search grid.
  std::optional<double> locate_mode() const;

  /// Abscissae where the density has kinks or jumps (interior only).
  std::vector<double> breakpoints() const;
  std::optional<TailEnvelope> right_tail() const;
  std::optional<TailEnvelope> left_tail() const;
  /// lim f'/f as x -> upper support end, when known in closed form.
  std::optional<double> right_log_slope_limit() const;
  /// lim f'/f as x -> lower support end, when known in closed form.
  std::optional<double> left_log_slope_limit() const;
  /// Typical spread (interquartile range) used to scale numerical work.
  double spread() const;

  /// True when the family's density is known to be twice differentiable with
  /// an analytic log-derivative (no finite differences).
  bool analytic_log_derivative() const;

  /// The underlying piecewise density for the piecewise family, else null.
  const PiecewisePolyDensity* piecewise_density() const;

  /// Mini-language rendering, e.g. "weibull(k=2.5,lambda=1)".
  std::string describe() const;

 private:
  DistributionSpec(Family family, std::map<std::string, double> params,
                   std::shared_ptr<const detail::Model> model, double a, double b,
                   std::string label);

  double to_standard(double x) const { return (x - b_) / a_; }

  Family family_;
  std::map<std::string, double> params_;
  std::shared_ptr<const detail::Model> model_;
  double a_ = 1.0;
  double b_ = 0.0;
  double spread_std_ = 1.0;
  std::string label_;
};

/// Parses `family(name=value,...)`.  Throws ParseError naming the offending
/// token and the grammar, ConstructionError for bad parameter values.
DistributionSpec parse_distribution(const std::string& text);

}  // namespace pmean
