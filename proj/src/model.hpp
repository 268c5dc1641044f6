#pragma once

#include "pmean/distribution.hpp"

#include <optional>
#include <vector>

namespace pmean::detail {

/// A standard member of a family, in its own coordinates.
class Model {
 public:
  virtual ~Model() = default;

  virtual Support support() const = 0;
  virtual double log_pdf(double x) const = 0;
  virtual double pdf(double x) const;
  /// Density at support().lower + d and support().upper - d from d alone.
  virtual double pdf_from_lower(double d) const { return pdf(support().lower + d); }
  virtual double pdf_from_upper(double d) const { return pdf(support().upper - d); }
  /// Analytic d/dx log f, when available.
  virtual std::optional<double> dlog_pdf(double x) const;
  virtual double cdf(double x) const = 0;
  virtual double sf(double x) const { return 1.0 - cdf(x); }
  /// Closed-form quantile, when available.
  virtual std::optional<double> quantile(double u) const;
  virtual AnalyticFacts facts() const = 0;
  virtual std::vector<double> breakpoints() const { return {}; }
  virtual std::optional<TailEnvelope> right_tail() const { return std::nullopt; }
  virtual std::optional<TailEnvelope> left_tail() const { return std::nullopt; }
  virtual std::optional<double> right_log_slope_limit() const { return std::nullopt; }
  virtual std::optional<double> left_log_slope_limit() const { return std::nullopt; }

  virtual const PiecewisePolyDensity* piecewise() const { return nullptr; }

  /// inf{x : cdf(x) >= u} by bisection on the cdf.
  double quantile_by_bisection(double u) const;
};

std::shared_ptr<const Model> make_levy();
std::shared_ptr<const Model> make_gamma(double shape);
std::shared_ptr<const Model> make_weibull(double k);
std::shared_ptr<const Model> make_skew_normal(double alpha);
std::shared_ptr<const Model> make_log_logistic(double beta);
std::shared_ptr<const Model> make_exponential();
std::shared_ptr<const Model> make_uniform();
std::shared_ptr<const Model> make_normal();
std::shared_ptr<const Model> make_pareto(double lambda);
std::shared_ptr<const Model> make_beta(double a, double b);
std::shared_ptr<const Model> make_piecewise(const PiecewisePolyDensity& density);
std::shared_ptr<const Model> make_user(UserDensity density);

}  // namespace pmean::detail
