#include "pmean/distribution.hpp"

#include "model.hpp"
#include "pmean/errors.hpp"
#include "pmean/piecewise.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace pmean {

namespace {

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double get(const std::map<std::string, double>& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

double require(const std::map<std::string, double>& params, const std::string& key, const std::string& family) {
  auto it = params.find(key);
  if (it == params.end()) throw ConstructionError(family + " requires parameter '" + key + "'");
  return it->second;
}

void positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConstructionError(what + " must be a positive finite number");
}

void finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw ConstructionError(what + " must be finite");
}

void check_keys(const std::map<std::string, double>& params, std::set<std::string> allowed,
                const std::string& family) {
  allowed.insert("loc");
  allowed.insert("scale");
  for (const auto& [k, v] : params) {
    if (!allowed.count(k)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ConstructionError("unknown parameter '" + k + "' for " + family + " (expected one of: " + list + ")");
    }
  }
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::levy: return "levy";
    case Family::chi_squared: return "chi_squared";
    case Family::weibull: return "weibull";
    case Family::skew_normal: return "skew_normal";
    case Family::log_logistic: return "log_logistic";
    case Family::gamma: return "gamma";
    case Family::exponential: return "exponential";
    case Family::uniform: return "uniform";
    case Family::normal: return "normal";
    case Family::pareto: return "pareto";
    case Family::beta: return "beta";
    case Family::piecewise: return "piecewise";
    case Family::user_density: return "user_density";
  }
  return "unknown";
}

DistributionSpec::DistributionSpec(Family family, std::map<std::string, double> params,
                                   std::shared_ptr<const detail::Model> model, double a, double b,
                                   std::string label)
    : family_(family), params_(std::move(params)), model_(std::move(model)), a_(a), b_(b), label_(std::move(label)) {
  if (!(a_ != 0.0) || !std::isfinite(a_) || !std::isfinite(b_))
    throw ConstructionError("affine map needs a finite non-zero scale and finite location");
  auto q = [this](double u) {
    auto v = model_->quantile(u);
    return v ? *v : model_->quantile_by_bisection(u);
  };
  spread_std_ = q(0.75) - q(0.25);
  if (!(spread_std_ > 0.0) || !std::isfinite(spread_std_)) spread_std_ = 1.0;
}

DistributionSpec DistributionSpec::from_params(Family family, const std::map<std::string, double>& params) {
  const std::string name = to_string(family);
  const double loc = get(params, "loc", 0.0);
  const double scale = get(params, "scale", 1.0);
  finite(loc, "loc");
  positive(scale, "scale");
  std::shared_ptr<const detail::Model> model;
  double a = 1.0;
  double b = 0.0;
  switch (family) {
    case Family::levy: {
      check_keys(params, {"mu", "lambda"}, name);
      const double mu = get(params, "mu", 0.0);
      const double lambda = get(params, "lambda", 1.0);
      finite(mu, "levy mu");
      positive(lambda, "levy lambda");
      model = detail::make_levy();
      a = lambda;
      b = mu;
      break;
    }
    case Family::chi_squared: {
      check_keys(params, {"k"}, name);
      const double k = require(params, "k", name);
      if (!(k >= 1.0) || k != std::floor(k) || k > 1e6)
        throw ConstructionError("chi_squared degrees of freedom k must be a positive integer");
      model = detail::make_gamma(0.5 * k);
      a = 2.0;
      break;
    }
    case Family::weibull: {
      check_keys(params, {"k", "lambda"}, name);
      const double k = require(params, "k", name);
      const double lambda = get(params, "lambda", 1.0);
      positive(k, "weibull k");
      positive(lambda, "weibull lambda");
      model = detail::make_weibull(k);
      a = lambda;
      break;
    }
    case Family::skew_normal: {
      check_keys(params, {"alpha"}, name);
      const double alpha = get(params, "alpha", 0.0);
      finite(alpha, "skew_normal alpha");
      model = detail::make_skew_normal(alpha);
      break;
    }
    case Family::log_logistic: {
      check_keys(params, {"beta", "alpha"}, name);
      const double beta = require(params, "beta", name);
      const double alpha = get(params, "alpha", 1.0);
      positive(beta, "log_logistic beta");
      positive(alpha, "log_logistic alpha");
      model = detail::make_log_logistic(beta);
      a = alpha;
      break;
    }
    case Family::gamma: {
      check_keys(params, {"shape"}, name);
      const double shape = require(params, "shape", name);
      positive(shape, "gamma shape");
      model = detail::make_gamma(shape);
      break;
    }
    case Family::exponential: {
      check_keys(params, {"rate"}, name);
      const double rate = get(params, "rate", 1.0);
      positive(rate, "exponential rate");
      model = detail::make_exponential();
      a = 1.0 / rate;
      break;
    }
    case Family::uniform: {
      check_keys(params, {"a", "b"}, name);
      const double lo = get(params, "a", 0.0);
      const double hi = get(params, "b", 1.0);
      finite(lo, "uniform a");
      finite(hi, "uniform b");
      if (!(lo < hi)) throw ConstructionError("uniform needs a < b");
      model = detail::make_uniform();
      a = hi - lo;
      b = lo;
      break;
    }
    case Family::normal: {
      check_keys(params, {"mu", "sigma"}, name);
      const double mu = get(params, "mu", 0.0);
      const double sigma = get(params, "sigma", 1.0);
      finite(mu, "normal mu");
      positive(sigma, "normal sigma");
      model = detail::make_normal();
      a = sigma;
      b = mu;
      break;
    }
    case Family::pareto: {
      check_keys(params, {"k", "lambda"}, name);
      const double k = get(params, "k", 1.0);
      const double lambda = require(params, "lambda", name);
      positive(k, "pareto k");
      positive(lambda, "pareto lambda");
      model = detail::make_pareto(lambda);
      a = k;
      break;
    }
    case Family::beta: {
      check_keys(params, {"a", "b"}, name);
      const double pa = require(params, "a", name);
      const double pb = require(params, "b", name);
      positive(pa, "beta a");
      positive(pb, "beta b");
      model = detail::make_beta(pa, pb);
      break;
    }
    case Family::piecewise:
    case Family::user_density:
      throw ConstructionError(name + " cannot be built from named parameters");
  }
  std::string label = name + "(";
  bool first = true;
  for (const auto& [k, v] : params) {
    label += (first ? "" : ",") + k + "=" + format_number(v);
    first = false;
  }
  label += ")";
  // loc/scale act on top of the family's own parameters.
  return DistributionSpec(family, params, std::move(model), scale * a, scale * b + loc, label);
}

DistributionSpec DistributionSpec::levy(double mu, double lambda) {
  return from_params(Family::levy, {{"mu", mu}, {"lambda", lambda}});
}
DistributionSpec DistributionSpec::chi_squared(int k) {
  return from_params(Family::chi_squared, {{"k", static_cast<double>(k)}});
}
DistributionSpec DistributionSpec::weibull(double k, double lambda) {
  return from_params(Family::weibull, {{"k", k}, {"lambda", lambda}});
}
DistributionSpec DistributionSpec::skew_normal(double alpha) {
  return from_params(Family::skew_normal, {{"alpha", alpha}});
}
DistributionSpec DistributionSpec::log_logistic(double beta, double alpha) {
  return from_params(Family::log_logistic, {{"beta", beta}, {"alpha", alpha}});
}
DistributionSpec DistributionSpec::gamma(double shape, double scale) {
  return from_params(Family::gamma, {{"shape", shape}, {"scale", scale}});
}
DistributionSpec DistributionSpec::exponential(double rate) {
  return from_params(Family::exponential, {{"rate", rate}});
}
DistributionSpec DistributionSpec::uniform(double a, double b) {
  return from_params(Family::uniform, {{"a", a}, {"b", b}});
}
DistributionSpec DistributionSpec::normal(double mu, double sigma) {
  return from_params(Family::normal, {{"mu", mu}, {"sigma", sigma}});
}
DistributionSpec DistributionSpec::pareto(double k, double lambda) {
  return from_params(Family::pareto, {{"k", k}, {"lambda", lambda}});
}
DistributionSpec DistributionSpec::beta(double a, double b) {
  return from_params(Family::beta, {{"a", a}, {"b", b}});
}

DistributionSpec DistributionSpec::piecewise(const PiecewisePolyDensity& density) {
  return DistributionSpec(Family::piecewise, {}, detail::make_piecewise(density), 1.0, 0.0,
                          "piecewise(" + density.to_json().dump() + ")");
}

DistributionSpec DistributionSpec::user(UserDensity density) {
  std::string label = density.name;
  return DistributionSpec(Family::user_density, {}, detail::make_user(std::move(density)), 1.0, 0.0, label);
}

DistributionSpec DistributionSpec::affine(double c, double s) const {
  if (!(c != 0.0) || !std::isfinite(c) || !std::isfinite(s))
    throw ConstructionError("affine map needs finite c != 0 and finite s");
  DistributionSpec out = *this;
  out.a_ = c * a_;
  out.b_ = c * b_ + s;
  if (!(c == 1.0 && s == 0.0)) out.label_ = "affine(" + label_ + ",c=" + format_number(c) + ",s=" + format_number(s) + ")";
  return out;
}

Support DistributionSpec::support() const {
  const Support s = model_->support();
  const double x1 = a_ * s.lower + b_;
  const double x2 = a_ * s.upper + b_;
  return a_ > 0.0 ? Support{x1, x2} : Support{x2, x1};
}

double DistributionSpec::pdf(double x) const { return model_->pdf(to_standard(x)) / std::abs(a_); }

double DistributionSpec::pdf_from_lower(double d) const {
  const double ds = d / std::abs(a_);
  return (a_ > 0.0 ? model_->pdf_from_lower(ds) : model_->pdf_from_upper(ds)) / std::abs(a_);
}

double DistributionSpec::pdf_from_upper(double d) const {
  const double ds = d / std::abs(a_);
  return (a_ > 0.0 ? model_->pdf_from_upper(ds) : model_->pdf_from_lower(ds)) / std::abs(a_);
}

double DistributionSpec::log_pdf(double x) const {
  const double lp = model_->log_pdf(to_standard(x));
  return lp == -kInf ? lp : lp - std::log(std::abs(a_));
}

double DistributionSpec::log_pdf_derivative(double x) const {
  const Support s = support();
  if (!s.contains(x)) throw DomainError("log_pdf_derivative needs x strictly inside the support");
  if (auto d = model_->dlog_pdf(to_standard(x))) return *d / a_;
  double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(x));
  h = std::min({h, 0.5 * (x - s.lower), 0.5 * (s.upper - x)});
  const double up = log_pdf(x + h);
  const double down = log_pdf(x - h);
  if (!std::isfinite(up) || !std::isfinite(down))
    throw DomainError("log density is not finite next to x; derivative unavailable");
  return (up - down) / (2.0 * h);
}

double DistributionSpec::cdf(double x) const {
  const double t = to_standard(x);
  return a_ > 0.0 ? model_->cdf(t) : model_->sf(t);
}

double DistributionSpec::sf(double x) const {
  const double t = to_standard(x);
  return a_ > 0.0 ? model_->sf(t) : model_->cdf(t);
}

double DistributionSpec::quantile(double u) const {
  if (std::isnan(u) || u < 0.0 || u > 1.0) throw DomainError("quantile level must lie in [0, 1]");
  const double v = a_ > 0.0 ? u : 1.0 - u;
  const auto q = model_->quantile(v);
  return a_ * (q ? *q : model_->quantile_by_bisection(v)) + b_;
}

AnalyticFacts DistributionSpec::analytic_facts() const {
  AnalyticFacts f = model_->facts();
  auto move = [this](std::optional<double>& v) {
    if (v) *v = a_ * *v + b_;
  };
  move(f.mode);
  move(f.boundary_mode);
  move(f.median);
  move(f.mean);
  if (f.skewness && a_ < 0.0) *f.skewness = -*f.skewness;
  if (f.inflection_points) {
    for (double& x : *f.inflection_points) x = a_ * x + b_;
    std::sort(f.inflection_points->begin(), f.inflection_points->end());
  }
  return f;
}

double DistributionSpec::moment_sup() const { return model_->facts().moment_sup; }

double DistributionSpec::median() const {
  const AnalyticFacts f = analytic_facts();
  return f.median ? *f.median : quantile(0.5);
}

std::optional<double> DistributionSpec::locate_mode() const {
  const AnalyticFacts f = analytic_facts();
  if (f.mode) return f.mode;
  if (f.boundary_mode) return std::nullopt;
  const Support s = support();
  double lo = quantile(1e-6);
  double hi = quantile(1.0 - 1e-6);
  if (!(lo < hi)) return std::nullopt;
  constexpr int n = 4000;
  std::vector<double> xs(n + 1);
  std::vector<double> ys(n + 1);
  for (int i = 0; i <= n; ++i) {
    xs[i] = lo + (hi - lo) * i / n;
    ys[i] = s.contains(xs[i]) ? log_pdf(xs[i]) : -kInf;
  }
  const auto best = static_cast<int>(std::max_element(ys.begin(), ys.end()) - ys.begin());
  if (best == 0 || best == n) return std::nullopt;
  // Unimodality on the grid: no other strict local maximum.
  int maxima = 0;
  for (int i = 1; i < n; ++i)
    if (ys[i] > ys[i - 1] && ys[i] >= ys[i + 1]) ++maxima;
  if (maxima != 1) return std::nullopt;
  double a = xs[best - 1];
  double b = xs[best + 1];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = log_pdf(c);
  double fd = log_pdf(d);
  for (int i = 0; i < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(c)); ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = log_pdf(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = log_pdf(d);
    }
  }
  return 0.5 * (a + b);
}

std::vector<double> DistributionSpec::breakpoints() const {
  std::vector<double> out;
  for (double t : model_->breakpoints()) out.push_back(a_ * t + b_);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {
std::optional<TailEnvelope> transport(std::optional<TailEnvelope> e, double a, double b) {
  if (!e) return e;
  return TailEnvelope{e->coefficient * std::pow(std::abs(a), e->decay), a * e->anchor + b, e->decay};
}
}  // namespace

std::optional<TailEnvelope> DistributionSpec::right_tail() const {
  return transport(a_ > 0.0 ? model_->right_tail() : model_->left_tail(), a_, b_);
}

std::optional<TailEnvelope> DistributionSpec::left_tail() const {
  return transport(a_ > 0.0 ? model_->left_tail() : model_->right_tail(), a_, b_);
}

std::optional<double> DistributionSpec::right_log_slope_limit() const {
  const auto v = a_ > 0.0 ? model_->right_log_slope_limit() : model_->left_log_slope_limit();
  if (!v) return v;
  return *v / a_;
}

std::optional<double> DistributionSpec::left_log_slope_limit() const {
  const auto v = a_ > 0.0 ? model_->left_log_slope_limit() : model_->right_log_slope_limit();
  if (!v) return v;
  return *v / a_;
}

const PiecewisePolyDensity* DistributionSpec::piecewise_density() const { return model_->piecewise(); }

double DistributionSpec::spread() const { return std::abs(a_) * spread_std_; }

bool DistributionSpec::analytic_log_derivative() const { return family_ != Family::user_density; }

std::string DistributionSpec::describe() const { return label_; }

}  // namespace pmean
