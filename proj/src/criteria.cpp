#include "pmean/criteria.hpp"

#include "pmean/errors.hpp"
#include "pmean/piecewise.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace pmean {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string p_scope(const std::vector<double>& grid) {
  if (grid.empty()) return "p grid empty";
  return "p in [" + fmt(grid.front()) + ", " + fmt(grid.back()) + "], " + std::to_string(grid.size()) + " points";
}

double safe_log_pdf(const DistributionSpec& spec, const Support& s, double x) {
  return s.contains(x) ? spec.log_pdf(x) : -kInf;
}

std::optional<double> slope_at(const DistributionSpec& spec, double x) {
  try {
    const double v = spec.log_pdf_derivative(x);
    if (std::isnan(v)) return std::nullopt;
    return v;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

struct ModeInfo {
  std::optional<double> value;
  bool interior = false;
};

ModeInfo mode_of(const DistributionSpec& spec) {
  const AnalyticFacts f = spec.analytic_facts();
  if (f.mode) return {f.mode, true};
  if (f.boundary_mode) return {f.boundary_mode, false};
  if (auto m = spec.locate_mode()) return {m, true};
  return {};
}

// Nodes in (0, 1) clustered toward both ends.
std::vector<double> graded_unit(int n) {
  std::vector<double> t;
  t.reserve(n - 1);
  for (int i = 1; i < n; ++i) t.push_back(0.5 * (1.0 - std::cos(kPi * i / n)));
  return t;
}

template <class F>
double refine_sign_change(F sign_value, double a, double b, double sa) {
  for (int i = 0; i < 200 && b - a > 4e-16 * std::max(std::abs(a), std::abs(b)); ++i) {
    const double m = 0.5 * (a + b);
    const double v = sign_value(m);
    if (v == 0.0) return m;
    if ((v > 0.0) == (sa > 0.0)) {
      a = m;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

SkewVerdict merged(std::vector<Evidence> before, SkewVerdict v) {
  before.insert(before.end(), v.evidence.begin(), v.evidence.end());
  v.evidence = std::move(before);
  return v;
}

}  // namespace

CrossingProfile crossing_profile(const DistributionSpec& spec, double p, double tol) {
  const PMeanPoint pt = solve_pmean(spec, p, tol);
  return crossing_profile(spec, p, pt.nu, pt.nu_error);
}

CrossingProfile crossing_profile(const DistributionSpec& spec, double p, double nu, double /*nu_error*/) {
  CrossingProfile out;
  out.p = p;
  out.nu = nu;
  const Support s = spec.support();
  const double left = nu - s.lower;
  const double right = s.upper - nu;
  out.support_condition = (!s.lower_finite() && !s.upper_finite()) || left <= right;
  double m = std::min(left, right);
  const bool truncated = !std::isfinite(m);
  if (truncated) m = std::max(nu - spec.quantile(1e-12), spec.quantile(1.0 - 1e-12) - nu);
  out.range = m;

  // log f(nu+x) - log f(nu-x), zero inside the rounding band.
  auto h = [&](double x) {
    const double lp = safe_log_pdf(spec, s, nu + x);
    const double lm = safe_log_pdf(spec, s, nu - x);
    if (lp == -kInf && lm == -kInf) return 0.0;
    if (lp == -kInf) return -1.0;
    if (lm == -kInf) return 1.0;
    const double d = lp - lm;
    return std::abs(d) <= 1e-10 * (1.0 + std::abs(lp) + std::abs(lm)) ? 0.0 : d;
  };

  std::vector<double> xs;
  for (double t : graded_unit(512)) xs.push_back(m * t);
  int first_sign = 0;
  int last_sign = 0;
  double last_x = 0.0;
  for (double x : xs) {
    const double v = h(x);
    if (v == 0.0) continue;
    const int sg = v > 0.0 ? 1 : -1;
    if (first_sign == 0) {
      first_sign = sg;
      if (sg > 0) out.c_p = 0.0;
    } else if (sg != last_sign) {
      ++out.crossing_count;
      const double c = refine_sign_change(h, last_x, x, static_cast<double>(last_sign));
      if (!out.c_p && sg > 0) out.c_p = c;
    }
    last_sign = sg;
    last_x = x;
  }
  out.identically_zero = first_sign == 0;
  if (!truncated && last_sign != 0) {
    // Beyond the nearer end only one of f(nu+x), f(nu-x) survives.
    const int beyond = left < right ? 1 : (right < left ? -1 : 0);
    if (beyond != 0 && beyond != last_sign) {
      ++out.crossing_count;
      out.boundary_crossing = true;
      if (!out.c_p && beyond > 0) out.c_p = m;
    }
  }
  out.satisfies_L2 = out.crossing_count == 1 && first_sign < 0 && out.c_p.has_value() && out.support_condition;
  return out;
}

std::optional<SkewVerdict> check_monotone_density(const DistributionSpec& spec) {
  const auto& prm = spec.params();
  auto param = [&](const std::string& k, double fallback) {
    auto it = prm.find(k);
    return it == prm.end() ? fallback : it->second;
  };
  // Direction of the standard member: -1 non-increasing, +1 non-decreasing.
  int direction = 0;
  std::string reason;
  switch (spec.family()) {
    case Family::weibull:
      if (param("k", 0.0) <= 1.0) direction = -1, reason = "weibull k <= 1";
      break;
    case Family::chi_squared:
      if (param("k", 0.0) <= 2.0) direction = -1, reason = "chi_squared k <= 2";
      break;
    case Family::exponential:
      direction = -1, reason = "exponential";
      break;
    case Family::pareto:
      direction = -1, reason = "pareto";
      break;
    case Family::log_logistic:
      if (param("beta", 0.0) <= 1.0) direction = -1, reason = "log_logistic beta <= 1";
      break;
    case Family::gamma:
      if (param("shape", 0.0) <= 1.0) direction = -1, reason = "gamma shape <= 1";
      break;
    case Family::beta: {
      const double a = param("a", 1.0);
      const double b = param("b", 1.0);
      if (a <= 1.0 && b >= 1.0 && !(a == 1.0 && b == 1.0)) direction = -1, reason = "beta a <= 1 <= b";
      if (b <= 1.0 && a >= 1.0 && !(a == 1.0 && b == 1.0)) direction = 1, reason = "beta b <= 1 <= a";
      break;
    }
    case Family::piecewise: {
      const PiecewisePolyDensity* d = spec.piecewise_density();
      if (d && d->certified_non_increasing() && d->has_strict_decrease())
        direction = -1, reason = "piecewise polynomial: derivative Bernstein coefficients <= 0, no upward jump";
      break;
    }
    default:
      break;
  }

  const Support s = spec.support();
  Grade grade = Grade::analytic;
  if (direction != 0) {
    if (spec.scale() < 0.0) direction = -direction;
  } else if (spec.family() == Family::user_density || spec.family() == Family::piecewise ||
             spec.family() == Family::uniform) {
    // Grid check of log f between the finite end and a far quantile.
    const bool from_left = s.lower_finite();
    const bool from_right = s.upper_finite();
    if (!from_left && !from_right) return std::nullopt;
    const double lo = from_left ? s.lower : spec.quantile(1e-9);
    const double hi = from_right ? s.upper : spec.quantile(1.0 - 1e-9);
    std::vector<double> lf;
    for (double t : graded_unit(2000)) lf.push_back(safe_log_pdf(spec, s, lo + (hi - lo) * t));
    bool nonincreasing = true;
    bool nondecreasing = true;
    bool strict = false;
    for (std::size_t i = 1; i < lf.size(); ++i) {
      const double slack = 1e-12 * std::max(1.0, std::abs(lf[i - 1]));
      if (lf[i] > lf[i - 1] + slack) nonincreasing = false;
      if (lf[i] < lf[i - 1] - slack) nondecreasing = false;
      if (std::abs(lf[i] - lf[i - 1]) > 1e-9) strict = true;
    }
    if (!strict) return std::nullopt;
    if (nonincreasing && from_left) {
      direction = -1;
    } else if (nondecreasing && from_right) {
      direction = 1;
    } else {
      return std::nullopt;
    }
    grade = Grade::numeric;
    reason = "log density monotone on a 2000-point graded grid";
  } else {
    return std::nullopt;
  }
  if (direction < 0 && !s.lower_finite()) return std::nullopt;
  if (direction > 0 && !s.upper_finite()) return std::nullopt;

  SkewVerdict v;
  v.distribution = spec.describe();
  v.conclusion = direction < 0 ? Conclusion::truly_positive : Conclusion::truly_negative;
  v.grade = grade;
  Evidence e;
  e.criterion = "monotone_density";
  e.scope = direction < 0 ? "non-increasing density, finite lower end" : "non-decreasing density, finite upper end";
  e.pass = true;
  e.numbers["support_lower"] = s.lower;
  e.numbers["support_upper"] = s.upper;
  e.note = reason;
  v.evidence.push_back(e);
  return v;
}

std::optional<double> clopen_threshold(const DistributionSpec& spec) {
  if (spec.scale() <= 0.0) return std::nullopt;
  const auto& prm = spec.params();
  switch (spec.family()) {
    case Family::levy:
      return spec.location() + spec.scale() * (2.0 / 3.0);
    case Family::chi_squared: {
      const double k = prm.at("k");
      if (k < 3.0) return std::nullopt;
      // The standard member is gamma(k/2); chi-squared coordinates carry the factor 2.
      return spec.location() + spec.scale() * (k - 2.0) / 2.0;
    }
    case Family::weibull: {
      if (prm.at("k") <= 1.0) return std::nullopt;
      return spec.analytic_facts().mode;
    }
    default:
      return std::nullopt;
  }
}

SkewVerdict clopen_certify(const DistributionSpec& spec, double threshold, const std::vector<double>& p_grid,
                           double tol) {
  SkewVerdict v;
  v.distribution = spec.describe();
  const PMeanPoint nu1 = solve_pmean(spec, 1.0, tol);
  const ModeInfo mode = mode_of(spec);
  Evidence e;
  e.criterion = "clopen";
  e.scope = "nu_1 > C and nu_1 > nu_0";
  e.numbers["C"] = threshold;
  e.numbers["nu_1"] = nu1.nu;
  e.numbers["nu_1_error"] = nu1.nu_error;
  if (mode.value) e.numbers["nu_0"] = *mode.value;

  if (mode.interior && nu1.nu + nu1.nu_error < *mode.value) {
    e.pass = false;
    e.note = "median below mode";
    v.evidence.push_back(e);
    v.conclusion = Conclusion::not_truly_positive;
    v.grade = Grade::refuted;
    v.witness = Witness{"median_below_mode", {{"p", 1.0}, {"nu_1", nu1.nu}, {"nu_0", *mode.value}}};
    return v;
  }
  if (!(nu1.nu - nu1.nu_error > threshold) || (mode.interior && !(nu1.nu - nu1.nu_error > *mode.value))) {
    e.note = "nu_1 does not clear the threshold; criterion inapplicable";
    v.evidence.push_back(e);
    return v;
  }
  e.pass = true;
  v.evidence.push_back(e);

  bool all_single = true;
  const std::size_t n = p_grid.size();
  std::vector<std::size_t> picks;
  if (n > 0) {
    for (int i = 0; i < 5; ++i) {
      const auto idx = static_cast<std::size_t>(std::lround(i * (n - 1) / 4.0));
      if (picks.empty() || picks.back() != idx) picks.push_back(idx);
    }
  }
  for (std::size_t idx : picks) {
    Evidence c;
    c.criterion = "single_crossing";
    c.scope = "p = " + fmt(p_grid[idx]);
    try {
      const CrossingProfile cp = crossing_profile(spec, p_grid[idx], tol);
      c.pass = cp.satisfies_L2;
      c.numbers["p"] = cp.p;
      c.numbers["nu"] = cp.nu;
      c.numbers["crossings"] = cp.crossing_count;
      if (cp.c_p) c.numbers["c_p"] = *cp.c_p;
    } catch (const Error& err) {
      c.pass = false;
      c.note = err.what();
    }
    all_single = all_single && c.pass.value_or(false);
    v.evidence.push_back(c);
  }
  if (all_single) {
    v.conclusion = Conclusion::truly_positive;
    v.grade = Grade::analytic;
  }
  return v;
}

namespace {

// Sign changes of f''/f = (log f)'' + ((log f)')^2 on (lo, hi).
std::vector<double> numeric_inflections(const DistributionSpec& spec, double lo, double hi) {
  auto g = [&](double x) {
    const double d1 = slope_at(spec, x).value_or(std::nan(""));
    const double h = 1e-5 * std::max(x - lo, 1e-300);
    const auto up = slope_at(spec, x + h);
    const auto dn = slope_at(spec, x - h);
    if (!up || !dn || std::isnan(d1)) return 0.0;
    const double v = (*up - *dn) / (2.0 * h) + d1 * d1;
    return std::abs(v) < 1e-9 * (d1 * d1 + 1e-300) ? 0.0 : v;
  };
  std::vector<double> out;
  double last_x = 0.0;
  double last_v = 0.0;
  for (double t : graded_unit(2000)) {
    const double x = lo + (hi - lo) * t;
    const double v = g(x);
    if (v == 0.0 || !std::isfinite(v)) continue;
    if (last_v != 0.0 && (v > 0.0) != (last_v > 0.0)) out.push_back(refine_sign_change(g, last_x, x, last_v));
    last_x = x;
    last_v = v;
  }
  return out;
}

struct BoundCheck {
  bool pass = true;
  double min_margin = kInf;
  std::string note;
};

// f'/f - bound > 0 on (a, b), graded toward both ends, plus the end limits.
BoundCheck slope_bound(const DistributionSpec& spec, double a, double b, double bound,
                       std::optional<double> limit_a, std::optional<double> limit_b) {
  BoundCheck out;
  std::vector<double> xs;
  const double top = std::isfinite(b) ? b : std::max(spec.quantile(1.0 - 1e-12), a + spec.spread());
  for (double t : graded_unit(2000)) xs.push_back(a + (top - a) * t);
  if (!std::isfinite(b))
    for (int j = 1; j <= 60; ++j) xs.push_back(top * std::pow(2.0, j));
  for (double x : xs) {
    const auto s = slope_at(spec, x);
    if (!s) continue;
    out.min_margin = std::min(out.min_margin, *s - bound);
  }
  if (!(out.min_margin > 0.0)) out.pass = false;
  if (limit_a) {
    out.min_margin = std::min(out.min_margin, *limit_a - bound);
    if (!(*limit_a > bound)) out.pass = false;
  }
  if (limit_b) {
    out.min_margin = std::min(out.min_margin, *limit_b - bound);
    if (!(*limit_b > bound)) out.pass = false;
  } else if (!std::isfinite(b)) {
    out.note = "no closed-form tail limit; grid only";
  }
  return out;
}

}  // namespace

std::pair<InflectionReport, std::optional<SkewVerdict>> inflection_criterion(const DistributionSpec& spec,
                                                                             const InflectionOptions& options) {
  InflectionReport r;
  const Support s = spec.support();
  if (!s.lower_finite() || s.upper_finite() || spec.scale() < 0.0) {
    r.note = "needs support (L, inf)";
    return {r, std::nullopt};
  }
  const double L = s.lower;
  const AnalyticFacts facts = spec.analytic_facts();
  const auto mode = spec.locate_mode();
  if (!mode) {
    r.note = "no interior mode";
    return {r, std::nullopt};
  }
  r.mode = *mode;
  r.median = solve_pmean(spec, 1.0).nu;
  const bool closed_form = facts.inflection_points.has_value() && facts.mode.has_value();
  if (facts.inflection_points) {
    for (double t : *facts.inflection_points)
      if (t > L) r.inflection_points.push_back(t);
  } else {
    r.inflection_points = numeric_inflections(spec, L, spec.quantile(1.0 - 1e-10));
  }
  const auto& th = r.inflection_points;

  SkewVerdict v;
  v.distribution = spec.describe();
  Evidence e;
  e.criterion = "inflection";
  e.numbers["nu_0"] = r.mode;
  e.numbers["nu_1"] = r.median;
  for (std::size_t i = 0; i < th.size(); ++i) e.numbers["theta_" + std::to_string(i + 1)] = th[i];

  if (th.size() == 1 && th[0] > r.mode) {
    r.path = "corollary";
    r.corollary_applicable = true;
    r.theta2 = th[0];
    r.median_condition = r.median > 0.5 * (r.mode + th[0]);
    e.scope = "one inflection point above the mode; nu_1 > (nu_0 + theta)/2";
    e.pass = r.median_condition;
    v.evidence.push_back(e);
    if (!r.median_condition) return {r, std::nullopt};
    v.conclusion = Conclusion::truly_positive;
    v.grade = closed_form ? Grade::analytic : Grade::numeric;
    return {r, v};
  }
  if (th.size() != 2 || !(th[0] < r.mode && r.mode < th[1])) {
    r.note = th.size() > 2 ? "more than two inflection points" : "inflection points do not bracket the mode";
    return {r, std::nullopt};
  }

  r.path = "theorem";
  r.theta1 = th[0];
  r.theta2 = th[1];
  if (options.median_plus_crossing || options.nu0_from_crossing || options.upper_from_crossing) {
    const CrossingProfile cp = crossing_profile(spec, 1.0);
    r.c1 = cp.c_p;
  }
  double nu0 = r.mode;
  if (options.nu0_from_crossing && r.c1) nu0 = r.median - *r.c1;
  const double bound = 1.0 / (nu0 - L);
  const BoundCheck lower = slope_bound(spec, L, th[0], bound, spec.left_log_slope_limit(), std::nullopt);
  double upper_start = th[1];
  if (options.upper_from_crossing && r.c1) upper_start = r.median + *r.c1;
  const BoundCheck upper = slope_bound(spec, upper_start, kInf, -bound, std::nullopt, spec.right_log_slope_limit());
  r.lower_bound_check = lower.pass;
  r.upper_bound_check = upper.pass;
  r.min_lower_slope = lower.min_margin;
  r.min_upper_slope = upper.min_margin;
  r.median_condition = r.median > 0.5 * (r.mode + th[1]);
  if (options.median_plus_crossing && r.c1 && r.median + *r.c1 > th[1]) r.median_condition = true;
  r.note = upper.note;

  e.scope = "two inflection points around the mode";
  e.numbers["lower_slope_margin"] = lower.min_margin;
  e.numbers["upper_slope_margin"] = upper.min_margin;
  if (r.c1) e.numbers["c_1"] = *r.c1;
  e.pass = r.lower_bound_check && r.upper_bound_check && r.median_condition;
  e.note = std::string("lower bound ") + (lower.pass ? "holds" : "fails") + ", upper bound " +
           (upper.pass ? "holds" : "fails") + ", median condition " + (r.median_condition ? "holds" : "fails");
  v.evidence.push_back(e);
  if (!*e.pass) return {r, std::nullopt};
  v.conclusion = Conclusion::truly_positive;
  v.grade = Grade::numeric;
  return {r, v};
}

ConvexMap ConvexMap::exponential(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw ConstructionError("exponential map needs k > 0");
  ConvexMap u;
  u.name = "exp(k=" + fmt(k) + ")";
  u.forward = [k](double x) { return k * std::exp(x); };
  u.inverse = [k](double y) { return std::log(y / k); };
  u.inverse_derivative = [](double y) { return 1.0 / y; };
  u.image_moment_sup = [](const DistributionSpec& base) {
    if (!base.support().upper_finite() && base.family() == Family::exponential && base.scale() > 0.0)
      return 1.0 / base.scale();
    if (base.support().upper_finite()) return kInf;
    throw PreconditionError("moments of exp(X) are only derived for exponential X or bounded support");
  };
  u.image_right_tail = [k](const DistributionSpec& base) -> std::optional<TailEnvelope> {
    if (base.family() != Family::exponential || base.scale() <= 0.0) return std::nullopt;
    // k exp(loc + E/rate) is Pareto(k e^loc, rate).
    const double rate = 1.0 / base.scale();
    const double km = k * std::exp(base.location());
    return TailEnvelope{rate * std::pow(km, rate), 0.0, rate};
  };
  return u;
}

ConvexMap ConvexMap::square() {
  ConvexMap u;
  u.name = "square";
  u.forward = [](double x) { return x * x; };
  u.inverse = [](double y) { return std::sqrt(y); };
  u.inverse_derivative = [](double y) { return 0.5 / std::sqrt(y); };
  u.image_moment_sup = [](const DistributionSpec& base) { return 0.5 * base.moment_sup(); };
  u.image_right_tail = [](const DistributionSpec& base) -> std::optional<TailEnvelope> {
    const auto t = base.right_tail();
    if (!t || t->anchor != 0.0) return std::nullopt;
    return TailEnvelope{0.5 * t->coefficient, 0.0, 0.5 * t->decay};
  };
  return u;
}

ConvexMap ConvexMap::identity() {
  ConvexMap u;
  u.name = "identity";
  u.forward = [](double x) { return x; };
  u.inverse = [](double y) { return y; };
  u.inverse_derivative = [](double) { return 1.0; };
  u.image_moment_sup = [](const DistributionSpec& base) { return base.moment_sup(); };
  u.image_right_tail = [](const DistributionSpec& base) { return base.right_tail(); };
  return u;
}

ConvexTransformResult convex_transform_verdict(const DistributionSpec& base, const ConvexMap& u) {
  const auto mono = check_monotone_density(base);
  if (!mono || mono->conclusion != Conclusion::truly_positive)
    throw PreconditionError("base density of " + base.describe() + " is not decreasing on its support");
  const Support s = base.support();
  if (u.name == "square" && s.lower < 0.0)
    throw PreconditionError("square is increasing only on [0, inf); base support starts at " + fmt(s.lower));

  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    const double x = base.quantile((i + 0.5) / 100.0);
    const double y = base.quantile(((i * 37) % 100 + 0.5) / 100.0);
    const double ux = u.forward(x);
    const double uy = u.forward(y);
    const double mid = u.forward(0.5 * (x + y));
    if (mid > 0.5 * (ux + uy) + 1e-12 * std::max(1.0, std::abs(mid)))
      throw PreconditionError("convexity spot check failed for " + u.name + " at x=" + fmt(x) + ", y=" + fmt(y));
    if ((x < y && !(ux < uy)) || (y < x && !(uy < ux)))
      throw PreconditionError(u.name + " is not strictly increasing between " + fmt(x) + " and " + fmt(y));
    if (std::abs(u.inverse(ux) - x) > 1e-9 * std::max(1.0, std::abs(x)))
      throw PreconditionError("inverse of " + u.name + " does not invert it at x=" + fmt(x));
    ++checked;
  }

  UserDensity d;
  d.support = Support{s.lower_finite() ? u.forward(s.lower) : u.forward(-kInf),
                      s.upper_finite() ? u.forward(s.upper) : kInf};
  const auto w = u.inverse;
  const auto dw = u.inverse_derivative;
  d.pdf = [base, w, dw](double y) { return base.pdf(w(y)) * dw(y); };
  d.cdf = [base, w, lo = d.support.lower, hi = d.support.upper](double y) {
    if (y <= lo) return 0.0;
    if (y >= hi) return 1.0;
    return base.cdf(w(y));
  };
  d.moment_sup = u.image_moment_sup(base);
  d.right_tail = u.image_right_tail(base);
  for (double b : base.breakpoints()) d.breakpoints.push_back(u.forward(b));
  d.name = "pushforward(" + base.describe() + "," + u.name + ")";
  DistributionSpec push = DistributionSpec::user(d);

  SkewVerdict v;
  v.distribution = push.describe();
  v.conclusion = Conclusion::truly_positive;
  v.grade = Grade::analytic;
  Evidence e;
  e.criterion = "convex_transform";
  e.scope = "u convex and strictly increasing on the base support";
  e.pass = true;
  e.numbers["spot_checks"] = checked;
  e.note = "base " + base.describe() + " has a decreasing density";
  v.evidence = mono->evidence;
  v.evidence.push_back(e);
  return {v, push};
}

std::vector<double> default_certify_grid(const DistributionSpec& spec, double p_max) {
  const double hi = 1.0 + spec.moment_sup();
  const double top = std::min(std::isfinite(hi) ? hi - 0.05 : kInf, p_max);
  if (!(top > 1.0)) throw DomainError("p-domain of " + spec.describe() + " is too short to certify");
  const double step = std::min(0.5, (top - 1.0) / 10.0);
  return make_grid(1.0, top, step);
}

SkewVerdict numeric_certify(const DistributionSpec& spec, const std::vector<double>& p_grid, double min_slope,
                            double tol) {
  if (p_grid.size() < 11) throw PreconditionError("numeric certification needs at least 11 grid points");
  if (std::abs(p_grid.front() - 1.0) > 1e-12) throw PreconditionError("numeric certification grid must start at p = 1");
  SkewVerdict v;
  v.distribution = spec.describe();
  const PMeanCurve curve = trace_curve(spec, p_grid, tol, true);
  const auto& pts = curve.points;
  Evidence e;
  e.criterion = "numeric_curve";
  e.scope = p_scope(p_grid);
  if (curve.failures > 0) {
    e.note = std::to_string(curve.failures) + " grid points unsolved";
    v.evidence.push_back(e);
    return v;
  }
  const ModeInfo mode = mode_of(spec);
  const Support s = spec.support();
  const double sym_tol = std::max(100.0 * tol, 1e-8) * std::max(1.0, spec.spread());

  bool symmetric = true;
  bool increasing = true;
  bool decreasing = true;
  double min_step = kInf;
  double max_step = -kInf;
  double max_dev = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    max_dev = std::max(max_dev, std::abs(pts[i].nu - pts[0].nu));
    if (std::abs(pts[i].nu - pts[0].nu) > sym_tol) symmetric = false;
    if (pts[i].dnu_sign != DnuSign::increasing) increasing = false;
    if (pts[i].dnu_sign != DnuSign::decreasing) decreasing = false;
    if (i == 0) continue;
    const double step = pts[i].nu - pts[i - 1].nu;
    const double need = std::max(min_slope * (pts[i].p - pts[i - 1].p), 10.0 * tol * std::max(1.0, std::abs(pts[i].nu)));
    min_step = std::min(min_step, step);
    max_step = std::max(max_step, step);
    if (!(step > need)) increasing = false;
    if (!(-step > need)) decreasing = false;
  }
  e.numbers["nu_first"] = pts.front().nu;
  e.numbers["nu_last"] = pts.back().nu;
  e.numbers["min_step"] = min_step;
  e.numbers["max_step"] = max_step;
  e.numbers["max_deviation_from_nu_1"] = max_dev;
  if (mode.value) e.numbers["nu_0"] = *mode.value;

  const double nu_first = pts.front().nu;
  const double err_first = pts.front().nu_error;
  if (symmetric) {
    e.pass = true;
    e.note = "nu_p constant within " + fmt(sym_tol);
    v.evidence.push_back(e);
    v.conclusion = Conclusion::symmetric;
    v.grade = Grade::numeric;
    return v;
  }
  if (increasing && (!mode.interior || nu_first - err_first > *mode.value)) {
    e.pass = true;
    e.note = "nu_p strictly increasing, nu at the first grid point above the mode";
    v.evidence.push_back(e);
    v.conclusion = Conclusion::truly_positive;
    v.grade = Grade::numeric;
    return v;
  }
  const bool half_line = s.lower_finite() && !s.upper_finite();
  // A lower-bounded half-line never carries true negative skewness; such a
  // curve falls through to the refutation checks.
  if (decreasing && !half_line && (!mode.interior || nu_first + err_first < *mode.value)) {
    e.pass = true;
    e.note = "nu_p strictly decreasing, nu at the first grid point below the mode";
    v.evidence.push_back(e);
    v.conclusion = Conclusion::truly_negative;
    v.grade = Grade::numeric;
    return v;
  }
  e.pass = false;
  if (mode.interior && nu_first + err_first < *mode.value && std::abs(p_grid.front() - 1.0) < 1e-12) {
    e.note = "median below mode";
    v.evidence.push_back(e);
    v.conclusion = Conclusion::not_truly_positive;
    v.grade = Grade::refuted;
    v.witness = Witness{"median_below_mode", {{"p", 1.0}, {"nu_1", nu_first}, {"nu_0", *mode.value}}};
    return v;
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double step = pts[i].nu - pts[i - 1].nu;
    const double slack = pts[i].nu_error + pts[i - 1].nu_error + 10.0 * tol * std::max(1.0, std::abs(pts[i].nu));
    const bool sign_down = pts[i].dnu_sign == DnuSign::decreasing || pts[i - 1].dnu_sign == DnuSign::decreasing;
    if (step < -slack && sign_down) {
      e.note = "certified decrease between grid points";
      v.evidence.push_back(e);
      v.conclusion = Conclusion::not_truly_positive;
      v.grade = Grade::refuted;
      v.witness = Witness{"decreasing_at_p",
                          {{"p", pts[i - 1].p}, {"p_next", pts[i].p}, {"nu", pts[i - 1].nu}, {"nu_next", pts[i].nu}}};
      return v;
    }
  }
  e.note = "curve neither certified monotone nor refuted";
  v.evidence.push_back(e);
  return v;
}

SkewVerdict verdict(const DistributionSpec& spec, const VerdictOptions& options) {
  std::vector<Evidence> trail;
  if (auto mono = check_monotone_density(spec)) return *mono;
  Evidence skipped;
  skipped.criterion = "monotone_density";
  skipped.scope = "support and density shape";
  skipped.note = "density not monotone on a one-sided support";
  trail.push_back(skipped);

  const std::vector<double> grid = options.p_grid.empty() ? default_certify_grid(spec) : options.p_grid;
  if (auto c = clopen_threshold(spec)) {
    SkewVerdict v = clopen_certify(spec, *c, grid, options.tol);
    if (v.conclusive()) return merged(trail, v);
    trail.insert(trail.end(), v.evidence.begin(), v.evidence.end());
  }
  auto [report, inflection] = inflection_criterion(spec, options.inflection);
  if (inflection) return merged(trail, *inflection);
  Evidence inf;
  inf.criterion = "inflection";
  inf.scope = "path " + report.path;
  if (report.path != "inapplicable") inf.pass = false;
  inf.note = report.note;
  if (report.path == "theorem")
    inf.note = std::string("lower bound ") + (report.lower_bound_check ? "holds" : "fails") + ", upper bound " +
               (report.upper_bound_check ? "holds" : "fails") + ", median condition " +
               (report.median_condition ? "holds" : "fails");
  if (report.path == "corollary") inf.note = "median condition fails";
  inf.numbers["nu_0"] = report.mode;
  for (std::size_t i = 0; i < report.inflection_points.size(); ++i)
    inf.numbers["theta_" + std::to_string(i + 1)] = report.inflection_points[i];
  trail.push_back(inf);

  return merged(trail, numeric_certify(spec, grid, options.min_slope, options.tol));
}

}  // namespace pmean
