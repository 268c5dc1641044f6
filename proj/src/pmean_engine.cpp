#include "pmean/pmean.hpp"

#include "pmean/errors.hpp"
#include "pmean/quadrature.hpp"
#include "pmean/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pmean {

namespace {

void check_domain(const DistributionSpec& spec, double p) {
  const double hi = 1.0 + spec.moment_sup();
  if (!std::isfinite(p) || p < 1.0) throw DomainError("p must be a finite number >= 1");
  if (!(p < hi)) {
    std::ostringstream msg;
    msg << "p = " << p << " is outside the p-domain [1, " << hi << ") of " << spec.describe();
    throw DomainError(msg.str());
  }
}

template <typename F>
QuadResult tolerant(F&& run, double tol_rel, double tol_abs) {
  try {
    return run();
  } catch (const AccuracyError& e) {
    if (e.error_estimate() <= 1e3 * tol_rel * std::abs(e.best_estimate()) + tol_abs)
      return {e.best_estimate(), e.error_estimate(), 0};
    throw;
  }
}

// int_0^reach y^(p-1) [log y] f(a +- y) dy
QuadResult half_integral(const DistributionSpec& spec, double a, double p, int side, bool log_weight,
                         double tol_rel, double tol_abs) {
  const Support s = spec.support();
  const double reach = side > 0 ? s.upper - a : a - s.lower;
  if (!(reach > 0.0)) return {};
  const double q = p - 1.0;
  Integrand g;
  auto weighted = [q, log_weight](double y, double f) {
    if (!(y > 0.0) || f == 0.0) return 0.0;
    double w = q == 0.0 ? 1.0 : std::pow(y, q);
    if (!std::isfinite(w)) w = std::exp(std::min(700.0, q * std::log(y) + std::log(f))) / f;
    if (log_weight) w *= std::log(y);
    return w * f;
  };
  g.eval = [&spec, a, side, weighted](double y) { return weighted(y, spec.pdf(side > 0 ? a + y : a - y)); };
  if (std::isfinite(reach)) {
    // Offset d from the support end, evaluated without rounding onto it.
    g.eval_from_upper = [&spec, reach, side, weighted](double d) {
      return weighted(reach - d, side > 0 ? spec.pdf_from_upper(d) : spec.pdf_from_lower(d));
    };
  }
  g.lower = 0.0;
  g.upper = reach;
  g.singular_lower = true;
  g.singular_upper = std::isfinite(reach);
  g.length_scale = spec.spread();
  for (double b : spec.breakpoints()) {
    const double y = side > 0 ? b - a : a - b;
    if (y > 0.0 && y < reach) g.breakpoints.push_back(y);
  }
  if (log_weight && 1.0 < reach) g.breakpoints.push_back(1.0);

  const auto envelope = side > 0 ? spec.right_tail() : spec.left_tail();
  if (std::isfinite(reach) || !envelope) {
    return tolerant([&] { return integrate(g, tol_rel, tol_abs); }, tol_rel, tol_abs);
  }

  const double decay = envelope->decay - q;
  if (decay < 1e-3) {
    std::ostringstream msg;
    msg << "p = " << p << " is within 1e-3 of the moment ceiling " << 1.0 + envelope->decay
        << "; choose a smaller p";
    throw DomainError(msg.str());
  }
  double coefficient = envelope->coefficient;
  double min_cut = 0.0;
  const double gap = side > 0 ? envelope->anchor - a : a - envelope->anchor;
  if (gap > 0.0) {
    // |x - anchor| >= y / 2 once y >= 2 gap
    coefficient *= std::pow(2.0, 1.0 + envelope->decay);
    min_cut = 2.0 * gap;
  }
  Integrand head = g;
  head.upper = std::max(1e3 * spec.spread(), min_cut);
  head.singular_upper = false;
  double magnitude = 0.0;
  try {
    magnitude = std::abs(integrate(head, 1e-6, tol_abs).value);
  } catch (const AccuracyError& e) {
    magnitude = std::abs(e.best_estimate());
  }
  magnitude = std::max(magnitude, tol_abs);
  double target = 0.1 * tol_rel * magnitude;
  TailCutoff tail;
  for (;;) {
    try {
      tail = algebraic_tail_cutoff(coefficient, decay, target, log_weight);
      break;
    } catch (const DomainError&) {
      // Cutoff beyond the double range: settle for a looser certified bound.
      target *= 10.0;
      if (target > 1e-6 * magnitude) throw;
    }
  }
  tail.cutoff = std::max(tail.cutoff, min_cut);
  const double eff_rel = std::max(tol_rel, 10.0 * tail.tail_bound / magnitude);
  return tolerant([&] { return integrate_tail_truncated(g, tail, tol_rel, tol_abs); }, eff_rel, tol_abs);
}

constexpr double kTinyAbs = 1e-300;

}  // namespace

std::string to_string(DnuSign s) {
  switch (s) {
    case DnuSign::increasing: return "increasing";
    case DnuSign::decreasing: return "decreasing";
    case DnuSign::flat: return "flat";
    case DnuSign::unknown: return "unknown";
  }
  return "unknown";
}

PDomain p_domain(const DistributionSpec& spec) {
  PDomain d;
  d.hi = 1.0 + spec.moment_sup();
  d.include_mode = spec.locate_mode().has_value();
  return d;
}

BalanceParts balance_parts(const DistributionSpec& spec, double a, double p, double tol_rel) {
  check_domain(spec, p);
  if (p == 1.0) return {spec.sf(a), spec.cdf(a), 1e-15};
  const QuadResult up = half_integral(spec, a, p, +1, false, tol_rel, kTinyAbs);
  const QuadResult down = half_integral(spec, a, p, -1, false, tol_rel, kTinyAbs);
  return {up.value, down.value, up.abs_error_estimate + down.abs_error_estimate};
}

double balance(const DistributionSpec& spec, double a, double p) { return balance_parts(spec, a, p).value(); }

PMeanPoint solve_pmean(const DistributionSpec& spec, double p, double tol) {
  SolveOptions o;
  o.tol = tol;
  return solve_pmean(spec, p, o);
}

PMeanPoint solve_pmean(const DistributionSpec& spec, double p, const SolveOptions& options) {
  check_domain(spec, p);
  const Support s = spec.support();
  const double spread = spec.spread();
  PMeanPoint out;
  out.p = p;
  if (p == 1.0) {
    out.nu = spec.median();
    out.balance_residual = spec.sf(out.nu) - spec.cdf(out.nu);
    out.nu_error = 1e-12 * std::max(std::abs(out.nu), spread);
    return out;
  }

  auto rel = [&](double a, double tol_q) {
    if (s.lower_finite() && a <= s.lower) return 1.0;
    if (s.upper_finite() && a >= s.upper) return -1.0;
    const BalanceParts b = balance_parts(spec, a, p, tol_q);
    return b.scale() > 0.0 ? b.value() / b.scale() : 0.0;
  };
  auto clamp = [&](double a) { return std::clamp(a, s.lower, s.upper); };

  double lo;
  double hi;
  if (options.warm_start) {
    const double r = std::max(options.warm_radius, 1e-3 * spread);
    lo = clamp(*options.warm_start - r);
    hi = clamp(*options.warm_start + r);
  } else {
    lo = spec.quantile(0.01);
    hi = spec.quantile(0.99);
  }
  if (!(lo < hi)) {
    lo = clamp(lo - spread);
    hi = clamp(hi + spread);
  }

  constexpr double loose = 1e-8;
  const double tight = std::min(1e-12, 0.01 * options.tol);
  double glo = rel(lo, loose);
  double ghi = rel(hi, loose);
  double width = std::max(hi - lo, spread);
  int expansions = 0;
  auto expand = [&](double g_tol) {
    while (glo <= 0.0) {
      if (++expansions > 60) throw BracketError("no sign change of the balance function after 60 expansions");
      hi = lo;
      ghi = glo;
      lo = clamp(lo - width);
      width *= 2.0;
      glo = rel(lo, g_tol);
    }
    while (ghi >= 0.0) {
      if (++expansions > 60) throw BracketError("no sign change of the balance function after 60 expansions");
      lo = hi;
      glo = ghi;
      hi = clamp(hi + width);
      width *= 2.0;
      ghi = rel(hi, g_tol);
    }
  };
  expand(loose);
  glo = rel(lo, tight);
  ghi = rel(hi, tight);
  expand(tight);

  const double x_tol = 0.01 * options.tol * spread;
  const RootResult r = brent([&](double a) { return rel(a, tight); }, lo, hi, glo, ghi, x_tol, 0.1 * options.tol);
  out.nu = r.root;
  out.balance_residual = r.value;
  out.nu_error = 0.5 * (r.upper - r.lower) + std::abs(r.value) * spread;
  if (!s.contains(out.nu)) {
    std::ostringstream msg;
    msg << "solver left the open support: nu = " << out.nu;
    throw BracketError(msg.str());
  }
  return out;
}

DnuIntegral dnu_integral(const DistributionSpec& spec, double p, double nu, double nu_error) {
  check_domain(spec, p);
  const double scale = balance_parts(spec, nu, p, 1e-8).scale();
  const double tol_rel = 1e-10;
  const double tol_abs = 1e-12 * std::max(scale, kTinyAbs);
  auto diff = [&](double a, double& err) {
    const QuadResult up = half_integral(spec, a, p, +1, true, tol_rel, tol_abs);
    const QuadResult down = half_integral(spec, a, p, -1, true, tol_rel, tol_abs);
    err = up.abs_error_estimate + down.abs_error_estimate;
    return std::pair{up.value, down.value};
  };
  DnuIntegral out;
  const auto [u, l] = diff(nu, out.error);
  out.upper = u;
  out.lower = l;
  out.difference = u - l;
  if (!(std::abs(out.difference) > 10.0 * out.error)) {
    out.sign = DnuSign::flat;
    return out;
  }
  out.sign = out.difference > 0.0 ? DnuSign::increasing : DnuSign::decreasing;
  // A small difference may be an artefact of the error in nu itself.
  if (nu_error > 0.0 && std::abs(out.difference) < 1e-6 * (std::abs(u) + std::abs(l))) {
    const Support s = spec.support();
    const double h = std::max(nu_error, 1e-12 * std::max(1.0, std::abs(nu)));
    for (double a : {nu - h, nu + h}) {
      if (!s.contains(a)) continue;
      double e = 0.0;
      const auto [u2, l2] = diff(a, e);
      const double d2 = u2 - l2;
      if ((d2 > 0.0) != (out.difference > 0.0) || std::abs(d2) <= 10.0 * e) {
        out.sign = DnuSign::flat;
        break;
      }
    }
  }
  return out;
}

DnuSign dnu_sign(const DistributionSpec& spec, double p) {
  const PMeanPoint pt = solve_pmean(spec, p);
  return dnu_integral(spec, p, pt.nu, pt.nu_error).sign;
}

PMeanCurve trace_curve(const DistributionSpec& spec, const std::vector<double>& grid, double tol, bool with_sign) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("p grid must be strictly increasing");
  PMeanCurve curve{spec, {}, {}, 0};
  std::ostringstream desc;
  desc << "explicit list of " << grid.size() << " values";
  if (!grid.empty()) desc << " in [" << grid.front() << ", " << grid.back() << "]";
  curve.grid = desc.str();

  const double spread = spec.spread();
  std::optional<double> prev_nu;
  double prev_step = 0.0;
  for (double p : grid) {
    PMeanPoint pt;
    pt.p = p;
    try {
      SolveOptions o;
      o.tol = tol;
      if (prev_nu) {
        o.warm_start = prev_nu;
        o.warm_radius = 2.0 * std::abs(prev_step) + 0.1 * spread;
      }
      pt = solve_pmean(spec, p, o);
      if (prev_nu) prev_step = pt.nu - *prev_nu;
      prev_nu = pt.nu;
    } catch (const Error& e) {
      pt.solved = false;
      pt.note = e.what();
      ++curve.failures;
    }
    curve.points.push_back(pt);
  }
  if (!grid.empty() && curve.failures * 5 >= grid.size()) {
    std::ostringstream msg;
    msg << curve.failures << " of " << grid.size() << " grid points failed";
    for (const auto& pt : curve.points)
      if (!pt.solved) {
        msg << "; first failure at p = " << pt.p << ": " << pt.note;
        break;
      }
    throw CurveError(msg.str());
  }

  auto& pts = curve.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!pts[i].solved) continue;
    const bool left = i > 0 && pts[i - 1].solved;
    const bool right = i + 1 < pts.size() && pts[i + 1].solved;
    if (left && right)
      pts[i].dnu_dp = (pts[i + 1].nu - pts[i - 1].nu) / (pts[i + 1].p - pts[i - 1].p);
    else if (right)
      pts[i].dnu_dp = (pts[i + 1].nu - pts[i].nu) / (pts[i + 1].p - pts[i].p);
    else if (left)
      pts[i].dnu_dp = (pts[i].nu - pts[i - 1].nu) / (pts[i].p - pts[i - 1].p);
    if (with_sign) {
      try {
        pts[i].dnu_sign = dnu_integral(spec, pts[i].p, pts[i].nu, pts[i].nu_error).sign;
      } catch (const Error& e) {
        pts[i].dnu_sign = DnuSign::unknown;
        pts[i].note = e.what();
      }
    }
  }
  return curve;
}

std::vector<double> make_grid(double start, double stop, double step) {
  if (!std::isfinite(start) || !std::isfinite(stop) || !(step > 0.0) || stop < start)
    throw DomainError("grid needs finite start <= stop and a positive step");
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
  if (n > 1000000) throw DomainError("grid has too many points");
  std::vector<double> out;
  for (std::size_t i = 0; i <= n; ++i) {
    double v = start + static_cast<double>(i) * step;
    const double snapped = std::round(v * 1e9) / 1e9;
    if (std::abs(snapped - v) < 1e-12 * std::max(1.0, std::abs(v))) v = snapped;
    out.push_back(v);
  }
  return out;
}

ClippedGrid clip_to_domain(const DistributionSpec& spec, const std::vector<double>& grid, double margin) {
  ClippedGrid out;
  const double hi = 1.0 + spec.moment_sup();
  if (std::isfinite(hi)) out.ceiling = hi - margin;
  for (double p : grid) {
    if (p <= out.ceiling + 1e-12)
      out.grid.push_back(p);
    else
      out.clipped = true;
  }
  return out;
}

double discrete_pmean(const std::vector<Atom>& pmf, double p) {
  if (pmf.empty()) throw DomainError("pmf must have at least one atom");
  if (!std::isfinite(p) || p < 1.0) throw DomainError("p must be a finite number >= 1");
  double total = 0.0;
  for (const auto& a : pmf) {
    if (!(a.prob > 0.0) || !std::isfinite(a.x)) throw DomainError("atoms need finite locations and positive mass");
    total += a.prob;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("pmf probabilities must sum to 1 within 1e-12");
  std::vector<Atom> atoms = pmf;
  std::sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) { return l.x < r.x; });
  if (atoms.front().x == atoms.back().x) return atoms.front().x;
  if (p == 1.0) {
    double cum = 0.0;
    for (const auto& a : atoms) {
      cum += a.prob;
      if (cum >= 0.5 - 4.0 * std::numeric_limits<double>::epsilon()) return a.x;
    }
    return atoms.back().x;
  }
  if (p == 2.0) {
    double m = 0.0;
    for (const auto& a : atoms) m += a.prob * a.x;
    return m;
  }
  const double q = p - 1.0;
  auto phi = [&](double c) {
    double up = 0.0;
    double down = 0.0;
    for (const auto& a : atoms) {
      if (a.x > c) up += a.prob * std::pow(a.x - c, q);
      if (a.x < c) down += a.prob * std::pow(c - a.x, q);
    }
    return (up - down) / (up + down);
  };
  const double lo = atoms.front().x;
  const double hi = atoms.back().x;
  const double span = hi - lo;
  return brent(phi, lo, hi, 1.0, -1.0, 1e-15 * std::max(span, std::abs(lo)), 0.0).root;
}

double empirical_pmean(const std::vector<double>& samples, double p) {
  if (samples.size() < 2) throw DomainError("empirical p-mean needs at least two samples");
  if (!std::isfinite(p) || p < 1.0) throw DomainError("p must be a finite number >= 1");
  std::vector<double> x = samples;
  std::sort(x.begin(), x.end());
  if (p == 1.0) return x[(x.size() - 1) / 2];
  if (x.front() == x.back()) return x.front();
  if (p == 2.0) return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  const double q = p - 1.0;
  auto phi = [&](double c) {
    double up = 0.0;
    double down = 0.0;
    for (double v : x) {
      if (v > c) up += std::pow(v - c, q);
      if (v < c) down += std::pow(c - v, q);
    }
    return (up - down) / (up + down);
  };
  const double span = x.back() - x.front();
  return brent(phi, x.front(), x.back(), 1.0, -1.0, 1e-15 * std::max(span, std::abs(x.front())), 0.0).root;
}

AffineReport verify_affine_equivariance(const DistributionSpec& spec, double c, double s,
                                        const std::vector<double>& p_grid) {
  if (!(c != 0.0)) throw DomainError("affine equivariance needs c != 0");
  const DistributionSpec moved = spec.affine(c, s);
  AffineReport report;
  for (double p : p_grid) {
    const double nu = solve_pmean(spec, p).nu;
    const double nu_moved = solve_pmean(moved, p).nu;
    const double expected = c * nu + s;
    const double dev = std::abs(nu_moved - expected);
    report.entries.push_back({p, nu_moved, expected, dev});
    report.max_deviation = std::max(report.max_deviation, dev);
  }
  report.pass = report.max_deviation <= 1e-7 * std::max(1.0, std::abs(c));
  return report;
}

}  // namespace pmean
