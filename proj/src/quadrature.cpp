#include "pmean/quadrature.hpp"

#include "pmean/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace pmean {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kUnderflow = std::numeric_limits<double>::min();

// QUADPACK qk21 abscissae and weights.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights for kXgk[1], kXgk[3], ..., kXgk[9].
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

enum class MapKind { identity, tail_up, tail_down, log_up, from_lower, from_upper };

// Change of variables from a panel coordinate t to the integration variable.
struct Mapping {
  MapKind kind = MapKind::identity;
  double anchor = 0.0;
  double width = 1.0;

  // Returns the integrand value times dx/dt; zero where x overflows.
  template <typename F>
  double operator()(const F& f, double t) const {
    switch (kind) {
      case MapKind::identity:
      case MapKind::from_lower:
      case MapKind::from_upper:
        return f(t);
      case MapKind::tail_up:
      case MapKind::tail_down: {
        const double one_minus = 1.0 - t;
        if (one_minus <= 0.0) return 0.0;
        const double s = t / one_minus;
        if (s > 700.0) return 0.0;
        const double step = width * std::expm1(s);
        const double x = kind == MapKind::tail_up ? anchor + step : anchor - step;
        if (!std::isfinite(x)) return 0.0;
        const double jac = width * std::exp(s) / (one_minus * one_minus);
        const double v = f(x);
        return v == 0.0 ? 0.0 : v * jac;
      }
      case MapKind::log_up: {
        const double x = anchor + width * std::expm1(t);
        if (!std::isfinite(x)) return 0.0;
        const double v = f(x);
        return v == 0.0 ? 0.0 : v * width * std::exp(t);
      }
    }
    return 0.0;
  }
};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  int mapping = 0;
  double value = 0.0;
  double error = 0.0;
  bool refinable = true;
};

struct PanelOrder {
  bool operator()(const Panel& lhs, const Panel& rhs) const {
    if (lhs.error != rhs.error) return lhs.error < rhs.error;
    if (lhs.mapping != rhs.mapping) return lhs.mapping > rhs.mapping;
    return lhs.a > rhs.a;
  }
};

class Integrator {
 public:
  Integrator(const Integrand& g, std::size_t budget) : g_(g), budget_(budget) {}

  void add_segment(double a, double b, bool singular_a, bool singular_b) {
    if (!(a < b)) return;
    const double w = g_.length_scale > 0.0 && std::isfinite(g_.length_scale) ? g_.length_scale : 1.0;
    if (std::isinf(a) && std::isinf(b)) {
      add_segment(a, 0.0, false, false);
      add_segment(0.0, b, false, false);
      return;
    }
    if (std::isinf(b)) {
      mappings_.push_back({MapKind::tail_up, a, w});
      add_panels(0.0, 1.0, static_cast<int>(mappings_.size()) - 1, singular_a, false);
      return;
    }
    if (std::isinf(a)) {
      mappings_.push_back({MapKind::tail_down, b, w});
      add_panels(0.0, 1.0, static_cast<int>(mappings_.size()) - 1, singular_b, false);
      return;
    }
    // Next to a singular end, integrate in the offset from that end.
    if (singular_a && a == g_.lower && g_.eval_from_lower) {
      const double cut = a + std::min(0.5 * (b - a), w);
      mappings_.push_back({MapKind::from_lower, a, 1.0});
      add_panels(0.0, cut - a, static_cast<int>(mappings_.size()) - 1, true, false);
      add_segment(cut, b, false, singular_b);
      return;
    }
    if (singular_b && b == g_.upper && g_.eval_from_upper) {
      const double cut = b - std::min(0.5 * (b - a), w);
      mappings_.push_back({MapKind::from_upper, b, 1.0});
      add_panels(0.0, b - cut, static_cast<int>(mappings_.size()) - 1, true, false);
      add_segment(a, cut, singular_a, false);
      return;
    }
    if (b - a > 1e6 * w) {
      mappings_.push_back({MapKind::log_up, a, w});
      add_panels(0.0, std::log1p((b - a) / w), static_cast<int>(mappings_.size()) - 1, singular_a,
                 singular_b);
      return;
    }
    mappings_.push_back({MapKind::identity, 0.0, 1.0});
    add_panels(a, b, static_cast<int>(mappings_.size()) - 1, singular_a, singular_b);
  }

  QuadResult run(double tol_rel, double tol_abs) {
    double total = 0.0;
    double total_err = 0.0;
    recompute(total, total_err);
    std::size_t iteration = 0;
    while (total_err > std::max(tol_abs, tol_rel * std::abs(total))) {
      if (heap_.empty() || !heap_.top().refinable) break;
      if (evaluations_ + 42 > budget_) break;
      Panel worst = heap_.top();
      heap_.pop();
      const double mid = 0.5 * (worst.a + worst.b);
      Panel left{worst.a, mid, worst.mapping};
      Panel right{mid, worst.b, worst.mapping};
      evaluate(left);
      evaluate(right);
      total += left.value + right.value - worst.value;
      total_err += left.error + right.error - worst.error;
      heap_.push(left);
      heap_.push(right);
      if (++iteration % 64 == 0) recompute(total, total_err);
    }
    recompute(total, total_err);
    if (total_err > std::max(tol_abs, tol_rel * std::abs(total))) {
      std::ostringstream msg;
      msg << "quadrature did not converge: estimate " << total << " +/- " << total_err << " after "
          << evaluations_ << " evaluations";
      throw AccuracyError(msg.str(), total, total_err);
    }
    return {total, total_err, evaluations_};
  }

 private:
  void add_panels(double a, double b, int mapping, bool grade_a, bool grade_b) {
    // Geometric grading toward singular endpoints: widths h/4, h/16, ...
    constexpr int levels = 22;
    std::vector<double> nodes;
    const double h = b - a;
    if (grade_a && grade_b) {
      const double m = a + 0.5 * h;
      nodes.push_back(a);
      for (int j = levels; j >= 1; --j) nodes.push_back(a + 0.5 * h * std::ldexp(1.0, -2 * j));
      nodes.push_back(m);
      for (int j = 1; j <= levels; ++j) nodes.push_back(b - 0.5 * h * std::ldexp(1.0, -2 * j));
      nodes.push_back(b);
    } else if (grade_a) {
      nodes.push_back(a);
      for (int j = levels; j >= 1; --j) nodes.push_back(a + h * std::ldexp(1.0, -2 * j));
      nodes.push_back(b);
    } else if (grade_b) {
      nodes.push_back(a);
      for (int j = 1; j <= levels; ++j) nodes.push_back(b - h * std::ldexp(1.0, -2 * j));
      nodes.push_back(b);
    } else {
      nodes = {a, b};
    }
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      if (!(nodes[i] < nodes[i + 1])) continue;
      Panel p{nodes[i], nodes[i + 1], mapping};
      evaluate(p);
      heap_.push(p);
    }
  }

  double f(int mapping, double t) {
    const Mapping& m = mappings_[static_cast<std::size_t>(mapping)];
    ++evaluations_;
    const double v = m(
        [this, &m](double x) {
          const double y = m.kind == MapKind::from_lower   ? g_.eval_from_lower(x)
                           : m.kind == MapKind::from_upper ? g_.eval_from_upper(x)
                                                           : g_.eval(x);
          if (!std::isfinite(y)) {
            std::ostringstream msg;
            msg << "integrand returned " << y << " at x = " << x;
            throw IntegrandError(msg.str(), x);
          }
          return y;
        },
        t);
    return v;
  }

  void evaluate(Panel& p) {
    const double center = 0.5 * (p.a + p.b);
    const double half = 0.5 * (p.b - p.a);
    std::array<double, 21> fv{};
    const double fc = f(p.mapping, center);
    double resk = kWgk[10] * fc;
    double resabs = std::abs(resk);
    double resg = 0.0;
    for (std::size_t j = 0; j < 10; ++j) {
      const double dx = half * kXgk[j];
      const double f1 = f(p.mapping, center - dx);
      const double f2 = f(p.mapping, center + dx);
      fv[2 * j] = f1;
      fv[2 * j + 1] = f2;
      resk += kWgk[j] * (f1 + f2);
      resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
      if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[10] * std::abs(fc - reskh);
    for (std::size_t j = 0; j < 10; ++j)
      resasc += kWgk[j] * (std::abs(fv[2 * j] - reskh) + std::abs(fv[2 * j + 1] - reskh));
    const double result = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > kUnderflow / (50.0 * kEps)) err = std::max(50.0 * kEps * resabs, err);
    p.value = result;
    p.error = err;
    // Panels at the resolution limit cannot be split further.
    const double scale = std::max(std::abs(p.a), std::abs(p.b));
    p.refinable = (p.b - p.a) > 200.0 * kEps * scale && (p.b - p.a) > 1e-300;
  }

  void recompute(double& total, double& total_err) const {
    // Heap order is deterministic; sum over a copy sorted by position for
    // reproducible rounding.
    std::vector<Panel> panels;
    panels.reserve(heap_.size());
    auto copy = heap_;
    while (!copy.empty()) {
      panels.push_back(copy.top());
      copy.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const Panel& l, const Panel& r) {
      return l.mapping != r.mapping ? l.mapping < r.mapping : l.a < r.a;
    });
    total = 0.0;
    total_err = 0.0;
    for (const Panel& p : panels) {
      total += p.value;
      total_err += p.error;
    }
  }

  const Integrand& g_;
  std::size_t budget_;
  std::size_t evaluations_ = 0;
  std::vector<Mapping> mappings_;
  std::priority_queue<Panel, std::vector<Panel>, PanelOrder> heap_;
};

QuadResult integrate_on(const Integrand& g, double lower, double upper, double tol_rel, double tol_abs,
                        std::size_t budget, bool singular_upper) {
  if (!(tol_rel > 0.0) || !(tol_abs > 0.0)) throw DomainError("quadrature tolerances must be positive");
  if (std::isnan(lower) || std::isnan(upper) || lower > upper)
    throw DomainError("quadrature interval must satisfy lower <= upper");
  if (lower == upper) return {};
  std::vector<double> cuts;
  cuts.push_back(lower);
  std::vector<double> bps = g.breakpoints;
  std::sort(bps.begin(), bps.end());
  for (double b : bps)
    if (b > lower && b < upper && std::isfinite(b) && b > cuts.back()) cuts.push_back(b);
  cuts.push_back(upper);
  Integrator integrator(g, budget);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const bool sa = i == 0 && g.singular_lower;
    const bool sb = i + 2 == cuts.size() && singular_upper;
    integrator.add_segment(cuts[i], cuts[i + 1], sa, sb);
  }
  return integrator.run(tol_rel, tol_abs);
}

}  // namespace

QuadResult integrate(const Integrand& g, double tol_rel, double tol_abs, std::size_t max_evaluations) {
  return integrate_on(g, g.lower, g.upper, tol_rel, tol_abs, max_evaluations, g.singular_upper);
}

TailCutoff algebraic_tail_cutoff(double coefficient, double decay, double target, bool log_weight) {
  if (!(decay >= 1e-3))
    throw DomainError("p is too close to the moment ceiling (margin < 1e-3); choose a smaller p");
  if (!(coefficient > 0.0) || !(target > 0.0)) throw DomainError("tail bound needs positive inputs");
  constexpr double max_log_cutoff = 690.0;  // ~1e300
  double log_x = (std::log(coefficient) - std::log(decay * target)) / decay;
  if (log_weight) {
    log_x = std::max(log_x, 1.0);
    for (int i = 0; i < 50; ++i) {
      const double factor = log_x / decay + 1.0 / (decay * decay);
      const double next = std::max(1.0, (std::log(coefficient * factor) - std::log(target)) / decay);
      if (std::abs(next - log_x) < 1e-12 * std::max(1.0, log_x)) {
        log_x = next;
        break;
      }
      log_x = next;
      if (log_x > max_log_cutoff) break;
    }
  }
  if (!(log_x <= max_log_cutoff))
    throw DomainError("tail truncation would require a cutoff beyond the double range; choose a smaller p");
  log_x = std::max(log_x, 0.0);
  const double x = std::exp(log_x);
  double bound = coefficient * std::exp(-decay * log_x) / decay;
  if (log_weight) bound = coefficient * std::exp(-decay * log_x) * (log_x / decay + 1.0 / (decay * decay));
  return {x, bound};
}

QuadResult integrate_tail_truncated(const Integrand& g, const TailCutoff& tail, double tol_rel,
                                    double tol_abs, std::size_t max_evaluations) {
  const double upper = std::min(g.upper, tail.cutoff);
  QuadResult r = integrate_on(g, g.lower, upper, tol_rel, tol_abs, max_evaluations,
                              upper == g.upper && g.singular_upper);
  if (upper < g.upper) r.abs_error_estimate += tail.tail_bound;
  return r;
}

}  // namespace pmean
