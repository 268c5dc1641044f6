#include "pmean/piecewise.hpp"

#include "pmean/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pmean {

namespace {

Rational json_rational(const nlohmann::json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number()) return parse_rational(v.dump());
  throw ParseError("expected a number or a \"p/q\" string, got " + v.dump());
}

// Bernstein coefficients of q(t), t in [0, 1], from power-basis coefficients.
std::vector<Rational> bernstein(const std::vector<Rational>& c) {
  const std::size_t n = c.empty() ? 0 : c.size() - 1;
  std::vector<Rational> binom_n(n + 1);
  std::vector<Rational> out(n + 1);
  auto choose = [](std::size_t a, std::size_t b) {
    Rational r = 1;
    for (std::size_t i = 1; i <= b; ++i) r = r * static_cast<int>(a - b + i) / static_cast<int>(i);
    return r;
  };
  for (std::size_t k = 0; k <= n; ++k) {
    Rational acc = 0;
    for (std::size_t j = 0; j <= k && j < c.size(); ++j) acc += choose(k, j) / choose(n, j) * c[j];
    out[k] = acc;
  }
  return out;
}

}  // namespace

PiecewisePolyDensity::PiecewisePolyDensity(std::vector<PolyPiece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw ConstructionError("piecewise density needs at least one piece");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (!(pieces_[i].lower < pieces_[i].upper))
      throw ConstructionError("piece " + std::to_string(i) + " has an empty interval");
    if (i > 0 && pieces_[i].lower != pieces_[i - 1].upper)
      throw ConstructionError("pieces " + std::to_string(i - 1) + " and " + std::to_string(i) +
                              " are not contiguous");
  }
  Rational before = 0;
  for (const auto& piece : pieces_) {
    const Rational width = piece.upper - piece.lower;
    const Polynomial local = piece.poly.compose_linear(piece.lower, 1);
    const Polynomial local_cdf = local.antiderivative();
    Cached c{to_double(piece.lower), to_double(piece.upper), local.to_doubles(),
             local.derivative().to_doubles(), local_cdf.to_doubles(), to_double(before)};
    for (int j = 0; j <= 64; ++j) {
      const double t = to_double(width) * j / 64.0;
      if (horner(c.local, t) < -1e-12)
        throw ConstructionError("piecewise density is negative near x = " + std::to_string(c.lower + t));
    }
    before += local_cdf(width);
    cached_.push_back(std::move(c));
  }
  const Rational m = before;
  if (abs(m - 1) > Rational(1, 1000000000000LL))
    throw ConstructionError("piecewise density integrates to " + std::to_string(to_double(m)) + ", not 1");
}

Rational PiecewisePolyDensity::mass() const {
  Rational m = 0;
  for (const auto& p : pieces_) {
    const Polynomial a = p.poly.antiderivative();
    m += a(p.upper) - a(p.lower);
  }
  return m;
}

Rational PiecewisePolyDensity::pdf_exact(const Rational& x) const {
  for (const auto& p : pieces_)
    if (x >= p.lower && x < p.upper) return p.poly(x);
  return 0;
}

Rational PiecewisePolyDensity::cdf_exact(const Rational& x) const {
  Rational acc = 0;
  for (const auto& p : pieces_) {
    if (x <= p.lower) break;
    const Polynomial a = p.poly.antiderivative();
    acc += a(x < p.upper ? x : p.upper) - a(p.lower);
  }
  return acc;
}

Rational PiecewisePolyDensity::mean_exact() const {
  Rational acc = 0;
  const Polynomial x({Rational(0), Rational(1)});
  for (const auto& p : pieces_) {
    const Polynomial a = (x * p.poly).antiderivative();
    acc += a(p.upper) - a(p.lower);
  }
  return acc;
}

std::size_t PiecewisePolyDensity::locate(double x) const {
  auto it = std::upper_bound(cached_.begin(), cached_.end(), x,
                             [](double v, const Cached& c) { return v < c.lower; });
  return static_cast<std::size_t>(it - cached_.begin()) - 1;
}

double PiecewisePolyDensity::pdf(double x) const {
  if (!(x >= cached_.front().lower && x < cached_.back().upper)) return 0.0;
  const Cached& c = cached_[locate(x)];
  return std::max(0.0, horner(c.local, x - c.lower));
}

double PiecewisePolyDensity::pdf_derivative(double x) const {
  if (!(x >= cached_.front().lower && x < cached_.back().upper)) return 0.0;
  const Cached& c = cached_[locate(x)];
  return horner(c.local_diff, x - c.lower);
}

double PiecewisePolyDensity::cdf(double x) const {
  if (x <= cached_.front().lower) return 0.0;
  if (x >= cached_.back().upper) return 1.0;
  const Cached& c = cached_[locate(x)];
  return std::clamp(c.mass_before + horner(c.local_cdf, x - c.lower), 0.0, 1.0);
}

std::vector<double> PiecewisePolyDensity::breakpoints() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < cached_.size(); ++i) out.push_back(cached_[i].lower);
  return out;
}

bool PiecewisePolyDensity::certified_non_increasing() const {
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    const Polynomial d = p.poly.derivative().compose_linear(p.lower, p.upper - p.lower);
    for (const auto& b : bernstein(d.coefficients()))
      if (b > 0) return false;
    if (i + 1 < pieces_.size() && pieces_[i + 1].poly(p.upper) > p.poly(p.upper)) return false;
  }
  return true;
}

bool PiecewisePolyDensity::has_strict_decrease() const {
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (pieces_[i].poly.degree() > 0) return true;
    if (i + 1 < pieces_.size() && pieces_[i + 1].poly(pieces_[i].upper) < pieces_[i].poly(pieces_[i].upper))
      return true;
  }
  return false;
}

nlohmann::json PiecewisePolyDensity::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : pieces_) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& c : p.poly.coefficients()) coeffs.push_back(to_string(c));
    out.push_back({{"interval", {to_string(p.lower), to_string(p.upper)}}, {"coefficients", coeffs}});
  }
  return out;
}

PiecewisePolyDensity PiecewisePolyDensity::from_json(const nlohmann::json& doc) {
  const nlohmann::json& list = doc.is_object() && doc.contains("pieces") ? doc.at("pieces") : doc;
  if (!list.is_array()) throw ParseError("piecewise density JSON must be a list of {interval, coefficients}");
  std::vector<PolyPiece> pieces;
  for (const auto& item : list) {
    if (!item.is_object() || !item.contains("interval") || !item.contains("coefficients"))
      throw ParseError("piece entries need \"interval\" and \"coefficients\": " + item.dump());
    const auto& iv = item.at("interval");
    if (!iv.is_array() || iv.size() != 2) throw ParseError("\"interval\" must be [lower, upper]: " + iv.dump());
    std::vector<Rational> coeffs;
    for (const auto& c : item.at("coefficients")) coeffs.push_back(json_rational(c));
    pieces.push_back({json_rational(iv[0]), json_rational(iv[1]), Polynomial(std::move(coeffs))});
  }
  return PiecewisePolyDensity(std::move(pieces));
}

PiecewisePolyDensity convolve(const PiecewisePolyDensity& f, const PiecewisePolyDensity& g) {
  std::set<Rational> sums;
  for (const auto& pf : f.pieces())
    for (const auto& pg : g.pieces())
      for (const auto& x : {pf.lower, pf.upper})
        for (const auto& y : {pg.lower, pg.upper}) sums.insert(x + y);
  const std::vector<Rational> cuts(sums.begin(), sums.end());

  // For each pair, the antiderivative in x of P(x) Q(z - x) as polynomials in
  // z indexed by the power of x: A(x, z) = sum_m x^(m+1) terms[m](z).
  struct PairTerms {
    const PolyPiece* pf;
    const PolyPiece* pg;
    std::vector<Polynomial> terms;
  };
  std::vector<PairTerms> pairs;
  for (const auto& pf : f.pieces()) {
    for (const auto& pg : g.pieces()) {
      const auto& p = pf.poly.coefficients();
      const auto& q = pg.poly.coefficients();
      if (p.empty() || q.empty()) continue;
      // Q(z - x) = sum_j q_j sum_i C(j,i) z^(j-i) (-x)^i
      const std::size_t deg_x = p.size() + q.size() - 1;
      std::vector<std::vector<Rational>> coef(deg_x, std::vector<Rational>(q.size()));
      for (std::size_t j = 0; j < q.size(); ++j) {
        Rational binom = 1;
        for (std::size_t i = 0; i <= j; ++i) {
          if (i > 0) binom = binom * static_cast<int>(j - i + 1) / static_cast<int>(i);
          const Rational qi = (i % 2 == 0 ? binom : Rational(-binom)) * q[j];
          for (std::size_t m = 0; m < p.size(); ++m) coef[m + i][j - i] += p[m] * qi;
        }
      }
      std::vector<Polynomial> terms;
      for (std::size_t m = 0; m < deg_x; ++m) {
        std::vector<Rational> zc = coef[m];
        for (auto& v : zc) v /= static_cast<int>(m + 1);
        terms.emplace_back(std::move(zc));
      }
      pairs.push_back({&pf, &pg, std::move(terms)});
    }
  }

  auto antiderivative_at = [](const std::vector<Polynomial>& terms, const Rational& u, const Rational& v) {
    const Polynomial lin({u, v});
    Polynomial power = lin;
    Polynomial acc;
    for (const auto& t : terms) {
      acc += power * t;
      power = power * lin;
    }
    return acc;
  };

  std::vector<PolyPiece> out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const Rational z = (cuts[k] + cuts[k + 1]) / 2;
    Polynomial piece;
    for (const auto& pr : pairs) {
      const Rational a = pr.pf->lower, b = pr.pf->upper;
      const Rational c = pr.pg->lower, d = pr.pg->upper;
      const bool lo_const = a >= z - d;
      const bool hi_const = b <= z - c;
      const Rational lo = lo_const ? a : Rational(z - d);
      const Rational hi = hi_const ? b : Rational(z - c);
      if (!(lo < hi)) continue;
      const Polynomial upper = hi_const ? antiderivative_at(pr.terms, b, 0) : antiderivative_at(pr.terms, -c, 1);
      const Polynomial lower = lo_const ? antiderivative_at(pr.terms, a, 0) : antiderivative_at(pr.terms, -d, 1);
      piece += upper + Rational(-1) * lower;
    }
    out.push_back({cuts[k], cuts[k + 1], piece});
  }
  return PiecewisePolyDensity(std::move(out));
}

PiecewisePolyDensity uniform_pieces(const Rational& a, const Rational& b) {
  if (!(a < b)) throw ConstructionError("uniform density needs a < b");
  return PiecewisePolyDensity({{a, b, Polynomial({Rational(1) / (b - a)})}});
}

}  // namespace pmean
