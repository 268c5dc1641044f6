#pragma once

#include "pmean/rational.hpp"

#include <json.hpp>

#include <vector>

namespace pmean {

/// Polynomial piece on [lower, upper), in the global variable x.
struct PolyPiece {
  Rational lower;
  Rational upper;
  Polynomial poly;
};

/// Density made of contiguous polynomial pieces with exact rational
/// coefficients.  Construction checks contiguity, non-negativity (sampled) and
/// unit mass within 1e-12.
class PiecewisePolyDensity {
 public:
  explicit PiecewisePolyDensity(std::vector<PolyPiece> pieces);

  const std::vector<PolyPiece>& pieces() const { return pieces_; }
  const Rational& lower() const { return pieces_.front().lower; }
  const Rational& upper() const { return pieces_.back().upper; }

  Rational mass() const;
  Rational pdf_exact(const Rational& x) const;
  Rational cdf_exact(const Rational& x) const;
  /// First moment, exact.
  Rational mean_exact() const;

  double pdf(double x) const;
  /// Derivative of the density; one-sided (right) at breakpoints.
  double pdf_derivative(double x) const;
  double cdf(double x) const;
  /// Interior breakpoints as doubles.
  std::vector<double> breakpoints() const;

  /// True when the density is certified non-increasing on its support: every
  /// piece has a non-positive derivative (Bernstein-coefficient test) and no
  /// piece boundary jumps upward.
  bool certified_non_increasing() const;
  /// True when at least one piece is non-constant or a downward jump exists.
  bool has_strict_decrease() const;

  nlohmann::json to_json() const;
  /// Accepts a list of {"interval": [a, b], "coefficients": [c0, c1, ...]} or
  /// an object with such a list under "pieces".  Numbers and "p/q" strings are
  /// read exactly.
  static PiecewisePolyDensity from_json(const nlohmann::json& doc);

 private:
  struct Cached {
    double lower;
    double upper;
    std::vector<double> local;       // density coefficients in t = x - lower
    std::vector<double> local_diff;  // derivative coefficients in t
    std::vector<double> local_cdf;   // antiderivative in t, zero at t = 0
    double mass_before;
  };

  std::size_t locate(double x) const;

  std::vector<PolyPiece> pieces_;
  std::vector<Cached> cached_;
};

/// Exact convolution: breakpoints at all sums of input breakpoints.
PiecewisePolyDensity convolve(const PiecewisePolyDensity& f, const PiecewisePolyDensity& g);

/// Uniform density on [a, b).
PiecewisePolyDensity uniform_pieces(const Rational& a, const Rational& b);

}  // namespace pmean
