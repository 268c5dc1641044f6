#pragma once

#include "pmean/distribution.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pmean {

enum class DnuSign { increasing, decreasing, flat, unknown };

std::string to_string(DnuSign s);

/// p-domain [lo, hi) with hi = 1 + moment_sup.
struct PDomain {
  double lo = 1.0;
  double hi = kInf;
  bool include_mode = false;  // p = 0 carries the mode when it is unique

  bool contains(double p) const { return p >= lo && p < hi; }
};

PDomain p_domain(const DistributionSpec& spec);

/// The two weighted halves E[(X-a)_+^(p-1)] and E[(a-X)_+^(p-1)].
struct BalanceParts {
  double upper = 0.0;
  double lower = 0.0;
  double error = 0.0;  // summed quadrature error estimate

  double value() const { return upper - lower; }
  double scale() const { return upper + lower; }
};

BalanceParts balance_parts(const DistributionSpec& spec, double a, double p, double tol_rel = 1e-12);

/// Phi(a, p) = E[(X-a)_+^(p-1)] - E[(a-X)_+^(p-1)]; P(X>a) - P(X<a) at p = 1.
double balance(const DistributionSpec& spec, double a, double p);

struct PMeanPoint {
  double p = 0.0;
  double nu = 0.0;
  double balance_residual = 0.0;  // Phi(nu, p) relative to the sum of the two halves
  double nu_error = 0.0;
  DnuSign dnu_sign = DnuSign::unknown;
  std::optional<double> dnu_dp;
  bool solved = true;
  std::string note;
};

struct SolveOptions {
  double tol = 1e-10;
  std::optional<double> warm_start;
  double warm_radius = 0.0;
};

/// Root of the balance equation.  p = 1 returns the left median.
PMeanPoint solve_pmean(const DistributionSpec& spec, double p, double tol = 1e-10);
PMeanPoint solve_pmean(const DistributionSpec& spec, double p, const SolveOptions& options);

/// The derivative-sign functional
///   D = int y^(p-1) log y f(nu+y) dy - int y^(p-1) log y f(nu-y) dy.
struct DnuIntegral {
  double upper = 0.0;
  double lower = 0.0;
  double difference = 0.0;
  double error = 0.0;
  DnuSign sign = DnuSign::unknown;
};

DnuIntegral dnu_integral(const DistributionSpec& spec, double p, double nu, double nu_error = 0.0);
DnuSign dnu_sign(const DistributionSpec& spec, double p);

struct PMeanCurve {
  DistributionSpec spec;
  std::vector<PMeanPoint> points;
  std::string grid;
  std::size_t failures = 0;
};

/// Solves every grid point with warm starts, attaches dnu_sign and a
/// finite-difference dnu/dp.  Throws CurveError when 20% or more fail.
PMeanCurve trace_curve(const DistributionSpec& spec, const std::vector<double>& grid, double tol = 1e-10,
                       bool with_sign = true);

/// start, start+step, ..., up to stop inclusive (within 1e-9 step).
std::vector<double> make_grid(double start, double stop, double step);

struct ClippedGrid {
  std::vector<double> grid;
  bool clipped = false;
  double ceiling = kInf;  // largest admissible p after the margin
};

/// Removes grid points at or beyond hi - margin when the p-domain is bounded.
ClippedGrid clip_to_domain(const DistributionSpec& spec, const std::vector<double>& grid, double margin = 0.05);

struct Atom {
  double x = 0.0;
  double prob = 0.0;
};

/// p-mean of a finite distribution; p = 1 gives the smallest atom with
/// CDF >= 1/2.
double discrete_pmean(const std::vector<Atom>& pmf, double p);

/// p-mean of the empirical measure; p = 1 gives the lower sample median.
double empirical_pmean(const std::vector<double>& samples, double p);

struct AffineReport {
  struct Entry {
    double p;
    double nu_transformed;
    double nu_expected;
    double deviation;
  };
  std::vector<Entry> entries;
  double max_deviation = 0.0;
  bool pass = false;
};

AffineReport verify_affine_equivariance(const DistributionSpec& spec, double c, double s,
                                        const std::vector<double>& p_grid);

}  // namespace pmean
