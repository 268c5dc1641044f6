#pragma once

#include "pmean/distribution.hpp"
#include "pmean/pmean.hpp"

#include <json.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pmean {

enum class Conclusion { truly_positive, truly_negative, symmetric, not_truly_positive, indeterminate };
enum class Grade { analytic, numeric, refuted, none };

std::string to_string(Conclusion c);
std::string to_string(Grade g);

/// One evaluated criterion instance.  `pass` is empty when the criterion was
/// inapplicable rather than failed.
struct Evidence {
  std::string criterion;
  std::string scope;  // p range or parameter check
  std::optional<bool> pass;
  std::map<std::string, double> numbers;
  std::string note;
};

/// Counterexample to true positive skewness: either the pair nu1 < nu0 or a
/// grid point where nu_p is certified to decrease.
struct Witness {
  std::string kind;  // "median_below_mode" or "decreasing_at_p"
  std::map<std::string, double> numbers;
};

struct SkewVerdict {
  Conclusion conclusion = Conclusion::indeterminate;
  Grade grade = Grade::none;
  std::vector<Evidence> evidence;
  std::optional<Witness> witness;
  std::string distribution;

  bool conclusive() const {
    return conclusion != Conclusion::indeterminate;
  }
};

/// Sign structure of h_p(x) = f(nu+x) - f(nu-x) on (0, min(nu-L, R-nu)).
struct CrossingProfile {
  double p = 0.0;
  double nu = 0.0;
  std::optional<double> c_p;  // first point where h turns positive
  int crossing_count = 0;
  bool satisfies_L2 = false;
  bool support_condition = false;
  bool identically_zero = false;
  bool boundary_crossing = false;  // the crossing is the jump at the nearer support end
  double range = 0.0;              // examined half-width
};

CrossingProfile crossing_profile(const DistributionSpec& spec, double p, double tol = 1e-10);
CrossingProfile crossing_profile(const DistributionSpec& spec, double p, double nu, double nu_error);

std::optional<SkewVerdict> check_monotone_density(const DistributionSpec& spec);

/// Family threshold C with "nu_p > C implies nu increasing at p", when known.
std::optional<double> clopen_threshold(const DistributionSpec& spec);

SkewVerdict clopen_certify(const DistributionSpec& spec, double threshold, const std::vector<double>& p_grid,
                           double tol = 1e-10);

struct InflectionOptions {
  bool median_plus_crossing = false;  // accept nu1 + c1 > theta2 as the median condition
  bool nu0_from_crossing = false;     // replace nu0 in the slope bounds by nu1 - c1
  bool upper_from_crossing = false;   // check the right bound only on (nu1 + c1, inf)
};

struct InflectionReport {
  std::vector<double> inflection_points;  // above the lower support end
  std::optional<double> theta1;
  std::optional<double> theta2;
  double mode = 0.0;
  double median = 0.0;
  std::optional<double> c1;
  std::string path = "inapplicable";  // "theorem", "corollary" or "inapplicable"
  bool corollary_applicable = false;
  bool lower_bound_check = false;
  bool upper_bound_check = false;
  bool median_condition = false;
  double min_lower_slope = 0.0;  // min of f'/f - 1/nu0 on the left interval
  double min_upper_slope = 0.0;  // min of f'/f + 1/nu0 on the right interval
  std::string note;
};

std::pair<InflectionReport, std::optional<SkewVerdict>> inflection_criterion(const DistributionSpec& spec,
                                                                             const InflectionOptions& options = {});

/// Strictly increasing convex map u with inverse w and w'.
struct ConvexMap {
  std::string name;
  std::function<double(double)> forward;
  std::function<double(double)> inverse;
  std::function<double(double)> inverse_derivative;
  /// Moment supremum and right-tail envelope of u(X) given X, when derivable.
  std::function<double(const DistributionSpec&)> image_moment_sup;
  std::function<std::optional<TailEnvelope>(const DistributionSpec&)> image_right_tail;

  static ConvexMap exponential(double k);
  static ConvexMap square();
  static ConvexMap identity();
};

struct ConvexTransformResult {
  SkewVerdict verdict;
  DistributionSpec pushforward;
};

/// Throws PreconditionError when the base density is not decreasing or the
/// map fails the convexity spot check.
ConvexTransformResult convex_transform_verdict(const DistributionSpec& base, const ConvexMap& u);

SkewVerdict numeric_certify(const DistributionSpec& spec, const std::vector<double>& p_grid, double min_slope = 0.0,
                            double tol = 1e-10);

/// [1, min(hi - 0.05, p_max)] with step 0.5, at least 11 points.
std::vector<double> default_certify_grid(const DistributionSpec& spec, double p_max = 6.0);

struct VerdictOptions {
  std::vector<double> p_grid;  // empty: default_certify_grid
  double tol = 1e-10;
  double min_slope = 0.0;
  InflectionOptions inflection;
};

/// JSON forms; the verdict layout is described in docs/verdict_schema.md.
nlohmann::json to_json(const SkewVerdict& v);
nlohmann::json to_json(const CrossingProfile& c);
nlohmann::json to_json(const InflectionReport& r);

/// monotone -> clopen -> inflection -> numeric; the first conclusive
/// criterion wins and every evaluated instance is kept as evidence.
SkewVerdict verdict(const DistributionSpec& spec, const VerdictOptions& options = {});

}  // namespace pmean
