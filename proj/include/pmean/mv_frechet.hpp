#pragma once

#include <Eigen/Dense>

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace pmean {

/// k-variate skew-normal with density
///   2 phi_k(y; mu, Sigma) Phi(lambda' Sigma^(-1/2) (y - mu)).
struct MVSNSpec {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  Eigen::VectorXd lambda;

  /// mu = 0, Sigma = I.
  static MVSNSpec standard(const Eigen::VectorXd& lambda);

  int dim() const { return static_cast<int>(mu.size()); }
  /// Throws ConstructionError on size mismatch or a non-SPD sigma.
  void validate() const;
  /// Symmetric square root of sigma.
  Eigen::MatrixXd sigma_sqrt() const;
  double pdf(const Eigen::VectorXd& y) const;
};

struct MVSample {
  std::uint64_t seed = 0;
  Eigen::MatrixXd points;  // n x k
};

/// Z = delta |U0| + (I - delta delta')^(1/2) U with delta = lambda / sqrt(1 + lambda'lambda),
/// then Y = mu + Sigma^(1/2) Z.
MVSample sample_mvsn(const MVSNSpec& spec, std::size_t n, std::uint64_t seed);

struct GofResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
};

/// Binned chi-square test of a sample against the MVSN density.  Cells are
/// equiprobable in whitened coordinates rotated so the first axis is lambda.
GofResult mvsn_gof(const MVSNSpec& spec, const MVSample& sample, int skew_bins = 20, int normal_bins = 5);

struct MVPMeanResult {
  Eigen::VectorXd nu;
  double objective = 0.0;
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
};

/// argmin (1/n) sum ||x_i - a||^p for p >= 1.  Newton steps with backtracking
/// for p > 1, Weiszfeld iteration at p = 1.  Throws OptimizationError after
/// max_iterations.
MVPMeanResult mv_pmean_detail(const Eigen::MatrixXd& points, double p, double tol = 1e-10,
                              const Eigen::VectorXd* start = nullptr, std::size_t max_iterations = 10000);
Eigen::VectorXd mv_pmean(const MVSample& sample, double p, double tol = 1e-10);

struct MVTrajectory {
  struct Entry {
    double p;
    Eigen::VectorXd nu;
    bool converged;
    std::size_t iterations;
  };
  struct Tangent {
    double p;
    Eigen::VectorXd tau;      // unit vector
    double difference_norm;   // ||d nu / d p|| before normalizing
    double standard_error;    // jackknife, same units
    bool reliable;
  };
  std::vector<Entry> entries;
  std::vector<Tangent> tangents;
  std::uint64_t seed = 0;
  std::size_t n = 0;
};

/// One sample shared by every p; tangents by central differences in p.  A
/// tangent is reliable when its difference norm exceeds 5 jackknife standard
/// errors over 10 blocks.
MVTrajectory trajectory(const MVSNSpec& spec, const std::vector<double>& p_grid, std::size_t n, std::uint64_t seed,
                        double tol = 1e-10);

/// Minimum cosine between the reliable tangents and `direction`.
/// Throws UndefinedResultError when no tangent is reliable.
double colinearity_score(const MVTrajectory& traj, const Eigen::VectorXd& direction);

nlohmann::json to_json(const MVSNSpec& spec);

}  // namespace pmean
