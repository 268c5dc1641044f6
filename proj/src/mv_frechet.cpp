#include "pmean/mv_frechet.hpp"

#include "pmean/distribution.hpp"
#include "pmean/errors.hpp"
#include "pmean/special.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <random>

namespace pmean {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

// Typical distance of the points from their centroid.
double cloud_scale(const Eigen::MatrixXd& x) {
  const Eigen::RowVectorXd c = x.colwise().mean();
  const double rms = std::sqrt((x.rowwise() - c).squaredNorm() / static_cast<double>(x.rows()));
  return rms > 0.0 ? rms : std::max(1.0, c.norm());
}

MVPMeanResult weiszfeld(const Eigen::MatrixXd& x, double tol, Eigen::VectorXd a, std::size_t max_iterations) {
  const auto n = static_cast<std::size_t>(x.rows());
  const double scale = cloud_scale(x);
  const double coincide = 1e-14 * scale;
  const auto k = x.cols();
  Eigen::VectorXd num(k), resid(k), r(k);
  MVPMeanResult out;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    num.setZero();
    resid.setZero();
    double den = 0.0;
    double f = 0.0;
    double eta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r.noalias() = x.row(static_cast<Eigen::Index>(i)).transpose() - a;
      const double d = r.norm();
      f += d;
      if (d <= coincide) {
        eta += 1.0;
        continue;
      }
      num.noalias() += x.row(static_cast<Eigen::Index>(i)).transpose() / d;
      den += 1.0 / d;
      resid.noalias() += r / d;
    }
    f /= static_cast<double>(n);
    // Norm of the minimal subgradient.
    const double g = std::max(0.0, resid.norm() - eta) / static_cast<double>(n);
    out = {a, f, g, it};
    if (g <= tol * (1.0 + f) || den == 0.0) return out;
    const Eigen::VectorXd t = num / den;
    const double gamma = eta > 0.0 ? std::min(1.0, eta / resid.norm()) : 0.0;
    const Eigen::VectorXd next = (1.0 - gamma) * t + gamma * a;
    if ((next - a).norm() <= 1e-15 * (scale + a.norm())) return out;
    a = next;
  }
  throw OptimizationError("Weiszfeld iteration did not converge", max_iterations, out.gradient_norm);
}

MVPMeanResult newton(const Eigen::MatrixXd& x, double p, double tol, Eigen::VectorXd a, std::size_t max_iterations) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto k = x.cols();
  const double floor_d = 1e-12 * cloud_scale(x);
  Eigen::VectorXd r(k), grad(k);
  Eigen::MatrixXd hess(k, k);
  const double inv_n = 1.0 / static_cast<double>(n);

  auto objective = [&](const Eigen::VectorXd& b) {
    // Neumaier summation keeps the objective resolvable near the optimum.
    double f = 0.0;
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r.noalias() = b - x.row(static_cast<Eigen::Index>(i)).transpose();
      const double v = std::pow(r.norm(), p);
      const double t = f + v;
      c += std::abs(f) >= std::abs(v) ? (f - t) + v : (v - t) + f;
      f = t;
    }
    return (f + c) * inv_n;
  };
  auto derivatives = [&](const Eigen::VectorXd& b) {
    grad.setZero();
    hess.setZero();
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r.noalias() = b - x.row(static_cast<Eigen::Index>(i)).transpose();
      const double d = r.norm();
      f += std::pow(d, p);
      if (d <= floor_d) continue;
      const double w = std::pow(d, p - 2.0);
      grad.noalias() += w * r;
      hess.noalias() += (w * (p - 2.0) / (d * d)) * (r * r.transpose());
      hess.diagonal().array() += w;
    }
    grad *= p * inv_n;
    hess *= p * inv_n;
    return f * inv_n;
  };

  MVPMeanResult out;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    const double f = derivatives(a);
    const double gn = grad.norm();
    out = {a, f, gn, it};
    if (gn <= tol * (1.0 + f)) return out;
    Eigen::VectorXd step = hess.ldlt().solve(-grad);
    double slope = grad.dot(step);
    if (!step.allFinite() || !(slope < 0.0)) {
      step = -grad;
      slope = -gn * gn;
    }
    const double f_now = objective(a);
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      const Eigen::VectorXd trial = a + t * step;
      const double f_trial = objective(trial);
      if (f_trial <= f_now + 1e-4 * t * slope) {
        a = trial;
        moved = true;
        break;
      }
      // Below the rounding floor of the objective, judge the full step by the
      // gradient instead.
      if (ls == 0 && std::abs(f_trial - f_now) <= 1e-13 * (1.0 + f_now)) {
        const Eigen::VectorXd keep = grad;
        const Eigen::MatrixXd keep_h = hess;
        derivatives(trial);
        const bool better = grad.norm() < gn;
        grad = keep;
        hess = keep_h;
        if (better) {
          a = trial;
          moved = true;
          break;
        }
      }
    }
    if (!moved) {
      // At the floating-point floor of the objective.
      if (gn <= 1e3 * tol * (1.0 + f)) return out;
      throw OptimizationError("line search failed to decrease the objective", it, gn);
    }
  }
  throw OptimizationError("Newton iteration did not converge", max_iterations, out.gradient_norm);
}

}  // namespace

MVSNSpec MVSNSpec::standard(const Eigen::VectorXd& lambda) {
  const auto k = lambda.size();
  return {Eigen::VectorXd::Zero(k), Eigen::MatrixXd::Identity(k, k), lambda};
}

void MVSNSpec::validate() const {
  const auto k = mu.size();
  if (k < 1) throw ConstructionError("MVSN dimension must be at least 1");
  if (sigma.rows() != k || sigma.cols() != k || lambda.size() != k)
    throw ConstructionError("MVSN mu, sigma and lambda sizes disagree");
  if (!mu.allFinite() || !sigma.allFinite() || !lambda.allFinite())
    throw ConstructionError("MVSN parameters must be finite");
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, sigma.cwiseAbs().maxCoeff()))
    throw ConstructionError("MVSN sigma must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw ConstructionError("MVSN sigma must be positive definite");
}

Eigen::MatrixXd MVSNSpec::sigma_sqrt() const { return symmetric_sqrt(sigma); }

double MVSNSpec::pdf(const Eigen::VectorXd& y) const {
  const Eigen::MatrixXd root = sigma_sqrt();
  const Eigen::VectorXd z = root.ldlt().solve(y - mu);
  const double log_det = std::log(sigma.determinant());
  const double log_phi = -0.5 * (dim() * kLog2Pi + log_det + z.squaredNorm());
  return 2.0 * std::exp(log_phi) * special::normal_cdf(lambda.dot(z));
}

MVSample sample_mvsn(const MVSNSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw DomainError("sample size must be at least 1");
  const auto k = spec.dim();
  const Eigen::VectorXd delta = spec.lambda / std::sqrt(1.0 + spec.lambda.squaredNorm());
  const Eigen::MatrixXd c = symmetric_sqrt(Eigen::MatrixXd::Identity(k, k) - delta * delta.transpose());
  const Eigen::MatrixXd root = spec.sigma_sqrt();
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MVSample out;
  out.seed = seed;
  out.points.resize(static_cast<Eigen::Index>(n), k);
  Eigen::VectorXd u(k);
  for (std::size_t i = 0; i < n; ++i) {
    const double u0 = normal(gen);
    for (Eigen::Index j = 0; j < k; ++j) u(j) = normal(gen);
    const Eigen::VectorXd z = delta * std::abs(u0) + c * u;
    out.points.row(static_cast<Eigen::Index>(i)) = (spec.mu + root * z).transpose();
  }
  return out;
}

GofResult mvsn_gof(const MVSNSpec& spec, const MVSample& sample, int skew_bins, int normal_bins) {
  spec.validate();
  const auto k = spec.dim();
  if (skew_bins < 2 || normal_bins < 1) throw DomainError("need at least two skew bins and one normal bin");
  const double alpha = spec.lambda.norm();
  // Orthonormal basis whose first vector is lambda / |lambda|.
  Eigen::MatrixXd seedm(k, k + 1);
  seedm.col(0) = alpha > 0.0 ? Eigen::VectorXd(spec.lambda / alpha) : Eigen::VectorXd::Unit(k, 0);
  seedm.rightCols(k) = Eigen::MatrixXd::Identity(k, k);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(seedm);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(k, k);
  if (q.col(0).dot(seedm.col(0)) < 0.0) q.col(0) = -q.col(0);
  const Eigen::MatrixXd whiten = spec.sigma_sqrt().inverse();
  const DistributionSpec w_law = DistributionSpec::skew_normal(alpha);

  long cells = skew_bins;
  for (Eigen::Index j = 1; j < k; ++j) cells *= normal_bins;
  std::vector<double> counts(static_cast<std::size_t>(cells), 0.0);
  const auto n = sample.points.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd z = q.transpose() * (whiten * (sample.points.row(i).transpose() - spec.mu));
    auto bin = [](double u, int m) { return std::min(m - 1, std::max(0, static_cast<int>(u * m))); };
    long idx = bin(w_law.cdf(z(0)), skew_bins);
    for (Eigen::Index j = 1; j < k; ++j) idx = idx * normal_bins + bin(special::normal_cdf(z(j)), normal_bins);
    counts[static_cast<std::size_t>(idx)] += 1.0;
  }
  const double expected = static_cast<double>(n) / static_cast<double>(cells);
  GofResult r;
  for (double c : counts) r.statistic += (c - expected) * (c - expected) / expected;
  r.dof = static_cast<int>(cells - 1);
  r.p_value = boost::math::gamma_q(0.5 * r.dof, 0.5 * r.statistic);
  return r;
}

MVPMeanResult mv_pmean_detail(const Eigen::MatrixXd& points, double p, double tol, const Eigen::VectorXd* start,
                              std::size_t max_iterations) {
  if (points.rows() < 1) throw DomainError("mv_pmean needs at least one point");
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("mv_pmean needs p >= 1");
  Eigen::VectorXd a = start ? *start : Eigen::VectorXd(points.colwise().mean().transpose());
  if (p == 1.0) return weiszfeld(points, tol, a, max_iterations);
  return newton(points, p, tol, a, max_iterations);
}

Eigen::VectorXd mv_pmean(const MVSample& sample, double p, double tol) {
  return mv_pmean_detail(sample.points, p, tol).nu;
}

MVTrajectory trajectory(const MVSNSpec& spec, const std::vector<double>& p_grid, std::size_t n, std::uint64_t seed,
                        double tol) {
  for (std::size_t i = 1; i < p_grid.size(); ++i)
    if (!(p_grid[i] > p_grid[i - 1])) throw DomainError("p grid must be strictly increasing");
  const MVSample sample = sample_mvsn(spec, n, seed);
  MVTrajectory traj;
  traj.seed = seed;
  traj.n = n;

  auto solve_all = [&](const Eigen::MatrixXd& x, const std::vector<Eigen::VectorXd>* warm,
                       std::vector<MVTrajectory::Entry>& entries) {
    Eigen::VectorXd prev = x.colwise().mean().transpose();
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
      const Eigen::VectorXd start = warm ? (*warm)[i] : prev;
      try {
        const MVPMeanResult r = mv_pmean_detail(x, p_grid[i], tol, &start);
        entries.push_back({p_grid[i], r.nu, true, r.iterations});
        prev = r.nu;
      } catch (const OptimizationError& e) {
        entries.push_back({p_grid[i], start, false, e.iterations()});
      }
    }
  };
  auto differences = [&](const std::vector<MVTrajectory::Entry>& e) {
    std::vector<Eigen::VectorXd> d;
    const std::size_t m = e.size();
    for (std::size_t i = 0; i < m && m >= 2; ++i) {
      const std::size_t lo = i == 0 ? 0 : i - 1;
      const std::size_t hi = i + 1 == m ? i : i + 1;
      d.push_back((e[hi].nu - e[lo].nu) / (e[hi].p - e[lo].p));
    }
    return d;
  };

  solve_all(sample.points, nullptr, traj.entries);
  const std::vector<Eigen::VectorXd> diff = differences(traj.entries);
  if (diff.empty()) return traj;

  // Leave-one-block-out jackknife of the differences.
  constexpr int kBlocks = 10;
  std::vector<Eigen::VectorXd> warm;
  for (const auto& e : traj.entries) warm.push_back(e.nu);
  std::vector<std::vector<Eigen::VectorXd>> jack;
  const auto rows = sample.points.rows();
  const auto k = sample.points.cols();
  if (rows >= 2 * kBlocks) {
    for (int b = 0; b < kBlocks; ++b) {
      const Eigen::Index from = rows * b / kBlocks;
      const Eigen::Index to = rows * (b + 1) / kBlocks;
      Eigen::MatrixXd sub(rows - (to - from), k);
      sub.topRows(from) = sample.points.topRows(from);
      sub.bottomRows(rows - to) = sample.points.bottomRows(rows - to);
      std::vector<MVTrajectory::Entry> e;
      solve_all(sub, &warm, e);
      jack.push_back(differences(e));
    }
  }
  for (std::size_t i = 0; i < diff.size(); ++i) {
    double se = kInf;
    if (!jack.empty()) {
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
      for (const auto& j : jack) mean += j[i];
      mean /= static_cast<double>(jack.size());
      double ss = 0.0;
      for (const auto& j : jack) ss += (j[i] - mean).squaredNorm();
      se = std::sqrt((kBlocks - 1.0) / kBlocks * ss);
    }
    const double norm = diff[i].norm();
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == diff.size() ? i : i + 1;
    const bool converged = traj.entries[lo].converged && traj.entries[hi].converged;
    const bool reliable = converged && norm > 0.0 && norm > 5.0 * se;
    Eigen::VectorXd tau = norm > 0.0 ? Eigen::VectorXd(diff[i] / norm) : Eigen::VectorXd::Zero(k);
    traj.tangents.push_back({p_grid[i], tau, norm, se, reliable});
  }
  return traj;
}

double colinearity_score(const MVTrajectory& traj, const Eigen::VectorXd& direction) {
  const double dn = direction.norm();
  if (!(dn > 0.0)) throw DomainError("direction must be non-zero");
  double best = kInf;
  for (const auto& t : traj.tangents) {
    if (!t.reliable) continue;
    if (t.tau.size() != direction.size()) throw DomainError("direction dimension does not match the trajectory");
    best = std::min(best, t.tau.dot(direction) / dn);
  }
  if (best == kInf) throw UndefinedResultError("trajectory has no reliable tangents");
  return std::clamp(best, -1.0, 1.0);
}

nlohmann::json to_json(const MVSNSpec& spec) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  std::vector<std::vector<double>> sigma;
  for (Eigen::Index i = 0; i < spec.sigma.rows(); ++i) sigma.push_back(vec(spec.sigma.row(i).transpose()));
  return {{"mu", vec(spec.mu)}, {"sigma", sigma}, {"lambda", vec(spec.lambda)}};
}

}  // namespace pmean
