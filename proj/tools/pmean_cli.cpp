// pmean: command-line front end for p-mean curves, skewness verdicts, the
// piecewise counterexample and MVSN trajectories.

#include "pmean/criteria.hpp"
#include "pmean/distribution.hpp"
#include "pmean/errors.hpp"
#include "pmean/mv_frechet.hpp"
#include "pmean/piecewise.hpp"
#include "pmean/piecewise_lab.hpp"
#include "pmean/pmean.hpp"
#include "pmean/rational.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCompute = 2;

constexpr const char* kVersion = "1.0.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

// start:stop:step, a comma list, or one value.
std::vector<double> parse_p(const std::string& text) {
  auto num = [&](const std::string& s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && *b == ' ') ++b;
    while (e > b && e[-1] == ' ') --e;
    auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e) throw UsageError("bad number '" + s + "' in p grid '" + text + "'");
    return v;
  };
  std::vector<std::string> parts;
  if (text.find(':') != std::string::npos) {
    std::stringstream ss(text);
    for (std::string s; std::getline(ss, s, ':');) parts.push_back(s);
    if (parts.size() != 3) throw UsageError("p range must be start:stop:step, got '" + text + "'");
    const double step = num(parts[2]);
    if (!(step > 0.0)) throw UsageError("p step must be positive");
    if (num(parts[1]) < num(parts[0])) throw UsageError("p stop below start");
    return pmean::make_grid(num(parts[0]), num(parts[1]), step);
  }
  std::stringstream ss(text);
  std::vector<double> out;
  for (std::string s; std::getline(ss, s, ',');) out.push_back(num(s));
  if (out.empty()) throw UsageError("empty p grid");
  return out;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string s; std::getline(ss, s, ',');) {
    double v = 0.0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
      throw UsageError("bad number '" + s + "' in " + what);
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty " + what);
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

struct Config {
  std::string dist;
  std::string p;
  double tol = 1e-10;
  double min_slope = 0.0;
  std::string out;
  std::string format = "csv";
  std::string config_path;
  bool median_plus_crossing = false;
  bool nu0_from_crossing = false;
  bool upper_from_crossing = false;
  std::string lambda;
  std::string mu;
  std::string sigma;
  std::size_t n = 100000;
  std::uint64_t seed = 1;
  int grid = 101;

  json to_json() const {
    json j = {{"dist", dist}, {"p", p}, {"tol", tol}, {"format", format}};
    if (!out.empty()) j["out"] = out;
    if (min_slope != 0.0) j["min_slope"] = min_slope;
    if (median_plus_crossing) j["median_plus_crossing"] = true;
    if (nu0_from_crossing) j["nu0_from_crossing"] = true;
    if (upper_from_crossing) j["upper_from_crossing"] = true;
    return j;
  }
};

std::string json_p(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return fmt(v.get<double>());
  if (v.is_array()) {
    std::vector<double> xs;
    for (const auto& x : v) xs.push_back(x.get<double>());
    return join(xs);
  }
  if (v.is_object())
    return fmt(v.at("start").get<double>()) + ":" + fmt(v.at("stop").get<double>()) + ":" +
           fmt(v.at("step").get<double>());
  throw UsageError("unsupported p grid in config");
}

std::string json_vec(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  std::vector<double> xs;
  for (const auto& x : v) {
    if (x.is_array())
      for (const auto& y : x) xs.push_back(y.get<double>());
    else
      xs.push_back(x.get<double>());
  }
  return join(xs);
}

// Values in the config file replace the flags.  A manifest is accepted too:
// its "config" member is used.
void apply_config(Config& c) {
  if (c.config_path.empty()) return;
  std::ifstream in(c.config_path);
  if (!in) throw UsageError("cannot open config '" + c.config_path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config '" + c.config_path + "': " + e.what());
  }
  if (j.contains("config")) j = j["config"];
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  try {
    if (j.contains("dist")) c.dist = j["dist"].get<std::string>();
    if (j.contains("distribution")) c.dist = j["distribution"].get<std::string>();
    if (j.contains("p")) c.p = json_p(j["p"]);
    if (j.contains("p_grid")) c.p = json_p(j["p_grid"]);
    if (j.contains("tol")) c.tol = j["tol"].get<double>();
    if (j.contains("min_slope")) c.min_slope = j["min_slope"].get<double>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("format")) c.format = j["format"].get<std::string>();
    if (j.contains("median_plus_crossing")) c.median_plus_crossing = j["median_plus_crossing"].get<bool>();
    if (j.contains("nu0_from_crossing")) c.nu0_from_crossing = j["nu0_from_crossing"].get<bool>();
    if (j.contains("upper_from_crossing")) c.upper_from_crossing = j["upper_from_crossing"].get<bool>();
    if (j.contains("lambda")) c.lambda = j["lambda"].is_number() ? fmt(j["lambda"].get<double>()) : json_vec(j["lambda"]);
    if (j.contains("mu")) c.mu = json_vec(j["mu"]);
    if (j.contains("sigma")) c.sigma = json_vec(j["sigma"]);
    if (j.contains("n")) c.n = j["n"].get<std::size_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("grid")) c.grid = j["grid"].get<int>();
  } catch (const json::exception& e) {
    throw UsageError("config '" + c.config_path + "': " + e.what());
  }
}

pmean::DistributionSpec load_distribution(const std::string& text) {
  if (text.empty()) throw UsageError("--dist is required");
  namespace fs = std::filesystem;
  if (text.find('(') == std::string::npos && fs::is_regular_file(text)) {
    std::ifstream in(text);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw pmean::ParseError("piecewise file '" + text + "': " + e.what());
    }
    return pmean::DistributionSpec::piecewise(pmean::PiecewisePolyDensity::from_json(doc));
  }
  return pmean::parse_distribution(text);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

void write_manifest(const std::string& out, const std::string& command, json config, json extra = json::object()) {
  if (out.empty() || out == "-") return;
  json m = {{"command", command}, {"version", kVersion}, {"config", std::move(config)}};
  for (auto& [k, v] : extra.items()) m[k] = v;
  write_text(out + ".manifest.json", m.dump(2) + "\n");
}

std::vector<double> clipped_grid(const pmean::DistributionSpec& spec, const std::string& p) {
  const pmean::ClippedGrid g = pmean::clip_to_domain(spec, parse_p(p));
  if (g.clipped)
    std::cerr << "warning: p grid clipped to p <= " << fmt(g.ceiling) << " (p-domain ceiling "
              << fmt(pmean::p_domain(spec).hi) << ")\n";
  if (g.grid.empty()) throw UsageError("no p grid point lies inside the p-domain");
  return g.grid;
}

// ---------------------------------------------------------------------------

int run_curve(const Config& c) {
  if (c.format != "csv" && c.format != "json") throw UsageError("--format must be csv or json");
  const auto spec = load_distribution(c.dist);
  if (c.p.empty()) throw UsageError("--p is required");
  const auto grid = clipped_grid(spec, c.p);

  const pmean::PMeanCurve curve = pmean::trace_curve(spec, grid, c.tol);
  std::string text;
  if (c.format == "csv") {
    text = "p,nu,dnu_sign,dnu_dp,residual\n";
    for (const auto& pt : curve.points) {
      text += fmt(pt.p) + "," + (pt.solved ? fmt(pt.nu) : "nan") + "," + pmean::to_string(pt.dnu_sign) + "," +
              (pt.dnu_dp ? fmt(*pt.dnu_dp) : "") + "," + fmt(pt.balance_residual) + "\n";
    }
  } else {
    json rows = json::array();
    for (const auto& pt : curve.points) {
      json r = {{"p", pt.p}, {"dnu_sign", pmean::to_string(pt.dnu_sign)}, {"residual", pt.balance_residual},
                {"solved", pt.solved}};
      r["nu"] = pt.solved ? json(pt.nu) : json(nullptr);
      r["dnu_dp"] = pt.dnu_dp ? json(*pt.dnu_dp) : json(nullptr);
      if (!pt.note.empty()) r["note"] = pt.note;
      rows.push_back(r);
    }
    json doc = {{"distribution", spec.describe()}, {"failures", curve.failures}, {"points", rows}};
    text = doc.dump(2) + "\n";
  }
  if (curve.failures > 0) std::cerr << "warning: " << curve.failures << " grid point(s) failed to solve\n";
  write_text(c.out, text);
  write_manifest(c.out, "curve", c.to_json(), {{"distribution", spec.describe()}, {"grid", join(grid)}});
  return kExitOk;
}

pmean::VerdictOptions verdict_options(const Config& c, const pmean::DistributionSpec& spec) {
  pmean::VerdictOptions o;
  if (!c.p.empty()) o.p_grid = clipped_grid(spec, c.p);
  o.tol = c.tol;
  o.min_slope = c.min_slope;
  o.inflection.median_plus_crossing = c.median_plus_crossing;
  o.inflection.nu0_from_crossing = c.nu0_from_crossing;
  o.inflection.upper_from_crossing = c.upper_from_crossing;
  return o;
}

int run_verdict(const Config& c) {
  const auto spec = load_distribution(c.dist);
  const auto options = verdict_options(c, spec);
  const pmean::SkewVerdict v = pmean::verdict(spec, options);
  write_text(c.out, pmean::to_json(v).dump(2) + "\n");
  write_manifest(c.out, "verdict", c.to_json(),
                 {{"distribution", spec.describe()}, {"conclusion", pmean::to_string(v.conclusion)}});
  return kExitOk;
}

int run_report(const Config& c) {
  const auto spec = load_distribution(c.dist);
  const auto grid = clipped_grid(spec, c.p.empty() ? "1:3:0.5" : c.p);
  pmean::InflectionOptions io;
  io.median_plus_crossing = c.median_plus_crossing;
  io.nu0_from_crossing = c.nu0_from_crossing;
  io.upper_from_crossing = c.upper_from_crossing;

  json crossings = json::array();
  for (double p : grid) crossings.push_back(pmean::to_json(pmean::crossing_profile(spec, p, c.tol)));
  json doc = {{"distribution", spec.describe()}, {"crossing_profiles", crossings}};
  if (auto m = pmean::check_monotone_density(spec)) doc["monotone_density"] = pmean::to_json(*m);
  else doc["monotone_density"] = nullptr;
  if (auto t = pmean::clopen_threshold(spec)) doc["clopen_threshold"] = *t;
  else doc["clopen_threshold"] = nullptr;
  try {
    auto [report, verdict] = pmean::inflection_criterion(spec, io);
    doc["inflection"] = pmean::to_json(report);
    doc["inflection_verdict"] = verdict ? pmean::to_json(*verdict) : json(nullptr);
  } catch (const pmean::DomainError& e) {
    doc["inflection"] = {{"path", "inapplicable"}, {"note", e.what()}};
    doc["inflection_verdict"] = nullptr;
  }
  write_text(c.out, doc.dump(2) + "\n");
  write_manifest(c.out, "report", c.to_json(), {{"distribution", spec.describe()}});
  return kExitOk;
}

int run_counterexample(const Config& c) {
  if (c.lambda.empty()) throw UsageError("--lambda is required");
  pmean::Rational lambda;
  try {
    lambda = pmean::parse_rational(c.lambda);
  } catch (const pmean::ParseError& e) {
    throw UsageError(std::string("--lambda: ") + e.what());
  }
  if (!(lambda > pmean::Rational(1, 2) && lambda < 1))
    throw UsageError("--lambda must satisfy 1/2 < lambda < 1, got " + pmean::to_string(lambda));
  const pmean::CounterexampleReport r = pmean::counterexample_report(lambda);
  write_text(c.out, pmean::to_json(r).dump(2) + "\n");
  json cfg = {{"lambda", pmean::to_string(lambda)}};
  if (!c.out.empty()) cfg["out"] = c.out;
  write_manifest(c.out, "counterexample", cfg, {{"conclusion", r.conclusion}});
  return kExitOk;
}

// Trajectory, manifest and density grid next to each other.
int run_mvsn(const Config& c) {
  if (c.lambda.empty()) throw UsageError("--lambda is required");
  const std::vector<double> lam = parse_list(c.lambda, "--lambda");
  const int k = static_cast<int>(lam.size());
  pmean::MVSNSpec spec = pmean::MVSNSpec::standard(Eigen::Map<const Eigen::VectorXd>(lam.data(), k));
  bool assumed_mu = true, assumed_sigma = true;
  if (!c.mu.empty()) {
    const auto mu = parse_list(c.mu, "--mu");
    if (static_cast<int>(mu.size()) != k) throw UsageError("--mu must have as many entries as --lambda");
    spec.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), k);
    assumed_mu = false;
  }
  if (!c.sigma.empty()) {
    const auto s = parse_list(c.sigma, "--sigma");
    if (static_cast<int>(s.size()) != k * k) throw UsageError("--sigma must have k*k entries (row-major)");
    spec.sigma = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(s.data(), k, k);
    assumed_sigma = false;
  }
  try {
    spec.validate();
  } catch (const pmean::ConstructionError& e) {
    throw UsageError(e.what());
  }
  if (c.n < 20) throw UsageError("--n must be at least 20");
  if (c.grid < 2) throw UsageError("--grid must be at least 2");
  const std::vector<double> grid = parse_p(c.p.empty() ? "1:4:0.5" : c.p);
  for (double p : grid)
    if (!(p >= 1.0)) throw UsageError("multivariate p-means need p >= 1");

  const pmean::MVTrajectory traj = pmean::trajectory(spec, grid, c.n, c.seed, c.tol);

  std::string csv = "p";
  for (int i = 0; i < k; ++i) csv += ",nu_" + std::to_string(i + 1);
  for (int i = 0; i < k; ++i) csv += ",tau_" + std::to_string(i + 1);
  csv += ",reliable,converged\n";
  std::size_t reliable = 0;
  for (std::size_t r = 0; r < traj.entries.size(); ++r) {
    const auto& e = traj.entries[r];
    const auto* t = r < traj.tangents.size() ? &traj.tangents[r] : nullptr;
    const bool rel = t && t->reliable;
    reliable += rel;
    csv += fmt(e.p);
    for (int i = 0; i < k; ++i) csv += "," + fmt(e.nu(i));
    for (int i = 0; i < k; ++i) csv += "," + (rel ? fmt(t->tau(i)) : std::string());
    csv += std::string(",") + (rel ? "1" : "0") + "," + (e.converged ? "1" : "0") + "\n";
  }

  json summary = {{"n", traj.n}, {"seed", traj.seed}, {"reliable_tangents", reliable}};
  const double lnorm = spec.lambda.norm();
  if (reliable == 0 || lnorm == 0.0) {
    summary["colinearity"] = nullptr;
    summary["note"] = lnorm == 0.0 ? "symmetric" : "no reliable tangents";
  } else {
    // lambda lives in whitened coordinates; its image direction is Sigma^(1/2) lambda.
    const Eigen::VectorXd dir = spec.sigma_sqrt() * spec.lambda;
    summary["direction"] = std::vector<double>(dir.data(), dir.data() + k);
    summary["colinearity"] = pmean::colinearity_score(traj, dir.normalized());
  }

  json cfg = {{"lambda", lam},
              {"mu", std::vector<double>(spec.mu.data(), spec.mu.data() + k)},
              {"n", c.n},
              {"seed", c.seed},
              {"p", join(grid)},
              {"tol", c.tol},
              {"grid", c.grid}};
  {
    std::vector<double> s;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) s.push_back(spec.sigma(i, j));
    cfg["sigma"] = s;
  }
  if (!c.out.empty()) cfg["out"] = c.out;
  json assumptions = json::array();
  if (assumed_mu) assumptions.push_back("mu = 0 (default)");
  if (assumed_sigma) assumptions.push_back("Sigma = identity (default)");

  write_text(c.out, csv);
  if (c.out.empty() || c.out == "-") {
    std::cerr << summary.dump() << "\n";
    return kExitOk;
  }
  const std::string density_path = c.out + ".density.csv";
  if (k == 2) {
    // Box covering the sample's 0.5% .. 99.5% coordinate range.
    Eigen::MatrixXd pts = pmean::sample_mvsn(spec, std::min<std::size_t>(c.n, 20000), c.seed).points;
    std::string d = "x1,x2,density\n";
    double lo[2], hi[2];
    for (int i = 0; i < 2; ++i) {
      std::vector<double> col(pts.col(i).data(), pts.col(i).data() + pts.rows());
      std::sort(col.begin(), col.end());
      lo[i] = col[col.size() / 200];
      hi[i] = col[col.size() - 1 - col.size() / 200];
      const double pad = 0.1 * (hi[i] - lo[i]);
      lo[i] -= pad;
      hi[i] += pad;
    }
    Eigen::VectorXd y(2);
    for (int a = 0; a < c.grid; ++a)
      for (int b = 0; b < c.grid; ++b) {
        y(0) = lo[0] + (hi[0] - lo[0]) * a / (c.grid - 1);
        y(1) = lo[1] + (hi[1] - lo[1]) * b / (c.grid - 1);
        d += fmt(y(0)) + "," + fmt(y(1)) + "," + fmt(spec.pdf(y)) + "\n";
      }
    write_text(density_path, d);
    summary["density_grid"] = density_path;
  } else {
    std::cerr << "note: density grid is written for k = 2 only\n";
  }
  summary["trajectory"] = c.out;
  write_manifest(c.out, "mvsn", cfg, {{"assumptions", assumptions}, {"spec", pmean::to_json(spec)}, {"result", summary}});
  return kExitOk;
}

void common_options(CLI::App* sub, Config& c, bool with_format) {
  sub->add_option("--dist", c.dist, "distribution, e.g. weibull(k=2.5,lambda=1), or a piecewise JSON file");
  sub->add_option("--p", c.p, "p grid: start:stop:step, a comma list, or one value");
  sub->add_option("--tol", c.tol, "solver tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--out", c.out, "output path (stdout when omitted)");
  sub->add_option("--config", c.config_path, "JSON config or manifest; its values replace the flags");
  if (with_format) sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void inflection_flags(CLI::App* sub, Config& c) {
  sub->add_flag("--median-plus-crossing", c.median_plus_crossing, "accept nu1 + c1 > theta2 as the median condition");
  sub->add_flag("--nu0-from-crossing", c.nu0_from_crossing, "use nu1 - c1 in place of the mode in the slope bounds");
  sub->add_flag("--upper-from-crossing", c.upper_from_crossing, "check the right slope bound only beyond nu1 + c1");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frechet p-means, p-mean curves and true-skewness certificates"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Config c;

  auto* curve = app.add_subcommand("curve", "trace p -> nu_p as CSV or JSON");
  common_options(curve, c, true);
  auto* verdict = app.add_subcommand("verdict", "true-skewness verdict as JSON");
  common_options(verdict, c, false);
  verdict->add_option("--min-slope", c.min_slope, "minimum accepted numeric slope of nu_p");
  inflection_flags(verdict, c);
  auto* report = app.add_subcommand("report", "crossing profiles and inflection criterion as JSON");
  common_options(report, c, false);
  inflection_flags(report, c);
  auto* cex = app.add_subcommand("counterexample", "sum of two step densities that is not truly skewed");
  cex->add_option("--lambda", c.lambda, "mass on [0,1), exact: 0.6 or 3/5")->required();
  cex->add_option("--out", c.out, "output path (stdout when omitted)");
  auto* mvsn = app.add_subcommand("mvsn", "multivariate skew-normal p-mean trajectory");
  mvsn->add_option("--lambda", c.lambda, "shape vector, comma separated");
  mvsn->add_option("--mu", c.mu, "location vector (default 0)");
  mvsn->add_option("--sigma", c.sigma, "scale matrix, row-major (default identity)");
  mvsn->add_option("--n", c.n, "sample size");
  mvsn->add_option("--seed", c.seed, "random seed");
  mvsn->add_option("--p", c.p, "p grid (default 1:4:0.5)");
  mvsn->add_option("--tol", c.tol, "optimizer tolerance")->check(CLI::PositiveNumber);
  mvsn->add_option("--grid", c.grid, "density grid points per axis");
  mvsn->add_option("--out", c.out, "trajectory CSV path; manifest and density grid are written beside it");
  mvsn->add_option("--config", c.config_path, "JSON config or manifest; its values replace the flags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  // Setup problems are usage errors; failures inside the numerics are
  // computational.
  try {
    apply_config(c);
    if (*curve) return run_curve(c);
    if (*verdict) return run_verdict(c);
    if (*report) return run_report(c);
    if (*cex) return run_counterexample(c);
    if (*mvsn) return run_mvsn(c);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const pmean::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const pmean::ConstructionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const pmean::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompute;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompute;
  }
  return kExitUsage;
}
