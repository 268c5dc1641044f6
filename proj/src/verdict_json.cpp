#include "pmean/criteria.hpp"

#include <cmath>

namespace pmean {

namespace {

// Non-finite numbers become strings so the document stays valid JSON.
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

nlohmann::json numbers(const std::map<std::string, double>& m) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [k, v] : m) out[k] = number(v);
  return out;
}

nlohmann::json optional_number(const std::optional<double>& v) { return v ? number(*v) : nlohmann::json(nullptr); }

}  // namespace

std::string to_string(Conclusion c) {
  switch (c) {
    case Conclusion::truly_positive: return "truly_positive";
    case Conclusion::truly_negative: return "truly_negative";
    case Conclusion::symmetric: return "symmetric";
    case Conclusion::not_truly_positive: return "not_truly_positive";
    case Conclusion::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

std::string to_string(Grade g) {
  switch (g) {
    case Grade::analytic: return "analytic";
    case Grade::numeric: return "numeric";
    case Grade::refuted: return "refuted";
    case Grade::none: return "none";
  }
  return "none";
}

nlohmann::json to_json(const SkewVerdict& v) {
  nlohmann::json out;
  out["distribution"] = v.distribution;
  out["conclusion"] = to_string(v.conclusion);
  out["grade"] = to_string(v.grade);
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& e : v.evidence) {
    nlohmann::json j;
    j["criterion"] = e.criterion;
    j["scope"] = e.scope;
    j["pass"] = e.pass ? nlohmann::json(*e.pass) : nlohmann::json(nullptr);
    j["numbers"] = numbers(e.numbers);
    j["note"] = e.note;
    ev.push_back(j);
  }
  out["evidence"] = ev;
  if (v.witness) {
    out["witness"] = {{"kind", v.witness->kind}, {"numbers", numbers(v.witness->numbers)}};
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

nlohmann::json to_json(const CrossingProfile& c) {
  return {{"p", number(c.p)},
          {"nu", number(c.nu)},
          {"c_p", optional_number(c.c_p)},
          {"crossing_count", c.crossing_count},
          {"satisfies_L2", c.satisfies_L2},
          {"support_condition", c.support_condition},
          {"identically_zero", c.identically_zero},
          {"boundary_crossing", c.boundary_crossing},
          {"range", number(c.range)}};
}

nlohmann::json to_json(const InflectionReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (double t : r.inflection_points) pts.push_back(number(t));
  return {{"path", r.path},
          {"inflection_points", pts},
          {"theta1", optional_number(r.theta1)},
          {"theta2", optional_number(r.theta2)},
          {"mode", number(r.mode)},
          {"median", number(r.median)},
          {"c1", optional_number(r.c1)},
          {"corollary_applicable", r.corollary_applicable},
          {"lower_bound_check", r.lower_bound_check},
          {"upper_bound_check", r.upper_bound_check},
          {"median_condition", r.median_condition},
          {"min_lower_slope", number(r.min_lower_slope)},
          {"min_upper_slope", number(r.min_upper_slope)},
          {"note", r.note}};
}

}  // namespace pmean
