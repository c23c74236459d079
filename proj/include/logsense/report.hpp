#ifndef LOGSENSE_REPORT_HPP_
#define LOGSENSE_REPORT_HPP_

// Serialization of records and reports: wide CSV, JSON summaries, manifests.
// Numbers are written with 17 significant digits so outputs round-trip and
// identical runs give identical bytes.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "logsense/diagnostics.hpp"
#include "logsense/field_io.hpp"
#include "logsense/oracles.hpp"
#include "logsense/simulator.hpp"

namespace logsense {

using json = nlohmann::json;

inline std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// JSON cannot hold NaN or infinities; they become null.
inline json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// Assertions and manifests

struct Assertion {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string relation;  // how value is compared with tolerance, e.g. "<=" or ">= -"
  bool flag_only = false;  // reported but does not affect the exit status
};

inline json to_json(const Assertion& a) {
  return {{"name", a.name},
          {"passed", a.passed},
          {"value", num(a.value)},
          {"tolerance", num(a.tolerance)},
          {"relation", a.relation},
          {"kind", a.flag_only ? "flag" : "assert"}};
}

class AssertionList {
 public:
  void add(std::string name, bool passed, double value, double tolerance, std::string relation) {
    items_.push_back({std::move(name), passed, value, tolerance, std::move(relation), false});
  }
  void flag(std::string name, bool passed, double value, double tolerance, std::string relation) {
    items_.push_back({std::move(name), passed, value, tolerance, std::move(relation), true});
  }
  bool all_passed() const {
    for (const auto& a : items_)
      if (!a.flag_only && !a.passed) return false;
    return true;
  }
  const std::vector<Assertion>& items() const { return items_; }
  json to_json() const {
    json arr = json::array();
    for (const auto& a : items_) arr.push_back(logsense::to_json(a));
    return arr;
  }

 private:
  std::vector<Assertion> items_;
};

// ---------------------------------------------------------------------------
// Diagnostics record

inline std::string record_csv(const DiagnosticsRecord& rec) {
  std::string s = "t";
  for (const auto& c : functional_columns()) s += std::string(",") + c.name;
  s += ",log_v_ratio";
  for (const auto& c : accumulated_columns()) s += std::string(",acc_") + c.name;
  s += "\n";
  for (std::size_t k = 0; k < rec.size(); ++k) {
    s += fmt17(rec.samples[k].t);
    for (const auto& c : functional_columns()) s += "," + fmt17(rec.samples[k].*(c.member));
    s += "," + fmt17(rec.log_v_ratio[k]);
    for (const auto& c : accumulated_columns()) s += "," + fmt17(rec.accumulated[k].*(c.member));
    s += "\n";
  }
  return s;
}

inline std::string steps_csv(const std::vector<StepReport>& reports) {
  std::string s = "t,dt_used,max_u,min_v,cfl_bound,positivity_ok,retries\n";
  for (const auto& r : reports)
    s += fmt17(r.t) + "," + fmt17(r.dt_used) + "," + fmt17(r.max_u) + "," + fmt17(r.min_v) + "," +
         fmt17(r.cfl_bound) + "," + (r.positivity_ok ? "1" : "0") + "," + std::to_string(r.retries) + "\n";
  return s;
}

inline std::string dual_norm_csv(const DualNormReport& r) {
  std::string s = "t_mid,u_surrogate,v_surrogate,bound_integrand\n";
  for (std::size_t k = 0; k < r.interval_mid.size(); ++k)
    s += fmt17(r.interval_mid[k]) + "," + fmt17(r.u_surrogate[k]) + "," + fmt17(r.v_surrogate[k]) + "," +
         fmt17(r.bound_integrand[k]) + "\n";
  return s;
}

inline json accumulated_json(const DiagnosticsRecord& rec) {
  json j;
  for (const auto& c : accumulated_columns()) j[c.name] = num(rec.accumulated_final(c.member));
  return j;
}

inline json to_json(const IdentityResidual& r) {
  return {{"lhs", num(r.lhs)}, {"rhs", num(r.rhs)}, {"signed", num(r.signed_value)}, {"scale", num(r.scale)}};
}

inline json to_json(const AprioriReport& r) {
  return {{"lhs", num(r.lhs)},
          {"rhs", num(r.rhs)},
          {"slack", num(r.slack)},
          {"scale", num(r.scale)},
          {"tolerance", num(r.tolerance)},
          {"holds", r.holds},
          {"int_D1", num(r.int_D1)},
          {"int_grad_up", num(r.int_grad_up)},
          {"int_D2_weighted", num(r.int_D2_weighted)},
          {"int_reaction_unreg", num(r.int_reaction_unreg)},
          {"all_finite", r.all_finite}};
}

inline json to_json(const YoungReport& r) {
  return {{"max_pointwise_violation", num(r.max_pointwise_violation)},
          {"pointwise_holds", r.pointwise_holds},
          {"int_u_Lr", num(r.int_u_Lr)},
          {"int_split", num(r.int_split)},
          {"integrated_holds", r.integrated_holds}};
}

inline json to_json(const GradVqReport& r) {
  return {{"coefficient", num(r.coefficient)},
          {"worst_slack", num(r.worst_slack)},
          {"holds", r.holds},
          {"degenerate", r.degenerate}};
}

inline json to_json(const LogMassReport& r) {
  return {{"defined", r.defined},         {"undefined_from", num(r.undefined_from)},
          {"min_log_u", num(r.min_log_u)}, {"int_grad_log_u", num(r.int_grad_log_u)},
          {"tau0", num(r.tau0)},           {"worst_slack", num(r.worst_slack)},
          {"holds", r.holds}};
}

inline json to_json(const TracePositivityReport& r) {
  return {{"min_boundary_upq", num(r.min_boundary_upq)},
          {"first_failure_time", num(r.first_failure_time)},
          {"pass", r.pass}};
}

inline json to_json(const oracles::LogPoincareReport& r) {
  return {{"samples", r.samples},
          {"ratio_branch", r.ratio_branch},
          {"alternative_branch", r.alternative_branch},
          {"excluded", r.excluded},
          {"regenerated", r.regenerated},
          {"max_ratio", num(r.max_ratio)},
          {"degenerate", r.degenerate}};
}

inline json to_json(const oracles::MeanPoincareReport& r) {
  return {{"samples", r.samples},
          {"b_measure", num(r.b_measure)},
          {"max_ratio", num(r.max_ratio)},
          {"max_riesz_ratio", num(r.max_riesz_ratio)}};
}

inline json grid_json(const Grid& g) {
  json cells = json::array(), ext = json::array();
  for (int a = 0; a < g.dim; ++a) {
    cells.push_back(g.cells[a]);
    ext.push_back(g.extents[a]);
  }
  return {{"dim", g.dim}, {"cells", cells}, {"extents", ext}};
}

}  // namespace logsense

#endif  // LOGSENSE_REPORT_HPP_
