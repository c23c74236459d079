// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any failed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "logsense/config.hpp"
#include "logsense/experiments.hpp"

using namespace logsense;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!v.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "logsense_acceptance" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// The standard run: 64×64, Gaussian u₀ = 1 + 4 exp(−|x−c|²/(2·0.1²)), v₀ = 1, χ = 2, T = 1.
ExperimentConfig standard_config(Mode mode, double eps = 0.01) {
  ExperimentConfig c;
  c.mode = mode;
  c.model.chi = 2.0;
  c.model.eps = eps;
  c.grid.cells = {64, 64};
  c.grid.lengths = {1.0, 1.0};
  c.initial_u = InitialSpec::gaussian_bump(1.0, 4.0, 0.1);
  c.initial_v = InitialSpec::constant_value(1.0);
  c.time.T = 1.0;
  return c;
}

// Shared between criteria 8, 9, 12 and 13.
struct Ensemble {
  std::vector<EpsRunSummary> runs;
};

Ensemble band_runs;        // {0.1, 0.01, 0.001}
StandardChecks standard;   // criterion 4 run
bool standard_done = false;
double ladder_seconds = 0.0;

// The ladder {0.1, 0.05, 0.025, 0.0125} on the standard run, computed once.
const EpsStudyResult& ladder_study() {
  static const EpsStudyResult r = [] {
    const auto t0 = std::chrono::steady_clock::now();
    EpsStudyResult out = eps_convergence_study(standard_config(Mode::eps_study));
    ladder_seconds = seconds_since(t0);
    return out;
  }();
  return r;
}

}  // namespace

int main() {
  report(1, "exponent infimum vs brute force", [] {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_lo = 0.0, worst_hi = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double chi = 0.05 + 3.95 * k / 50.0;
      const double d = exponent_infimum_bruteforce(chi, 1000000) - exponent_infimum(chi);
      worst_lo = std::min(worst_lo, d);
      worst_hi = std::max(worst_hi, d);
    }
    const double secs = seconds_since(t0);
    const bool ok = worst_lo >= -1e-6 && worst_hi <= 1e-3 && secs < 10.0;
    return Verdict{ok, fmt("difference in [%.3g, ", worst_lo) + fmt("%.3g] over 50 chi", worst_hi) +
                           fmt(", %.2fs < 10s", secs)};
  });

  report(2, "c1 positive inside, zero at q endpoints", [] {
    // Endpoints are checked in extended precision: the nearest double to q+
    // already carries |c1| near 1e-10 when p is small.
    double min_inside = std::numeric_limits<double>::infinity(), max_edge = 0.0, max_edge_double = 0.0;
    for (double chi : {0.5, 1.0, 2.0, 2.8}) {
      const double pmax = std::min(1.0, 1.0 / (chi * chi));
      for (int i = 0; i < 100; ++i) {
        const double p = pmax * (i + 0.5) / 100.0;
        const QBounds b = q_bounds(p, chi);
        for (int j = 0; j < 100; ++j) {
          const double q = b.q_minus + (b.q_plus - b.q_minus) * (j + 0.5) / 100.0;
          min_inside = std::min(min_inside, entropy_coefficients(p, q, chi).c1);
        }
        max_edge_double = std::max(max_edge_double, std::abs(entropy_coefficients(p, b.q_minus, chi).c1));
        max_edge_double = std::max(max_edge_double, std::abs(entropy_coefficients(p, b.q_plus, chi).c1));
        const long double pl = static_cast<long double>(pmax) * (i + 0.5L) / 100.0L;
        const auto bl = q_bounds_extended(pl, chi);
        max_edge = std::max(max_edge, static_cast<double>(std::abs(c1_extended(pl, bl.q_minus, chi))));
        max_edge = std::max(max_edge, static_cast<double>(std::abs(c1_extended(pl, bl.q_plus, chi))));
      }
    }
    return Verdict{min_inside > 0.0 && max_edge <= 1e-12,
                   fmt("min interior c1 = %.3g, max |c1| at endpoints = %.3g", min_inside, max_edge) +
                       fmt(" (extended; %.3g in double)", max_edge_double)};
  });

  report(3, "sensitivity threshold table", [] {
    const bool table = chi_admissible(100.0, 2) && chi_admissible(2.82, 3) && !chi_admissible(2.83, 3) &&
                       !chi_admissible(2.0, 4);
    const double err = std::abs(exponent_infimum(std::sqrt(8.0)) - 3.0);
    const double ratio_err = std::abs(exponent_infimum(std::sqrt(8.0)) - critical_ratio(3));
    return Verdict{table && err <= 1e-12 && ratio_err <= 1e-12,
                   std::string(table ? "table reproduced" : "table mismatch") +
                       fmt(", |I(sqrt 8) - 3| = %.3g", err)};
  });

  report(4, "mass conservation, standard 64x64 run", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentConfig c = standard_config(Mode::simulate);
    const Grid g = c.grid.build();
    RunSetup s = make_setup(c, g, c.model.eps);
    s.snapshot_times.clear();
    const TrajectoryRun tr = run_trajectory(s);
    standard = standard_checks(tr.record, s.params, c.checks);
    standard_done = true;
    const double secs = seconds_since(t0);
    return Verdict{standard.mass_drift <= 1e-12 && secs < 60.0,
                   fmt("max relative drift %.3g <= 1e-12", standard.mass_drift) + fmt(", %.1fs < 60s", secs)};
  });

  report(5, "v floor, standard run", [] {
    if (!standard_done) return Verdict{false, "standard run unavailable"};
    return Verdict{standard.v_floor.holds,
                   fmt("min over samples of v_min - (min v0 e^-t - 10h^2) = %.3g", standard.v_floor.worst_margin)};
  });

  report(6, "entropy identity refinement order and constant state", [] {
    ExperimentConfig c = standard_config(Mode::refine_study);
    c.grid.cells = {32, 32};
    c.time.T = 0.05;
    c.solver.scheme = FluxScheme::central;
    const RefineReport r = refine_study(c);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& o : r.orders)
      if (o.quantity == "entropy_identity_one" || o.quantity == "entropy_identity_centered_bump" ||
          o.quantity == "entropy_identity_cosine_shifted")
        worst = std::min(worst, o.exact ? std::numeric_limits<double>::infinity() : o.min_order);

    // Constant steady state u ≡ 2, v ≡ 2/(1+2ε) with every built-in test function.
    const Grid g = Grid::uniform(2, 32);
    ModelParams m = resolve_params(c, 2, 0.01);
    DiagnosticsCollector col(m, {0.5, 0.05});
    for (const auto& tf : builtin_nonnegative_family(0.5)) col.add_test_function(tf, g);
    RunOptions ro;
    ro.observe_every_steps = 4;
    run(make_state(Field(g, 2.0), Field(g, 2.0 / 1.02), m), 0.5, [&](const SimState& st) { col.observe(st); }, ro);
    double constant_res = 0.0;
    for (std::size_t k = 0; k < col.test_function_count(); ++k)
      constant_res = std::max(constant_res, entropy_identity_residual(col.weak(k), m).residual());
    return Verdict{worst >= 1.5 && constant_res <= 1e-10,
                   fmt("min order over {one, centered_bump, cosine_shifted} = %.3f >= 1.5", worst) +
                       fmt(", constant-state residual %.3g <= 1e-10", constant_res)};
  });

  report(7, "supersolution direction", [] {
    double worst_margin = std::numeric_limits<double>::infinity();
    std::size_t checked = 0;
    for (double eps : {0.0, 0.01, 0.1}) {
      ExperimentConfig c = standard_config(Mode::entropy_check, eps);
      c.time.T = 0.25;
      const Grid fine = c.grid.build(), coarse = coarsen(fine);
      TrajectoryRun runs[2];
      ModelParams m;
      for (int k = 0; k < 2; ++k) {
        RunSetup s = make_setup(c, k == 0 ? fine : coarse, eps);
        s.tests = builtin_nonnegative_family(c.time.T);
        s.snapshot_times.clear();
        runs[k] = run_trajectory(s);
        m = s.params;
      }
      for (std::size_t j = 0; j < runs[0].weak.size(); ++j) {
        const double sup = supersolution_residual(runs[0].weak[j], m).signed_value;
        const double est = std::abs(entropy_identity_residual(runs[1].weak[j], m).signed_value);
        worst_margin = std::min(worst_margin, sup + (1e-6 + est));
        ++checked;
      }
    }
    return Verdict{worst_margin >= 0.0 && checked == 15,
                   fmt("min of residual + (1e-6 + estimate) = %.3g over %.0f cases", worst_margin,
                       static_cast<double>(checked))};
  });

  report(8, "a priori assembly and epsilon-uniform integrals", [] {
    ExperimentConfig c = standard_config(Mode::eps_study);
    c.eps_study.ladder = {0.1, 0.01, 0.001};
    band_runs.runs = eps_convergence_study(c).runs;
    double worst_slack = std::numeric_limits<double>::infinity();
    bool finite = true;
    auto fold = [&](const StandardChecks& s) {
      worst_slack = std::min(worst_slack, s.apriori.slack + s.apriori.tolerance);
      finite = finite && s.apriori.all_finite;
    };
    for (const auto& r : band_runs.runs) fold(r.checks);
    if (standard_done) fold(standard);
    double band = 1.0;
    const std::vector<double AprioriReport::*> members = {&AprioriReport::int_D1, &AprioriReport::int_grad_up,
                                                          &AprioriReport::int_D2_weighted,
                                                          &AprioriReport::int_reaction_unreg};
    for (auto mem : members) {
      std::vector<double> xs;
      for (const auto& r : band_runs.runs) xs.push_back(r.checks.apriori.*mem);
      band = std::max(band, band_ratio(xs));
    }
    return Verdict{worst_slack >= 0.0 && finite && band <= 3.0,
                   fmt("min slack + 1e-6 scale = %.3g", worst_slack) + fmt(", widest max/min ratio %.3f <= 3", band)};
  });

  report(9, "Young splitting pointwise", [] {
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t runs = 0;
    auto fold = [&](const StandardChecks& s) {
      if (!s.young_applicable) return;
      worst = std::max(worst, s.young.max_pointwise_violation);
      ++runs;
    };
    if (standard_done) fold(standard);
    for (const auto& r : band_runs.runs) fold(r.checks);
    for (const auto& r : ladder_study().runs) fold(r.checks);
    return Verdict{runs >= 8 && worst <= 1e-12,
                   fmt("max relative violation %.3g <= 1e-12 over %.0f runs", worst, static_cast<double>(runs))};
  });

  report(10, "coth comparison bound", [] {
    Rng rng(derive_seed(20240601, 2));
    std::size_t passed = 0;
    for (int k = 0; k < 100; ++k) {
      const oracles::OdeComparison s{rng.uniform(0.1, 10.0), rng.uniform(0.1, 10.0), rng.uniform(0.1, 10.0), 1.0};
      passed += oracles::verify_ode_comparison(s).holds ? 1 : 0;
    }
    const double spot = oracles::coth_bound(1.0, 4.0, 1.0);
    const double err = std::abs(spot - 2.0 * std::cosh(2.0) / std::sinh(2.0));
    return Verdict{passed == 100 && err <= 1e-12,
                   fmt("%.0f/100 cases", static_cast<double>(passed)) + fmt(", |2coth(2) spot error| = %.3g", err)};
  });

  report(11, "pointwise identities", [] {
    ExperimentConfig c;
    c.mode = Mode::oracle;
    const auto out = run_experiment(c, scratch("oracle"));
    const auto& res = out.manifest["results"];
    const double sq = res["square_completion"]["max_relative_residual"].get<double>();
    bool orders = true;
    std::string d;
    for (const auto& a : out.manifest["assertions"]) {
      const std::string n = a["name"];
      if (n == "power_identity_29_order" || n == "power_identity_210_order") {
        orders = orders && a["passed"].get<bool>();
        d += " " + n + "=" + (a["value"].is_null() ? std::string("exact") : fmt("%.3f", a["value"].get<double>()));
      }
    }
    return Verdict{sq <= 1e-10 && orders, fmt("square completion %.3g <= 1e-10 (1000 trials),", sq) + d};
  });

  report(12, "epsilon ladder Cauchy behavior", [] {
    const EpsStudyResult& r = ladder_study();
    std::string d;
    for (const auto& x : r.differences) d += fmt(" %.3g", x.u);
    return Verdict{r.u_monotone && r.differences.size() == 3 && ladder_seconds < 300.0,
                   "u differences" + d + fmt(", %.1fs < 300s", ladder_seconds)};
  });

  report(13, "log-mass across the epsilon ensemble", [] {
    std::vector<double> mins;
    double worst = std::numeric_limits<double>::infinity();
    bool defined = true;
    for (const std::vector<EpsRunSummary>* e : std::initializer_list<const std::vector<EpsRunSummary>*>{&ladder_study().runs, &band_runs.runs})
      for (const auto& r : *e) {
        defined = defined && r.checks.log_mass.defined;
        mins.push_back(r.min_log_u);
        worst = std::min(worst, r.checks.log_mass.worst_slack);
      }
    const double band = band_ratio(mins);
    return Verdict{defined && !mins.empty() && band <= 2.0 && worst >= 0.0,
                   fmt("min_t int ln u band ratio %.4f <= 2", band) + fmt(", worst inequality slack %.3g", worst)};
  });

  report(14, "determinism", [] {
    std::size_t compared = 0;
    bool same = true;
    ExperimentConfig sim = standard_config(Mode::simulate);
    sim.time.snapshot_times = {0.5};
    ExperimentConfig orc;
    orc.mode = Mode::oracle;
    for (const auto* c : {&sim, &orc}) {
      const fs::path a = scratch("det_a"), b = scratch("det_b");
      const auto oa = run_experiment(*c, a);
      const auto ob = run_experiment(*c, b);
      same = same && oa.outputs == ob.outputs;
      std::vector<std::string> files = oa.outputs;
      files.push_back("manifest.json");
      for (const auto& f : files) {
        same = same && slurp(a / f) == slurp(b / f);
        ++compared;
      }
    }
    return Verdict{same, fmt("%.0f output files compared byte for byte", static_cast<double>(compared))};
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
