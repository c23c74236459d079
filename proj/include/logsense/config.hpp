#ifndef LOGSENSE_CONFIG_HPP_
#define LOGSENSE_CONFIG_HPP_

// Experiment configuration: JSON in, typed structs out.  Every problem is
// collected with its field path (e.g. "model.chi") and reported together
// before anything is computed.  Unknown keys are errors so typos surface.

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "logsense/grid.hpp"
#include "logsense/initial_data.hpp"
#include "logsense/oracles.hpp"
#include "logsense/params.hpp"
#include "logsense/simulator.hpp"

namespace logsense {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : std::runtime_error(join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& p) {
    std::string s = "invalid configuration:";
    for (const auto& x : p) s += "\n  " + x;
    return s;
  }
  std::vector<std::string> problems_;
};

enum class Mode { simulate, params, entropy_check, eps_study, refine_study, oracle };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::simulate: return "simulate";
    case Mode::params: return "params";
    case Mode::entropy_check: return "entropy-check";
    case Mode::eps_study: return "eps-study";
    case Mode::refine_study: return "refine-study";
    case Mode::oracle: return "oracle";
  }
  return "?";
}

inline std::optional<Mode> parse_mode(const std::string& s) {
  for (Mode m : {Mode::simulate, Mode::params, Mode::entropy_check, Mode::eps_study, Mode::refine_study, Mode::oracle})
    if (s == mode_name(m)) return m;
  return std::nullopt;
}

struct ExponentConfig {
  bool automatic = true;
  double margin = 0.01;
  double cap = tolerance::kPlanarCap;
  double p = 0.0, q = 0.0, r = 0.0;
};

struct ModelConfig {
  double chi = 2.0;
  double eps = 0.01;
  double s = 1.5;
  ExponentConfig exponents;
};

struct GridConfig {
  std::vector<std::size_t> cells{64, 64};
  std::vector<double> lengths{1.0, 1.0};
  std::size_t max_cells = kDefaultMaxCells;
  int dim() const { return static_cast<int>(cells.size()); }
  Grid build() const { return Grid::make(cells, lengths, max_cells); }
};

struct TimeConfig {
  double T = 1.0;
  double sample_interval = 0.0;         // 0: T/200
  std::size_t observe_every_steps = 8;  // extra diagnostics samples between sample times
  std::vector<double> snapshot_times;   // field dumps; T is always included
  double effective_interval() const { return sample_interval > 0.0 ? sample_interval : T / 200.0; }
};

struct SolverConfig {
  FluxScheme scheme = FluxScheme::upwind;
  double safety = 0.4;
  double v_floor = 1e-12;
  int max_retries = 40;
  double dt_coefficient = 0.0;  // > 0: fixed dt = coefficient · h²
};

struct CheckConfig {
  double tau0_fraction = 0.05;
  double mass_tolerance = 1e-12;
  double v_floor_slack = 10.0;
  double young_tolerance = 1e-12;
  double apriori_rel_tol = 1e-6;
  double tau = 1e-6;
  bool write_fields = true;
};

struct EpsStudyConfig {
  std::vector<double> ladder{0.1, 0.05, 0.025, 0.0125};
  double slack = 1.2;
};

struct RefineConfig {
  double dt_coefficient = 0.08;
  std::size_t observe_every_steps = 4;
  double order_threshold = 1.5;
};

struct ParamsModeConfig {
  int n = 2;
  std::size_t p_samples = 200;
};

struct EnsembleConfig {
  oracles::EnsembleSpec spec;
  std::vector<std::size_t> cells{32, 32};
};

struct OracleConfig {
  // 16 cells is still pre-asymptotic for the second power identity.
  std::vector<std::size_t> power_levels{64, 128, 256};
  double power_r = 2.0;
  std::size_t square_trials = 1000;
  std::size_t ode_cases = 100;
  std::size_t ode_steps = 100000;
  // δ = 1 puts nearly every sample on the ∫ln(δ/φ) < 0 branch.
  EnsembleConfig log_poincare{{.delta = 1.5}, {32, 32}};
  EnsembleConfig mean_poincare{{.delta = 0.25}, {32, 32}};
  double mean_p = 2.0;
  std::size_t riesz_probes = 0;
};

struct ExperimentConfig {
  Mode mode = Mode::simulate;
  std::uint64_t seed = 1;
  std::string output_dir;
  ModelConfig model;
  GridConfig grid;
  InitialSpec initial_u = InitialSpec::gaussian_bump(1.0, 4.0, 0.1);
  InitialSpec initial_v = InitialSpec::constant_value(1.0);
  TimeConfig time;
  SolverConfig solver;
  CheckConfig checks;
  EpsStudyConfig eps_study;
  RefineConfig refine;
  ParamsModeConfig params;
  OracleConfig oracle;

  SimConfig sim_config(const Grid& g) const {
    SimConfig c;
    c.scheme = solver.scheme;
    c.safety = solver.safety;
    c.v_floor = solver.v_floor;
    c.max_retries = solver.max_retries;
    if (solver.dt_coefficient > 0.0) c.fixed_dt = solver.dt_coefficient * g.min_spacing() * g.min_spacing();
    return c;
  }
};

namespace detail {

// Typed, path-aware access to a JSON object that records problems instead of throwing.
class Reader {
 public:
  Reader(const json& j, std::string path, std::vector<std::string>& problems)
      : j_(j), path_(std::move(path)), problems_(problems) {
    if (!j_.is_object()) problems_.push_back(label() + ": expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

  template <class T>
  void get(const std::string& key, T& out) {
    used_.insert(key);
    if (!has(key)) return;
    read_value(j_.at(key), at(key), out);
  }

  template <class T>
  void require(const std::string& key, T& out) {
    if (!has(key)) {
      problems_.push_back(at(key) + ": required field is missing");
      used_.insert(key);
      return;
    }
    get(key, out);
  }

  std::optional<Reader> object(const std::string& key) {
    used_.insert(key);
    if (!has(key)) return std::nullopt;
    return Reader(j_.at(key), at(key), problems_);
  }

  void check(bool ok, const std::string& key, const std::string& msg) {
    if (!ok) problems_.push_back(at(key) + ": " + msg);
  }

  void finish() const {
    if (!j_.is_object()) return;
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) problems_.push_back(at(it.key()) + ": unknown field");
  }

  std::vector<std::string>& problems() { return problems_; }

 private:
  std::string label() const { return path_.empty() ? "<root>" : path_; }

  void read_value(const json& v, const std::string& p, double& out) {
    if (!v.is_number()) return problems_.push_back(p + ": expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) problems_.push_back(p + ": must be finite");
  }
  void read_value(const json& v, const std::string& p, bool& out) {
    if (!v.is_boolean()) return problems_.push_back(p + ": expected a boolean");
    out = v.get<bool>();
  }
  void read_value(const json& v, const std::string& p, int& out) {
    if (!v.is_number_integer()) return problems_.push_back(p + ": expected an integer");
    out = v.get<int>();
  }
  void read_value(const json& v, const std::string& p, std::size_t& out) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      return problems_.push_back(p + ": expected a nonnegative integer");
    out = v.get<std::size_t>();
  }
  void read_value(const json& v, const std::string& p, std::string& out) {
    if (!v.is_string()) return problems_.push_back(p + ": expected a string");
    out = v.get<std::string>();
  }
  template <class T>
  void read_value(const json& v, const std::string& p, std::vector<T>& out) {
    if (!v.is_array()) return problems_.push_back(p + ": expected an array");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      T x{};
      read_value(v[i], p + "[" + std::to_string(i) + "]", x);
      out.push_back(x);
    }
  }

  const json& j_;
  std::string path_;
  std::vector<std::string>& problems_;
  std::set<std::string> used_;
};

inline void read_initial(Reader& r, InitialSpec& s) {
  std::string kind = "constant";
  r.require("kind", kind);
  if (kind == "constant") s.kind = InitialKind::constant;
  else if (kind == "gaussian") s.kind = InitialKind::gaussian;
  else if (kind == "cosine") s.kind = InitialKind::cosine;
  else if (kind == "random_cosine") s.kind = InitialKind::random_cosine;
  else r.check(false, "kind", "must be one of constant, gaussian, cosine, random_cosine");
  r.get("value", s.value);
  r.get("background", s.background);
  r.get("amplitude", s.amplitude);
  r.get("width", s.width);
  r.get("center", s.center);
  r.get("cutoff", s.cutoff);
  std::vector<std::vector<int>> modes;
  r.get("modes", modes);
  if (!modes.empty()) {
    s.modes.clear();
    for (std::size_t i = 0; i < modes.size(); ++i) {
      std::array<int, 3> k{0, 0, 0};
      r.check(modes[i].size() >= 1 && modes[i].size() <= 3, "modes", "each mode needs 1 to 3 wavenumbers");
      for (std::size_t a = 0; a < modes[i].size() && a < 3; ++a) k[a] = modes[i][a];
      s.modes.push_back(k);
    }
  }
  std::size_t seed = s.seed;
  r.get("seed", seed);
  s.seed = seed;
  r.check(s.kind != InitialKind::gaussian || s.width > 0.0, "width", "must be positive");
  r.check(s.kind != InitialKind::cosine || !s.modes.empty(), "modes", "cosine data needs at least one mode");
  r.check(s.cutoff >= 1, "cutoff", "must be >= 1");
  r.finish();
}

inline void read_ensemble(Reader& r, EnsembleConfig& e) {
  auto& s = e.spec;
  r.get("samples", s.samples);
  r.get("cutoff", s.cutoff);
  r.get("amplitude_lo", s.amplitude_lo);
  r.get("amplitude_hi", s.amplitude_hi);
  r.get("floor", s.floor);
  r.get("delta", s.delta);
  r.get("eta", s.eta);
  r.get("max_regenerations", s.max_regenerations);
  r.get("cells", e.cells);
  std::string sel = "threshold";
  r.get("selector", sel);
  if (sel == "threshold") s.selector = oracles::BSelector::threshold;
  else if (sel == "random_mask") s.selector = oracles::BSelector::random_mask;
  else r.check(false, "selector", "must be threshold or random_mask");
  r.check(s.samples >= 1, "samples", "must be >= 1");
  r.check(s.floor > 0.0, "floor", "must be positive");
  r.check(s.delta > 0.0, "delta", "must be positive");
  r.check(s.eta > 0.0, "eta", "must be positive");
  r.check(s.amplitude_lo <= s.amplitude_hi, "amplitude_lo", "must not exceed amplitude_hi");
  r.check(!e.cells.empty() && e.cells.size() <= 3, "cells", "needs 1 to 3 entries");
  r.finish();
}

}  // namespace detail

/// Parses and validates a configuration document.  Throws ConfigError listing
/// every problem found.
inline ExperimentConfig parse_config(const json& doc, std::optional<Mode> mode_override = std::nullopt) {
  std::vector<std::string> problems;
  ExperimentConfig c;
  detail::Reader root(doc, "", problems);
  if (!doc.is_object()) throw ConfigError(problems);

  std::string mode;
  root.get("mode", mode);
  if (mode_override) {
    c.mode = *mode_override;
    if (!mode.empty() && parse_mode(mode) != mode_override)
      problems.push_back("mode: config says '" + mode + "' but '" + mode_name(*mode_override) + "' was requested");
  } else if (auto m = parse_mode(mode)) {
    c.mode = *m;
  } else {
    problems.push_back("mode: missing or unknown mode '" + mode + "'");
  }
  std::size_t seed = c.seed;
  root.get("seed", seed);
  c.seed = seed;
  root.get("output_dir", c.output_dir);

  if (auto m = root.object("model")) {
    m->get("chi", c.model.chi);
    m->get("eps", c.model.eps);
    m->get("s", c.model.s);
    if (auto e = m->object("exponents")) {
      auto& x = c.model.exponents;
      std::string how = "auto";
      e->get("select", how);
      e->get("margin", x.margin);
      e->get("cap", x.cap);
      if (how == "auto") {
        x.automatic = true;
      } else if (how == "manual") {
        x.automatic = false;
        e->require("p", x.p);
        e->require("q", x.q);
        e->require("r", x.r);
      } else {
        e->check(false, "select", "must be auto or manual");
      }
      e->check(x.margin > 0.0 && x.margin < 1.0, "margin", "must lie in (0, 1)");
      e->check(x.cap > 1.0, "cap", "must exceed 1");
      e->finish();
    }
    m->check(c.model.chi > 0.0, "chi", "must be positive");
    m->check(c.model.eps >= 0.0 && c.model.eps < 1.0, "eps", "must lie in [0, 1)");
    m->check(c.model.s >= 1.0, "s", "must be >= 1");
    m->finish();
  }

  if (auto g = root.object("grid")) {
    g->get("cells", c.grid.cells);
    g->get("lengths", c.grid.lengths);
    g->get("max_cells", c.grid.max_cells);
    g->check(!c.grid.cells.empty() && c.grid.cells.size() <= 3, "cells", "needs 1 to 3 entries");
    g->check(c.grid.lengths.size() == c.grid.cells.size(), "lengths", "needs one entry per axis");
    for (std::size_t n : c.grid.cells) g->check(n >= 4, "cells", "every axis needs at least 4 cells");
    for (double L : c.grid.lengths) g->check(L > 0.0, "lengths", "must be positive");
    g->finish();
  }

  if (auto init = root.object("initial")) {
    if (auto u = init->object("u")) detail::read_initial(*u, c.initial_u);
    if (auto v = init->object("v")) detail::read_initial(*v, c.initial_v);
    init->finish();
  }

  if (auto t = root.object("time")) {
    t->get("T", c.time.T);
    t->get("sample_interval", c.time.sample_interval);
    t->get("observe_every_steps", c.time.observe_every_steps);
    t->get("snapshot_times", c.time.snapshot_times);
    t->check(c.time.T > 0.0, "T", "must be positive");
    t->check(c.time.sample_interval >= 0.0, "sample_interval", "must be nonnegative");
    for (double s : c.time.snapshot_times) t->check(s > 0.0 && s <= c.time.T, "snapshot_times", "must lie in (0, T]");
    t->finish();
  }

  if (auto s = root.object("solver")) {
    std::string scheme = "upwind";
    s->get("scheme", scheme);
    if (scheme == "upwind") c.solver.scheme = FluxScheme::upwind;
    else if (scheme == "central") c.solver.scheme = FluxScheme::central;
    else s->check(false, "scheme", "must be upwind or central");
    s->get("safety", c.solver.safety);
    s->get("v_floor", c.solver.v_floor);
    s->get("max_retries", c.solver.max_retries);
    s->get("dt_coefficient", c.solver.dt_coefficient);
    s->check(c.solver.safety > 0.0 && c.solver.safety <= 1.0, "safety", "must lie in (0, 1]");
    s->check(c.solver.v_floor > 0.0, "v_floor", "must be positive");
    s->check(c.solver.max_retries >= 0, "max_retries", "must be nonnegative");
    s->check(c.solver.dt_coefficient >= 0.0, "dt_coefficient", "must be nonnegative");
    s->finish();
  }

  if (auto k = root.object("checks")) {
    k->get("tau0_fraction", c.checks.tau0_fraction);
    k->get("mass_tolerance", c.checks.mass_tolerance);
    k->get("v_floor_slack", c.checks.v_floor_slack);
    k->get("young_tolerance", c.checks.young_tolerance);
    k->get("apriori_rel_tol", c.checks.apriori_rel_tol);
    k->get("tau", c.checks.tau);
    k->get("write_fields", c.checks.write_fields);
    k->check(c.checks.tau0_fraction > 0.0 && c.checks.tau0_fraction < 1.0, "tau0_fraction", "must lie in (0, 1)");
    k->finish();
  }

  if (auto e = root.object("eps_study")) {
    e->get("ladder", c.eps_study.ladder);
    e->get("slack", c.eps_study.slack);
    e->check(!c.eps_study.ladder.empty(), "ladder", "must not be empty");
    for (std::size_t i = 0; i < c.eps_study.ladder.size(); ++i) {
      const double x = c.eps_study.ladder[i];
      e->check(x >= 0.0 && x < 1.0, "ladder", "entries must lie in [0, 1)");
      if (i > 0) e->check(x < c.eps_study.ladder[i - 1], "ladder", "must be strictly decreasing");
    }
    e->check(c.eps_study.slack >= 1.0, "slack", "must be >= 1");
    e->finish();
  }

  if (auto r = root.object("refine")) {
    r->get("dt_coefficient", c.refine.dt_coefficient);
    r->get("observe_every_steps", c.refine.observe_every_steps);
    r->get("order_threshold", c.refine.order_threshold);
    r->check(c.refine.dt_coefficient > 0.0, "dt_coefficient", "must be positive");
    r->check(c.refine.observe_every_steps >= 1, "observe_every_steps", "must be >= 1");
    r->finish();
  }

  if (auto p = root.object("params")) {
    p->get("n", c.params.n);
    p->get("p_samples", c.params.p_samples);
    p->check(c.params.n >= 1, "n", "must be >= 1");
    p->check(c.params.p_samples >= 2, "p_samples", "must be >= 2");
    p->finish();
  }

  if (auto o = root.object("oracle")) {
    o->get("power_levels", c.oracle.power_levels);
    o->get("power_r", c.oracle.power_r);
    o->get("square_trials", c.oracle.square_trials);
    o->get("ode_cases", c.oracle.ode_cases);
    o->get("ode_steps", c.oracle.ode_steps);
    o->get("mean_p", c.oracle.mean_p);
    o->get("riesz_probes", c.oracle.riesz_probes);
    if (auto e = o->object("log_poincare")) detail::read_ensemble(*e, c.oracle.log_poincare);
    if (auto e = o->object("mean_poincare")) detail::read_ensemble(*e, c.oracle.mean_poincare);
    o->check(c.oracle.power_levels.size() >= 3, "power_levels", "needs at least three levels");
    o->check(c.oracle.power_r > 0.0, "power_r", "must be positive");
    o->check(c.oracle.mean_p >= 1.0, "mean_p", "must be >= 1");
    o->check(c.oracle.ode_steps >= 10, "ode_steps", "must be >= 10");
    o->finish();
  }
  root.finish();

  // Cross-field checks.
  if (c.model.exponents.automatic == false) {
    const auto& x = c.model.exponents;
    if (!(x.p > 0.0 && x.p < 1.0)) problems.push_back("model.exponents.p: must lie in (0, 1)");
    if (!(x.q > 0.0 && x.q < 1.0)) problems.push_back("model.exponents.q: must lie in (0, 1)");
    if (!(x.r > 1.0)) problems.push_back("model.exponents.r: must exceed 1");
  }
  if (c.mode == Mode::refine_study && c.grid.cells.size() > 0) {
    std::size_t total = 1;
    for (std::size_t n : c.grid.cells) total *= 4 * n;
    if (total > c.grid.max_cells) problems.push_back("grid.cells: the finest refinement level exceeds grid.max_cells");
  }
  if (c.mode == Mode::entropy_check)
    for (std::size_t n : c.grid.cells)
      if (n % 2 != 0 || n < 8) problems.push_back("grid.cells: entropy-check halves every axis, so counts must be even and >= 8");
  const bool runs_simulator = c.mode == Mode::simulate || c.mode == Mode::entropy_check ||
                              c.mode == Mode::eps_study || c.mode == Mode::refine_study;
  if (runs_simulator && c.model.exponents.automatic && problems.empty()) {
    const int n = std::max(static_cast<int>(c.grid.cells.size()), 2);
    try {
      select_exponents(c.model.chi, n, c.model.exponents.margin, c.model.exponents.cap);
    } catch (const std::exception& e) {
      problems.push_back(std::string("model.chi: no admissible exponents: ") + e.what());
    }
  }
  if (!problems.empty()) throw ConfigError(problems);
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text, std::optional<Mode> mode_override = std::nullopt) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("<root>: malformed JSON: ") + e.what()});
  }
  return parse_config(doc, mode_override);
}

/// Echo of the effective configuration (defaults filled in) for manifests.
inline json config_echo(const ExperimentConfig& c) {
  auto initial = [](const InitialSpec& s) {
    json j;
    const char* kinds[] = {"constant", "gaussian", "cosine", "random_cosine"};
    j["kind"] = kinds[static_cast<int>(s.kind)];
    switch (s.kind) {
      case InitialKind::constant:
        j["value"] = s.value;
        break;
      case InitialKind::gaussian:
        j["background"] = s.background;
        j["amplitude"] = s.amplitude;
        j["width"] = s.width;
        j["center"] = s.center;
        break;
      case InitialKind::cosine: {
        j["background"] = s.background;
        j["amplitude"] = s.amplitude;
        json modes = json::array();
        for (const auto& k : s.modes) modes.push_back({k[0], k[1], k[2]});
        j["modes"] = modes;
        break;
      }
      case InitialKind::random_cosine:
        j["background"] = s.background;
        j["amplitude"] = s.amplitude;
        j["cutoff"] = s.cutoff;
        j["seed"] = s.seed;
        break;
    }
    return j;
  };
  auto ensemble = [](const EnsembleConfig& e) {
    return json{{"samples", e.spec.samples},
                {"cutoff", e.spec.cutoff},
                {"amplitude_lo", e.spec.amplitude_lo},
                {"amplitude_hi", e.spec.amplitude_hi},
                {"floor", e.spec.floor},
                {"delta", e.spec.delta},
                {"eta", e.spec.eta},
                {"max_regenerations", e.spec.max_regenerations},
                {"selector", e.spec.selector == oracles::BSelector::threshold ? "threshold" : "random_mask"},
                {"cells", e.cells}};
  };
  json j;
  j["mode"] = mode_name(c.mode);
  j["seed"] = c.seed;
  const auto& x = c.model.exponents;
  json ex = {{"select", x.automatic ? "auto" : "manual"}, {"margin", x.margin}, {"cap", x.cap}};
  if (!x.automatic) {
    ex["p"] = x.p;
    ex["q"] = x.q;
    ex["r"] = x.r;
  }
  j["model"] = {{"chi", c.model.chi}, {"eps", c.model.eps}, {"s", c.model.s}, {"exponents", ex}};
  j["grid"] = {{"cells", c.grid.cells}, {"lengths", c.grid.lengths}, {"max_cells", c.grid.max_cells}};
  j["initial"] = {{"u", initial(c.initial_u)}, {"v", initial(c.initial_v)}};
  j["time"] = {{"T", c.time.T},
               {"sample_interval", c.time.effective_interval()},
               {"observe_every_steps", c.time.observe_every_steps},
               {"snapshot_times", c.time.snapshot_times}};
  j["solver"] = {{"scheme", c.solver.scheme == FluxScheme::upwind ? "upwind" : "central"},
                 {"safety", c.solver.safety},
                 {"v_floor", c.solver.v_floor},
                 {"max_retries", c.solver.max_retries},
                 {"dt_coefficient", c.solver.dt_coefficient}};
  j["checks"] = {{"tau0_fraction", c.checks.tau0_fraction}, {"mass_tolerance", c.checks.mass_tolerance},
                 {"v_floor_slack", c.checks.v_floor_slack},   {"young_tolerance", c.checks.young_tolerance},
                 {"apriori_rel_tol", c.checks.apriori_rel_tol}, {"tau", c.checks.tau},
                 {"write_fields", c.checks.write_fields}};
  switch (c.mode) {
    case Mode::eps_study:
      j["eps_study"] = {{"ladder", c.eps_study.ladder}, {"slack", c.eps_study.slack}};
      break;
    case Mode::refine_study:
      j["refine"] = {{"dt_coefficient", c.refine.dt_coefficient},
                     {"observe_every_steps", c.refine.observe_every_steps},
                     {"order_threshold", c.refine.order_threshold}};
      break;
    case Mode::params:
      j["params"] = {{"n", c.params.n}, {"p_samples", c.params.p_samples}};
      break;
    case Mode::oracle:
      j["oracle"] = {{"power_levels", c.oracle.power_levels}, {"power_r", c.oracle.power_r},
                     {"square_trials", c.oracle.square_trials}, {"ode_cases", c.oracle.ode_cases},
                     {"ode_steps", c.oracle.ode_steps},         {"mean_p", c.oracle.mean_p},
                     {"riesz_probes", c.oracle.riesz_probes},   {"log_poincare", ensemble(c.oracle.log_poincare)},
                     {"mean_poincare", ensemble(c.oracle.mean_poincare)}};
      break;
    default:
      break;
  }
  return j;
}

}  // namespace logsense

#endif  // LOGSENSE_CONFIG_HPP_
