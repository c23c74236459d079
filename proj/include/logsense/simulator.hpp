#ifndef LOGSENSE_SIMULATOR_HPP_
#define LOGSENSE_SIMULATOR_HPP_

// Explicit finite-volume integrator for the regularized system
//
//   u_t = Δu − χ ∇·(u/v ∇v)
//   v_t = Δv − v + u/(1 + εu)
//
// with zero-flux boundaries.  The chemotactic flux lives on cell faces, so
// ∫u is conserved to round-off by telescoping.  Steps that would make u
// negative or v non-positive are rejected and retried with half the step.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "logsense/grid.hpp"
#include "logsense/params.hpp"

namespace logsense {

enum class FluxScheme { upwind, central };

struct SimConfig {
  double safety = 0.4;
  double v_floor = 1e-12;
  int max_retries = 40;
  FluxScheme scheme = FluxScheme::upwind;
  /// When positive, every step uses this dt (clipped to sample times)
  /// instead of the adaptive CFL step.  It must not exceed cfl_dt.
  double fixed_dt = 0.0;
};

struct SimState {
  double t = 0.0;
  Field u;
  Field v;
  ModelParams params;
};

struct StepReport {
  double t = 0.0;  // time at the end of the step
  double dt_used = 0.0;
  double max_u = 0.0;
  double min_v = 0.0;
  double cfl_bound = 0.0;
  bool positivity_ok = true;
  int retries = 0;
};

/// v dropped below the configured floor, so u/v ∇v is not computable.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A step could not be completed while keeping u ≥ 0 and v > 0.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

inline void check_state(const SimState& s) {
  if (!s.u.grid.same_shape(s.v.grid)) throw GridError("state: u and v grids differ");
  if (!s.u.all_finite() || !s.v.all_finite()) throw GridError("state: non-finite values");
  if (s.u.min() < 0.0) throw GridError("state: u must be nonnegative");
  if (!(s.v.min() > 0.0)) throw GridError("state: v must be strictly positive");
}

/// χ u_face / v_face · ∂v on interior faces, zero on boundary faces.
/// u_face is the upwind cell value (or the arithmetic mean for the central scheme).
inline FaceArrays chemotactic_flux(const SimState& s, const SimConfig& cfg = {}) {
  if (s.v.min() < cfg.v_floor)
    throw SingularityError("chemotactic_flux: min v below floor at t=" + std::to_string(s.t));
  const Grid& g = s.u.grid;
  const double chi = s.params.chi;
  const auto& u = s.u.values;
  const auto& v = s.v.values;
  FaceArrays flux(g);
  for (int a = 0; a < g.dim; ++a) {
    const double inv_h = 1.0 / g.h[a];
    auto& f = flux.axis[a];
    detail::for_each_interior_face(g, a, [&](std::size_t lo, std::size_t hi, std::size_t face) {
      const double velocity = chi * (v[hi] - v[lo]) * inv_h / (0.5 * (v[lo] + v[hi]));
      double u_face;
      if (cfg.scheme == FluxScheme::central) u_face = 0.5 * (u[lo] + u[hi]);
      else u_face = velocity >= 0.0 ? u[lo] : u[hi];
      f[face] = velocity * u_face;
    });
  }
  return flux;
}

/// max over faces of χ |∂v| / v_face.
inline double max_drift_speed(const SimState& s) {
  const Grid& g = s.u.grid;
  const auto& v = s.v.values;
  double m = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    const double inv_h = 1.0 / g.h[a];
    detail::for_each_interior_face(g, a, [&](std::size_t lo, std::size_t hi, std::size_t) {
      m = std::max(m, std::abs(v[hi] - v[lo]) * inv_h / (0.5 * (v[lo] + v[hi])));
    });
  }
  return s.params.chi * m;
}

/// σ · min(h²/(2·dim), h/(2·max drift), 1).
inline double cfl_dt(const SimState& s, const SimConfig& cfg = {}) {
  const Grid& g = s.u.grid;
  const double h = g.min_spacing();
  double bound = std::min(h * h / (2.0 * g.dim), 1.0);
  const double drift = max_drift_speed(s);
  if (drift > 0.0) bound = std::min(bound, h / (2.0 * drift));
  return cfg.safety * bound;
}

struct StepOutcome {
  SimState state;
  StepReport report;
};

/// One explicit Euler step.  On a positivity violation the returned state is
/// the input state and report.positivity_ok is false.
inline StepOutcome step(const SimState& s, double dt, const SimConfig& cfg = {}) {
  const double bound = cfl_dt(s, cfg);
  if (!(dt > 0.0) || dt > bound * (1.0 + 1e-9))
    throw DomainError("step: dt=" + std::to_string(dt) + " outside (0, cfl_dt=" + std::to_string(bound) + "]");
  const Grid& g = s.u.grid;
  const double eps = s.params.eps;

  // Total face flux J = F_chemo − ∇u, so u' = u − dt ∇·J.
  FaceArrays total = chemotactic_flux(s, cfg);
  const FaceArrays grad_u = face_gradient(s.u);
  for (int a = 0; a < g.dim; ++a)
    for (std::size_t i = 0; i < total.axis[a].size(); ++i) total.axis[a][i] -= grad_u.axis[a][i];
  const Field div = face_divergence(total);
  const Field lap_v = laplacian_neumann(s.v);

  StepOutcome out{s, {}};
  out.report.cfl_bound = bound;
  out.report.dt_used = dt;
  auto& u1 = out.state.u.values;
  auto& v1 = out.state.v.values;
  bool ok = true;
  for (std::size_t i = 0; i < u1.size(); ++i) {
    const double u0 = s.u.values[i];
    const double v0 = s.v.values[i];
    u1[i] = u0 - dt * div.values[i];
    v1[i] = v0 + dt * (lap_v.values[i] - v0 + u0 / (1.0 + eps * u0));
    if (!(u1[i] >= 0.0) || !(v1[i] > 0.0) || !std::isfinite(u1[i]) || !std::isfinite(v1[i])) ok = false;
  }
  if (!ok) {
    out.state = s;
    out.report.positivity_ok = false;
    out.report.t = s.t;
    out.report.max_u = s.u.max();
    out.report.min_v = s.v.min();
    return out;
  }
  out.state.t = s.t + dt;
  out.report.t = out.state.t;
  out.report.max_u = out.state.u.max();
  out.report.min_v = out.state.v.min();
  return out;
}

struct RunOptions {
  /// Times at which the observer must be invoked; they are hit exactly.
  std::vector<double> sample_times;
  /// Additionally observe after every k-th accepted step (0 disables).
  std::size_t observe_every_steps = 0;
};

struct RunResult {
  SimState final_state;
  std::vector<StepReport> reports;
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

using Observer = std::function<void(const SimState&)>;

/// Advances `initial` to exactly T.  The observer sees t = 0, every requested
/// sample time in (0, T], T itself, and optionally every k-th step, always in
/// increasing order.
inline RunResult run(const SimState& initial, double T, const Observer& observer, const RunOptions& opts = {},
                     const SimConfig& cfg = {}) {
  check_state(initial);
  if (!(T >= 0.0) || !std::isfinite(T)) throw DomainError("run: T must be finite and nonnegative");
  std::vector<double> targets;
  for (double ts : opts.sample_times)
    if (ts > initial.t && ts < initial.t + T) targets.push_back(ts);
  targets.push_back(initial.t + T);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  RunResult res{initial, {}, 0, 0};
  SimState& s = res.final_state;
  if (observer) observer(s);
  if (T == 0.0) return res;

  std::size_t next = 0;
  double last_observed = s.t;
  while (next < targets.size()) {
    const double target = targets[next];
    double dt = cfg.fixed_dt > 0.0 ? cfg.fixed_dt : cfl_dt(s, cfg);
    bool hits = false;
    if (s.t + dt * (1.0 + 1e-9) >= target) {
      dt = target - s.t;
      hits = true;
    }
    int retries = 0;
    StepOutcome o = step(s, dt, cfg);
    while (!o.report.positivity_ok) {
      ++res.rejected;
      if (++retries > cfg.max_retries)
        throw StepFailure("run: positivity could not be preserved after " + std::to_string(cfg.max_retries) +
                              " step halvings at t=" + std::to_string(s.t),
                          s.t);
      dt *= 0.5;
      hits = false;
      o = step(s, dt, cfg);
    }
    o.report.retries = retries;
    s = std::move(o.state);
    if (hits) {
      s.t = target;
      o.report.t = target;
      ++next;
    }
    res.reports.push_back(o.report);
    ++res.steps;
    const bool periodic = opts.observe_every_steps > 0 && res.steps % opts.observe_every_steps == 0;
    if (observer && (hits || periodic) && s.t > last_observed) {
      observer(s);
      last_observed = s.t;
    }
  }
  return res;
}

inline SimState make_state(const Field& u0, const Field& v0, const ModelParams& params) {
  SimState s{0.0, u0, v0, params};
  s.u.sign = Sign::nonnegative;
  s.v.sign = Sign::strictly_positive;
  check_state(s);
  return s;
}

}  // namespace logsense

#endif  // LOGSENSE_SIMULATOR_HPP_
