#ifndef LOGSENSE_DIAGNOSTICS_HPP_
#define LOGSENSE_DIAGNOSTICS_HPP_

// Functionals and weak-form residuals evaluated along trajectories.
//
// Gradients of power fields are formed the direct way: cell values are
// raised to p/2 (or q/2) first and then differenced across faces.  Face
// weights such as v^{q/2} use the arithmetic mean of the two cells.  Space
// integrals are midpoint sums, time integrals trapezoid sums over the
// observed samples.
//
// DiagnosticsCollector is a streaming observer, so trajectories never need
// to be stored; the trajectory overloads below simply replay snapshots.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "logsense/grid.hpp"
#include "logsense/params.hpp"
#include "logsense/simulator.hpp"
#include "logsense/test_function.hpp"

namespace logsense {

using Trajectory = std::vector<SimState>;

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Spatial functionals of one snapshot.  Undefined quantities are NaN.
struct SnapshotFunctionals {
  double t = 0.0;
  double mass = 0.0;                 // ∫u
  double v_min = 0.0;
  double v_Lr = 0.0;                 // ∫v^r
  double grad_v_Ls = 0.0;            // ∫|∇v|^s
  double entropy = 0.0;              // ∫u^p v^q
  double D1 = 0.0;                   // ∫v^q |∇u^{p/2}|²
  double D2 = 0.0;                   // ∫|u^{p/2}∇v^{q/2} − κ v^{q/2}∇u^{p/2}|²
  double grad_up = 0.0;              // ∫|∇u^{p/2}|²
  double reaction_minus = 0.0;       // ∫u^p v^q
  double reaction_plus = 0.0;        // ∫u^{p+1}v^{q−1}/(1+εu)
  double reaction_plus_unreg = 0.0;  // ∫u^{p+1}v^{q−1}
  double u_Lr = 0.0;                 // ∫u^r
  double v_young = 0.0;              // ∫v^{(1−q)r/(p+1−r)}
  double grad_vq = 0.0;              // ∫|∇v^{q/2}|²
  double grad_sqrt_v = 0.0;          // ∫|∇v^{1/2}|²
  double vq = 0.0;                   // ∫v^q
  double log_u = 0.0;                // ∫ln u
  double grad_log_u = 0.0;           // ∫|∇ ln u|²
  double boundary_min_upq = 0.0;     // min over boundary cells of u^p v^q
  double young_violation = 0.0;      // max over cells of (u^r − X − Y)/(X + Y)
};

struct FunctionalColumn {
  const char* name;
  double SnapshotFunctionals::*member;
};

inline const std::vector<FunctionalColumn>& functional_columns() {
  static const std::vector<FunctionalColumn> cols = {
      {"mass", &SnapshotFunctionals::mass},
      {"v_min", &SnapshotFunctionals::v_min},
      {"v_Lr", &SnapshotFunctionals::v_Lr},
      {"grad_v_Ls", &SnapshotFunctionals::grad_v_Ls},
      {"entropy", &SnapshotFunctionals::entropy},
      {"D1", &SnapshotFunctionals::D1},
      {"D2", &SnapshotFunctionals::D2},
      {"grad_up", &SnapshotFunctionals::grad_up},
      {"reaction_minus", &SnapshotFunctionals::reaction_minus},
      {"reaction_plus", &SnapshotFunctionals::reaction_plus},
      {"reaction_plus_unreg", &SnapshotFunctionals::reaction_plus_unreg},
      {"u_Lr", &SnapshotFunctionals::u_Lr},
      {"v_young", &SnapshotFunctionals::v_young},
      {"grad_vq", &SnapshotFunctionals::grad_vq},
      {"grad_sqrt_v", &SnapshotFunctionals::grad_sqrt_v},
      {"vq", &SnapshotFunctionals::vq},
      {"log_u", &SnapshotFunctionals::log_u},
      {"grad_log_u", &SnapshotFunctionals::grad_log_u},
      {"boundary_min_upq", &SnapshotFunctionals::boundary_min_upq},
      {"young_violation", &SnapshotFunctionals::young_violation},
  };
  return cols;
}

/// Time-integrated quantities written as acc_<name> columns.
inline const std::vector<FunctionalColumn>& accumulated_columns() {
  static const std::vector<FunctionalColumn> cols = {
      {"D1", &SnapshotFunctionals::D1},
      {"D2", &SnapshotFunctionals::D2},
      {"grad_up", &SnapshotFunctionals::grad_up},
      {"reaction_plus", &SnapshotFunctionals::reaction_plus},
      {"reaction_plus_unreg", &SnapshotFunctionals::reaction_plus_unreg},
      {"reaction_minus", &SnapshotFunctionals::reaction_minus},
      {"u_Lr", &SnapshotFunctionals::u_Lr},
      {"v_young", &SnapshotFunctionals::v_young},
      {"grad_vq", &SnapshotFunctionals::grad_vq},
      {"vq", &SnapshotFunctionals::vq},
      {"grad_log_u", &SnapshotFunctionals::grad_log_u},
  };
  return cols;
}

struct DiagnosticsRecord {
  ModelParams params;
  double domain_volume = 0.0;
  double cell_h = 0.0;
  std::vector<SnapshotFunctionals> samples;
  /// accumulated[k] holds ∫₀^{t_k} of every functional (trapezoid).
  std::vector<SnapshotFunctionals> accumulated;
  /// ∫ ln(v(t)/v(τ₀)); NaN before τ₀.
  std::vector<double> log_v_ratio;
  std::size_t tau0_index = 0;
  bool tau0_set = false;

  std::size_t size() const { return samples.size(); }
  std::vector<double> series(double SnapshotFunctionals::*m) const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.*m);
    return out;
  }
  double accumulated_final(double SnapshotFunctionals::*m) const {
    return accumulated.empty() ? 0.0 : accumulated.back().*m;
  }
  double min_v0() const { return samples.front().v_min; }
  double mass0() const { return samples.front().mass; }
};

/// The integrands of the weak identities, either at one time or integrated in time.
struct WeakFormTerms {
  double E_phi_t = 0.0;          // ∫ u^p v^q φ_t
  double D1_phi = 0.0;           // ∫ v^q |∇u^{p/2}|² φ
  double D2_phi = 0.0;           // ∫ |u^{p/2}∇v^{q/2} − κ v^{q/2}∇u^{p/2}|² φ
  double cross_grad_phi = 0.0;   // ∫ u^{p/2} v^q ∇u^{p/2}·∇φ
  double E_lap_phi = 0.0;        // ∫ u^p v^q Δφ
  double E_phi = 0.0;            // ∫ u^p v^q φ
  double reaction_eps_phi = 0.0; // ∫ u^{p+1}v^{q−1}/(1+εu) φ
  double reaction_phi = 0.0;     // ∫ u^{p+1}v^{q−1} φ
  double v_phi_t = 0.0;          // ∫ v φ_t
  double grad_v_grad_phi = 0.0;  // ∫ ∇v·∇φ
  double v_phi = 0.0;            // ∫ v φ
  double source_eps_phi = 0.0;   // ∫ u/(1+εu) φ
  double source_phi = 0.0;       // ∫ u φ
  // Spatial integrals ∫u^p v^q ψ and ∫vψ without the time factor; not
  // accumulated, used for the φ_t terms.
  double E_psi = 0.0;
  double v_psi = 0.0;

  template <class Fn>
  void zip(const WeakFormTerms& o, Fn&& fn) {
    fn(E_phi_t, o.E_phi_t); fn(D1_phi, o.D1_phi); fn(D2_phi, o.D2_phi);
    fn(cross_grad_phi, o.cross_grad_phi); fn(E_lap_phi, o.E_lap_phi); fn(E_phi, o.E_phi);
    fn(reaction_eps_phi, o.reaction_eps_phi); fn(reaction_phi, o.reaction_phi);
    fn(v_phi_t, o.v_phi_t); fn(grad_v_grad_phi, o.grad_v_grad_phi); fn(v_phi, o.v_phi);
    fn(source_eps_phi, o.source_eps_phi); fn(source_phi, o.source_phi);
  }
};

struct WeakFormTotals {
  std::string name;
  WeakFormTerms integrated;
  double E_phi_start = 0.0, E_phi_end = 0.0;
  double v_phi_start = 0.0, v_phi_end = 0.0;
  double t_start = 0.0, t_end = 0.0;
  double max_interval = 0.0;
  std::size_t samples = 0;
};

namespace detail {

struct PowerFields {
  std::vector<double> up2, vq2;  // u^{p/2}, v^{q/2}
};

inline double safe_pow(double x, double e) { return x > 0.0 ? std::pow(x, e) : (e > 0.0 ? 0.0 : kNaN); }

}  // namespace detail

/// Evaluates all per-snapshot functionals and, for each test function, the
/// weak-form integrands at time t.
inline SnapshotFunctionals evaluate_snapshot(double t, const Field& u, const Field& v, const ModelParams& m,
                                             std::span<const DiscreteTestFunction> tests = {},
                                             std::vector<WeakFormTerms>* weak = nullptr) {
  const Grid& g = u.grid;
  if (!g.same_shape(v.grid)) throw GridError("evaluate_snapshot: grid mismatch");
  if (!(v.min() > 0.0)) throw PreconditionError("evaluate_snapshot: v must be strictly positive");
  const std::size_t n = g.size();
  const double vol = g.cell_volume();
  const double p = m.p, q = m.q, eps = m.eps;
  const double kappa = ((1.0 - p) * m.chi + 2.0 * q) / (2.0 * (p * m.chi + 1.0 - q));
  const double young_exp = (p + 1.0 - m.r) > 0.0 ? (1.0 - q) * m.r / (p + 1.0 - m.r) : kNaN;

  SnapshotFunctionals f;
  f.t = t;
  f.v_min = v.min();

  std::vector<double> up2(n), vq2(n), logu(n), sqrtv(n);
  bool u_positive = true;
  double young_worst = -std::numeric_limits<double>::infinity();
  double bmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = u.values[i], vi = v.values[i];
    up2[i] = detail::safe_pow(ui, 0.5 * p);
    vq2[i] = std::pow(vi, 0.5 * q);
    sqrtv[i] = std::sqrt(vi);
    const double E = up2[i] * up2[i] * vq2[i] * vq2[i];
    const double vq = vq2[i] * vq2[i];
    const double rp = ui * E / vi;  // u^{p+1} v^{q−1}
    f.mass += ui;
    f.entropy += E;
    f.vq += vq;
    f.reaction_plus_unreg += rp;
    f.reaction_plus += rp / (1.0 + eps * ui);
    const double ur = detail::safe_pow(ui, m.r);
    f.u_Lr += ur;
    f.v_Lr += std::pow(vi, m.r);
    if (std::isfinite(young_exp)) {
      const double vy = std::pow(vi, young_exp);
      f.v_young += vy;
      const double rhs = rp + vy;
      young_worst = std::max(young_worst, (ur - rhs) / rhs);
    }
    if (ui > 0.0) {
      logu[i] = std::log(ui);
      f.log_u += logu[i];
    } else {
      u_positive = false;
    }
    if (is_boundary_cell(g, i)) bmin = std::min(bmin, E);
  }
  f.reaction_minus = f.entropy;
  f.young_violation = std::isfinite(young_exp) ? young_worst : kNaN;
  if (!std::isfinite(young_exp)) f.v_young = kNaN;
  f.boundary_min_upq = bmin;

  // |∇v|^s from cell-centered gradients.
  {
    const Field gn = cell_gradient_norm(v);
    for (double x : gn.values) f.grad_v_Ls += std::pow(x, m.s);
  }

  if (weak) weak->assign(tests.size(), WeakFormTerms{});

  for (int a = 0; a < g.dim; ++a) {
    const double inv_h = 1.0 / g.h[a];
    detail::for_each_interior_face(g, a, [&](std::size_t lo, std::size_t hi, std::size_t face) {
      const double gu = (up2[hi] - up2[lo]) * inv_h;
      const double gv = (vq2[hi] - vq2[lo]) * inv_h;
      const double up2_f = 0.5 * (up2[lo] + up2[hi]);
      const double vq2_f = 0.5 * (vq2[lo] + vq2[hi]);
      const double A = vq2_f * gu;  // v^{q/2} ∇u^{p/2}
      const double B = up2_f * gv;  // u^{p/2} ∇v^{q/2}
      const double sq = (B - kappa * A) * (B - kappa * A);
      f.D1 += A * A;
      f.D2 += sq;
      f.grad_up += gu * gu;
      f.grad_vq += gv * gv;
      const double gs = (sqrtv[hi] - sqrtv[lo]) * inv_h;
      f.grad_sqrt_v += gs * gs;
      if (u_positive) {
        const double gl = (logu[hi] - logu[lo]) * inv_h;
        f.grad_log_u += gl * gl;
      }
      if (weak) {
        const double cross_w = 0.5 * (up2[lo] * vq2[lo] * vq2[lo] + up2[hi] * vq2[hi] * vq2[hi]);
        const double gvv = (v.values[hi] - v.values[lo]) * inv_h;
        for (std::size_t k = 0; k < tests.size(); ++k) {
          const auto& tf = tests[k];
          auto& w = (*weak)[k];
          const double psi_f = tf.psi_faces.axis[a][face];
          const double gpsi = tf.grad_psi.axis[a][face];
          w.D1_phi += A * A * psi_f;
          w.D2_phi += sq * psi_f;
          w.cross_grad_phi += cross_w * gu * gpsi;
          w.grad_v_grad_phi += gvv * gpsi;
        }
      }
    });
  }

  if (weak) {
    for (std::size_t k = 0; k < tests.size(); ++k) {
      const auto& tf = tests[k];
      auto& w = (*weak)[k];
      const double zeta = tf.time.value(t);
      const double dzeta = tf.time.derivative(t);
      double E_psi = 0.0, E_lap = 0.0, rp_eps = 0.0, rp = 0.0, v_psi = 0.0, s_eps = 0.0, s0 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double ui = u.values[i], vi = v.values[i];
        const double E = up2[i] * up2[i] * vq2[i] * vq2[i];
        const double ps = tf.psi.values[i];
        const double r = ui * E / vi;
        E_psi += E * ps;
        E_lap += E * tf.lap_psi.values[i];
        rp += r * ps;
        rp_eps += r / (1.0 + eps * ui) * ps;
        v_psi += vi * ps;
        s0 += ui * ps;
        s_eps += ui / (1.0 + eps * ui) * ps;
      }
      w.D1_phi *= zeta * vol;
      w.D2_phi *= zeta * vol;
      w.cross_grad_phi *= zeta * vol;
      w.grad_v_grad_phi *= zeta * vol;
      w.E_psi = E_psi * vol;
      w.v_psi = v_psi * vol;
      w.E_phi_t = E_psi * dzeta * vol;
      w.E_phi = E_psi * zeta * vol;
      w.E_lap_phi = E_lap * zeta * vol;
      w.reaction_phi = rp * zeta * vol;
      w.reaction_eps_phi = rp_eps * zeta * vol;
      w.v_phi_t = v_psi * dzeta * vol;
      w.v_phi = v_psi * zeta * vol;
      w.source_phi = s0 * zeta * vol;
      w.source_eps_phi = s_eps * zeta * vol;
    }
  }

  f.mass *= vol;
  f.entropy *= vol;
  f.reaction_minus *= vol;
  f.vq *= vol;
  f.reaction_plus_unreg *= vol;
  f.reaction_plus *= vol;
  f.u_Lr *= vol;
  f.v_Lr *= vol;
  f.v_young *= vol;
  f.grad_v_Ls *= vol;
  f.D1 *= vol;
  f.D2 *= vol;
  f.grad_up *= vol;
  f.grad_vq *= vol;
  f.grad_sqrt_v *= vol;
  f.log_u = u_positive ? f.log_u * vol : kNaN;
  f.grad_log_u = u_positive ? f.grad_log_u * vol : kNaN;
  return f;
}

struct DiagnosticsOptions {
  /// Time horizon of the run; τ₀ for the log-mass check is the first sample
  /// at or after tau0_fraction · horizon (and after the initial sample).
  double horizon = 0.0;
  double tau0_fraction = 0.05;
};

/// Streaming observer that builds a DiagnosticsRecord and weak-form totals.
class DiagnosticsCollector {
 public:
  explicit DiagnosticsCollector(const ModelParams& params, DiagnosticsOptions opts = {}) : opts_(opts) {
    record_.params = params;
  }

  /// Registers a test function; must be called before the first observation.
  std::size_t add_test_function(const TestFunction& tf, const Grid& g) {
    if (!record_.samples.empty()) throw PreconditionError("add_test_function after observations started");
    tests_.push_back(discretize(tf, g));
    WeakFormTotals tot;
    tot.name = tf.name;
    totals_.push_back(tot);
    return tests_.size() - 1;
  }

  void observe(const SimState& s) { observe(s.t, s.u, s.v); }

  void observe(double t, const Field& u, const Field& v) {
    if (!record_.samples.empty() && !(t > record_.samples.back().t))
      throw PreconditionError("observe: sample times must increase");
    std::vector<WeakFormTerms> weak;
    SnapshotFunctionals f = evaluate_snapshot(t, u, v, record_.params, tests_, &weak);

    if (record_.samples.empty()) {
      record_.domain_volume = u.grid.volume();
      record_.cell_h = u.grid.min_spacing();
      record_.accumulated.push_back(zero_like(t));
      for (std::size_t k = 0; k < totals_.size(); ++k) {
        totals_[k].t_start = totals_[k].t_end = t;
        totals_[k].E_phi_start = totals_[k].E_phi_end = weak[k].E_phi;
        totals_[k].v_phi_start = totals_[k].v_phi_end = weak[k].v_phi;
        totals_[k].samples = 1;
      }
    } else {
      const SnapshotFunctionals& prev = record_.samples.back();
      const double dt = t - prev.t;
      SnapshotFunctionals acc = record_.accumulated.back();
      acc.t = t;
      for (const auto& col : functional_columns())
        acc.*(col.member) += 0.5 * dt * (prev.*(col.member) + f.*(col.member));
      record_.accumulated.push_back(acc);
      for (std::size_t k = 0; k < totals_.size(); ++k) {
        auto& tot = totals_[k];
        WeakFormTerms step = weak[k];
        step.zip(last_weak_[k], [&](double& now, double before) { now = 0.5 * dt * (now + before); });
        // φ_t terms: trapezoid in the spatial integral, exact in ζ, so that
        // they telescope against the endpoint terms when u, v are steady.
        const double dzeta = tests_[k].time.value(t) - tests_[k].time.value(prev.t);
        step.E_phi_t = 0.5 * (weak[k].E_psi + last_weak_[k].E_psi) * dzeta;
        step.v_phi_t = 0.5 * (weak[k].v_psi + last_weak_[k].v_psi) * dzeta;
        tot.integrated.zip(step, [](double& sum, double inc) { sum += inc; });
        tot.t_end = t;
        tot.E_phi_end = weak[k].E_phi;
        tot.v_phi_end = weak[k].v_phi;
        tot.max_interval = std::max(tot.max_interval, dt);
        ++tot.samples;
      }
    }

    // Log-mass window anchor.
    const bool after_start = !record_.samples.empty();
    if (!record_.tau0_set && after_start && t >= opts_.tau0_fraction * opts_.horizon) {
      record_.tau0_set = true;
      record_.tau0_index = record_.samples.size();
      v_tau0_ = v;
    }
    if (record_.tau0_set) {
      double s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) s += std::log(v.values[i] / v_tau0_.values[i]);
      record_.log_v_ratio.push_back(s * v.grid.cell_volume());
    } else {
      record_.log_v_ratio.push_back(kNaN);
    }

    record_.samples.push_back(f);
    last_weak_ = std::move(weak);
  }

  const DiagnosticsRecord& record() const { return record_; }
  const WeakFormTotals& weak(std::size_t k) const { return totals_.at(k); }
  std::size_t test_function_count() const { return tests_.size(); }

 private:
  static SnapshotFunctionals zero_like(double t) {
    SnapshotFunctionals z;
    for (const auto& col : functional_columns()) z.*(col.member) = 0.0;
    z.t = t;
    return z;
  }

  DiagnosticsOptions opts_;
  DiagnosticsRecord record_;
  std::vector<DiscreteTestFunction> tests_;
  std::vector<WeakFormTotals> totals_;
  std::vector<WeakFormTerms> last_weak_;
  Field v_tau0_;
};

inline DiagnosticsRecord collect(const Trajectory& traj, const ModelParams& params, DiagnosticsOptions opts = {}) {
  if (traj.empty()) throw PreconditionError("collect: empty trajectory");
  if (opts.horizon == 0.0) opts.horizon = traj.back().t - traj.front().t;
  DiagnosticsCollector c(params, opts);
  for (const auto& s : traj) c.observe(s);
  return c.record();
}

inline WeakFormTotals weak_form_totals(const Trajectory& traj, const ModelParams& params, const TestFunction& tf) {
  if (traj.empty()) throw PreconditionError("weak_form_totals: empty trajectory");
  DiagnosticsCollector c(params);
  c.add_test_function(tf, traj.front().u.grid);
  for (const auto& s : traj) c.observe(s);
  return c.weak(0);
}

/// Signed defect of a weak identity together with the magnitude of its terms.
struct IdentityResidual {
  double lhs = 0.0;
  double rhs = 0.0;
  double signed_value = 0.0;
  double scale = 0.0;  // Σ |individual terms|
  double residual() const { return std::abs(signed_value); }
};

inline void require_sampling(const WeakFormTotals& tot, double max_interval) {
  if (tot.samples < 2) throw PreconditionError("weak residual: at least two samples are required");
  if (tot.max_interval > max_interval * (1.0 + 1e-12))
    throw PreconditionError("weak residual: sampling interval " + std::to_string(tot.max_interval) +
                            " exceeds allowed " + std::to_string(max_interval));
}

namespace detail {

// Right-hand side of the entropy identity; `reaction` selects the
// regularized (identity) or unregularized (supersolution) source term.
inline IdentityResidual entropy_balance(const WeakFormTotals& tot, const ModelParams& m, bool regularized) {
  const EntropyCoefficients c = entropy_coefficients(m.p, m.q, m.chi);
  const auto& I = tot.integrated;
  const double pcq = m.p * m.chi / m.q;
  const double terms_rhs[] = {
      c.c1 * I.D1_phi,
      c.c2 * I.D2_phi,
      -2.0 * pcq * I.cross_grad_phi,
      (1.0 - pcq) * I.E_lap_phi,
      -m.q * I.E_phi,
      m.q * (regularized ? I.reaction_eps_phi : I.reaction_phi),
  };
  const double terms_lhs[] = {-I.E_phi_t, tot.E_phi_end, -tot.E_phi_start};
  IdentityResidual r;
  for (double x : terms_lhs) {
    r.lhs += x;
    r.scale += std::abs(x);
  }
  for (double x : terms_rhs) {
    r.rhs += x;
    r.scale += std::abs(x);
  }
  return r;
}

}  // namespace detail

/// LHS − RHS of the entropy identity for ∫u^p v^q tested against φ on [t_start, t_end].
inline IdentityResidual entropy_identity_residual(const WeakFormTotals& tot, const ModelParams& m,
                                                  double max_interval = std::numeric_limits<double>::infinity()) {
  require_sampling(tot, max_interval);
  IdentityResidual r = detail::entropy_balance(tot, m, true);
  r.signed_value = r.lhs - r.rhs;
  return r;
}

inline IdentityResidual entropy_identity_residual(const Trajectory& traj, const ModelParams& m, const TestFunction& tf,
                                                  double max_interval = std::numeric_limits<double>::infinity()) {
  return entropy_identity_residual(weak_form_totals(traj, m, tf), m, max_interval);
}

/// RHS − LHS of the weak supersolution inequality (unregularized source).
/// For regularized trajectories this is q∫∫u^{p+1}v^{q−1}(εu/(1+εu))φ plus
/// discretization error, hence nonnegative up to tolerance.
inline IdentityResidual supersolution_residual(const WeakFormTotals& tot, const ModelParams& m,
                                               double max_interval = std::numeric_limits<double>::infinity()) {
  require_sampling(tot, max_interval);
  IdentityResidual r = detail::entropy_balance(tot, m, false);
  r.signed_value = r.rhs - r.lhs;
  return r;
}

inline IdentityResidual supersolution_residual(const Trajectory& traj, const ModelParams& m, const TestFunction& tf,
                                               double max_interval = std::numeric_limits<double>::infinity()) {
  return supersolution_residual(weak_form_totals(traj, m, tf), m, max_interval);
}

/// Defect of the weak form of v_t = Δv − v + u/(1+εu):
///   −∫∫vφ_t + ∫v(T)φ(T) − ∫v₀φ(0) + ∫∫∇v·∇φ + ∫∫vφ − ∫∫(u/(1+εu))φ.
inline IdentityResidual v_weak_residual(const WeakFormTotals& tot,
                                        double max_interval = std::numeric_limits<double>::infinity()) {
  require_sampling(tot, max_interval);
  const auto& I = tot.integrated;
  const double terms[] = {-I.v_phi_t, tot.v_phi_end, -tot.v_phi_start, I.grad_v_grad_phi, I.v_phi, -I.source_eps_phi};
  IdentityResidual r;
  for (double x : terms) {
    r.signed_value += x;
    r.scale += std::abs(x);
  }
  r.lhs = r.signed_value;
  return r;
}

inline IdentityResidual v_weak_residual(const Trajectory& traj, const ModelParams& m, const TestFunction& tf,
                                        double max_interval = std::numeric_limits<double>::infinity()) {
  return v_weak_residual(weak_form_totals(traj, m, tf), max_interval);
}

// ---------------------------------------------------------------------------
// Reports over a finished record.

struct AprioriReport {
  double lhs = 0.0;    // c1 (min v)^q ∫∫|∇u^{p/2}|² + c2 ∫∫D2 + q ∫∫reaction_plus
  double rhs = 0.0;    // E(T) − E(0) + q ∫∫reaction_minus
  double slack = 0.0;  // rhs − lhs
  double scale = 0.0;
  double tolerance = 0.0;
  bool holds = false;
  // The four ε-uniform space-time integrals.
  double int_D1 = 0.0;                // ∫∫ v^q |∇u^{p/2}|²
  double int_grad_up = 0.0;           // ∫∫ |∇u^{p/2}|²
  double int_D2_weighted = 0.0;       // c2 ∫∫ D2
  double int_reaction_unreg = 0.0;    // ∫∫ u^{p+1} v^{q−1}
  bool all_finite = false;
};

inline AprioriReport apriori_bounds_check(const DiagnosticsRecord& rec, const ModelParams& m,
                                          double discretization_estimate = 0.0, double rel_tol = 1e-6) {
  if (rec.size() < 2) throw PreconditionError("apriori_bounds_check: need at least two samples");
  const EntropyCoefficients c = entropy_coefficients(m.p, m.q, m.chi);
  double vmin = std::numeric_limits<double>::infinity();
  for (const auto& s : rec.samples) vmin = std::min(vmin, s.v_min);
  AprioriReport r;
  r.int_D1 = rec.accumulated_final(&SnapshotFunctionals::D1);
  r.int_grad_up = rec.accumulated_final(&SnapshotFunctionals::grad_up);
  r.int_D2_weighted = c.c2 * rec.accumulated_final(&SnapshotFunctionals::D2);
  r.int_reaction_unreg = rec.accumulated_final(&SnapshotFunctionals::reaction_plus_unreg);
  const double t1 = c.c1 * std::pow(vmin, m.q) * r.int_grad_up;
  const double t2 = r.int_D2_weighted;
  const double t3 = m.q * rec.accumulated_final(&SnapshotFunctionals::reaction_plus);
  const double e1 = rec.samples.back().entropy, e0 = rec.samples.front().entropy;
  const double t4 = m.q * rec.accumulated_final(&SnapshotFunctionals::reaction_minus);
  r.lhs = t1 + t2 + t3;
  r.rhs = e1 - e0 + t4;
  r.slack = r.rhs - r.lhs;
  r.scale = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(e1) + std::abs(e0) + std::abs(t4);
  r.tolerance = rel_tol * r.scale + discretization_estimate;
  r.holds = r.slack >= -r.tolerance;
  r.all_finite = std::isfinite(r.int_D1) && std::isfinite(r.int_grad_up) && std::isfinite(r.int_D2_weighted) &&
                 std::isfinite(r.int_reaction_unreg);
  return r;
}

struct YoungReport {
  double max_pointwise_violation = 0.0;  // max relative excess of u^r over the split, all snapshots
  bool pointwise_holds = false;
  double int_u_Lr = 0.0;
  double int_split = 0.0;  // ∫∫u^{p+1}v^{q−1} + ∫∫v^{(1−q)r/(p+1−r)}
  bool integrated_holds = false;
};

/// ∫∫u^r ≤ ∫∫u^{p+1}v^{q−1} + ∫∫v^{(1−q)r/(p+1−r)}, checked cell by cell on every snapshot.
inline YoungReport u_lr_bound(const DiagnosticsRecord& rec, const ModelParams& m, double tol = 1e-12) {
  if (!(m.p + 1.0 - m.r > 0.0)) throw DomainError("u_lr_bound: requires r < p + 1");
  YoungReport r;
  r.max_pointwise_violation = -std::numeric_limits<double>::infinity();
  for (const auto& s : rec.samples) r.max_pointwise_violation = std::max(r.max_pointwise_violation, s.young_violation);
  r.pointwise_holds = r.max_pointwise_violation <= tol;
  r.int_u_Lr = rec.accumulated_final(&SnapshotFunctionals::u_Lr);
  r.int_split = rec.accumulated_final(&SnapshotFunctionals::reaction_plus_unreg) +
                rec.accumulated_final(&SnapshotFunctionals::v_young);
  r.integrated_holds = r.int_u_Lr <= r.int_split * (1.0 + tol);
  return r;
}

struct GradVqReport {
  double coefficient = 0.0;  // 4(1−q)/q²
  double worst_slack = 0.0;  // min over t of rhs − lhs
  bool holds = false;
  bool degenerate = false;   // q too close to 1 for the bound to carry information
};

/// (4(1−q)/q²) ∫₀ᵗ∫|∇v^{q/2}|² ≤ (1/q)∫v^q(t) + ∫₀ᵗ∫v^q + τ at every sample t.
inline GradVqReport grad_vq_bound(const DiagnosticsRecord& rec, const ModelParams& m, double tau = 1e-6) {
  GradVqReport r;
  r.coefficient = 4.0 * (1.0 - m.q) / (m.q * m.q);
  r.degenerate = (1.0 - m.q) < 1e-6;
  r.worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rec.size(); ++k) {
    const double lhs = r.coefficient * rec.accumulated[k].grad_vq;
    const double rhs = rec.samples[k].vq / m.q + rec.accumulated[k].vq + tau;
    r.worst_slack = std::min(r.worst_slack, rhs - lhs);
  }
  r.holds = r.worst_slack >= 0.0;
  return r;
}

struct LogMassReport {
  bool defined = true;
  double undefined_from = kNaN;  // first time with a non-positive u cell
  double min_log_u = kNaN;
  double int_grad_log_u = kNaN;
  double tau0 = kNaN;
  double worst_slack = kNaN;  // min over t ≥ τ₀ of rhs − lhs
  bool holds = false;
};

/// −∫ln u(t) + ½∫_{τ₀}^t∫|∇ln u|² ≤ −∫ln u(τ₀) + χ²∫ln(v(t)/v(τ₀)) + χ²|Ω|(t−τ₀)
///                                   + (χ²/min v₀) e^T ∫u₀ (t−τ₀) + τ   for sampled t ≥ τ₀.
inline LogMassReport log_mass_check(const DiagnosticsRecord& rec, const ModelParams& m, double tau = 1e-6) {
  LogMassReport r;
  for (const auto& s : rec.samples) {
    if (std::isnan(s.log_u)) {
      r.defined = false;
      r.undefined_from = s.t;
      return r;
    }
  }
  if (!rec.tau0_set) throw PreconditionError("log_mass_check: no sample after the τ₀ window start");
  r.min_log_u = std::numeric_limits<double>::infinity();
  for (const auto& s : rec.samples) r.min_log_u = std::min(r.min_log_u, s.log_u);
  r.int_grad_log_u = rec.accumulated_final(&SnapshotFunctionals::grad_log_u);
  const std::size_t k0 = rec.tau0_index;
  const double t0 = rec.samples[k0].t;
  r.tau0 = t0;
  const double chi2 = m.chi * m.chi;
  const double T = rec.samples.back().t;
  const double growth = chi2 / rec.min_v0() * std::exp(T) * rec.mass0();
  r.worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t k = k0; k < rec.size(); ++k) {
    const double t = rec.samples[k].t;
    const double diss = rec.accumulated[k].grad_log_u - rec.accumulated[k0].grad_log_u;
    const double lhs = -rec.samples[k].log_u + 0.5 * diss;
    const double rhs = -rec.samples[k0].log_u + chi2 * rec.log_v_ratio[k] + chi2 * rec.domain_volume * (t - t0) +
                       growth * (t - t0) + tau;
    r.worst_slack = std::min(r.worst_slack, rhs - lhs);
  }
  r.holds = r.worst_slack >= 0.0;
  return r;
}

struct TracePositivityReport {
  double min_boundary_upq = 0.0;
  double first_failure_time = kNaN;
  bool pass = false;
};

inline TracePositivityReport trace_positivity_check(const DiagnosticsRecord& rec) {
  TracePositivityReport r;
  r.min_boundary_upq = std::numeric_limits<double>::infinity();
  for (const auto& s : rec.samples) {
    r.min_boundary_upq = std::min(r.min_boundary_upq, s.boundary_min_upq);
    if (!(s.boundary_min_upq > 0.0) && std::isnan(r.first_failure_time)) r.first_failure_time = s.t;
  }
  r.pass = r.min_boundary_upq > 0.0;
  return r;
}

/// Comparison floor for v: min v(t) ≥ (min v₀) e^{−t} − slack·h².
struct VFloorReport {
  double worst_margin = 0.0;  // min over t of v_min(t) − bound(t)
  bool holds = false;
};

inline VFloorReport v_floor_check(const DiagnosticsRecord& rec, double slack_coefficient = 10.0) {
  VFloorReport r;
  r.worst_margin = std::numeric_limits<double>::infinity();
  const double v0 = rec.min_v0();
  const double h2 = rec.cell_h * rec.cell_h;
  for (const auto& s : rec.samples)
    r.worst_margin = std::min(r.worst_margin, s.v_min - (v0 * std::exp(-(s.t - rec.samples.front().t)) - slack_coefficient * h2));
  r.holds = r.worst_margin >= 0.0;
  return r;
}

/// max_t |∫u(t) − ∫u₀| / ∫u₀.
inline double max_relative_mass_drift(const DiagnosticsRecord& rec) {
  const double m0 = rec.mass0();
  double worst = 0.0;
  for (const auto& s : rec.samples) worst = std::max(worst, std::abs(s.mass - m0) / m0);
  return worst;
}

// ---------------------------------------------------------------------------
// Finite-family lower bound on the dual norms of ∂_t(u+1)^{p/2} and v_t.

struct DualNormReport {
  std::vector<double> interval_mid;   // midpoints of sample intervals
  std::vector<double> u_surrogate;    // max_ψ |Δ∫(u+1)^{p/2}ψ| / Δt
  std::vector<double> v_surrogate;    // max_ψ |Δ∫vψ| / Δt
  std::vector<double> bound_integrand;  // ∫|∇u^{p/2}|² + ∫|∇v^{1/2}|² + 1, interval mean
  double int_u = 0.0;
  double int_v = 0.0;
};

/// Verifies a family member: zero on boundary cells and max|ψ| + max|∇ψ| ≤ 1.
inline bool dual_family_member_ok(const Field& psi) {
  double sup = 0.0, grad = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    sup = std::max(sup, std::abs(psi.values[i]));
    if (is_boundary_cell(psi.grid, i) && psi.values[i] != 0.0) return false;
  }
  const FaceArrays g = face_gradient(psi);
  for (int a = 0; a < psi.grid.dim; ++a)
    for (double x : g.axis[a]) grad = std::max(grad, std::abs(x));
  return sup + grad <= 1.0 + 1e-12;
}

/// Scales an interior bump so that it is a valid family member on grid g.
inline SpatialPart normalized_interior_bump(const Grid& g, std::vector<double> center, double radius) {
  SpatialPart sp;
  sp.kind = SpatialKind::interior_bump;
  sp.center = std::move(center);
  sp.radius = radius;
  sp.amplitude = 1.0;
  const Field f = sample_spatial(sp, g);
  double sup = 0.0, grad = 0.0;
  for (double x : f.values) sup = std::max(sup, std::abs(x));
  const FaceArrays gr = face_gradient(f);
  for (int a = 0; a < g.dim; ++a)
    for (double x : gr.axis[a]) grad = std::max(grad, std::abs(x));
  sp.amplitude = 1.0 / (sup + grad);
  return sp;
}

/// Interior bumps at the center and at 0.3 and 0.7 of each axis, radius 0.2 of
/// the shortest extent. Members that touch a boundary cell on coarse grids are
/// dropped, so the result may be empty.
inline std::vector<SpatialPart> default_dual_family(const Grid& g) {
  double shortest = g.extents[0];
  for (int a = 1; a < g.dim; ++a) shortest = std::min(shortest, g.extents[a]);
  std::vector<SpatialPart> out;
  for (double frac : {0.5, 0.3, 0.7}) {
    std::vector<double> c;
    for (int a = 0; a < g.dim; ++a) c.push_back(frac * g.extents[a]);
    SpatialPart sp = normalized_interior_bump(g, c, 0.2 * shortest);
    if (dual_family_member_ok(sample_spatial(sp, g))) out.push_back(std::move(sp));
  }
  return out;
}

class DualNormSurrogate {
 public:
  DualNormSurrogate(const ModelParams& m, const Grid& g, const std::vector<SpatialPart>& family) : params_(m) {
    if (family.empty()) throw PreconditionError("dual_norm_surrogate: empty family");
    for (const auto& sp : family) {
      Field psi = sample_spatial(sp, g);
      if (!dual_family_member_ok(psi))
        throw PreconditionError("dual_norm_surrogate: family member violates support or W^{1,inf} bound");
      family_.push_back(std::move(psi));
    }
  }

  void observe(const SimState& s) {
    const std::size_t n = s.u.size();
    std::vector<double> iu(family_.size(), 0.0), iv(family_.size(), 0.0);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = std::pow(s.u.values[i] + 1.0, 0.5 * params_.p);
    const double vol = s.u.grid.cell_volume();
    for (std::size_t k = 0; k < family_.size(); ++k) {
      double a = 0.0, b = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        a += w[i] * family_[k].values[i];
        b += s.v.values[i] * family_[k].values[i];
      }
      iu[k] = a * vol;
      iv[k] = b * vol;
    }
    const SnapshotFunctionals f = evaluate_snapshot(s.t, s.u, s.v, params_);
    const double bound = f.grad_up + f.grad_sqrt_v + 1.0;
    if (has_prev_) {
      const double dt = s.t - t_prev_;
      double su = 0.0, sv = 0.0;
      for (std::size_t k = 0; k < family_.size(); ++k) {
        su = std::max(su, std::abs(iu[k] - iu_prev_[k]) / dt);
        sv = std::max(sv, std::abs(iv[k] - iv_prev_[k]) / dt);
      }
      report_.interval_mid.push_back(0.5 * (s.t + t_prev_));
      report_.u_surrogate.push_back(su);
      report_.v_surrogate.push_back(sv);
      report_.bound_integrand.push_back(0.5 * (bound + bound_prev_));
      report_.int_u += su * dt;
      report_.int_v += sv * dt;
    }
    has_prev_ = true;
    t_prev_ = s.t;
    iu_prev_ = std::move(iu);
    iv_prev_ = std::move(iv);
    bound_prev_ = bound;
  }

  const DualNormReport& report() const { return report_; }

 private:
  ModelParams params_;
  std::vector<Field> family_;
  DualNormReport report_;
  bool has_prev_ = false;
  double t_prev_ = 0.0, bound_prev_ = 0.0;
  std::vector<double> iu_prev_, iv_prev_;
};

inline DualNormReport dual_norm_surrogate(const Trajectory& traj, const ModelParams& m,
                                          const std::vector<SpatialPart>& family) {
  if (traj.empty()) throw PreconditionError("dual_norm_surrogate: empty trajectory");
  DualNormSurrogate d(m, traj.front().u.grid, family);
  for (const auto& s : traj) d.observe(s);
  return d.report();
}

/// max over intervals of surrogate / bound_integrand (the fitted constant).
inline double dual_norm_ratio(const DualNormReport& r) {
  double c = 0.0;
  for (std::size_t k = 0; k < r.u_surrogate.size(); ++k) c = std::max(c, r.u_surrogate[k] / r.bound_integrand[k]);
  return c;
}

/// Largest interval where u_surrogate exceeds c · bound_integrand, as
/// surrogate − c · bound (≤ 0 when the frozen constant still holds).
inline double dual_norm_excess(const DualNormReport& r, double c) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < r.u_surrogate.size(); ++k)
    worst = std::max(worst, r.u_surrogate[k] - c * r.bound_integrand[k]);
  return worst;
}

}  // namespace logsense

#endif  // LOGSENSE_DIAGNOSTICS_HPP_
