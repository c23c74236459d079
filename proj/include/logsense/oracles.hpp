#ifndef LOGSENSE_ORACLES_HPP_
#define LOGSENSE_ORACLES_HPP_

// Standalone verifiers: pointwise power identities, the square completion
// behind the entropy dissipation, the Riccati comparison bound, and
// Monte-Carlo estimates of the log and mean Poincaré constants.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "logsense/grid.hpp"
#include "logsense/initial_data.hpp"
#include "logsense/params.hpp"
#include "logsense/random.hpp"

namespace logsense::oracles {

// ---------------------------------------------------------------------------
// Power identities
//
//   w^{r/2} Δw^{r/2} = ((r−2)/r)|∇w^{r/2}|² + (r/2) w^{r−1} Δw
//   Δw^r             = (4(r−1)/r)|∇w^{r/2}|² + r w^{r−1} Δw
//
// evaluated with the grid operators.  Cells whose stencil touches the
// boundary are skipped: there the mirrored ghost imposes ∂w/∂ν = 0, which a
// general analytic w does not satisfy.

struct PowerIdentityResiduals {
  double res29 = 0.0;
  double res210 = 0.0;
};

namespace detail {

inline bool stencil_interior(const Grid& g, std::size_t idx) {
  const auto m = g.unravel(idx);
  for (int a = 0; a < g.dim; ++a)
    if (m[a] < 2 || m[a] + 2 >= g.cells[a]) return false;
  return true;
}

inline Field pow_field(const Field& w, double e) {
  return map(w, [e](double x) { return std::pow(x, e); });
}

inline Field grad_norm_sq(const Field& f) {
  Field n = cell_gradient_norm(f);
  for (double& x : n.values) x *= x;
  return n;
}

}  // namespace detail

inline PowerIdentityResiduals check_power_identities(const Field& w, double r) {
  if (!(w.min() > 0.0)) throw DomainError("check_power_identities: w must be strictly positive");
  if (!(r > 0.0)) throw DomainError("check_power_identities: r must be positive");
  const Field wr2 = detail::pow_field(w, 0.5 * r);
  const Field wr = detail::pow_field(w, r);
  const Field lap_w = laplacian_neumann(w);
  const Field lap_wr2 = laplacian_neumann(wr2);
  const Field lap_wr = laplacian_neumann(wr);
  const Field g2 = detail::grad_norm_sq(wr2);
  PowerIdentityResiduals out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!detail::stencil_interior(w.grid, i)) continue;
    const double wm1 = std::pow(w.values[i], r - 1.0);
    const double a = wr2.values[i] * lap_wr2.values[i] - (r - 2.0) / r * g2.values[i] - 0.5 * r * wm1 * lap_w.values[i];
    const double b = lap_wr.values[i] - 4.0 * (r - 1.0) / r * g2.values[i] - r * wm1 * lap_w.values[i];
    out.res29 = std::max(out.res29, std::abs(a));
    out.res210 = std::max(out.res210, std::abs(b));
  }
  return out;
}

/// max over interior faces of |∇_h(u^{e}) − e ū^{e−1} ∇_h u| with ū the face mean:
/// the gap between differencing the power field and the chain-rule form.
inline double power_gradient_chain_rule_gap(const Field& u, double e) {
  if (!(u.min() > 0.0)) throw DomainError("power_gradient_chain_rule_gap: u must be strictly positive");
  const Grid& g = u.grid;
  double worst = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    const double inv_h = 1.0 / g.h[a];
    logsense::detail::for_each_interior_face(g, a, [&](std::size_t lo, std::size_t hi, std::size_t) {
      const double direct = (std::pow(u.values[hi], e) - std::pow(u.values[lo], e)) * inv_h;
      const double mean = 0.5 * (u.values[lo] + u.values[hi]);
      const double chain = e * std::pow(mean, e - 1.0) * (u.values[hi] - u.values[lo]) * inv_h;
      worst = std::max(worst, std::abs(direct - chain));
    });
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Square completion
//
//   (4(1−p)/p) V²|X|² − (4(1−p)χ/q + 8) U V X·Y + (4(pχ+1−q)/q) U²|Y|²
//     = c2 |U Y − κ V X|² + c1 V²|X|²
//
// with U = u^{p/2}, V = v^{q/2}, X = ∇u^{p/2}, Y = ∇v^{q/2} taken per cell
// from averaged face differences.

struct SquareCompletionResult {
  double max_abs = 0.0;  // max-cell |LHS − RHS|
  double max_rel = 0.0;  // max-cell |LHS − RHS| / (sum of |terms|)
};

inline SquareCompletionResult check_square_completion(const Field& u, const Field& v, double p, double q, double chi) {
  if (!(u.min() > 0.0) || !(v.min() > 0.0)) throw DomainError("check_square_completion: fields must be positive");
  if (!u.grid.same_shape(v.grid)) throw GridError("check_square_completion: grid mismatch");
  const EntropyCoefficients c = entropy_coefficients(p, q, chi);
  const Field U = detail::pow_field(u, 0.5 * p);
  const Field V = detail::pow_field(v, 0.5 * q);
  const FaceArrays gu = face_gradient(U);
  const FaceArrays gv = face_gradient(V);
  const int dim = u.grid.dim;
  std::array<Field, 3> X, Y;
  for (int a = 0; a < dim; ++a) {
    X[a] = cell_gradient_component(gu, a);
    Y[a] = cell_gradient_component(gv, a);
  }
  const double a1 = 4.0 * (1.0 - p) / p;
  const double a2 = 4.0 * (1.0 - p) * chi / q + 8.0;
  const double a3 = 4.0 * (p * chi + 1.0 - q) / q;
  SquareCompletionResult out;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double xx = 0.0, xy = 0.0, yy = 0.0, sq = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double x = X[a].values[i], y = Y[a].values[i];
      xx += x * x;
      xy += x * y;
      yy += y * y;
      const double d = U.values[i] * y - c.kappa * V.values[i] * x;
      sq += d * d;
    }
    const double Uv = U.values[i], Vv = V.values[i];
    const double l1 = a1 * Vv * Vv * xx, l2 = -a2 * Uv * Vv * xy, l3 = a3 * Uv * Uv * yy;
    const double r1 = c.c2 * sq, r2 = c.c1 * Vv * Vv * xx;
    const double diff = std::abs((l1 + l2 + l3) - (r1 + r2));
    const double scale = std::abs(l1) + std::abs(l2) + std::abs(l3) + std::abs(r1) + std::abs(r2);
    out.max_abs = std::max(out.max_abs, diff);
    if (scale > 0.0) out.max_rel = std::max(out.max_rel, diff / scale);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Riccati comparison: y' ≤ −a y² + b implies y(t) ≤ √(b/a) coth(√(ab) t).

struct OdeComparison {
  double a = 1.0;
  double b = 1.0;
  double y0 = 0.0;
  double T = 1.0;
};

inline double coth_bound(double a, double b, double t) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("coth_bound: a and b must be positive");
  if (!(t > 0.0)) throw DomainError("coth_bound: t must be positive");
  return std::sqrt(b / a) / std::tanh(std::sqrt(a * b) * t);
}

struct OdeComparisonReport {
  double max_excess = 0.0;  // max over mesh points of y(t) − bound(t)
  double y_final = 0.0;
  std::size_t steps = 0;
  bool holds = false;
};

/// Integrates the saturated equation y' = −a y² + b with classical RK4 on
/// dt = T/steps and compares y against the bound at every mesh point.
inline OdeComparisonReport verify_ode_comparison(const OdeComparison& s, std::size_t steps = 100000,
                                                 double tol = 1e-6) {
  if (!(s.a > 0.0) || !(s.b > 0.0) || !(s.T > 0.0)) throw DomainError("verify_ode_comparison: need a, b, T > 0");
  const auto f = [&](double y) { return -s.a * y * y + s.b; };
  const double dt = s.T / static_cast<double>(steps);
  double y = s.y0;
  OdeComparisonReport r;
  r.steps = steps;
  r.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= steps; ++k) {
    const double k1 = f(y);
    const double k2 = f(y + 0.5 * dt * k1);
    const double k3 = f(y + 0.5 * dt * k2);
    const double k4 = f(y + dt * k3);
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t = dt * static_cast<double>(k);
    r.max_excess = std::max(r.max_excess, y - coth_bound(s.a, s.b, t));
  }
  r.y_final = y;
  r.holds = r.max_excess <= tol;
  return r;
}

// ---------------------------------------------------------------------------
// Poincaré-type ensembles

enum class BSelector { threshold, random_mask };

struct EnsembleSpec {
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  int cutoff = 3;
  double amplitude_lo = 0.5;
  double amplitude_hi = 2.0;
  double floor = 0.05;
  double delta = 1.0;  // level δ for the log inequality; |B| for the mean inequality
  double eta = 0.1;
  BSelector selector = BSelector::threshold;
  int max_regenerations = 100;
};

/// floor + exp(S) with S a random Neumann cosine series of random amplitude.
inline Field synthesize_positive(const Grid& g, const EnsembleSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  InitialSpec is;
  is.kind = InitialKind::random_cosine;
  is.cutoff = spec.cutoff;
  is.amplitude = rng.uniform(spec.amplitude_lo, spec.amplitude_hi);
  is.seed = mix_seed(seed);
  Field s = make_initial(g, is);
  for (double& x : s.values) x = spec.floor + std::exp(x);
  return s;
}

struct LogPoincareReport {
  std::size_t samples = 0;
  std::size_t ratio_branch = 0;        // ∫ln(δ/φ) ≥ 0 with nonzero gradient
  std::size_t alternative_branch = 0;  // ∫ln(δ/φ) < 0
  std::size_t excluded = 0;            // 0/0 cases
  std::size_t regenerated = 0;
  double max_ratio = 0.0;              // max (∫ln(δ/φ))² / ∫|∇φ|²/φ²
  bool degenerate = false;             // no sample reached the ratio branch
};

struct LogPoincareSample {
  double log_integral = 0.0;   // ∫ ln(δ/φ)
  double fisher = 0.0;         // ∫ |∇φ|²/φ² on faces
  double superlevel = 0.0;     // |{φ > δ}|
};

inline LogPoincareSample log_poincare_terms(const Field& phi, double delta) {
  if (!(phi.min() > 0.0)) throw DomainError("log_poincare_terms: φ must be positive");
  const Grid& g = phi.grid;
  LogPoincareSample s;
  const double vol = g.cell_volume();
  for (double x : phi.values) {
    s.log_integral += std::log(delta / x) * vol;
    if (x > delta) s.superlevel += vol;
  }
  for (int a = 0; a < g.dim; ++a) {
    const double inv_h = 1.0 / g.h[a];
    logsense::detail::for_each_interior_face(g, a, [&](std::size_t lo, std::size_t hi, std::size_t) {
      const double d = (phi.values[hi] - phi.values[lo]) * inv_h / (0.5 * (phi.values[lo] + phi.values[hi]));
      s.fisher += d * d * vol;
    });
  }
  return s;
}

inline LogPoincareReport log_poincare_ratio(const EnsembleSpec& spec, const Grid& g) {
  LogPoincareReport r;
  r.samples = spec.samples;
  for (std::size_t k = 0; k < spec.samples; ++k) {
    const std::uint64_t member = derive_seed(spec.seed, k);
    LogPoincareSample s;
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt > spec.max_regenerations)
        throw PreconditionError("log_poincare_ratio: could not satisfy |{φ > δ}| > η");
      const Field phi = synthesize_positive(g, spec, derive_seed(member, static_cast<std::uint64_t>(attempt)));
      s = log_poincare_terms(phi, spec.delta);
      if (s.superlevel > spec.eta) break;
    }
    r.regenerated += static_cast<std::size_t>(attempt);
    if (s.log_integral < 0.0) {
      ++r.alternative_branch;
    } else if (s.fisher == 0.0) {
      ++r.excluded;
    } else {
      ++r.ratio_branch;
      r.max_ratio = std::max(r.max_ratio, s.log_integral * s.log_integral / s.fisher);
    }
  }
  r.degenerate = r.ratio_branch == 0;
  return r;
}

// Mean Poincaré: (∫|u − u_B|^p)^{1/p} ≤ C (∫|Du|^p)^{1/p} for |B| = δ.

/// Cells of B: the k largest values of u (ties by index) or a seeded random choice.
inline std::vector<std::size_t> select_b_set(const Field& u, std::size_t k, BSelector sel, std::uint64_t seed) {
  if (k == 0 || k > u.size()) throw DomainError("select_b_set: |B| must cover between 1 and all cells");
  std::vector<std::size_t> idx(u.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (sel == BSelector::threshold) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return u.values[a] > u.values[b]; });
  } else {
    Rng rng(seed);
    for (std::size_t i = idx.size() - 1; i > 0; --i) std::swap(idx[i], idx[rng.below(i + 1)]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

struct MeanPoincareTerms {
  double numerator = 0.0;    // (∫|u − u_B|^p)^{1/p}
  double denominator = 0.0;  // (∫|Du|^p)^{1/p}
  double u_B = 0.0;
  double ratio() const { return denominator > 0.0 ? numerator / denominator : std::numeric_limits<double>::quiet_NaN(); }
};

/// |Du| per cell uses the mean of the adjacent face differences per axis, so a
/// boundary cell sees half of its single interior face.  One-sided
/// differences are used there instead to keep linear fields exact.
inline MeanPoincareTerms mean_poincare_terms(const Field& u, const std::vector<std::size_t>& B, double p) {
  if (!(p >= 1.0)) throw DomainError("mean_poincare_terms: p must be >= 1");
  const Grid& g = u.grid;
  const double vol = g.cell_volume();
  MeanPoincareTerms t;
  for (std::size_t i : B) t.u_B += u.values[i];
  t.u_B /= static_cast<double>(B.size());
  double num = 0.0;
  for (double x : u.values) num += std::pow(std::abs(x - t.u_B), p);
  t.numerator = std::pow(num * vol, 1.0 / p);

  const FaceArrays grad = face_gradient(u);
  std::vector<double> norm2(u.size(), 0.0);
  for (int a = 0; a < g.dim; ++a) {
    const auto& src = grad.axis[a];
    const std::size_t n = g.cells[a];
    const std::size_t inner = g.stride(a);
    logsense::detail::for_each_cell_faces(g, a, [&](std::size_t cell, std::size_t lower, std::size_t upper) {
      const std::size_t i = (cell / inner) % n;
      double d;
      if (i == 0) d = src[upper];
      else if (i + 1 == n) d = src[lower];
      else d = 0.5 * (src[lower] + src[upper]);
      norm2[cell] += d * d;
    });
  }
  double den = 0.0;
  for (double x : norm2) den += std::pow(std::sqrt(x), p);
  t.denominator = std::pow(den * vol, 1.0 / p);
  return t;
}

/// Riesz-potential ratio |u(x) − u_B| / ∫|Du(z)|/|x − z|^{n−1} dz at a probe cell.
/// The singular self-cell contribution uses a 4^n sub-cell midpoint rule.
inline double riesz_ratio(const Field& u, const std::vector<std::size_t>& B, std::size_t probe) {
  const Grid& g = u.grid;
  double uB = 0.0;
  for (std::size_t i : B) uB += u.values[i];
  uB /= static_cast<double>(B.size());
  const Field du = cell_gradient_norm(u);
  const double expo = static_cast<double>(g.dim - 1);
  const auto pm = g.unravel(probe);
  auto dist = [&](std::size_t j) {
    const auto m = g.unravel(j);
    double s = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      const double d = (static_cast<double>(m[a]) - static_cast<double>(pm[a])) * g.h[a];
      s += d * d;
    }
    return std::sqrt(s);
  };
  // Mean of |y|^{-(n−1)} over the probe cell, sub-cell midpoints.
  double self_kernel = 0.0;
  {
    constexpr int kSub = 4;
    int count = 0;
    std::array<int, 3> s{0, 0, 0};
    const int total = g.dim == 1 ? kSub : (g.dim == 2 ? kSub * kSub : kSub * kSub * kSub);
    for (int id = 0; id < total; ++id) {
      int rem = id;
      double r2 = 0.0;
      for (int a = 0; a < g.dim; ++a) {
        s[a] = rem % kSub;
        rem /= kSub;
        const double off = ((s[a] + 0.5) / kSub - 0.5) * g.h[a];
        r2 += off * off;
      }
      self_kernel += std::pow(std::sqrt(r2), -expo);
      ++count;
    }
    self_kernel /= count;
  }
  double integral = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double k = j == probe ? self_kernel : std::pow(dist(j), -expo);
    integral += du.values[j] * k;
  }
  integral *= g.cell_volume();
  return integral > 0.0 ? std::abs(u.values[probe] - uB) / integral : 0.0;
}

struct MeanPoincareReport {
  std::size_t samples = 0;
  double b_measure = 0.0;
  double max_ratio = 0.0;
  double max_riesz_ratio = std::numeric_limits<double>::quiet_NaN();  // unless probes were requested
};

inline MeanPoincareReport mean_poincare_ratio(const EnsembleSpec& spec, const Grid& g, double p,
                                              std::size_t riesz_probes = 0) {
  const std::size_t k = static_cast<std::size_t>(std::llround(spec.delta / g.cell_volume()));
  MeanPoincareReport r;
  r.samples = spec.samples;
  r.b_measure = static_cast<double>(k) * g.cell_volume();
  if (riesz_probes > 0) r.max_riesz_ratio = 0.0;
  for (std::size_t s = 0; s < spec.samples; ++s) {
    const std::uint64_t member = derive_seed(spec.seed, s);
    const Field u = synthesize_positive(g, spec, member);
    const auto B = select_b_set(u, k, spec.selector, mix_seed(member));
    const MeanPoincareTerms t = mean_poincare_terms(u, B, p);
    if (t.denominator > 0.0) r.max_ratio = std::max(r.max_ratio, t.ratio());
    if (riesz_probes > 0) {
      Rng rng(derive_seed(member, 0x5157));
      for (std::size_t j = 0; j < riesz_probes; ++j)
        r.max_riesz_ratio = std::max(r.max_riesz_ratio, riesz_ratio(u, B, rng.below(u.size())));
    }
  }
  return r;
}

}  // namespace logsense::oracles

#endif  // LOGSENSE_ORACLES_HPP_
