#ifndef LOGSENSE_PARAMS_HPP_
#define LOGSENSE_PARAMS_HPP_

// Exponent algebra for the entropy functional  ∫ u^p v^q  of the
// logarithmic-sensitivity Keller-Segel system
//
//   u_t = Δu − χ ∇·(u/v ∇v),   v_t = Δv − v + u/(1 + εu).
//
// Everything here is a pure function of its arguments.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace logsense {

/// Raised when an argument is outside the domain where a formula is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when no admissible exponent triple exists for (χ, n).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called outside its documented preconditions.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace tolerance {
inline constexpr double kRelative = 1e-12;
inline constexpr double kDomainSlack = 1e-14;
/// Finite stand-in for n/(n−2) when n = 2.
inline constexpr double kPlanarCap = 1e6;
}  // namespace tolerance

struct ModelParams {
  double chi = 1.0;
  int n = 2;
  double eps = 0.0;
  double p = 0.5;
  double q = 0.25;
  double r = 1.1;
  double s = 1.0;
};

struct EntropyCoefficients {
  double c1 = 0.0;     // weight of ∫ v^q |∇u^{p/2}|²
  double c2 = 0.0;     // weight of the completed square
  double kappa = 0.0;  // inner coefficient of the completed square
};

struct QBounds {
  double q_minus = 0.0;
  double q_plus = 0.0;
};

/// n/(n−2), with the planar case replaced by a finite cap.
inline double critical_ratio(int n, double planar_cap = tolerance::kPlanarCap) {
  if (n < 2) throw DomainError("critical_ratio: n must be >= 2");
  if (n == 2) return planar_cap;
  return static_cast<double>(n) / static_cast<double>(n - 2);
}

/// Endpoints of the q-interval on which c1 > 0:
///   q±(p) = (1−p)/2 · (1 ± √(1 − pχ²)).
/// p = 1/χ² exactly is accepted and returns the collapsed interval.
template <class T>
struct QBoundsOf {
  T q_minus = 0;
  T q_plus = 0;
};

namespace detail {

template <class T>
QBoundsOf<T> q_bounds_impl(T p, T chi) {
  using std::isfinite, std::sqrt;
  if (!(chi > 0) || !isfinite(chi)) throw DomainError("q_bounds: chi must be positive");
  if (!(p > 0 && p < 1)) throw DomainError("q_bounds: p must lie in (0,1)");
  T disc = 1 - p * chi * chi;
  if (disc < -T(tolerance::kDomainSlack)) throw DomainError("q_bounds: p exceeds 1/chi^2");
  if (disc < 0) disc = 0;
  const T root = sqrt(disc);
  const T half = (1 - p) / 2;
  // 1 - root cancels for small p; use (1 - root)(1 + root) = p chi^2.
  return {half * p * chi * chi / (1 + root), half * (1 + root)};
}

template <class T>
T c1_impl(T p, T q, T chi) {
  const T drift = p * chi + 1 - q;
  const T denom = p * q * drift;
  if (!(denom > 0)) throw DomainError("entropy_coefficients: p q (p chi + 1 - q) must be positive");
  return (4 * q * ((1 - p) - q) - p * (1 - p) * (1 - p) * chi * chi) / denom;
}

}  // namespace detail

inline QBounds q_bounds(double p, double chi) {
  const auto b = detail::q_bounds_impl(p, chi);
  return {b.q_minus, b.q_plus};
}

inline EntropyCoefficients entropy_coefficients(double p, double q, double chi) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0 && chi > 0.0))
    throw DomainError("entropy_coefficients: need p,q in (0,1) and chi > 0");
  const double drift = p * chi + 1.0 - q;
  return {detail::c1_impl(p, q, chi), 4.0 * drift / q, ((1.0 - p) * chi + 2.0 * q) / (2.0 * drift)};
}

// Extended-precision variants. Near q₊ with small p, dc1/dq grows like
// 4/(p²(1+χ)), so rounding q₊ to a double alone leaves |c1| around 1e-10;
// these let the root property be checked past that floor.
inline QBoundsOf<long double> q_bounds_extended(long double p, long double chi) {
  return detail::q_bounds_impl(p, chi);
}

inline long double c1_extended(long double p, long double q, long double chi) {
  if (!(p > 0 && p < 1 && q > 0 && q < 1 && chi > 0))
    throw DomainError("entropy_coefficients: need p,q in (0,1) and chi > 0");
  return detail::c1_impl(p, q, chi);
}

/// Sensitivity threshold for global generalized solvability.
/// n = 2: any χ; n = 3: χ < √8; n ≥ 4: χ < n/(n−2).
inline bool chi_admissible(double chi, int n) {
  if (n < 2) throw DomainError("chi_admissible: n must be >= 2");
  if (!(chi > 0.0)) throw DomainError("chi_admissible: chi must be positive");
  if (n == 2) return true;
  if (n == 3) return chi < std::sqrt(8.0);
  return chi < static_cast<double>(n) / static_cast<double>(n - 2);
}

/// Closed form of inf (1−q)/p over p < min(1, 1/χ²), q ∈ (q₋(p), q₊(p)).
inline double exponent_infimum(double chi) {
  if (!(chi > 0.0)) throw DomainError("exponent_infimum: chi must be positive");
  if (chi <= 1.0) return 1.0;
  if (chi < 2.0) return chi;
  return 1.0 + 0.25 * chi * chi;
}

/// (1 − q₊(p))/p = (1 + p − (1−p)√(1−pχ²)) / (2p), rewritten without the
/// cancellation that the literal form suffers for p → 0:
///   = 1 + (1−p) χ² / (2 (1 + √(1−pχ²))).
inline double upper_q_ratio(double p, double chi) {
  const double xi = std::sqrt(std::max(0.0, 1.0 - p * chi * chi));
  return 1.0 + (1.0 - p) * chi * chi / (2.0 * (1.0 + xi));
}

/// ρ(ξ) = ½ (χ²/(1+ξ) + 1 + ξ), the ratio above after substituting ξ = √(1−pχ²).
inline double rho(double xi, double chi) { return 0.5 * (chi * chi / (1.0 + xi) + 1.0 + xi); }

/// Minimizes (1 − q₊(p))/p over a log-uniform p-grid in (0, min(1, 1/χ²)).
/// The infimum may not be attained, so the result approaches it from above.
inline double exponent_infimum_bruteforce(double chi, std::size_t grid_size) {
  if (!(chi > 0.0)) throw DomainError("exponent_infimum_bruteforce: chi must be positive");
  if (grid_size < 1000) throw DomainError("exponent_infimum_bruteforce: grid_size must be >= 1000");
  const double p_hi = std::min(1.0, 1.0 / (chi * chi)) * (1.0 - 1e-13);
  const double p_lo = 1e-12;
  const double log_lo = std::log(p_lo);
  const double step = (std::log(p_hi) - log_lo) / static_cast<double>(grid_size - 1);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double p = std::exp(log_lo + step * static_cast<double>(i));
    best = std::min(best, upper_q_ratio(p, chi));
  }
  return best;
}

/// Golden-section minimizer of ρ on [0, 1); returns (argmin, min).
inline std::pair<double, double> minimize_rho(double chi, double tol = 1e-12) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0, b = 1.0;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = rho(x1, chi), f2 = rho(x2, chi);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - g * (b - a); f1 = rho(x1, chi);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + g * (b - a); f2 = rho(x2, chi);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, rho(x, chi)};
}

struct ExponentTriple {
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;
};

/// Ratio (1−q) r / (p + 1 − r) that must stay below n/(n−2).
inline double integrability_ratio(double p, double q, double r) { return (1.0 - q) * r / (p + 1.0 - r); }

/// True iff the triple satisfies every postcondition of select_exponents.
inline bool exponents_valid(const ExponentTriple& e, double chi, int n, double margin,
                            double planar_cap = tolerance::kPlanarCap) {
  const double p_max = std::min(1.0, 1.0 / (chi * chi));
  if (!(e.p > 0.0 && e.p < p_max)) return false;
  const QBounds qb = q_bounds(e.p, chi);
  if (!(e.q > qb.q_minus && e.q < qb.q_plus)) return false;
  if (!(e.r > 1.0 && e.p + 1.0 - e.r > 0.0)) return false;
  const double target = (1.0 - margin) * critical_ratio(n, planar_cap);
  return integrability_ratio(e.p, e.q, e.r) <= target;
}

/// Picks (p, q, r) with p < min(1,1/χ²), q ∈ (q₋(p), q₊(p)), r ∈ (1, p+1) and
/// (1−q) r/(p+1−r) ≤ (1−margin)·n/(n−2).
///
/// p is chosen on a descending log grid to maximize the gap between the
/// target and (1−q₊(p))/p; q then sits halfway between q₊ and the q that
/// would hit the target exactly; r is halfway between 1 and the largest r
/// that still meets the target.
inline ExponentTriple select_exponents(double chi, int n, double margin,
                                       double planar_cap = tolerance::kPlanarCap) {
  if (!(margin > 0.0 && margin < 1.0)) throw DomainError("select_exponents: margin must lie in (0,1)");
  if (!chi_admissible(chi, n))
    throw InfeasibleError("select_exponents: chi=" + std::to_string(chi) + " is not admissible for n=" +
                          std::to_string(n));
  const double target = (1.0 - margin) * critical_ratio(n, planar_cap);
  const double p_top = (1.0 - margin) * std::min(1.0, 1.0 / (chi * chi));

  constexpr int kSteps = 4000;
  const double decades = 12.0;
  auto grid_p = [&](int i) { return p_top * std::pow(10.0, -decades * i / kSteps); };
  double best_gap = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kSteps; ++i) best_gap = std::max(best_gap, target - upper_q_ratio(grid_p(i), chi));
  if (!(best_gap > 0.0))
    throw InfeasibleError("select_exponents: no p meets the integrability target with the requested margin");

  // Largest grid p whose gap is at least half the best one; avoids the
  // degenerate p → 0 corner when the gap keeps growing there (χ ≥ 2).
  ExponentTriple e;
  for (int i = 0; i <= kSteps; ++i) {
    if (target - upper_q_ratio(grid_p(i), chi) >= 0.5 * best_gap) {
      e.p = grid_p(i);
      break;
    }
  }
  const QBounds qb = q_bounds(e.p, chi);
  const double ratio_plus = upper_q_ratio(e.p, chi);
  double q = 1.0 - e.p * 0.5 * (ratio_plus + target);
  if (!(q > qb.q_minus && q < qb.q_plus)) q = 0.5 * (qb.q_minus + qb.q_plus);
  e.q = q;

  // Largest r in (1, p+1) meeting the target; the ratio is increasing in r.
  double lo = 1.0, hi = e.p + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (integrability_ratio(e.p, e.q, mid) <= target) lo = mid; else hi = mid;
  }
  e.r = 1.0 + 0.5 * (lo - 1.0);
  if (!exponents_valid(e, chi, n, margin, planar_cap))
    throw InfeasibleError("select_exponents: failed to place an interior triple");
  return e;
}

/// Validity predicates for a ModelParams used with entropy diagnostics.
inline bool entropy_exponents_ok(const ModelParams& m) {
  if (!(m.p > 0.0 && m.p < 1.0 && m.q > 0.0 && m.q < 1.0 && m.chi > 0.0)) return false;
  if (m.p * m.chi * m.chi >= 1.0) return false;
  const QBounds qb = q_bounds(m.p, m.chi);
  return m.q > qb.q_minus && m.q < qb.q_plus;
}

/// r < n/(n−2), s < n/(n−1) for n ≥ 3; only finiteness for n ≤ 2.
inline bool norm_exponents_ok(const ModelParams& m) {
  if (!(m.r >= 1.0 && m.s >= 1.0 && std::isfinite(m.r) && std::isfinite(m.s))) return false;
  if (m.n <= 2) return true;
  return m.r < static_cast<double>(m.n) / (m.n - 2) && m.s < static_cast<double>(m.n) / (m.n - 1);
}

inline void validate(const ModelParams& m) {
  if (!(m.chi > 0.0) || !std::isfinite(m.chi)) throw DomainError("params: chi must be positive and finite");
  if (m.n < 1 || m.n > 3) throw DomainError("params: n must be 1, 2 or 3");
  if (!(m.eps >= 0.0 && m.eps < 1.0)) throw DomainError("params: eps must lie in [0,1)");
  if (!(m.p > 0.0 && m.p < 1.0)) throw DomainError("params: p must lie in (0,1)");
  if (!(m.q > 0.0 && m.q < 1.0)) throw DomainError("params: q must lie in (0,1)");
  if (!(m.r > 1.0) || !std::isfinite(m.r)) throw DomainError("params: r must exceed 1");
  if (!(m.s >= 1.0) || !std::isfinite(m.s)) throw DomainError("params: s must be >= 1");
}

}  // namespace logsense

#endif  // LOGSENSE_PARAMS_HPP_
