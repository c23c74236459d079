#ifndef LOGSENSE_TEST_FUNCTION_HPP_
#define LOGSENSE_TEST_FUNCTION_HPP_

// Separable test functions φ(x, t) = ψ(x) ζ(t) for weak-form residuals.
//
// Every spatial part has zero normal derivative on the box boundary, and
// the discrete ∇ψ, Δψ use the same mirrored-ghost operators as the solver.

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "logsense/grid.hpp"
#include "logsense/initial_data.hpp"

namespace logsense {

enum class SpatialKind {
  constant,       // ψ = value
  cosine,         // ψ = offset + amplitude Π cos(k_a π x_a / L_a)
  centered_bump,  // ψ = amplitude Π (1 − cos(2π x_a / L_a)) / 2
  interior_bump,  // ψ = amplitude (1 − |x − c|²/R²)³₊, zero near the boundary
};

struct SpatialPart {
  SpatialKind kind = SpatialKind::constant;
  double value = 1.0;
  double offset = 0.0;
  double amplitude = 1.0;
  std::array<int, 3> k{1, 1, 1};
  std::vector<double> center;
  double radius = 0.25;
};

enum class TemporalKind { one, bump };

/// ζ ≡ 1, or the C² bump ((t−a)(b−t))³ / ((b−a)/2)⁶ supported on [a, b].
struct TemporalPart {
  TemporalKind kind = TemporalKind::one;
  double a = 0.0;
  double b = 1.0;

  double value(double t) const {
    if (kind == TemporalKind::one) return 1.0;
    if (t <= a || t >= b) return 0.0;
    const double w = (t - a) * (b - t);
    const double half = 0.5 * (b - a);
    return w * w * w / std::pow(half, 6);
  }

  double derivative(double t) const {
    if (kind == TemporalKind::one) return 0.0;
    if (t <= a || t >= b) return 0.0;
    const double w = (t - a) * (b - t);
    const double half = 0.5 * (b - a);
    return 3.0 * w * w * ((b - t) - (t - a)) / std::pow(half, 6);
  }
};

struct TestFunction {
  std::string name;
  SpatialPart space;
  TemporalPart time;
};

/// ψ sampled on a grid together with its discrete gradient and Laplacian.
struct DiscreteTestFunction {
  std::string name;
  Field psi;
  FaceArrays grad_psi;
  Field lap_psi;
  FaceArrays psi_faces;
  TemporalPart time;

  DiscreteTestFunction(std::string n, Field p, TemporalPart tp)
      : name(std::move(n)),
        psi(std::move(p)),
        grad_psi(face_gradient(psi)),
        lap_psi(laplacian_neumann(psi)),
        psi_faces(face_average(psi)),
        time(tp) {}
};

inline Field sample_spatial(const SpatialPart& sp, const Grid& g) {
  Field f(g, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto m = g.unravel(i);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < g.dim; ++a) x[a] = g.center(a, m[a]);
    double val = 0.0;
    switch (sp.kind) {
      case SpatialKind::constant:
        val = sp.value;
        break;
      case SpatialKind::cosine:
        val = sp.offset + sp.amplitude * cosine_product(g, sp.k, x);
        break;
      case SpatialKind::centered_bump: {
        val = sp.amplitude;
        for (int a = 0; a < g.dim; ++a) val *= 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * x[a] / g.extents[a]));
        break;
      }
      case SpatialKind::interior_bump: {
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
          const double c = static_cast<std::size_t>(a) < sp.center.size() ? sp.center[a] : 0.5 * g.extents[a];
          r2 += (x[a] - c) * (x[a] - c);
        }
        const double s = 1.0 - r2 / (sp.radius * sp.radius);
        val = s > 0.0 ? sp.amplitude * s * s * s : 0.0;
        break;
      }
    }
    f.values[i] = val;
  }
  return f;
}

inline DiscreteTestFunction discretize(const TestFunction& tf, const Grid& g) {
  return DiscreteTestFunction(tf.name, sample_spatial(tf.space, g), tf.time);
}

/// The nonnegative family used for supersolution checks on [0, T].
inline std::vector<TestFunction> builtin_nonnegative_family(double T) {
  std::vector<TestFunction> fam;
  TestFunction one{"one", {}, {}};
  fam.push_back(one);

  TestFunction bump{"centered_bump", {}, {}};
  bump.space.kind = SpatialKind::centered_bump;
  fam.push_back(bump);

  TestFunction cos_shift{"cosine_shifted", {}, {}};
  cos_shift.space.kind = SpatialKind::cosine;
  cos_shift.space.offset = 1.0;
  cos_shift.space.amplitude = 0.5;
  cos_shift.space.k = {2, 2, 2};
  fam.push_back(cos_shift);

  TestFunction late{"one_late_window", {}, {TemporalKind::bump, 0.2 * T, 0.9 * T}};
  fam.push_back(late);

  TestFunction bump_window{"bump_window", {}, {TemporalKind::bump, 0.1 * T, 0.8 * T}};
  bump_window.space.kind = SpatialKind::centered_bump;
  fam.push_back(bump_window);
  return fam;
}

}  // namespace logsense

#endif  // LOGSENSE_TEST_FUNCTION_HPP_
