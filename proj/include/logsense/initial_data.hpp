#ifndef LOGSENSE_INITIAL_DATA_HPP_
#define LOGSENSE_INITIAL_DATA_HPP_

// Initial-data menu: constants, Gaussian bumps on a background, explicit
// Neumann cosine modes, and seeded random cosine series.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "logsense/grid.hpp"
#include "logsense/random.hpp"

namespace logsense {

enum class InitialKind { constant, gaussian, cosine, random_cosine };

struct InitialSpec {
  InitialKind kind = InitialKind::constant;
  double value = 1.0;       // constant
  double background = 0.0;  // gaussian, cosine, random_cosine
  double amplitude = 0.0;
  double width = 0.1;                 // gaussian standard deviation
  std::vector<double> center;         // gaussian; defaults to the domain center
  std::vector<std::array<int, 3>> modes;  // cosine wavenumbers per axis
  int cutoff = 3;                     // random_cosine: max wavenumber per axis
  std::uint64_t seed = 1;

  static InitialSpec constant_value(double c) {
    InitialSpec s;
    s.kind = InitialKind::constant;
    s.value = c;
    return s;
  }
  static InitialSpec gaussian_bump(double background, double amplitude, double width) {
    InitialSpec s;
    s.kind = InitialKind::gaussian;
    s.background = background;
    s.amplitude = amplitude;
    s.width = width;
    return s;
  }
  static InitialSpec cosine_mode(double background, double amplitude, std::array<int, 3> k) {
    InitialSpec s;
    s.kind = InitialKind::cosine;
    s.background = background;
    s.amplitude = amplitude;
    s.modes = {k};
    return s;
  }
};

/// Π_a cos(k_a π x_a / L_a) at the given point.
inline double cosine_product(const Grid& g, const std::array<int, 3>& k, const std::array<double, 3>& x) {
  double v = 1.0;
  for (int a = 0; a < g.dim; ++a) v *= std::cos(k[a] * std::numbers::pi * x[a] / g.extents[a]);
  return v;
}

inline Field make_initial(const Grid& g, const InitialSpec& s) {
  Field f(g, 0.0);
  auto point = [&](std::size_t i) {
    const auto m = g.unravel(i);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < g.dim; ++a) x[a] = g.center(a, m[a]);
    return x;
  };
  switch (s.kind) {
    case InitialKind::constant:
      for (double& x : f.values) x = s.value;
      break;
    case InitialKind::gaussian: {
      std::array<double, 3> c{0.0, 0.0, 0.0};
      for (int a = 0; a < g.dim; ++a)
        c[a] = static_cast<std::size_t>(a) < s.center.size() ? s.center[a] : 0.5 * g.extents[a];
      if (!(s.width > 0.0)) throw std::invalid_argument("initial data: gaussian width must be positive");
      for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = point(i);
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) r2 += (x[a] - c[a]) * (x[a] - c[a]);
        f.values[i] = s.background + s.amplitude * std::exp(-0.5 * r2 / (s.width * s.width));
      }
      break;
    }
    case InitialKind::cosine:
      for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = point(i);
        double v = 0.0;
        for (const auto& k : s.modes) v += cosine_product(g, k, x);
        f.values[i] = s.background + s.amplitude * v;
      }
      break;
    case InitialKind::random_cosine: {
      if (s.cutoff < 1) throw std::invalid_argument("initial data: cutoff must be >= 1");
      Rng rng(s.seed);
      std::vector<std::pair<std::array<int, 3>, double>> terms;
      const int kz = g.dim > 2 ? s.cutoff : 0;
      const int ky = g.dim > 1 ? s.cutoff : 0;
      for (int i = 0; i <= s.cutoff; ++i)
        for (int j = 0; j <= ky; ++j)
          for (int l = 0; l <= kz; ++l) {
            if (i == 0 && j == 0 && l == 0) continue;
            const double decay = 1.0 / (1.0 + i * i + j * j + l * l);
            terms.push_back({{i, j, l}, rng.uniform(-1.0, 1.0) * decay});
          }
      std::vector<double> series(g.size(), 0.0);
      double peak = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = point(i);
        for (const auto& [k, a] : terms) series[i] += a * cosine_product(g, k, x);
        peak = std::max(peak, std::abs(series[i]));
      }
      const double scale = peak > 0.0 ? s.amplitude / peak : 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) f.values[i] = s.background + scale * series[i];
      break;
    }
  }
  return f;
}

}  // namespace logsense

#endif  // LOGSENSE_INITIAL_DATA_HPP_
