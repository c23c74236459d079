#include <cmath>

#include <gtest/gtest.h>

#include "logsense/grid.hpp"
#include "logsense/oracles.hpp"
#include "logsense/random.hpp"

using namespace logsense;
using namespace logsense::oracles;

TEST(PowerIdentities, ExactForRTwoAndSecondOrderOtherwise) {
  double prev = 0.0;
  for (std::size_t n : {32, 64, 128}) {
    const Field w = sample(Grid::uniform(1, n), [](double x, double, double) { return std::exp(x); });
    const auto r2 = check_power_identities(w, 2.0);
    EXPECT_LE(r2.res29, 1e-12);
    const auto r = check_power_identities(w, 1.5);
    if (prev > 0.0) {
      EXPECT_GE(std::log2(prev / r.res29), 1.9);
    }
    prev = r.res29;
  }
}

TEST(PowerIdentities, ConstantFieldIsExact) {
  const Field w(Grid::uniform(2, 8), 2.0);
  const auto r = check_power_identities(w, 1.3);
  EXPECT_LE(r.res29, 1e-14);
  EXPECT_LE(r.res210, 1e-14);
}

TEST(SquareCompletion, RandomFieldsAtRoundoff) {
  Rng rng(17);
  const Grid g = Grid::uniform(2, 8);
  for (int trial = 0; trial < 50; ++trial) {
    const double chi = rng.uniform(0.2, 3.0);
    const double p = std::min(1.0, 1.0 / (chi * chi)) * rng.uniform(0.05, 0.95);
    const QBounds b = q_bounds(p, chi);
    const double q = b.q_minus + (b.q_plus - b.q_minus) * rng.uniform(0.05, 0.95);
    Field u(g), v(g);
    for (double& x : u.values) x = rng.uniform(0.1, 4.0);
    for (double& x : v.values) x = rng.uniform(0.1, 4.0);
    EXPECT_LE(check_square_completion(u, v, p, q, chi).max_rel, 1e-10);
  }
}

TEST(Ode, CothSpotValues) {
  EXPECT_NEAR(coth_bound(1.0, 4.0, 1.0), 2.0 * std::cosh(2.0) / std::sinh(2.0), 1e-14);
  EXPECT_NEAR(coth_bound(1.0, 4.0, 1.0), 2.0746, 1e-4);
  EXPECT_NEAR(coth_bound(1.0, 1.0, 0.01), 100.00333, 1e-4);
  EXPECT_THROW(coth_bound(0.0, 1.0, 1.0), DomainError);
}

TEST(Ode, SaturatedEquationStaysBelowBound) {
  Rng rng(23);
  for (int k = 0; k < 20; ++k) {
    const OdeComparison s{rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0), rng.uniform(0.0, 20.0), 1.0};
    EXPECT_TRUE(verify_ode_comparison(s, 20000).holds);
  }
}

TEST(Ode, ConvergesToEquilibrium) {
  const auto r = verify_ode_comparison({2.0, 8.0, 0.0, 10.0}, 100000);
  EXPECT_NEAR(r.y_final, 2.0, 1e-10);
}

TEST(LogPoincare, Deterministic) {
  EnsembleSpec spec;
  spec.samples = 40;
  spec.seed = 5;
  const Grid g = Grid::uniform(2, 16);
  const auto a = log_poincare_ratio(spec, g), b = log_poincare_ratio(spec, g);
  EXPECT_EQ(a.max_ratio, b.max_ratio);
  EXPECT_EQ(a.ratio_branch + a.alternative_branch + a.excluded, a.samples);
}

TEST(LogPoincare, ConstantAboveLevelIsExcluded) {
  const Field phi(Grid::uniform(2, 8), 0.5);
  const auto s = log_poincare_terms(phi, 1.0);
  EXPECT_EQ(s.fisher, 0.0);
  EXPECT_NEAR(s.log_integral, std::log(2.0), 1e-14);
}

TEST(MeanPoincare, LinearFieldClosedForm) {
  // u = x on (0,1), B = Ω, p = 2: numerator² is the variance of the cell
  // centers (n² − 1)/(12 n²); |Du| ≡ 1.
  for (std::size_t n : {8, 32}) {
    const Field u = sample(Grid::uniform(1, n), [](double x, double, double) { return x; });
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    const auto t = mean_poincare_terms(u, all, 2.0);
    const double nn = static_cast<double>(n);
    EXPECT_NEAR(t.u_B, 0.5, 1e-15);
    EXPECT_NEAR(t.denominator, 1.0, 1e-12);
    EXPECT_NEAR(t.ratio(), std::sqrt((nn * nn - 1.0) / (12.0 * nn * nn)), 1e-12);
  }
}

TEST(MeanPoincare, BSetSelection) {
  const Field u = sample(Grid::uniform(1, 10), [](double x, double, double) { return x; });
  const auto top = select_b_set(u, 3, BSelector::threshold, 0);
  EXPECT_EQ(top, (std::vector<std::size_t>{7, 8, 9}));
  EXPECT_EQ(select_b_set(u, 4, BSelector::random_mask, 3), select_b_set(u, 4, BSelector::random_mask, 3));
  EXPECT_THROW(select_b_set(u, 0, BSelector::threshold, 0), DomainError);
}

TEST(MeanPoincare, ReproducibleEnsemble) {
  EnsembleSpec spec;
  spec.samples = 20;
  spec.delta = 0.25;
  const Grid g = Grid::uniform(2, 16);
  const auto a = mean_poincare_ratio(spec, g, 2.0, 2), b = mean_poincare_ratio(spec, g, 2.0, 2);
  EXPECT_EQ(a.max_ratio, b.max_ratio);
  EXPECT_EQ(a.max_riesz_ratio, b.max_riesz_ratio);
  EXPECT_NEAR(a.b_measure, 0.25, 1e-15);
  EXPECT_GT(a.max_ratio, 0.0);
}
