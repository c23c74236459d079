#include <cmath>

#include <gtest/gtest.h>

#include "logsense/params.hpp"

using namespace logsense;

TEST(QBounds, KnownValueAtHalf) {
  // (1−p)/2 · (1 ± √(1 − p χ²)) with p = 0.5, χ = 1.
  const QBounds b = q_bounds(0.5, 1.0);
  EXPECT_NEAR(b.q_minus, 0.25 * (1.0 - std::sqrt(0.5)), 1e-15);
  EXPECT_NEAR(b.q_minus, 0.0732233047033631, 1e-12);
  EXPECT_NEAR(b.q_plus, 0.4267766952966369, 1e-12);
}

TEST(QBounds, CollapsesAtCriticalP) {
  const QBounds b = q_bounds(0.25, 2.0);
  EXPECT_DOUBLE_EQ(b.q_minus, b.q_plus);
  EXPECT_DOUBLE_EQ(b.q_minus, 0.375);
}

TEST(QBounds, RejectsOutOfDomain) {
  EXPECT_THROW(q_bounds(0.5, 2.0), DomainError);
  EXPECT_THROW(q_bounds(0.0, 1.0), DomainError);
  EXPECT_THROW(q_bounds(1.0, 0.5), DomainError);
  EXPECT_THROW(q_bounds(0.5, -1.0), DomainError);
}

TEST(EntropyCoefficients, FrozenValues) {
  // Hand-evaluated at p = 0.5, q = 0.25, χ = 1: numerator 0.125, denominator 0.15625.
  const auto c = entropy_coefficients(0.5, 0.25, 1.0);
  EXPECT_NEAR(c.c1, 0.8, 1e-14);
  EXPECT_NEAR(c.c2, 20.0, 1e-13);
  EXPECT_NEAR(c.kappa, 0.4, 1e-14);
}

TEST(EntropyCoefficients, C1VanishesAtEndpoints) {
  for (double chi : {0.5, 1.0, 2.0, 2.8}) {
    const double pmax = std::min(1.0, 1.0 / (chi * chi));
    for (double frac : {0.1, 0.5, 0.9}) {
      const double p = frac * pmax;
      const QBounds b = q_bounds(p, chi);
      EXPECT_LE(std::abs(entropy_coefficients(p, b.q_minus, chi).c1), 1e-12) << chi << " " << p;
      EXPECT_LE(std::abs(entropy_coefficients(p, b.q_plus, chi).c1), 1e-12) << chi << " " << p;
      EXPECT_GT(entropy_coefficients(p, 0.5 * (b.q_minus + b.q_plus), chi).c1, 0.0);
    }
  }
}

TEST(Threshold, Table) {
  EXPECT_TRUE(chi_admissible(100.0, 2));
  EXPECT_TRUE(chi_admissible(2.82, 3));
  EXPECT_FALSE(chi_admissible(2.83, 3));
  EXPECT_FALSE(chi_admissible(2.0, 4));
  EXPECT_TRUE(chi_admissible(1.99, 4));
  EXPECT_THROW(chi_admissible(1.0, 1), DomainError);
}

TEST(Infimum, Branches) {
  EXPECT_DOUBLE_EQ(exponent_infimum(0.5), 1.0);
  EXPECT_DOUBLE_EQ(exponent_infimum(1.0), 1.0);
  EXPECT_DOUBLE_EQ(exponent_infimum(1.5), 1.5);
  EXPECT_DOUBLE_EQ(exponent_infimum(2.0), 2.0);
  EXPECT_NEAR(exponent_infimum(std::sqrt(8.0)), 3.0, 1e-12);
}

TEST(Infimum, ContinuousAtBranchPoints) {
  for (double c : {1.0, 2.0}) EXPECT_NEAR(exponent_infimum(c - 1e-9), exponent_infimum(c + 1e-9), 1e-8);
}

TEST(Infimum, BruteForceFromAbove) {
  for (double chi : {0.3, 1.0, 1.5, 2.5, 4.0}) {
    const double b = exponent_infimum_bruteforce(chi, 100000);
    EXPECT_GE(b, exponent_infimum(chi) - 1e-6) << chi;
    EXPECT_LE(b, exponent_infimum(chi) + 1e-3) << chi;
  }
}

TEST(Infimum, RhoMinimizerMatchesClosedForm) {
  // ρ(ξ) = ½(χ²/(1+ξ) + 1 + ξ) on ξ ∈ [0,1); minimum at ξ = χ−1 for χ ∈ (1,2).
  const auto [xi, val] = minimize_rho(1.5);
  EXPECT_NEAR(xi, 0.5, 1e-6);
  EXPECT_NEAR(val, 1.5, 1e-12);
}

TEST(UpperRatio, StableForTinyP) {
  const double p = 1e-14, chi = 1.0;
  EXPECT_NEAR(upper_q_ratio(p, chi), 1.0 + 0.25, 1e-12);
}

class SelectExponents : public ::testing::TestWithParam<std::pair<double, int>> {};

TEST_P(SelectExponents, PostconditionsHold) {
  const auto [chi, n] = GetParam();
  const auto e = select_exponents(chi, n, 0.01);
  EXPECT_TRUE(exponents_valid(e, chi, n, 0.01));
  ModelParams m;
  m.chi = chi;
  m.n = n;
  m.p = e.p;
  m.q = e.q;
  m.r = e.r;
  EXPECT_TRUE(entropy_exponents_ok(m));
  EXPECT_GT(entropy_coefficients(e.p, e.q, chi).c1, 0.0);
}

INSTANTIATE_TEST_SUITE_P(Grid, SelectExponents,
                         ::testing::Values(std::pair{0.5, 2}, std::pair{2.0, 2}, std::pair{10.0, 2},
                                           std::pair{1.0, 3}, std::pair{2.0, 3}, std::pair{2.8, 3},
                                           std::pair{1.5, 4}));

TEST(SelectExponentsErrors, Inadmissible) {
  EXPECT_THROW(select_exponents(2.9, 3, 0.01), InfeasibleError);
  EXPECT_THROW(select_exponents(1.0, 3, 0.0), DomainError);
}

TEST(Validate, RejectsBadParams) {
  ModelParams m;
  EXPECT_NO_THROW(validate(m));
  m.eps = -0.1;
  EXPECT_THROW(validate(m), DomainError);
  m = {};
  m.r = 1.0;
  EXPECT_THROW(validate(m), DomainError);
}

TEST(QBounds, ExtendedEndpointsAreRootsAtSmallP) {
  // Double q+ sits far enough from the root here that c1 is ~1e-10.
  const long double p = 0.0006377551020408163L, chi = 2.8L;
  const auto b = q_bounds_extended(p, chi);
  EXPECT_LE(std::abs(static_cast<double>(c1_extended(p, b.q_plus, chi))), 1e-12);
  EXPECT_LE(std::abs(static_cast<double>(c1_extended(p, b.q_minus, chi))), 1e-12);
  const QBounds d = q_bounds(static_cast<double>(p), 2.8);
  EXPECT_NEAR(d.q_plus, static_cast<double>(b.q_plus), 1e-15);
  EXPECT_NEAR(d.q_minus, static_cast<double>(b.q_minus), 1e-18);
}
