#include <cmath>

#include <gtest/gtest.h>

#include "logsense/grid.hpp"
#include "logsense/initial_data.hpp"
#include "logsense/simulator.hpp"

using namespace logsense;

namespace {

ModelParams chi_eps(double chi, double eps) {
  ModelParams m;
  m.chi = chi;
  m.eps = eps;
  return m;
}

SimState gaussian_state(const Grid& g, double chi, double eps) {
  return make_state(make_initial(g, InitialSpec::gaussian_bump(1.0, 4.0, 0.1)), Field(g, 1.0), chi_eps(chi, eps));
}

}  // namespace

TEST(Simulator, ConstantStateStaysConstant) {
  // u ≡ c, v ≡ c/(1+εc) is a steady state of the discrete scheme.
  const Grid g = Grid::uniform(2, 16);
  const double c = 2.0, eps = 0.01;
  const SimState s0 = make_state(Field(g, c), Field(g, c / (1.0 + eps * c)), chi_eps(2.0, eps));
  const auto r = run(s0, 0.5, nullptr);
  EXPECT_NEAR(r.final_state.u.max(), c, 1e-13);
  EXPECT_NEAR(r.final_state.u.min(), c, 1e-13);
  EXPECT_NEAR(r.final_state.v.max(), c / (1.0 + eps * c), 1e-13);
}

TEST(Simulator, MassConservedToRoundoff) {
  const Grid g = Grid::uniform(2, 32);
  const SimState s0 = gaussian_state(g, 2.0, 0.01);
  const double m0 = integrate(s0.u);
  double worst = 0.0;
  run(s0, 0.2, [&](const SimState& s) { worst = std::max(worst, std::abs(integrate(s.u) - m0) / m0); });
  EXPECT_LE(worst, 1e-12);
}

TEST(Simulator, CentralSchemeAlsoConserves) {
  const Grid g = Grid::uniform(2, 32);
  const SimState s0 = gaussian_state(g, 1.0, 0.0);
  SimConfig cfg;
  cfg.scheme = FluxScheme::central;
  const auto r = run(s0, 0.05, nullptr, {}, cfg);
  EXPECT_NEAR(integrate(r.final_state.u), integrate(s0.u), 1e-12 * integrate(s0.u));
}

TEST(Simulator, SampleTimesHitExactlyAndInOrder) {
  const Grid g = Grid::uniform(1, 32);
  const SimState s0 = gaussian_state(g, 1.0, 0.1);
  RunOptions o;
  for (int k = 1; k < 10; ++k) o.sample_times.push_back(0.1 * k);
  std::vector<double> seen;
  run(s0, 1.0, [&](const SimState& s) { seen.push_back(s.t); }, o);
  ASSERT_EQ(seen.size(), 11u);
  EXPECT_EQ(seen.front(), 0.0);
  for (int k = 1; k < 10; ++k) EXPECT_EQ(seen[k], 0.1 * k);
  EXPECT_EQ(seen.back(), 1.0);
}

TEST(Simulator, PeriodicObservationIsIncreasing) {
  const Grid g = Grid::uniform(1, 32);
  RunOptions o;
  o.observe_every_steps = 3;
  std::vector<double> seen;
  const auto r = run(gaussian_state(g, 1.0, 0.1), 0.1, [&](const SimState& s) { seen.push_back(s.t); }, o);
  EXPECT_GE(seen.size(), r.steps / 3);
  for (std::size_t k = 1; k < seen.size(); ++k) EXPECT_GT(seen[k], seen[k - 1]);
}

TEST(Simulator, PositivityAndVFloor) {
  const Grid g = Grid::uniform(2, 32);
  const SimState s0 = gaussian_state(g, 2.0, 0.01);
  const double vmin0 = s0.v.min();
  const double h = g.min_spacing();
  run(s0, 0.5, [&](const SimState& s) {
    EXPECT_GE(s.u.min(), 0.0);
    EXPECT_GE(s.v.min(), vmin0 * std::exp(-s.t) - 10.0 * h * h);
  });
}

TEST(Simulator, StepRejectsDtAboveCfl) {
  const Grid g = Grid::uniform(1, 16);
  const SimState s0 = gaussian_state(g, 1.0, 0.0);
  EXPECT_THROW(step(s0, 10.0 * cfl_dt(s0), {}), DomainError);
  EXPECT_THROW(step(s0, 0.0, {}), DomainError);
}

TEST(Simulator, RejectsBadInitialData) {
  const Grid g = Grid::uniform(1, 16);
  EXPECT_THROW(make_state(Field(g, -1.0), Field(g, 1.0), {}), GridError);
  EXPECT_THROW(make_state(Field(g, 1.0), Field(g, 0.0), {}), GridError);
}

TEST(Simulator, SingularityBelowFloor) {
  const Grid g = Grid::uniform(1, 16);
  SimState s = gaussian_state(g, 1.0, 0.0);
  s.v.values[3] = 1e-15;
  EXPECT_THROW(chemotactic_flux(s, {}), SingularityError);
}

TEST(Simulator, TemporalOrderAtLeastOne) {
  // Explicit Euler at fixed dt, dt/2, dt/4: successive differences halve.
  const Grid g = Grid::uniform(1, 32);
  const SimState s0 = gaussian_state(g, 1.0, 0.0);
  const double dt = 0.5 * cfl_dt(s0);
  std::vector<Field> finals;
  for (double f : {1.0, 0.5, 0.25}) {
    SimConfig cfg;
    cfg.fixed_dt = dt * f;
    finals.push_back(run(s0, 64 * dt, nullptr, {}, cfg).final_state.u);
  }
  const double e1 = l1_distance(finals[0], finals[1]);
  const double e2 = l1_distance(finals[1], finals[2]);
  EXPECT_GE(std::log2(e1 / e2), 0.9);
}

TEST(Simulator, UpwindFaceValueFollowsDrift) {
  // v increasing in x pushes u right, so the flux uses the left cell.
  const Grid g = Grid::uniform(1, 8);
  Field u(g, 1.0), v = sample(g, [](double x, double, double) { return 1.0 + x; });
  u.values[3] = 5.0;
  const SimState s = make_state(u, v, chi_eps(1.0, 0.0));
  const auto f = chemotactic_flux(s, {});
  const double vel = (v[4] - v[3]) / g.h[0] / (0.5 * (v[3] + v[4]));
  EXPECT_NEAR(f.axis[0][4], vel * 5.0, 1e-12);
}
