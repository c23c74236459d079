#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "logsense/config.hpp"
#include "logsense/experiments.hpp"

using namespace logsense;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("logsense_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kSmallSimulate = R"({
  "mode": "simulate", "seed": 3,
  "model": {"chi": 2.0, "eps": 0.01},
  "grid": {"cells": [16, 16], "lengths": [1, 1]},
  "initial": {"u": {"kind": "gaussian", "background": 1, "amplitude": 4, "width": 0.1},
              "v": {"kind": "constant", "value": 1}},
  "time": {"T": 0.05, "snapshot_times": [0.025]}
})";

}  // namespace

TEST(Config, DefaultsAndOverrides) {
  const auto c = parse_config_text(kSmallSimulate);
  EXPECT_EQ(c.mode, Mode::simulate);
  EXPECT_EQ(c.seed, 3u);
  EXPECT_DOUBLE_EQ(c.model.chi, 2.0);
  EXPECT_EQ(c.grid.cells, (std::vector<std::size_t>{16, 16}));
  EXPECT_DOUBLE_EQ(c.time.effective_interval(), 0.05 / 200);
  EXPECT_EQ(parse_config_text(kSmallSimulate, Mode::simulate).mode, Mode::simulate);
}

TEST(Config, MalformedJsonIsValidationError) {
  EXPECT_THROW(parse_config_text("{\"mode\": \"simulate\", "), ConfigError);
}

TEST(Config, ProblemsCarryFieldPaths) {
  try {
    parse_config_text(R"({"mode": "simulate", "model": {"chi": -1, "bogus": 2}, "grid": {"cells": [2]}})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string all = e.what();
    EXPECT_NE(all.find("model.chi"), std::string::npos) << all;
    EXPECT_NE(all.find("model.bogus"), std::string::npos) << all;
    EXPECT_NE(all.find("grid.cells"), std::string::npos) << all;
  }
}

TEST(Config, RejectsUnknownModeAndBadLadder) {
  EXPECT_THROW(parse_config_text(R"({"mode": "fly"})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"mode": "eps-study", "eps_study": {"ladder": [0.1, 0.2]}})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"mode": "simulate"})", Mode::params), ConfigError);
}

TEST(Config, InadmissibleChiCaughtBeforeCompute) {
  EXPECT_THROW(parse_config_text(R"({"mode": "simulate", "model": {"chi": 3}, "grid": {"cells": [8,8,8], "lengths": [1,1,1]}})"),
               ConfigError);
}

TEST(Config, EchoRoundTrips) {
  const auto c = parse_config_text(kSmallSimulate);
  const auto again = parse_config(config_echo(c));
  EXPECT_EQ(config_echo(again).dump(), config_echo(c).dump());
}

TEST(Experiments, ParamsModeReportsInfimum) {
  auto c = parse_config_text(R"({"mode": "params", "model": {"chi": 1.5}, "params": {"n": 3, "p_samples": 50}})");
  const auto dir = fresh_dir("params");
  const auto o = run_experiment(c, dir);
  EXPECT_TRUE(o.passed);
  EXPECT_DOUBLE_EQ(o.manifest["results"]["infimum"].get<double>(), 1.5);
  EXPECT_TRUE(fs::exists(dir / "region.csv"));
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "timing.json"));
}

TEST(Experiments, SteadyStateSimulateAllPass) {
  auto c = parse_config_text(R"({
    "mode": "simulate", "model": {"chi": 2.0, "eps": 0.0},
    "grid": {"cells": [8, 8], "lengths": [1, 1]},
    "initial": {"u": {"kind": "constant", "value": 1}, "v": {"kind": "constant", "value": 1}},
    "time": {"T": 0.1}})");
  const auto o = run_experiment(c, fresh_dir("steady"));
  EXPECT_TRUE(o.passed) << o.manifest["assertions"].dump(1);
  for (const auto& a : o.manifest["assertions"]) EXPECT_TRUE(a.contains("tolerance"));
}

TEST(Experiments, SimulateIsDeterministic) {
  const auto c = parse_config_text(kSmallSimulate);
  const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
  const auto oa = run_experiment(c, a), ob = run_experiment(c, b);
  EXPECT_TRUE(oa.passed) << oa.manifest["assertions"].dump(1);
  ASSERT_EQ(oa.outputs, ob.outputs);
  for (const auto& f : oa.outputs) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));
  EXPECT_TRUE(fs::exists(a / "snapshots/u_0000.bin"));
  EXPECT_TRUE(fs::exists(a / "snapshots/v_0001.bin"));
}

TEST(EpsStudy, SingleEntryLadderHasNoDifferences) {
  auto c = parse_config_text(kSmallSimulate);
  c.eps_study.ladder = {0.1};
  const auto r = eps_convergence_study(c);
  EXPECT_TRUE(r.differences.empty());
  EXPECT_EQ(r.runs.size(), 1u);
}

TEST(EpsStudy, ConstantStateDifferencesScaleWithEps) {
  // u ≡ 1, v ≡ 1: v' = −v + 1/(1+ε), so |v_ε − v_ε'| = |1/(1+ε') − 1/(1+ε)| (1 − e^{−t}).
  auto c = parse_config_text(R"({
    "mode": "eps-study", "model": {"chi": 1.0},
    "grid": {"cells": [8, 8], "lengths": [1, 1]},
    "initial": {"u": {"kind": "constant", "value": 1}, "v": {"kind": "constant", "value": 1}},
    "time": {"T": 0.2},
    "eps_study": {"ladder": [0.04, 0.02, 0.01, 0.0]}})");
  const auto r = eps_convergence_study(c, 2);
  ASSERT_EQ(r.differences.size(), 3u);
  for (const auto& d : r.differences) {
    EXPECT_LE(d.u, 1e-13);
    const double gap = 1.0 / (1.0 + d.eps_b) - 1.0 / (1.0 + d.eps_a);
    // ∫₀^T (1 − e^{−t}) dt = T − 1 + e^{−T}; explicit Euler adds O(dt).
    const double predicted = gap * (0.2 - 1.0 + std::exp(-0.2));
    EXPECT_NEAR(d.v, predicted, 0.01 * predicted);
  }
  EXPECT_TRUE(r.v_monotone);
}

TEST(Refine, ConstantStateIsExact) {
  auto c = parse_config_text(R"({
    "mode": "refine-study", "model": {"chi": 1.0, "eps": 0.0},
    "grid": {"cells": [8], "lengths": [1]},
    "initial": {"u": {"kind": "constant", "value": 1}, "v": {"kind": "constant", "value": 1}},
    "time": {"T": 0.01}, "solver": {"scheme": "central"}})");
  const auto r = refine_study(c);
  for (const auto& o : r.orders) {
    EXPECT_TRUE(o.exact) << o.quantity;
    EXPECT_TRUE(o.passed) << o.quantity;
    EXPECT_EQ(to_json(o)["order"], "exact");
  }
}

TEST(Refine, NonNestedGridsRejected) {
  const std::vector<Field> f{Field(Grid::uniform(1, 8), 1.0), Field(Grid::uniform(1, 12), 1.0),
                             Field(Grid::uniform(1, 32), 1.0)};
  EXPECT_THROW(richardson_order("u", f, 1.5), GridError);
}

TEST(Refine, OrderFromValues) {
  const auto o = order_from_values("x", {1.0, 0.25, 0.0625}, 1.5, 1e-14);
  ASSERT_EQ(o.orders.size(), 2u);
  EXPECT_NEAR(o.orders[0], 2.0, 1e-14);
  EXPECT_TRUE(o.passed);
  EXPECT_FALSE(o.exact);
}

TEST(Helpers, SampleSchedule) {
  const auto s = sample_schedule(1.0, 0.25);
  EXPECT_EQ(s, (std::vector<double>{0.25, 0.5, 0.75, 1.0}));
  EXPECT_EQ(sample_schedule(1.0, 0.3).back(), 1.0);
  EXPECT_EQ(sample_schedule(1.0, 0.3).size(), 4u);
}

TEST(Helpers, BandRatio) {
  EXPECT_DOUBLE_EQ(band_ratio({-1.0, -2.0}), 2.0);
  EXPECT_TRUE(std::isinf(band_ratio({-1.0, 2.0})));
}

TEST(Helpers, ParallelForRethrowsLowestIndex) {
  try {
    parallel_for(6, 3, [](std::size_t i) {
      if (i == 2 || i == 4) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "2");
  }
}
