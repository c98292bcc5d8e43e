#include <tickzone/io/fixture.hpp>
#include <tickzone/tick_policy.hpp>

#include "support/generators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <string>

using namespace tickzone;

namespace {

TickScenario scenario(double alpha0, double alpha, double eta0, double p1, double p2, double beta) {
  TickScenario s;
  s.alpha0 = alpha0;
  s.alpha = alpha;
  s.eta0 = eta0;
  s.p1_0 = p1;
  s.p2_0 = p2;
  s.beta = beta;
  return s;
}

TickScenario random_scenario(gen::Gen& g) {
  return scenario(g.uniform(0.1, 20.0), g.uniform(0.1, 20.0), g.uniform(0.01, 0.5), g.uniform(0.3, 2.0),
                  g.uniform(0.0, 0.3), g.coin() ? kBetaLinear : kBetaSquareRoot);
}

}  // namespace

TEST(PredictEta, UnchangedTickKeepsEta) {
  for (int v = 1; v <= 3; ++v) {
    EXPECT_NEAR(predict_eta(scenario(5, 5, 0.23, 0.9, 0.1, 0.5), v).eta_pred, 0.23, 1e-15);
  }
}

TEST(PredictEta, BoblTickDoubling) {
  const auto linear = predict_eta(scenario(5, 10, 0.268, 0.91, 0.08, kBetaLinear), 1);
  const auto sqrt_case = predict_eta(scenario(5, 10, 0.268, 0.91, 0.08, kBetaSquareRoot), 1);
  EXPECT_NEAR(linear.eta_pred, 0.164, 1e-3);
  EXPECT_NEAR(sqrt_case.eta_pred, 0.124, 1e-3);
  EXPECT_LT(sqrt_case.eta_pred, 0.142);
  EXPECT_GT(linear.eta_pred, 0.142);
  EXPECT_TRUE(linear.in_large_tick_regime);
  EXPECT_FALSE(linear.warning.has_value());
}

TEST(PredictEta, VersionThreeQuarterTick) {
  EXPECT_NEAR(predict_eta(scenario(4, 1, 0.1, 0.5, 0.3, kBetaLinear), 3).eta_pred, 0.2, 1e-15);
}

TEST(PredictEta, VersionTwoConstants) {
  const auto f = predict_eta(scenario(4, 1, 0.1, 0.5, 0.3, kBetaLinear), 2);
  EXPECT_NEAR(f.eta_pred, (0.1 + 0.1) * 2.0 - 0.1, 1e-15);
}

TEST(PredictEta, WarnsOutsideLargeTickRegime) {
  const auto f = predict_eta(scenario(10, 1, 0.3, 1, 0, kBetaLinear), 3);
  EXPECT_GT(f.eta_pred, 0.5);
  EXPECT_FALSE(f.in_large_tick_regime);
  EXPECT_TRUE(f.warning.has_value());
}

TEST(PredictEta, Errors) {
  EXPECT_THROW(static_cast<void>(predict_eta(scenario(5, 10, 0.2, 1, 0, 2.0), 1)), DomainError);
  EXPECT_THROW(static_cast<void>(predict_eta(scenario(5, 10, 0.2, 0, 0, 1.0), 1)), ParameterError);
  EXPECT_THROW(static_cast<void>(predict_eta(scenario(5, 10, 0.2, 1, 0, 1.0), 4)), ParameterError);
  EXPECT_THROW(static_cast<void>(predict_eta(scenario(5, 0, 0.2, 1, 0, 1.0), 3)), ParameterError);
  EXPECT_NO_THROW(static_cast<void>(predict_eta(scenario(5, 10, 0.2, 0, 0, 1.0), 3)));
}

TEST(PredictEtaProperty, DecreasingInTickValue) {
  gen::Gen g(71);
  for (int i = 0; i < 500; ++i) {
    TickScenario s = random_scenario(g);
    const int v = static_cast<int>(g.integer(1, 3));
    const double a1 = s.alpha, a2 = s.alpha * g.uniform(1.01, 3.0);
    s.alpha = a1;
    const double e1 = predict_eta(s, v).eta_pred;
    s.alpha = a2;
    EXPECT_LT(predict_eta(s, v).eta_pred, e1);
  }
}

TEST(ScaleTradeCount, Examples) {
  EXPECT_DOUBLE_EQ(scale_trade_count(1000, 5, 5, 0.5), 1000);
  EXPECT_DOUBLE_EQ(scale_trade_count(1000, 5, 2.5, 1.0), 2000);
  EXPECT_THROW(static_cast<void>(scale_trade_count(0, 5, 2.5, 1.0)), ParameterError);
}

TEST(ScaleTradeCountProperty, ReproducesForecastByVolatilityInvariance) {
  // sigma = p1 eta alpha sqrt(M) + p2 alpha sqrt(M) held fixed with M scaled.
  gen::Gen g(72);
  for (int i = 0; i < 100; ++i) {
    const TickScenario s = random_scenario(g);
    const double m0 = g.uniform(1e3, 1e5);
    const double m = scale_trade_count(m0, s.alpha0, s.alpha, s.beta);
    const double lhs_fixed = s.p1_0 * s.eta0 * s.alpha0 * std::sqrt(m0) + s.p2_0 * s.alpha0 * std::sqrt(m0);
    const double eta = (lhs_fixed - s.p2_0 * s.alpha * std::sqrt(m)) / (s.p1_0 * s.alpha * std::sqrt(m));
    const double forecast = predict_eta(s, 1).eta_pred;
    EXPECT_NEAR(eta, forecast, 1e-12 * std::max(1.0, std::fabs(forecast)));
  }
}

TEST(CheckLargeTickRegime, Examples) {
  EXPECT_TRUE(check_large_tick_regime(1.0, 0.0, 100));
  EXPECT_FALSE(check_large_tick_regime(1.0, 100.0, 1e4));
  EXPECT_TRUE(check_large_tick_regime(1.0, 40.0, 1e4));
  EXPECT_TRUE(check_large_tick_regime(1.0, 50.0, 1e4));
  EXPECT_THROW(static_cast<void>(check_large_tick_regime(0.0, 1.0, 1.0)), ParameterError);
}

TEST(OptimalTick, Bus5AndEsx) {
  EXPECT_NEAR(optimal_tick(scenario(7.8125, 0, 0.233, 0.67, 0.10, kBetaLinear), 1), 2.7, 0.1);
  EXPECT_NEAR(optimal_tick(scenario(7.8125, 0, 0.233, 0.67, 0.10, kBetaSquareRoot), 1), 3.8, 0.1);
  EXPECT_NEAR(optimal_tick(scenario(10, 0, 0.087, 0.89, 0.13, kBetaLinear), 1), 1.3, 0.1);
}

TEST(OptimalTick, HalfEtaIsFixedPoint) {
  EXPECT_NEAR(optimal_tick(scenario(12.5, 0, 0.5, 1, 0, kBetaLinear), 3), 12.5, 1e-12);
  EXPECT_NEAR(optimal_tick(scenario(12.5, 0, 0.5, 1, 0, kBetaSquareRoot), 3), 12.5, 1e-12);
}

TEST(OptimalTick, VersionFormulas) {
  const auto s = scenario(10, 0, 0.2, 0.8, 0.1, kBetaLinear);
  EXPECT_NEAR(optimal_tick(s, 2), 10 * std::pow((0.2 + 0.1) / 0.6, 2.0), 1e-12);
  EXPECT_NEAR(optimal_tick(s, 3), 10 * std::pow(0.4, 2.0), 1e-12);
  EXPECT_THROW(static_cast<void>(optimal_tick(scenario(10, 0, 0.2, 1, 0, 2.5), 1)), DomainError);
}

TEST(OptimalTickProperty, InverseOfPredictAtHalf) {
  gen::Gen g(73);
  for (int i = 0; i < 500; ++i) {
    TickScenario s = random_scenario(g);
    const int v = static_cast<int>(g.integer(1, 3));
    s.alpha = optimal_tick(s, v);
    EXPECT_NEAR(predict_eta(s, v).eta_pred, 0.5, 1e-12 * 0.5);
  }
}

TEST(OptimalTickProperty, VersionsAgreeWithoutSpreadTerm) {
  gen::Gen g(74);
  for (int i = 0; i < 200; ++i) {
    TickScenario s = random_scenario(g);
    s.p1_0 = 1.0;
    s.p2_0 = 0.0;
    EXPECT_NEAR(optimal_tick(s, 1), optimal_tick(s, 3), 1e-12 * optimal_tick(s, 3));
  }
}

TEST(OptimalTick, PublishedTableFromFixture) {
  const std::map<std::string, std::pair<double, double>> published = {
      {"BUS5", {2.7, 3.8}}, {"DJ", {1.6, 2.3}},     {"EURO", {3.1, 5.0}}, {"SP", {0.3, 0.9}},
      {"Bobl 1", {1.8, 2.6}}, {"Bobl 2", {1.6, 2.8}}, {"Bund", {1.6, 2.9}}, {"DAX", {4.9, 6.7}},
      {"ESX", {1.3, 2.6}},  {"Schatz", {0.8, 1.5}}, {"CL", {3.1, 4.6}}};
  const auto rows = io::read_fixture(std::filesystem::path(TICKZONE_FIXTURE));
  ASSERT_EQ(rows.size(), published.size());
  for (const auto& r : rows) {
    const auto& [b1, b05] = published.at(r.asset);
    const auto s = scenario(r.tick_value, 0, r.eta, r.p1, r.p2, kBetaLinear);
    EXPECT_NEAR(optimal_tick(s, 1), b1, 0.1) << r.asset;
    auto sq = s;
    sq.beta = kBetaSquareRoot;
    EXPECT_NEAR(optimal_tick(sq, 1), b05, 0.1) << r.asset;
  }
}

TEST(OptimalTickRows, ShapeAndValues) {
  const int versions[] = {1, 2, 3};
  const auto rows = io::optimal_tick_rows("ESX", scenario(10, 0, 0.087, 0.89, 0.13, 1.0), versions);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[2].version, 3);
  ASSERT_TRUE(rows[0].beta_linear && rows[0].beta_sqrt);
  EXPECT_NEAR(*rows[0].beta_linear, 1.3, 0.1);
  EXPECT_NEAR(*rows[0].beta_sqrt, 2.6, 0.1);
  std::ostringstream out;
  io::write_optimal_tick_csv(out, rows);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), io::kOptimalTickHeader);
}
