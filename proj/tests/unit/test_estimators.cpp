#include <tickzone/estimators.hpp>
#include <tickzone/simulator.hpp>

#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

using namespace tickzone;

namespace {

std::vector<PriceChangeEvent> with_directions(std::initializer_list<int> dirs) {
  gen::Gen g(1);
  return g.changes(std::vector<int>(dirs), Price::parse("100"), Price::parse("1"));
}

SimulatedDay simulate(double eta, double sigma, double horizon, double intensity, std::uint64_t seed) {
  EfficientPathSpec spec;
  spec.x0 = 100.0;
  spec.volatility = Schedule::constant(sigma);
  spec.horizon = horizon;
  return simulate_day(spec, AssetSpec{"SIM", Price::parse("1"), eta},
                      TapeConfig{intensity, seed, "2009-06-01", 0});
}

TradeTape quoted_tape(std::vector<std::pair<const char*, const char*>> quotes) {
  TradeTape tape;
  tape.asset = {"Q", Price::parse("0.5"), std::nullopt};
  std::int64_t t = 0;
  for (const auto& [bid, ask] : quotes) {
    TradeEvent e;
    e.time_ms = t++;
    e.price = Price::parse(bid);
    e.pre_bid = Price::parse(bid);
    e.pre_ask = Price::parse(ask);
    tape.events.push_back(e);
  }
  return tape;
}

}  // namespace

TEST(CountAlternations, PureAlternation) {
  const auto c = count_alternations(with_directions({1, -1, 1, -1, 1}));
  EXPECT_EQ(c.alternations, 4);
  EXPECT_EQ(c.continuations, 0);
}

TEST(CountAlternations, PureContinuation) {
  const auto c = count_alternations(with_directions({1, 1, 1, 1}));
  EXPECT_EQ(c.alternations, 0);
  EXPECT_EQ(c.continuations, 3);
}

TEST(CountAlternations, NeedsTwoChanges) {
  EXPECT_THROW(static_cast<void>(count_alternations(with_directions({1}))), InsufficientDataError);
  EXPECT_THROW(static_cast<void>(count_alternations(std::vector<PriceChangeEvent>{})),
               InsufficientDataError);
}

TEST(CountAlternations, SimulatedContinuationShare) {
  const auto day = simulate(0.25, 1.0, 2500.0, 0.0, 17);
  ASSERT_GT(day.changes.size(), 4000u);
  const auto c = count_alternations(day.changes);
  const double share = static_cast<double>(c.continuations) /
                       static_cast<double>(c.continuations + c.alternations);
  EXPECT_NEAR(share, 1.0 / 3.0, 0.02);
}

TEST(CountAlternationsProperty, CountsSumToChangesMinusOne) {
  gen::Gen g(41);
  for (int i = 0; i < 500; ++i) {
    const auto dirs = g.directions(static_cast<std::size_t>(g.integer(2, 300)));
    const auto c = count_alternations(g.changes(dirs, Price::parse("50"), Price::parse("0.25")));
    EXPECT_EQ(c.alternations + c.continuations, static_cast<std::int64_t>(dirs.size()) - 1);
  }
}

TEST(EstimateEta, Examples) {
  EXPECT_EQ(estimate_eta({7, 0}), 0.0);
  EXPECT_EQ(estimate_eta({9, 9}), 0.5);
  EXPECT_THROW(static_cast<void>(estimate_eta({0, 5})), DegenerateTapeError);
}

TEST(EstimateEta, SimulatedLargeEta) {
  const auto day = simulate(0.4, 1.0, 4200.0, 0.0, 18);
  ASSERT_GE(day.changes.size(), 5000u);
  const double eta_hat = estimate_eta(count_alternations(day.changes));
  EXPECT_GE(eta_hat, 0.38);
  EXPECT_LE(eta_hat, 0.42);
}

TEST(EstimateEtaProperty, InvariantUnderSignFlip) {
  gen::Gen g(42);
  for (int i = 0; i < 500; ++i) {
    auto dirs = g.directions(static_cast<std::size_t>(g.integer(3, 200)));
    const auto c = count_alternations(g.changes(dirs, Price::parse("50"), Price::parse("1")));
    if (c.alternations == 0) continue;
    for (auto& d : dirs) d = -d;
    const auto flipped = count_alternations(g.changes(dirs, Price::parse("50"), Price::parse("1")));
    EXPECT_EQ(estimate_eta(c), estimate_eta(flipped));
  }
}

TEST(RecoverEfficientPrices, UpMoveShiftsBelowPrice) {
  const std::vector<PriceChangeEvent> ch = {{1.0, Price::parse("101"), 1, std::nullopt}};
  const auto x = recover_efficient_prices(ch, 0.25, 1.0);
  ASSERT_EQ(x.size(), 1u);
  EXPECT_DOUBLE_EQ(x[0].value, 100.75);
}

TEST(RecoverEfficientPrices, HalfEtaIsIdentity) {
  gen::Gen g(43);
  for (int i = 0; i < 100; ++i) {
    const Price tick = g.tick();
    const auto ch = g.changes(g.directions(50), tick * 1000, tick);
    const auto x = recover_efficient_prices(ch, 0.5, tick.to_double());
    for (std::size_t k = 0; k < ch.size(); ++k) EXPECT_EQ(x[k].value, ch[k].new_price.to_double());
  }
}

TEST(RecoverEfficientPrices, RejectsEtaOutsideUnitInterval) {
  const auto ch = with_directions({1, -1});
  EXPECT_THROW(static_cast<void>(recover_efficient_prices(ch, 0.0, 1.0)), DomainError);
  EXPECT_THROW(static_cast<void>(recover_efficient_prices(ch, 1.2, 1.0)), DomainError);
}

TEST(RecoverEfficientPrices, TrueEtaRecoversSimulatedPath) {
  const auto day = simulate(0.3, 0.8, 3000.0, 0.0, 19);
  const auto x = recover_efficient_prices(day.changes, 0.3, 1.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    worst = std::max(worst, std::fabs(x[k].value - *day.changes[k].efficient_price));
  }
  EXPECT_LE(worst, 1.0);
  EXPECT_LT(worst, 1e-9);
}

TEST(EstimateIntegratedVariance, Examples) {
  const std::vector<double> flat = {3.0, 3.0, 3.0};
  EXPECT_EQ(estimate_integrated_variance(flat), 0.0);
  const std::vector<double> two = {100.0, 100.75, 100.0};
  EXPECT_DOUBLE_EQ(estimate_integrated_variance(two), 1.125);
  const std::vector<double> one = {1.0};
  EXPECT_THROW(static_cast<void>(estimate_integrated_variance(one)), InsufficientDataError);
}

TEST(EstimateIntegratedVariance, SimulatedDayWithinFivePercent) {
  const auto day = simulate(0.25, 1.0, 5000.0, 0.0, 20);
  const auto x = recover_efficient_prices(day.changes, 0.25, 1.0);
  const double iv = estimate_integrated_variance(std::span<const RecoveredPrice>(x));
  EXPECT_NEAR(iv / day.truth.integrated_variance, 1.0, 0.05);
}

TEST(EstimateIntegratedVarianceProperty, ShiftInvariant) {
  gen::Gen g(44);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x(static_cast<std::size_t>(g.integer(2, 100)));
    for (auto& v : x) v = g.uniform(-10, 10);
    auto shifted = x;
    const double c = g.uniform(-1000, 1000);
    for (auto& v : shifted) v += c;
    EXPECT_NEAR(estimate_integrated_variance(x), estimate_integrated_variance(shifted),
                1e-9 * (1.0 + estimate_integrated_variance(x)));
  }
}

TEST(VolatilityPerTrade, Examples) {
  EXPECT_EQ(volatility_per_trade(0.0, 10), 0.0);
  EXPECT_DOUBLE_EQ(volatility_per_trade(100.0, 10000), 1.0);
  EXPECT_THROW(static_cast<void>(volatility_per_trade(1.0, 0)), InsufficientDataError);
}

TEST(VolatilityPerTrade, FractionOfTickAtFuturesScale) {
  // A BUS5-like day: tick 7.8125, ~27000 trades, eta*alpha*sqrt(M) sized volatility.
  const double alpha = 7.8125, eta = 0.233;
  const std::int64_t m = 26914;
  const double sigma = eta * alpha * std::sqrt(static_cast<double>(m));
  const double vpt = volatility_per_trade(sigma, m);
  EXPECT_GT(vpt, 0.0);
  EXPECT_LT(vpt, alpha);
}

TEST(SignaturePlot, ConstantPriceTapeIsZero) {
  TradeTape tape;
  tape.asset = {"C", Price::parse("1"), std::nullopt};
  tape.session_length_ms = 100'000;
  for (std::int64_t t = 0; t < 100'000; t += 700) tape.events.push_back({t, Price::parse("10"), 1, {}, {}, false, 0});
  const auto curve = signature_plot(tape, 1.0, 20);
  ASSERT_EQ(curve.points.size(), 20u);
  for (const auto& [d, v] : curve.points) EXPECT_EQ(v, 0.0);
}

TEST(SignaturePlot, Errors) {
  TradeTape empty;
  empty.session_length_ms = 1000;
  EXPECT_THROW(static_cast<void>(signature_plot(empty, 1.0, 5)), InsufficientDataError);
  TradeTape tape;
  tape.session_length_ms = 1000;
  tape.events.push_back({0, Price::parse("1"), 1, {}, {}, false, 0});
  EXPECT_THROW(static_cast<void>(signature_plot(tape, 0.0, 5)), ParameterError);
  EXPECT_THROW(static_cast<void>(signature_plot(tape, 1.0, 5)), InsufficientDataError);
}

TEST(SignaturePlot, DecreasingForSmallEta) {
  const auto day = simulate(0.25, 0.3, 20000.0, 0.0, 21);
  const auto curve = signature_plot(day.tape, 1.0, 50);
  EXPECT_GT(curve.points.at(1), curve.points.at(50));
  std::vector<double> x, y;
  for (const auto& [d, v] : curve.points) {
    EXPECT_GE(v, 0.0);
    x.push_back(d);
    y.push_back(v);
  }
  EXPECT_LT(oracle::ls_slope(x, y), 0.0);
}

TEST(SignaturePlot, PreviousTickSampling) {
  TradeTape tape;
  tape.asset = {"C", Price::parse("1"), std::nullopt};
  tape.session_length_ms = 4000;
  tape.events = {{0, Price::parse("10"), 1, {}, {}, false, 0},
                 {1500, Price::parse("11"), 1, {}, {}, true, 1},
                 {2000, Price::parse("10"), 1, {}, {}, true, -1},
                 {3999, Price::parse("12"), 1, {}, {}, true, 1}};
  // Samples at 1,2,3,4 s: 10, 10, 10, 12 after the opening 10.
  const auto curve = signature_plot(tape, 1.0, 2);
  EXPECT_DOUBLE_EQ(curve.points.at(1), 4.0);
  // Samples at 2,4 s: 10, 12.
  EXPECT_DOUBLE_EQ(curve.points.at(2), 4.0);
}

TEST(RollImplicitMeasure, Examples) {
  EXPECT_EQ(roll_implicit_measure(0.5, 2.0), 0.0);
  EXPECT_NEAR(roll_implicit_measure(1e-12, 1.0), std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(roll_implicit_measure(0.25, 3.0), std::sqrt(2.0 / 3.0) * 3.0, 1e-12);
  EXPECT_THROW(static_cast<void>(roll_implicit_measure(0.6, 1.0)), DomainError);
  EXPECT_THROW(static_cast<void>(roll_implicit_measure(0.0, 1.0)), DomainError);
}

TEST(RollImplicitMeasure, MatchesSimulatedAutocovariance) {
  const auto day = simulate(0.25, 1.0, 10000.0, 0.2, 22);
  EXPECT_NEAR(empirical_roll_measure(day.tape) / roll_implicit_measure(0.25, 1.0), 1.0, 0.05);
}

TEST(SpreadStats, AllOneTick) {
  const auto s = spread_stats(quoted_tape({{"10", "10.5"}, {"10.5", "11"}, {"10", "10.5"}}));
  EXPECT_DOUBLE_EQ(s.avg_spread, 0.5);
  EXPECT_DOUBLE_EQ(s.frac_one_tick, 100.0);
}

TEST(SpreadStats, HalfAtTwoTicks) {
  const auto s = spread_stats(quoted_tape({{"10", "10.5"}, {"10", "11"}, {"10", "10.5"}, {"10", "11"}}));
  EXPECT_DOUBLE_EQ(s.avg_spread, 0.75);
  EXPECT_DOUBLE_EQ(s.frac_one_tick, 50.0);
}

TEST(SpreadStats, MissingQuotesListsRows) {
  auto tape = quoted_tape({{"10", "10.5"}, {"10", "10.5"}, {"10", "10.5"}});
  tape.events[1].pre_ask.reset();
  try {
    static_cast<void>(spread_stats(tape));
    FAIL() << "expected PartialDataError";
  } catch (const PartialDataError& e) {
    ASSERT_EQ(e.rows().size(), 1u);
    EXPECT_EQ(e.rows()[0], 1u);
  }
}

TEST(SpreadStats, SimulatedTapeIsAlwaysOneTick) {
  const auto day = simulate(0.2, 0.5, 2000.0, 1.0, 23);
  EXPECT_DOUBLE_EQ(spread_stats(day.tape).frac_one_tick, 100.0);
  EXPECT_DOUBLE_EQ(spread_stats(day.tape).avg_spread, 1.0);
}

TEST(BuildDailyRecord, SimulatedDay) {
  const auto day = simulate(0.25, 1.0, 5000.0, 0.5, 24);
  const DailyRecord r = build_daily_record(day.tape);
  EXPECT_NEAR(r.eta_hat, 0.25, 0.02);
  EXPECT_NEAR(r.sigma_hat / std::sqrt(day.truth.integrated_variance), 1.0, 0.03);
  EXPECT_EQ(r.m_trades, static_cast<std::int64_t>(day.tape.events.size()));
  EXPECT_EQ(r.alpha, 1.0);
  EXPECT_EQ(r.frac_one_tick, 100.0);
  EXPECT_EQ(r.date, "2009-06-01");
  EXPECT_FALSE(r.eta_flagged());
}

TEST(BuildDailyRecord, OneChangeDayIsInsufficient) {
  TradeTape tape;
  tape.asset = {"X", Price::parse("1"), std::nullopt};
  tape.date = "2009-06-02";
  tape.events = {{0, Price::parse("10"), 1, Price::parse("9"), Price::parse("10"), false, 0},
                 {5, Price::parse("11"), 1, Price::parse("10"), Price::parse("11"), true, 1}};
  try {
    static_cast<void>(build_daily_record(tape));
    FAIL() << "expected InsufficientDataError";
  } catch (const InsufficientDataError& e) {
    EXPECT_NE(std::string(e.what()).find("asset 'X' day 2009-06-02"), std::string::npos);
  }
}

TEST(BuildDailyRecord, NoContinuationDayIsDegenerate) {
  TradeTape tape;
  tape.asset = {"X", Price::parse("1"), std::nullopt};
  tape.events = {{0, Price::parse("10"), 1, Price::parse("9"), Price::parse("10"), false, 0},
                 {5, Price::parse("11"), 1, Price::parse("10"), Price::parse("11"), true, 1},
                 {6, Price::parse("10"), 1, Price::parse("10"), Price::parse("11"), true, -1}};
  EXPECT_THROW(static_cast<void>(build_daily_record(tape)), DegenerateTapeError);
}

TEST(BuildDailyRecord, IdenticalDaysGiveIdenticalRecords) {
  const auto a = simulate(0.3, 0.7, 1500.0, 0.3, 25);
  const auto b = simulate(0.3, 0.7, 1500.0, 0.3, 25);
  EXPECT_EQ(build_daily_record(a.tape), build_daily_record(b.tape));
}

TEST(DailyRecord, FlagsLargeEta) {
  DailyRecord r;
  r.eta_hat = 0.56;
  EXPECT_TRUE(r.eta_flagged());
  r.eta_hat = 0.55;
  EXPECT_FALSE(r.eta_flagged());
}
