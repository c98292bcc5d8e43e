#pragma once

#include <tickzone/domain.hpp>
#include <tickzone/errors.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tickzone {

struct AlternationCounts {
  std::int64_t alternations = 0;
  std::int64_t continuations = 0;

  friend bool operator==(const AlternationCounts&, const AlternationCounts&) = default;
};

// The first change has no predecessor and is not counted.
[[nodiscard]] inline AlternationCounts count_alternations(std::span<const PriceChangeEvent> changes) {
  if (changes.size() < 2) {
    throw InsufficientDataError("alternation counting needs at least 2 price changes, got " +
                                std::to_string(changes.size()));
  }
  AlternationCounts c;
  for (std::size_t i = 1; i < changes.size(); ++i) {
    if (changes[i].direction == changes[i - 1].direction) {
      ++c.continuations;
    } else {
      ++c.alternations;
    }
  }
  return c;
}

// eta_hat = N_c / (2 N_a). Not clamped: noisy days can exceed 1/2.
[[nodiscard]] inline double estimate_eta(const AlternationCounts& c) {
  if (c.alternations <= 0) {
    throw DegenerateTapeError("no alternations: eta estimator undefined");
  }
  return static_cast<double>(c.continuations) / (2.0 * static_cast<double>(c.alternations));
}

struct RecoveredPrice {
  double time = 0.0;
  double value = 0.0;

  friend bool operator==(const RecoveredPrice&, const RecoveredPrice&) = default;
};

// X_hat_i = P_i - direction_i * (1/2 - eta_hat) * alpha
[[nodiscard]] inline std::vector<RecoveredPrice> recover_efficient_prices(
    std::span<const PriceChangeEvent> changes, double eta_hat, double alpha) {
  if (!(eta_hat > 0.0 && eta_hat <= 1.0)) {
    throw DomainError("efficient-price recovery needs eta_hat in (0, 1], got " +
                      std::to_string(eta_hat));
  }
  if (!(alpha > 0.0)) throw ParameterError("tick value must be positive");
  const double shift = (0.5 - eta_hat) * alpha;
  std::vector<RecoveredPrice> out;
  out.reserve(changes.size());
  for (const PriceChangeEvent& c : changes) {
    if (c.direction != 1 && c.direction != -1) {
      throw ParameterError("price change without a direction at t=" + std::to_string(c.time));
    }
    out.push_back({c.time, c.new_price.to_double() - c.direction * shift});
  }
  return out;
}

// Sum of squared increments of the recovered efficient price.
[[nodiscard]] inline double estimate_integrated_variance(std::span<const double> xhat) {
  if (xhat.size() < 2) {
    throw InsufficientDataError("integrated variance needs at least 2 recovered prices");
  }
  double total = 0.0;
  for (std::size_t i = 1; i < xhat.size(); ++i) {
    const double d = xhat[i] - xhat[i - 1];
    total += d * d;
  }
  return total;
}

[[nodiscard]] inline double estimate_integrated_variance(std::span<const RecoveredPrice> xhat) {
  std::vector<double> values;
  values.reserve(xhat.size());
  for (const auto& r : xhat) values.push_back(r.value);
  return estimate_integrated_variance(std::span<const double>(values));
}

[[nodiscard]] inline double volatility_per_trade(double sigma_hat, std::int64_t m_trades) {
  if (m_trades < 1) throw InsufficientDataError("volatility per trade needs M >= 1");
  return sigma_hat / std::sqrt(static_cast<double>(m_trades));
}

// Realized variance of the last traded price sampled every delta/n
// seconds, previous-tick interpolation.
struct SignatureCurve {
  double sampling_frequency = 1.0;  // samples per second
  std::map<int, double> points;     // delta -> realized variance
};

namespace detail {

// Last traded price at or before `time_ms`; before the first trade the
// first traded price is used.
class PreviousTickSampler {
 public:
  explicit PreviousTickSampler(const std::vector<TradeEvent>& events) : events_(events) {}

  Price at(std::int64_t time_ms) {
    while (next_ < events_.size() && events_[next_].time_ms <= time_ms) ++next_;
    return events_[next_ == 0 ? 0 : next_ - 1].price;
  }

 private:
  const std::vector<TradeEvent>& events_;
  std::size_t next_ = 0;
};

}  // namespace detail

[[nodiscard]] inline SignatureCurve signature_plot(const TradeTape& tape, double n, int delta_max) {
  if (tape.events.empty()) throw InsufficientDataError("signature plot of an empty tape");
  if (!(n > 0.0)) throw ParameterError("sampling frequency must be positive");
  if (delta_max < 1) throw ParameterError("delta_max must be at least 1");
  const double t = tape.session_length_seconds();
  if (t * n < delta_max) {
    throw InsufficientDataError("tape shorter than the largest sampling interval");
  }

  SignatureCurve curve;
  curve.sampling_frequency = n;
  for (int delta = 1; delta <= delta_max; ++delta) {
    const auto samples = static_cast<std::int64_t>(std::floor(n * t / delta));
    detail::PreviousTickSampler sampler(tape.events);
    Price prev = sampler.at(0);
    double rv = 0.0;
    for (std::int64_t i = 1; i <= samples; ++i) {
      const auto ms = static_cast<std::int64_t>(
          std::floor(static_cast<double>(delta) * static_cast<double>(i) * 1000.0 / n));
      const Price cur = sampler.at(ms);
      const double d = (cur - prev).to_double();
      rv += d * d;
      prev = cur;
    }
    curve.points.emplace(delta, rv);
  }
  return curve;
}

// sqrt(-2 Cov_1) of tick-by-tick increments implied by the model:
// sqrt((2 - 4 eta) / (1 + 2 eta)) * alpha.
[[nodiscard]] inline double roll_implicit_measure(double eta, double alpha) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("eta must lie in (0, 1]");
  if (eta > 0.5) throw DomainError("Roll measure undefined for eta > 1/2 (negative radicand)");
  return std::sqrt((2.0 - 4.0 * eta) / (1.0 + 2.0 * eta)) * alpha;
}

// sqrt(-2 Cov_1) measured on successive price-change increments; 0 when
// the lag-one autocovariance is non-negative.
[[nodiscard]] inline double empirical_roll_measure(const TradeTape& tape) {
  std::vector<double> increments;
  Price last = tape.events.empty() ? Price{} : tape.events.front().price;
  for (std::size_t i = 1; i < tape.events.size(); ++i) {
    const TradeEvent& e = tape.events[i];
    if (e.price != last) {
      increments.push_back((e.price - last).to_double());
      last = e.price;
    }
  }
  if (increments.size() < 3) throw InsufficientDataError("Roll measure needs at least 3 price changes");
  double mean = 0.0;
  for (double d : increments) mean += d;
  mean /= static_cast<double>(increments.size());
  double cov = 0.0;
  for (std::size_t i = 1; i < increments.size(); ++i) {
    cov += (increments[i] - mean) * (increments[i - 1] - mean);
  }
  cov /= static_cast<double>(increments.size() - 1);
  return cov < 0.0 ? std::sqrt(-2.0 * cov) : 0.0;
}

struct SpreadStats {
  double avg_spread = 0.0;     // S, currency
  double frac_one_tick = 0.0;  // #S_=, percent
};

[[nodiscard]] inline SpreadStats spread_stats(const TradeTape& tape) {
  if (tape.events.empty()) throw InsufficientDataError("spread statistics of an empty tape");
  std::vector<std::size_t> missing;
  std::int64_t total_nanos = 0;
  std::int64_t one_tick = 0;
  for (std::size_t i = 0; i < tape.events.size(); ++i) {
    const TradeEvent& e = tape.events[i];
    if (!e.pre_bid || !e.pre_ask) {
      missing.push_back(i);
      continue;
    }
    const Price spread = *e.pre_ask - *e.pre_bid;
    total_nanos += spread.nanos();
    if (spread == tape.asset.tick) ++one_tick;
  }
  if (!missing.empty()) {
    std::string rows;
    for (std::size_t k = 0; k < missing.size() && k < 10; ++k) {
      rows += (k ? "," : "") + std::to_string(missing[k]);
    }
    if (missing.size() > 10) rows += ",...";
    throw PartialDataError(std::to_string(missing.size()) + " trades without quotes (rows " + rows + ")",
                           std::move(missing));
  }
  const auto m = static_cast<double>(tape.events.size());
  return {Price::from_nanos(total_nanos).to_double() / m, 100.0 * static_cast<double>(one_tick) / m};
}

// One asset-day: (eta_hat, alpha, sigma_hat, M, S, #S_=).
struct DailyRecord {
  std::string date;
  std::string asset_id;
  double eta_hat = 0.0;
  double alpha = 0.0;
  double sigma_hat = 0.0;
  std::int64_t m_trades = 0;
  double avg_spread = 0.0;
  double frac_one_tick = 0.0;

  static constexpr double kEtaFlagThreshold = 0.55;
  [[nodiscard]] bool eta_flagged() const noexcept { return eta_hat > kEtaFlagThreshold; }

  friend bool operator==(const DailyRecord&, const DailyRecord&) = default;
};

namespace detail {

template <class E>
[[noreturn]] void rethrow_with_context(const E& e, const std::string& context) {
  throw E(context + ": " + e.what());
}

}  // namespace detail

[[nodiscard]] inline DailyRecord build_daily_record(const TradeTape& tape) {
  const std::string context = "asset '" + tape.asset.asset_id + "' day " +
                              (tape.date.empty() ? std::string("?") : tape.date);
  try {
    const auto changes = price_changes(tape);
    const AlternationCounts counts = count_alternations(changes);
    const double eta_hat = estimate_eta(counts);
    if (!(eta_hat > 0.0 && eta_hat <= 1.0)) {
      throw DegenerateTapeError("eta_hat " + std::to_string(eta_hat) +
                                " outside (0, 1]: efficient price not recoverable");
    }
    const double alpha = tape.asset.alpha();
    const auto xhat = recover_efficient_prices(changes, eta_hat, alpha);
    const double iv = estimate_integrated_variance(std::span<const RecoveredPrice>(xhat));
    const SpreadStats spreads = spread_stats(tape);

    DailyRecord r;
    r.date = tape.date;
    r.asset_id = tape.asset.asset_id;
    r.eta_hat = eta_hat;
    r.alpha = alpha;
    r.sigma_hat = std::sqrt(iv);
    r.m_trades = static_cast<std::int64_t>(tape.events.size());
    r.avg_spread = spreads.avg_spread;
    r.frac_one_tick = spreads.frac_one_tick;
    return r;
  } catch (const InsufficientDataError& e) {
    detail::rethrow_with_context(e, context);
  } catch (const DegenerateTapeError& e) {
    detail::rethrow_with_context(e, context);
  } catch (const DomainError& e) {
    detail::rethrow_with_context(e, context);
  } catch (const ParameterError& e) {
    detail::rethrow_with_context(e, context);
  } catch (const PartialDataError& e) {
    throw PartialDataError(context + ": " + e.what(), e.rows());
  }
}

}  // namespace tickzone
