#pragma once

#include <tickzone/errors.hpp>
#include <tickzone/price.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tickzone {

// Static parameters of one asset: the tick value and, when known, the
// uncertainty-zone parameter eta. Real data carries no eta; it is
// estimated downstream.
struct AssetSpec {
  std::string asset_id;
  Price tick;
  std::optional<double> eta;

  [[nodiscard]] double alpha() const noexcept { return tick.to_double(); }

  void validate() const {
    if (tick.nanos() <= 0) {
      throw ParameterError("asset '" + asset_id + "': tick value must be positive");
    }
    if (eta && !(*eta > 0.0 && *eta <= 1.0)) {
      throw ParameterError("asset '" + asset_id + "': eta must lie in (0, 1], got " +
                           std::to_string(*eta));
    }
  }

  [[nodiscard]] double require_eta() const {
    if (!eta) throw ParameterError("asset '" + asset_id + "': eta is required");
    return *eta;
  }

  [[nodiscard]] bool on_grid(Price p) const noexcept { return p.nanos() % tick.nanos() == 0; }

  // Nearest grid point; exact ties round down.
  [[nodiscard]] Price nearest_grid_point(double x) const {
    const double a = alpha();
    const double k = std::floor(x / a);
    const double below = k * a;
    const double above = below + a;
    const double chosen = (x - below <= above - x) ? k : k + 1.0;
    return tick * static_cast<std::int64_t>(chosen);
  }
};

// One transaction. `direction` is +1/-1 for a trade that moved the last
// traded price, 0 otherwise (including the first trade of a tape).
struct TradeEvent {
  std::int64_t time_ms = 0;  // since session open
  Price price;
  std::int64_t size = 1;
  std::optional<Price> pre_bid;
  std::optional<Price> pre_ask;
  bool changed_price = false;
  int direction = 0;

  friend bool operator==(const TradeEvent&, const TradeEvent&) = default;
};

// Time-ordered trades of one asset over one session. The first event
// is the reference (opening) trade: it never counts as a price change.
struct TradeTape {
  AssetSpec asset;
  std::string date;                      // YYYY-MM-DD, may be empty
  std::int64_t session_open_epoch_ms = 0;  // UTC
  std::int64_t session_length_ms = 0;
  std::vector<TradeEvent> events;

  [[nodiscard]] double session_length_seconds() const noexcept {
    return static_cast<double>(session_length_ms) / 1000.0;
  }
};

// A move of the last traded price. `efficient_price` is only known for
// simulated data.
struct PriceChangeEvent {
  double time = 0.0;  // seconds since session open
  Price new_price;
  int direction = 0;  // +1 up, -1 down
  std::optional<double> efficient_price;

  friend bool operator==(const PriceChangeEvent&, const PriceChangeEvent&) = default;
};

// Price changes carried by a tape, in order.
[[nodiscard]] inline std::vector<PriceChangeEvent> price_changes(const TradeTape& tape) {
  std::vector<PriceChangeEvent> out;
  for (const TradeEvent& e : tape.events) {
    if (!e.changed_price) continue;
    out.push_back({static_cast<double>(e.time_ms) / 1000.0, e.price, e.direction, std::nullopt});
  }
  return out;
}

enum class Zone { Outside, BidZone, BuySellZone, AskZone };

[[nodiscard]] inline const char* to_string(Zone z) noexcept {
  switch (z) {
    case Zone::BidZone: return "bid";
    case Zone::BuySellZone: return "buy/sell";
    case Zone::AskZone: return "ask";
    case Zone::Outside: break;
  }
  return "outside";
}

// Efficient-price regions for bid-ask quotes [b, b + alpha].
//   bid zone      (b - a/2 - ea, b + a/2 - ea)
//   buy/sell zone [b + a/2 - ea, b + a/2 + ea]
//   ask zone      (b + a/2 + ea, b + 3a/2 + ea)
class ZoneGeometry {
 public:
  ZoneGeometry(Price bid, double alpha, double eta) : bid_(bid), alpha_(alpha), eta_(eta) {
    if (!(alpha > 0.0)) throw ParameterError("zone geometry: alpha must be positive");
    if (!(eta > 0.0 && eta <= 1.0)) throw ParameterError("zone geometry: eta must lie in (0, 1]");
  }

  ZoneGeometry(Price bid, const AssetSpec& asset)
      : ZoneGeometry(bid, asset.alpha(), asset.require_eta()) {}

  [[nodiscard]] Price bid() const noexcept { return bid_; }
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] double eta() const noexcept { return eta_; }

  [[nodiscard]] double buy_sell_low() const noexcept { return mid() - eta_ * alpha_; }
  [[nodiscard]] double buy_sell_high() const noexcept { return mid() + eta_ * alpha_; }
  [[nodiscard]] double bid_zone_low() const noexcept { return mid() - alpha_ - eta_ * alpha_; }
  [[nodiscard]] double ask_zone_high() const noexcept { return mid() + alpha_ + eta_ * alpha_; }

  // The implicit spread 2*eta*alpha.
  [[nodiscard]] double buy_sell_width() const noexcept { return 2.0 * eta_ * alpha_; }

  [[nodiscard]] Zone classify(double x) const noexcept {
    if (x >= buy_sell_low() && x <= buy_sell_high()) return Zone::BuySellZone;
    if (x > bid_zone_low() && x < buy_sell_low()) return Zone::BidZone;
    if (x > buy_sell_high() && x < ask_zone_high()) return Zone::AskZone;
    return Zone::Outside;
  }

 private:
  [[nodiscard]] double mid() const noexcept { return bid_.to_double() + alpha_ / 2.0; }

  Price bid_;
  double alpha_;
  double eta_;
};

[[nodiscard]] inline Zone classify_efficient_price(const ZoneGeometry& zone, double x) noexcept {
  return zone.classify(x);
}

}  // namespace tickzone
