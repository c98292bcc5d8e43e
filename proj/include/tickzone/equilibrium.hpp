#pragma once

#include <tickzone/domain.hpp>
#include <tickzone/errors.hpp>

#include <cmath>
#include <string>

namespace tickzone {

struct CrossingProbabilities {
  double p_down = 0.0;  // next change reverses the last one
  double p_up = 0.0;    // next change continues it
};

// After an upward trade with the efficient price inside the quotes, the
// next change is down with probability 1/(1+2 eta) and up with 2 eta/(1+2 eta).
[[nodiscard]] inline CrossingProbabilities crossing_probabilities(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw ParameterError("eta must lie in (0, 1], got " + std::to_string(eta));
  }
  const double denom = 1.0 + 2.0 * eta;
  return {1.0 / denom, 2.0 * eta / denom};
}

// Ex post expected cost of a market order relative to the efficient price.
[[nodiscard]] inline double market_order_cost(double alpha, double eta) {
  return alpha / 2.0 - eta * alpha;
}

[[nodiscard]] inline double market_order_cost(const AssetSpec& asset) {
  asset.validate();
  return market_order_cost(asset.alpha(), asset.require_eta());
}

inline constexpr double kDefaultWyartC = 2.0;

// Market-maker P&L per trade, S/2 - (c/2) sigma_per_trade, c in [1, 2].
[[nodiscard]] inline double market_maker_pnl(double spread, double sigma_per_trade,
                                             double c = kDefaultWyartC) {
  if (!(c >= 1.0 && c <= 2.0)) {
    throw ParameterError("market-maker constant c must lie in [1, 2], got " + std::to_string(c));
  }
  if (!(spread > 0.0)) throw ParameterError("spread must be positive");
  return spread / 2.0 - (c / 2.0) * sigma_per_trade;
}

struct EquilibriumReport {
  double p_down = 0.0;
  double p_up = 0.0;
  double market_order_cost = 0.0;
  double mm_pnl_per_trade = 0.0;
  double wyart_c = kDefaultWyartC;
};

[[nodiscard]] inline EquilibriumReport equilibrium_report(double alpha, double eta, double spread,
                                                          double sigma_per_trade,
                                                          double c = kDefaultWyartC) {
  const auto probs = crossing_probabilities(eta);
  return {probs.p_down, probs.p_up, market_order_cost(alpha, eta),
          market_maker_pnl(spread, sigma_per_trade, c), c};
}

// Non-price-changing trade rate making the market maker break even at a
// one-tick spread: total trades M with eta*alpha = sigma/sqrt(M), minus the
// expected sigma^2 t / (2 eta alpha^2) price changes.
[[nodiscard]] inline double equilibrium_trade_intensity(double alpha, double eta,
                                                        double integrated_variance, double horizon) {
  if (!(alpha > 0.0)) throw ParameterError("tick value must be positive");
  if (!(eta > 0.0 && eta <= 0.5)) {
    throw DomainError("break-even trade intensity needs eta in (0, 1/2]");
  }
  if (!(horizon > 0.0)) throw ParameterError("horizon must be positive");
  const double total = integrated_variance / (eta * eta * alpha * alpha);
  const double changes = integrated_variance / (2.0 * eta * alpha * alpha);
  return (total - changes) / horizon;
}

}  // namespace tickzone
