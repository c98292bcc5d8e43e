#pragma once

#include <tickzone/errors.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

namespace tickzone {

// Latent-liquidity presets for f(x) = c x^beta.
inline constexpr double kBetaLinear = 1.0;
inline constexpr double kBetaSquareRoot = 0.5;

// Constants behind the regression-free forecasts.
inline constexpr double kVersion2P2 = 0.1;

// A tick-value change from alpha0 to alpha. p1_0, p2_0 are the asset's
// regression coefficients before the change.
struct TickScenario {
  double alpha0 = 0.0;
  double alpha = 0.0;
  double eta0 = 0.0;
  double p1_0 = 1.0;
  double p2_0 = 0.0;
  double beta = kBetaLinear;
  std::optional<double> m0;

  void validate(bool need_alpha = true) const {
    if (!(alpha0 > 0.0)) throw ParameterError("alpha0 must be positive");
    if (need_alpha && !(alpha > 0.0)) throw ParameterError("alpha must be positive");
    if (!(eta0 > 0.0)) throw ParameterError("eta0 must be positive");
    if (!(beta > 0.0)) throw ParameterError("beta must be positive");
    if (!(beta < 2.0)) throw DomainError("beta must be below 2 (exponent 1 - beta/2 must stay positive)");
  }

  [[nodiscard]] double exponent() const noexcept { return 1.0 - beta / 2.0; }
};

struct EtaForecast {
  int version = 1;
  double eta_pred = 0.0;
  bool in_large_tick_regime = true;  // eta_pred in (0, 1/2]
  std::optional<std::string> warning;
};

namespace detail {

inline void check_version(int version) {
  if (version < 1 || version > 3) {
    throw ParameterError("formula version must be 1, 2 or 3, got " + std::to_string(version));
  }
}

// (p1, p2) assumed by each version.
struct Coefficients {
  double p1, p2;
};

inline Coefficients coefficients(const TickScenario& s, int version) {
  switch (version) {
    case 1:
      if (!(s.p1_0 > 0.0)) throw ParameterError("version 1 needs p1_0 > 0");
      return {s.p1_0, s.p2_0};
    case 2: return {1.0, kVersion2P2};
    default: return {1.0, 0.0};
  }
}

}  // namespace detail

// eta = (eta0 + p2/p1) (alpha0/alpha)^(1 - beta/2) - p2/p1
[[nodiscard]] inline EtaForecast predict_eta(const TickScenario& s, int version) {
  detail::check_version(version);
  s.validate();
  const auto [p1, p2] = detail::coefficients(s, version);
  const double offset = p2 / p1;
  const double eta = (s.eta0 + offset) * std::pow(s.alpha0 / s.alpha, s.exponent()) - offset;

  EtaForecast f;
  f.version = version;
  f.eta_pred = eta;
  f.in_large_tick_regime = eta > 0.0 && eta <= 0.5;
  if (!f.in_large_tick_regime) {
    f.warning = eta <= 0.0 ? "predicted eta is not positive: outside the model's range"
                           : "predicted eta exceeds 1/2: the spread is no longer one tick";
  }
  return f;
}

// M = M0 (alpha0/alpha)^beta, traded volume held fixed.
[[nodiscard]] inline double scale_trade_count(double m0, double alpha0, double alpha, double beta) {
  if (!(m0 > 0.0 && alpha0 > 0.0 && alpha > 0.0 && beta > 0.0)) {
    throw ParameterError("trade-count scaling needs positive inputs");
  }
  return m0 * std::pow(alpha0 / alpha, beta);
}

// The spread stays at one tick while alpha/2 - sigma/sqrt(M) >= 0.
[[nodiscard]] inline bool check_large_tick_regime(double alpha, double sigma, double m) {
  if (!(alpha > 0.0 && m > 0.0 && sigma >= 0.0)) {
    throw ParameterError("large-tick check needs alpha > 0, M > 0, sigma >= 0");
  }
  return alpha / 2.0 >= sigma / std::sqrt(m);
}

// Largest tick value giving eta = 1/2 after the change.
[[nodiscard]] inline double optimal_tick(const TickScenario& s, int version) {
  detail::check_version(version);
  s.validate(false);
  const auto [p1, p2] = detail::coefficients(s, version);
  const double ratio = (s.eta0 * p1 + p2) / (p1 / 2.0 + p2);
  return s.alpha0 * std::pow(ratio, 1.0 / s.exponent());
}

}  // namespace tickzone
