#pragma once

#include <tickzone/domain.hpp>
#include <tickzone/equilibrium.hpp>
#include <tickzone/errors.hpp>
#include <tickzone/io/csv.hpp>
#include <tickzone/io/session.hpp>
#include <tickzone/simulator.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace tickzone::io {

// Several simulated sessions of one asset, one per weekday from
// start_date. Each day restarts the efficient price at x0 with a constant
// volatility sigma * U[1 - dispersion, 1 + dispersion].
struct SyntheticMarketSpec {
  AssetSpec asset;  // eta required
  std::string start_date = "2009-05-15";
  int days = 1;
  SessionFilter session{9 * 60, 17 * 60, {}};
  double x0 = 100.0;
  double sigma = 0.1;  // currency per sqrt(second)
  double sigma_dispersion = 0.0;
  double drift = 0.0;
  double trade_intensity = 0.0;
  bool equilibrium_trades = false;  // break-even intensity instead of trade_intensity
  double dt = 0.0;                  // 0: default step
  std::uint64_t seed = 0;

  void validate() const {
    asset.validate();
    static_cast<void>(asset.require_eta());
    session.validate();
    if (days < 1) throw ParameterError("days must be at least 1");
    if (!(sigma >= 0.0)) throw ParameterError("sigma must be non-negative");
    if (!(sigma_dispersion >= 0.0 && sigma_dispersion < 1.0)) {
      throw ParameterError("sigma dispersion must lie in [0, 1)");
    }
  }
};

[[nodiscard]] inline std::vector<Date> trading_days(const Date& start, int count) {
  std::vector<Date> out;
  Date d = start;
  while (static_cast<int>(out.size()) < count) {
    const auto wd = d.day_of_week().as_number();
    if (wd != 0 && wd != 6) out.push_back(d);
    d += boost::gregorian::days(1);
  }
  return out;
}

[[nodiscard]] inline SimulatedDay simulate_session(const SyntheticMarketSpec& spec, const Date& date,
                                                   double sigma, std::uint64_t seed) {
  const auto [open, close] = spec.session.bounds(date);
  const double horizon = static_cast<double>(close - open) / 1000.0;

  EfficientPathSpec path;
  path.x0 = spec.x0;
  path.drift = Schedule::constant(spec.drift);
  path.volatility = Schedule::constant(sigma);
  path.horizon = horizon;
  path.dt = spec.dt;

  TapeConfig cfg;
  cfg.seed = seed;
  cfg.date = format_date(date);
  cfg.session_open_epoch_ms = open;
  cfg.trade_intensity =
      spec.equilibrium_trades && sigma > 0.0
          ? equilibrium_trade_intensity(spec.asset.alpha(), *spec.asset.eta,
                                        path.integrated_variance(), horizon)
          : spec.trade_intensity;
  return simulate_day(path, spec.asset, cfg);
}

[[nodiscard]] inline std::vector<SimulatedDay> simulate_market(const SyntheticMarketSpec& spec) {
  spec.validate();
  const auto dates = trading_days(parse_date(spec.start_date), spec.days);
  std::mt19937_64 vol_rng(derive_seed(spec.seed, 0xD15Bull));
  std::uniform_real_distribution<double> factor(1.0 - spec.sigma_dispersion,
                                                1.0 + spec.sigma_dispersion);
  std::vector<SimulatedDay> out;
  out.reserve(dates.size());
  for (std::size_t i = 0; i < dates.size(); ++i) {
    const double sigma = spec.sigma_dispersion > 0.0 ? spec.sigma * factor(vol_rng) : spec.sigma;
    out.push_back(simulate_session(spec, dates[i], sigma, derive_seed(spec.seed, i)));
  }
  return out;
}

// Writes <out_dir>/<asset>/<asset>_<date>.csv for every day and the ground
// truth to <out_dir>/<asset>_truth.csv.
inline std::vector<SimulatedDay> write_simulated_market(const SyntheticMarketSpec& spec,
                                                        const std::filesystem::path& out_dir) {
  auto days = simulate_market(spec);
  const auto& id = spec.asset.asset_id;
  const auto asset_dir = out_dir / id;
  std::filesystem::create_directories(asset_dir);
  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + p.string());
    return f;
  };
  for (const SimulatedDay& d : days) {
    auto f = open(asset_dir / (id + "_" + d.tape.date + ".csv"));
    write_trade_csv(f, d.tape);
  }
  auto truth = open(out_dir / (id + "_truth.csv"));
  truth << "asset,date,eta,alpha,integrated_variance,p0,n_changes,m_trades\n";
  for (const SimulatedDay& d : days) {
    truth << id << ',' << d.tape.date << ',' << format_double(d.truth.eta) << ','
          << spec.asset.tick.to_string() << ',' << format_double(d.truth.integrated_variance) << ','
          << d.truth.p0.to_string() << ',' << d.truth.n_changes << ',' << d.tape.events.size() << '\n';
  }
  return days;
}

}  // namespace tickzone::io
