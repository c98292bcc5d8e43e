#pragma once

#include <tickzone/domain.hpp>
#include <tickzone/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tickzone {

// Deterministic sub-stream seed (splitmix64 finaliser).
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Piecewise-constant function of time: pieces[i].second applies from
// pieces[i].first up to the next breakpoint. The first breakpoint is 0.
class Schedule {
 public:
  Schedule() : pieces_{{0.0, 0.0}} {}

  explicit Schedule(std::vector<std::pair<double, double>> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw ParameterError("schedule needs at least one piece");
    if (pieces_.front().first != 0.0) throw ParameterError("schedule must start at time 0");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      if (!std::isfinite(pieces_[i].second)) throw ParameterError("schedule value not finite");
      if (i > 0 && !(pieces_[i].first > pieces_[i - 1].first)) {
        throw ParameterError("schedule breakpoints must be strictly increasing");
      }
    }
  }

  [[nodiscard]] static Schedule constant(double value) { return Schedule({{0.0, value}}); }

  [[nodiscard]] double value_at(double t) const noexcept {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                               [](double v, const auto& p) { return v < p.first; });
    return it == pieces_.begin() ? pieces_.front().second : std::prev(it)->second;
  }

  [[nodiscard]] double integral(double a, double b) const noexcept {
    return accumulate(a, b, [](double v) { return v; });
  }

  [[nodiscard]] double square_integral(double a, double b) const noexcept {
    return accumulate(a, b, [](double v) { return v * v; });
  }

  [[nodiscard]] double max_abs() const noexcept {
    double m = 0.0;
    for (const auto& p : pieces_) m = std::max(m, std::fabs(p.second));
    return m;
  }

  [[nodiscard]] double min() const noexcept {
    double m = pieces_.front().second;
    for (const auto& p : pieces_) m = std::min(m, p.second);
    return m;
  }

  [[nodiscard]] bool is_constant() const noexcept { return pieces_.size() == 1; }

 private:
  template <class F>
  [[nodiscard]] double accumulate(double a, double b, F f) const noexcept {
    if (pieces_.size() == 1) return f(pieces_.front().second) * (b - a);
    double total = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const double lo = std::max(a, pieces_[i].first);
      const double hi = i + 1 < pieces_.size() ? std::min(b, pieces_[i + 1].first) : b;
      if (hi > lo) total += f(pieces_[i].second) * (hi - lo);
    }
    return total;
  }

  std::vector<std::pair<double, double>> pieces_;
};

// X_t = x0 + int a du + int sigma dW, discretised on a uniform grid of
// step dt (the last step is shortened to land on the horizon).
struct EfficientPathSpec {
  double x0 = 0.0;
  Schedule drift;
  Schedule volatility;
  double horizon = 1.0;  // seconds
  double dt = 0.0;       // seconds; 0 lets simulate_day pick the default

  void validate() const {
    if (!std::isfinite(x0)) throw ParameterError("x0 must be finite");
    if (volatility.min() < 0.0) throw ParameterError("volatility must be non-negative");
    if (!(dt > 0.0)) throw ParameterError("time step must be positive");
    if (!(horizon >= dt)) throw ParameterError("horizon must be at least one time step");
  }

  [[nodiscard]] std::size_t step_count() const noexcept {
    return static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  }

  [[nodiscard]] double time_at(std::size_t k) const noexcept {
    return k >= step_count() ? horizon : static_cast<double>(k) * dt;
  }

  [[nodiscard]] double integrated_variance() const noexcept {
    return volatility.square_integral(0.0, horizon);
  }
};

// Step such that sigma*sqrt(dt) <= eta*alpha/10.
[[nodiscard]] inline double default_time_step(const EfficientPathSpec& spec, const AssetSpec& asset) {
  const double sigma = spec.volatility.max_abs();
  if (sigma == 0.0) return spec.horizon;
  const double ratio = asset.require_eta() * asset.alpha() / (10.0 * sigma);
  return std::min(spec.horizon, ratio * ratio);
}

// Generates the discretised efficient price one step at a time.
class EfficientPathStepper {
 public:
  EfficientPathStepper(const EfficientPathSpec& spec, std::uint64_t seed)
      : spec_(&spec), rng_(seed), steps_(spec.step_count()), x_(spec.x0) {
    spec.validate();
  }

  struct Step {
    double t0, x0, t1, x1, variance;
  };

  [[nodiscard]] bool done() const noexcept { return k_ >= steps_; }

  Step next() {
    const double t0 = spec_->time_at(k_);
    const double t1 = spec_->time_at(k_ + 1);
    const double var = spec_->volatility.square_integral(t0, t1);
    if (var > 0.0) noise_ += std::sqrt(var) * normal_(rng_);
    const double x0 = x_;
    x_ = spec_->x0 + spec_->drift.integral(0.0, t1) + noise_;
    ++k_;
    return {t0, x0, t1, x_, var};
  }

 private:
  const EfficientPathSpec* spec_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::size_t steps_;
  std::size_t k_ = 0;
  double noise_ = 0.0;
  double x_;
};

struct EfficientPath {
  EfficientPathSpec spec;
  std::vector<double> values;  // values[k] at spec.time_at(k)

  [[nodiscard]] double time_at(std::size_t k) const noexcept { return spec.time_at(k); }
};

[[nodiscard]] inline EfficientPath simulate_efficient_path(const EfficientPathSpec& spec,
                                                           std::uint64_t seed) {
  EfficientPathStepper stepper(spec, seed);
  EfficientPath path{spec, {}};
  path.values.reserve(spec.step_count() + 1);
  path.values.push_back(spec.x0);
  while (!stepper.done()) path.values.push_back(stepper.next().x1);
  return path;
}

// Tracks the last traded price and emits a change each time the efficient
// price reaches P + alpha/2 + eta*alpha (up) or P - alpha/2 - eta*alpha
// (down). Within a step where neither barrier is crossed at the grid
// points, a Brownian-bridge hit is accepted with probability
// exp(-2 d0 d1 / var), d0 and d1 being the endpoint distances to the
// barrier.
class ZoneCrossingDetector {
 public:
  ZoneCrossingDetector(const AssetSpec& asset, Price p0, std::uint64_t seed)
      : tick_(asset.tick),
        reach_(asset.alpha() / 2.0 + asset.require_eta() * asset.alpha()),
        price_(p0),
        rng_(seed) {
    asset.validate();
    if (!asset.on_grid(p0)) {
      throw ParameterError("initial price " + p0.to_string() + " is not on the tick grid");
    }
  }

  [[nodiscard]] Price price() const noexcept { return price_; }

  void advance(double t0, double x0, double t1, double x1, double variance,
               std::vector<PriceChangeEvent>& out) {
    while (t1 > t0) {
      const double p = price_.to_double();
      const double up = p + reach_;
      const double down = p - reach_;

      std::optional<double> t_up = hit_time(t0, x0, t1, x1, variance, up, x1 >= up);
      std::optional<double> t_down = hit_time(t0, x0, t1, x1, variance, down, x1 <= down);
      if (!t_up && !t_down) return;

      int dir = 0;
      double tau = 0.0;
      if (t_up && (!t_down || *t_up <= *t_down)) {
        dir = +1;
        tau = *t_up;
      } else {
        dir = -1;
        tau = *t_down;
      }
      const double barrier = dir > 0 ? up : down;
      price_ = dir > 0 ? price_ + tick_ : price_ - tick_;
      out.push_back({tau, price_, dir, barrier});

      variance *= (t1 - tau) / (t1 - t0);
      t0 = tau;
      x0 = barrier;
    }
  }

 private:
  std::optional<double> hit_time(double t0, double x0, double t1, double x1, double variance,
                                 double barrier, bool crossed) {
    const double d0 = std::fabs(barrier - x0);
    const double d1 = std::fabs(barrier - x1);
    if (crossed) {
      const double span = d0 + d1;
      return span > 0.0 ? t0 + (t1 - t0) * d0 / span : t1;
    }
    if (!(variance > 0.0)) return std::nullopt;
    const double prob = std::exp(-2.0 * d0 * d1 / variance);
    if (prob < 1e-16) return std::nullopt;
    if (uniform_(rng_) >= prob) return std::nullopt;
    return t0 + (t1 - t0) * d0 / (d0 + d1);
  }

  Price tick_;
  double reach_;
  Price price_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

[[nodiscard]] inline std::vector<PriceChangeEvent> apply_uncertainty_zones(const EfficientPath& path,
                                                                           const AssetSpec& asset,
                                                                           Price p0,
                                                                           std::uint64_t seed) {
  ZoneCrossingDetector detector(asset, p0, seed);
  std::vector<PriceChangeEvent> events;
  for (std::size_t k = 0; k + 1 < path.values.size(); ++k) {
    const double t0 = path.time_at(k);
    const double t1 = path.time_at(k + 1);
    detector.advance(t0, path.values[k], t1, path.values[k + 1],
                     path.spec.volatility.square_integral(t0, t1), events);
  }
  return events;
}

struct TapeConfig {
  double trade_intensity = 0.0;  // non-price-changing trades per second
  std::uint64_t seed = 0;
  std::string date;
  std::int64_t session_open_epoch_ms = 0;

  void validate() const {
    if (!(trade_intensity >= 0.0) || !std::isfinite(trade_intensity)) {
      throw ParameterError("trade intensity must be a finite non-negative rate");
    }
  }
};

namespace detail {

[[nodiscard]] inline std::int64_t to_millis(double seconds, std::int64_t cap_ms) noexcept {
  const auto ms = static_cast<std::int64_t>(std::floor(seconds * 1000.0));
  return std::clamp<std::int64_t>(ms, 0, cap_ms);
}

// One-tick quotes around a trade at `price`: [P - a, P] when the price is
// heading up (the trade lifts the ask), [P, P + a] when heading down.
inline void set_bracket(TradeEvent& e, Price tick, int heading) {
  if (heading >= 0) {
    e.pre_bid = e.price - tick;
    e.pre_ask = e.price;
  } else {
    e.pre_bid = e.price;
    e.pre_ask = e.price + tick;
  }
}

}  // namespace detail

// Interleaves Poisson-timed trades at the prevailing price with the price
// changes. The tape opens with a reference trade at p0 at time 0.
[[nodiscard]] inline TradeTape generate_tape(std::span<const PriceChangeEvent> events,
                                             const TapeConfig& cfg, const AssetSpec& asset,
                                             double horizon, Price p0) {
  cfg.validate();
  asset.validate();
  if (!(horizon > 0.0)) throw ParameterError("horizon must be positive");
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].time < events[i - 1].time) throw ParameterError("price changes out of order");
  }

  const std::int64_t horizon_ms = std::llround(horizon * 1000.0);

  std::vector<double> fill_times;
  if (cfg.trade_intensity > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::exponential_distribution<double> gap(cfg.trade_intensity);
    for (double s = gap(rng); s <= horizon; s += gap(rng)) fill_times.push_back(s);
  }

  TradeTape tape;
  tape.asset = asset;
  tape.date = cfg.date;
  tape.session_open_epoch_ms = cfg.session_open_epoch_ms;
  tape.session_length_ms = horizon_ms;
  tape.events.reserve(events.size() + fill_times.size() + 1);

  // Heading of the price after trade i: the direction of the next change,
  // falling back to the last one.
  std::vector<int> next_dir(events.size() + 1, 0);
  {
    int last = events.empty() ? 1 : events.back().direction;
    next_dir[events.size()] = last;
    for (std::size_t i = events.size(); i-- > 0;) next_dir[i] = events[i].direction;
  }

  TradeEvent open;
  open.time_ms = 0;
  open.price = p0;
  detail::set_bracket(open, asset.tick, next_dir[0]);
  tape.events.push_back(open);

  Price current = p0;
  std::size_t ci = 0;  // next change
  std::size_t fi = 0;  // next fill
  while (ci < events.size() || fi < fill_times.size()) {
    const bool take_change =
        ci < events.size() && (fi >= fill_times.size() || events[ci].time <= fill_times[fi]);
    TradeEvent e;
    if (take_change) {
      const PriceChangeEvent& c = events[ci];
      e.time_ms = detail::to_millis(c.time, horizon_ms);
      e.price = c.new_price;
      e.changed_price = true;
      e.direction = c.direction;
      detail::set_bracket(e, asset.tick, c.direction);
      current = c.new_price;
      ++ci;
    } else {
      e.time_ms = detail::to_millis(fill_times[fi], horizon_ms);
      e.price = current;
      detail::set_bracket(e, asset.tick, next_dir[ci]);
      ++fi;
    }
    tape.events.push_back(e);
  }
  return tape;
}

struct TrueParams {
  double eta = 0.0;
  double integrated_variance = 0.0;  // int_0^t sigma^2 du
  Price p0;
  std::size_t n_changes = 0;
};

struct SimulatedDay {
  TradeTape tape;
  std::vector<PriceChangeEvent> changes;
  TrueParams truth;
};

// Path, zones and tape from one seed; the path is streamed, never stored.
// Sub-streams: path derive_seed(seed, 0), zones derive_seed(seed, 1),
// tape derive_seed(seed, 2).
[[nodiscard]] inline SimulatedDay simulate_day(EfficientPathSpec spec, const AssetSpec& asset,
                                               const TapeConfig& cfg) {
  asset.validate();
  const double eta = asset.require_eta();
  if (spec.dt == 0.0) spec.dt = default_time_step(spec, asset);
  spec.validate();
  cfg.validate();

  const Price p0 = asset.nearest_grid_point(spec.x0);
  SimulatedDay day;
  EfficientPathStepper stepper(spec, derive_seed(cfg.seed, 0));
  ZoneCrossingDetector detector(asset, p0, derive_seed(cfg.seed, 1));
  while (!stepper.done()) {
    const auto s = stepper.next();
    detector.advance(s.t0, s.x0, s.t1, s.x1, s.variance, day.changes);
  }

  TapeConfig tape_cfg = cfg;
  tape_cfg.seed = derive_seed(cfg.seed, 2);
  day.tape = generate_tape(day.changes, tape_cfg, asset, spec.horizon, p0);
  day.truth = {eta, spec.integrated_variance(), p0, day.changes.size()};
  return day;
}

}  // namespace tickzone
