#pragma once

#include <tickzone/domain.hpp>
#include <tickzone/equilibrium.hpp>
#include <tickzone/errors.hpp>
#include <tickzone/estimators.hpp>
#include <tickzone/regression.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace tickzone::io {

inline constexpr std::string_view kTradeHeader = "timestamp_ms,price,size,bid,ask";
inline constexpr std::string_view kDailyHeader =
    "date,asset_id,eta_hat,alpha,sigma_hat,m_trades,avg_spread,frac_one_tick,"
    "vol_per_trade,market_order_cost,mm_pnl,eta_flag";
inline constexpr std::string_view kFitHeader =
    "asset,p1,p1_lo,p1_hi,p2,p2_lo,p2_hi,p3,p3_lo,p3_hi,r2,n_days";
inline constexpr std::string_view kCloudHeader = "x,y,ref";

// Shortest representation that parses back to the same double.
[[nodiscard]] inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

[[nodiscard]] inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

[[nodiscard]] inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[nodiscard]] inline std::int64_t parse_int(std::string_view s, std::size_t line, const char* what) {
  s = trim(s);
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ParseError(std::string("invalid ") + what + " '" + std::string(s) + "'", line);
  }
  return v;
}

[[nodiscard]] inline double parse_double(std::string_view s, std::size_t line, const char* what) {
  s = trim(s);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ParseError(std::string("invalid ") + what + " '" + std::string(s) + "'", line);
  }
  return v;
}

[[nodiscard]] inline Price parse_price(std::string_view s, std::size_t line, const char* what) {
  try {
    return Price::parse(s);
  } catch (const ParameterError& e) {
    throw ParseError(std::string(what) + ": " + e.what(), line);
  }
}

// ---------------------------------------------------------------------------
// Trade CSV: timestamp_ms,price,size,bid,ask (bid/ask may be empty)
// ---------------------------------------------------------------------------

struct TradeCsvRow {
  std::int64_t timestamp_ms = 0;  // UTC, since the epoch
  Price price;
  std::int64_t size = 0;
  std::optional<Price> bid;
  std::optional<Price> ask;
  std::size_t line = 0;
};

[[nodiscard]] inline std::vector<TradeCsvRow> read_trade_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty trade file", 0);
  ++line_no;
  if (trim(line) != kTradeHeader) {
    throw ParseError("expected header '" + std::string(kTradeHeader) + "'", line_no);
  }
  std::vector<TradeCsvRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 5) throw ParseError("expected 5 fields, got " + std::to_string(f.size()), line_no);
    TradeCsvRow r;
    r.line = line_no;
    r.timestamp_ms = parse_int(f[0], line_no, "timestamp");
    r.price = parse_price(f[1], line_no, "price");
    r.size = parse_int(f[2], line_no, "size");
    if (!trim(f[3]).empty()) r.bid = parse_price(f[3], line_no, "bid");
    if (!trim(f[4]).empty()) r.ask = parse_price(f[4], line_no, "ask");
    if (r.bid && r.ask && !(*r.ask > *r.bid)) throw ParseError("ask must exceed bid", line_no);
    if (!rows.empty() && r.timestamp_ms < rows.back().timestamp_ms) {
      throw ParseError("timestamps must be non-decreasing", line_no);
    }
    rows.push_back(r);
  }
  return rows;
}

inline void write_trade_csv(std::ostream& out, const TradeTape& tape) {
  out << kTradeHeader << '\n';
  for (const TradeEvent& e : tape.events) {
    out << tape.session_open_epoch_ms + e.time_ms << ',' << e.price.to_string() << ',' << e.size << ','
        << (e.pre_bid ? e.pre_bid->to_string() : "") << ','
        << (e.pre_ask ? e.pre_ask->to_string() : "") << '\n';
  }
}

// ---------------------------------------------------------------------------
// Daily records
// ---------------------------------------------------------------------------

inline void write_daily_csv(std::ostream& out, std::span<const DailyRecord> records,
                            double wyart_c = kDefaultWyartC) {
  out << kDailyHeader << '\n';
  for (const DailyRecord& r : records) {
    const double vpt = volatility_per_trade(r.sigma_hat, r.m_trades);
    out << r.date << ',' << r.asset_id << ',' << format_double(r.eta_hat) << ','
        << format_double(r.alpha) << ',' << format_double(r.sigma_hat) << ',' << r.m_trades << ','
        << format_double(r.avg_spread) << ',' << format_double(r.frac_one_tick) << ','
        << format_double(vpt) << ',' << format_double(market_order_cost(r.alpha, r.eta_hat)) << ','
        << format_double(market_maker_pnl(r.avg_spread, vpt, wyart_c)) << ','
        << (r.eta_flagged() ? 1 : 0) << '\n';
  }
}

// Reads the first eight columns; diagnostic columns are ignored.
[[nodiscard]] inline std::vector<DailyRecord> read_daily_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty daily-record file", 0);
  ++line_no;
  const auto header = split_fields(trim(line));
  const auto expected = split_fields(kDailyHeader);
  if (header.size() < 8 || !std::equal(expected.begin(), expected.begin() + 8, header.begin())) {
    throw ParseError("not a daily-record file (header mismatch)", line_no);
  }
  std::vector<DailyRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_fields(trim(line));
    if (f.size() < 8) throw ParseError("expected at least 8 fields", line_no);
    DailyRecord r;
    r.date = std::string(trim(f[0]));
    r.asset_id = std::string(trim(f[1]));
    r.eta_hat = parse_double(f[2], line_no, "eta_hat");
    r.alpha = parse_double(f[3], line_no, "alpha");
    r.sigma_hat = parse_double(f[4], line_no, "sigma_hat");
    r.m_trades = parse_int(f[5], line_no, "m_trades");
    r.avg_spread = parse_double(f[6], line_no, "avg_spread");
    r.frac_one_tick = parse_double(f[7], line_no, "frac_one_tick");
    if (r.m_trades < 1) throw ParseError("m_trades must be at least 1", line_no);
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Regression fits and clouds
// ---------------------------------------------------------------------------

inline void write_fit_csv(std::ostream& out, std::span<const RegressionFit> fits) {
  out << kFitHeader << '\n';
  for (const RegressionFit& f : fits) {
    out << f.asset_id << ',' << format_double(f.p1) << ',' << format_double(f.p1_ci.lo) << ','
        << format_double(f.p1_ci.hi) << ',' << format_double(f.p2) << ','
        << format_double(f.p2_ci.lo) << ',' << format_double(f.p2_ci.hi) << ','
        << format_double(f.p3) << ',' << format_double(f.p3_ci.lo) << ','
        << format_double(f.p3_ci.hi) << ',' << format_double(f.r2) << ',' << f.n_days << '\n';
  }
}

[[nodiscard]] inline std::vector<RegressionFit> read_fit_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || trim(line) != kFitHeader) {
    throw ParseError("expected header '" + std::string(kFitHeader) + "'", 1);
  }
  ++line_no;
  std::vector<RegressionFit> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_fields(trim(line));
    if (f.size() != 12) throw ParseError("expected 12 fields", line_no);
    RegressionFit r;
    r.asset_id = std::string(trim(f[0]));
    r.p1 = parse_double(f[1], line_no, "p1");
    r.p1_ci = {parse_double(f[2], line_no, "p1_lo"), parse_double(f[3], line_no, "p1_hi")};
    r.p2 = parse_double(f[4], line_no, "p2");
    r.p2_ci = {parse_double(f[5], line_no, "p2_lo"), parse_double(f[6], line_no, "p2_hi")};
    r.p3 = parse_double(f[7], line_no, "p3");
    r.p3_ci = {parse_double(f[8], line_no, "p3_lo"), parse_double(f[9], line_no, "p3_hi")};
    r.r2 = parse_double(f[10], line_no, "r2");
    const auto n = parse_int(f[11], line_no, "n_days");
    if (n < 0) throw ParseError("n_days must be non-negative", line_no);
    r.n_days = static_cast<std::size_t>(n);
    out.push_back(std::move(r));
  }
  return out;
}

struct CloudPoint {
  double x = 0.0;
  double y = 0.0;
};

// Raw cloud: (eta*alpha*sqrt(M), sigma).
[[nodiscard]] inline CloudPoint raw_cloud_point(const DailyRecord& r) {
  return {regressors(r)[0], r.sigma_hat};
}

// Adjusted cloud: (p1*eta*alpha*sqrt(M), sigma - p2*S*sqrt(M)).
[[nodiscard]] inline CloudPoint adjusted_cloud_point(const DailyRecord& r, const RegressionFit& fit) {
  const auto row = regressors(r);
  return {fit.p1 * row[0], r.sigma_hat - fit.p2 * row[1]};
}

inline void write_cloud_csv(std::ostream& out, std::span<const CloudPoint> points) {
  out << kCloudHeader << '\n';
  for (const CloudPoint& p : points) {
    out << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.x) << '\n';
  }
}

}  // namespace tickzone::io
