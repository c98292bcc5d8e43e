#pragma once

#include <tickzone/errors.hpp>
#include <tickzone/io/csv.hpp>
#include <tickzone/tick_policy.hpp>

#include <array>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace tickzone::io {

// One row of the reference futures statistics: per-asset averages and the
// asset's spread-volatility regression coefficients.
struct FixtureRow {
  std::string asset;
  std::string exchange;
  std::string currency;
  double tick_value = 0.0;
  std::string session;
  double trades_per_day = 0.0;
  double eta = 0.0;
  double frac_one_tick = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;
  double r2 = 0.0;
};

inline constexpr std::string_view kFixtureHeader =
    "asset,exchange,currency,tick_value,session,trades_per_day,eta,frac_one_tick,p1,p2,p3,r2";

// Lines starting with '#' are comments.
[[nodiscard]] inline std::vector<FixtureRow> read_fixture(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<FixtureRow> out;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header_seen) {
      if (t != kFixtureHeader) throw ParseError("expected fixture header", line_no);
      header_seen = true;
      continue;
    }
    const auto f = split_fields(t);
    if (f.size() != 12) throw ParseError("expected 12 fixture fields", line_no);
    FixtureRow r;
    r.asset = std::string(trim(f[0]));
    r.exchange = std::string(trim(f[1]));
    r.currency = std::string(trim(f[2]));
    r.tick_value = parse_double(f[3], line_no, "tick_value");
    r.session = std::string(trim(f[4]));
    r.trades_per_day = parse_double(f[5], line_no, "trades_per_day");
    r.eta = parse_double(f[6], line_no, "eta");
    r.frac_one_tick = parse_double(f[7], line_no, "frac_one_tick");
    r.p1 = parse_double(f[8], line_no, "p1");
    r.p2 = parse_double(f[9], line_no, "p2");
    r.p3 = parse_double(f[10], line_no, "p3");
    r.r2 = parse_double(f[11], line_no, "r2");
    out.push_back(std::move(r));
  }
  if (!header_seen) throw ParseError("fixture has no header", 0);
  return out;
}

[[nodiscard]] inline std::vector<FixtureRow> read_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open fixture " + path.string(), 0);
  return read_fixture(in);
}

// Optimal tick values of one asset for one formula version, in the linear
// and square-root liquidity cases.
struct OptimalTickRow {
  std::string asset;
  double tick_value = 0.0;
  int version = 1;
  std::optional<double> beta_linear;
  std::optional<double> beta_sqrt;
};

inline constexpr std::string_view kOptimalTickHeader =
    "asset,tick_value,version,optimal_beta_1,optimal_beta_0.5";

[[nodiscard]] inline std::vector<OptimalTickRow> optimal_tick_rows(const std::string& asset,
                                                                   TickScenario s,
                                                                   std::span<const int> versions) {
  std::vector<OptimalTickRow> out;
  for (int v : versions) {
    OptimalTickRow row{asset, s.alpha0, v, std::nullopt, std::nullopt};
    for (double beta : {kBetaLinear, kBetaSquareRoot}) {
      s.beta = beta;
      std::optional<double> value;
      try {
        value = optimal_tick(s, v);
      } catch (const ParameterError&) {
        value = std::nullopt;
      }
      (beta == kBetaLinear ? row.beta_linear : row.beta_sqrt) = value;
    }
    out.push_back(std::move(row));
  }
  return out;
}

inline void write_optimal_tick_csv(std::ostream& out, std::span<const OptimalTickRow> rows) {
  out << kOptimalTickHeader << '\n';
  for (const OptimalTickRow& r : rows) {
    out << r.asset << ',' << format_double(r.tick_value) << ',' << r.version << ','
        << (r.beta_linear ? format_double(*r.beta_linear) : "") << ','
        << (r.beta_sqrt ? format_double(*r.beta_sqrt) : "") << '\n';
  }
}

}  // namespace tickzone::io
