#pragma once

#include <tickzone/domain.hpp>
#include <tickzone/errors.hpp>
#include <tickzone/io/csv.hpp>
#include <tickzone/io/session.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace tickzone::io {

struct IngestResult {
  std::vector<TradeTape> tapes;  // one per active day, ascending date
  std::vector<std::string> warnings;
};

namespace detail {

inline void check_grid(const AssetSpec& asset, Price p, std::size_t line, const char* what) {
  if (!asset.on_grid(p)) {
    throw ParseError(std::string(what) + " " + p.to_string() + " is off the tick grid " +
                         asset.tick.to_string(),
                     line);
  }
}

[[nodiscard]] inline std::vector<TradeCsvRow> load_rows(const std::filesystem::path& path,
                                                        const AssetSpec& asset) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  try {
    auto rows = read_trade_csv(in);
    for (const TradeCsvRow& r : rows) {
      check_grid(asset, r.price, r.line, "price");
      if (r.bid) check_grid(asset, *r.bid, r.line, "bid");
      if (r.ask) check_grid(asset, *r.ask, r.line, "ask");
    }
    return rows;
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

[[nodiscard]] inline TradeTape build_tape(std::span<const TradeCsvRow> rows, const AssetSpec& asset,
                                          const std::string& date, std::int64_t open_ms,
                                          std::int64_t length_ms) {
  TradeTape tape;
  tape.asset = asset;
  tape.date = date;
  tape.session_open_epoch_ms = open_ms;
  tape.session_length_ms = length_ms;
  tape.events.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TradeCsvRow& r = rows[i];
    TradeEvent e;
    e.time_ms = r.timestamp_ms - open_ms;
    e.price = r.price;
    e.size = r.size;
    e.pre_bid = r.bid;
    e.pre_ask = r.ask;
    if (i > 0 && r.price != rows[i - 1].price) {
      e.changed_price = true;
      e.direction = r.price > rows[i - 1].price ? 1 : -1;
    }
    tape.events.push_back(e);
  }
  return tape;
}

}  // namespace detail

// Reads one or more trade files of the same asset (typically one per
// contract maturity), keeps the trades inside the session window and, for
// each local date, the file with the most trades that day.
[[nodiscard]] inline IngestResult ingest_trades(std::span<const std::filesystem::path> files,
                                                const AssetSpec& asset,
                                                const SessionFilter& session) {
  asset.validate();
  session.validate();
  if (files.empty()) throw NoInputError("no input files for asset '" + asset.asset_id + "'");

  struct DayCandidate {
    std::vector<TradeCsvRow> rows;
    std::size_t file = 0;
  };
  std::map<Date, DayCandidate> best;
  std::map<Date, bool> seen_outside;
  IngestResult result;

  for (std::size_t fi = 0; fi < files.size(); ++fi) {
    const auto rows = detail::load_rows(files[fi], asset);
    std::map<Date, std::vector<TradeCsvRow>> by_day;
    for (const TradeCsvRow& r : rows) {
      const Date d = session.local_date(r.timestamp_ms);
      const auto [open, close] = session.bounds(d);
      if (r.timestamp_ms >= open && r.timestamp_ms <= close) {
        by_day[d].push_back(r);
      } else {
        seen_outside[d] = true;
      }
    }
    for (auto& [d, day_rows] : by_day) {
      auto it = best.find(d);
      if (it == best.end()) {
        best.emplace(d, DayCandidate{std::move(day_rows), fi});
      } else if (day_rows.size() > it->second.rows.size()) {
        result.warnings.push_back(format_date(d) + ": " + files[fi].filename().string() + " (" +
                                  std::to_string(day_rows.size()) + " trades) replaces " +
                                  files[it->second.file].filename().string() + " (" +
                                  std::to_string(it->second.rows.size()) + " trades)");
        it->second = {std::move(day_rows), fi};
      } else {
        result.warnings.push_back(format_date(d) + ": discarding " + files[fi].filename().string() +
                                  " (" + std::to_string(day_rows.size()) + " trades)");
      }
    }
  }

  for (const auto& [d, outside] : seen_outside) {
    if (outside && best.find(d) == best.end()) {
      result.warnings.push_back(asset.asset_id + " " + format_date(d) +
                                ": no trades inside the session, day skipped");
    }
  }

  for (const auto& [d, cand] : best) {
    const auto [open, close] = session.bounds(d);
    result.tapes.push_back(detail::build_tape(cand.rows, asset, format_date(d), open, close - open));
  }
  return result;
}

[[nodiscard]] inline IngestResult ingest_trades(const std::filesystem::path& file,
                                                const AssetSpec& asset,
                                                const SessionFilter& session) {
  const std::filesystem::path files[] = {file};
  return ingest_trades(std::span<const std::filesystem::path>(files), asset, session);
}

}  // namespace tickzone::io
