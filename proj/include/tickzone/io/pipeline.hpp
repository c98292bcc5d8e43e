#pragma once

#include <tickzone/errors.hpp>
#include <tickzone/estimators.hpp>
#include <tickzone/io/config.hpp>
#include <tickzone/io/csv.hpp>
#include <tickzone/io/fixture.hpp>
#include <tickzone/io/ingest.hpp>
#include <tickzone/io/parallel.hpp>
#include <tickzone/io/session.hpp>
#include <tickzone/regression.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace tickzone::io {

struct PipelineConfig {
  std::filesystem::path input_dir;  // one sub-directory of trade CSVs per asset
  std::filesystem::path out_dir;
  std::optional<Price> default_tick;
  SessionFilter default_session;
  std::map<std::string, KeyValueConfig> asset_overrides;  // per-asset keys
  FitOptions fit;
  double wyart_c = kDefaultWyartC;
  unsigned threads = 0;

  [[nodiscard]] AssetConfig asset(const std::string& id) const {
    AssetConfig a;
    a.id = id;
    a.session = default_session;
    std::optional<Price> tick = default_tick;
    auto it = asset_overrides.find(id);
    if (it != asset_overrides.end()) {
      const KeyValueConfig& kv = it->second;
      if (auto v = kv.get("tick_value")) tick = Price::parse(*v);
      Timezone tz = a.session.timezone;
      if (auto v = kv.get("timezone")) tz = Timezone(*v);
      if (auto v = kv.get("session")) {
        a.session = parse_session(*v, tz);
      } else {
        a.session.timezone = tz;
      }
      if (auto v = kv.get("tick_changes")) a.tick_changes = parse_tick_changes(*v);
    }
    if (!tick) throw ParameterError("asset '" + id + "': no tick_value configured");
    a.tick = *tick;
    return a;
  }
};

// Known keys: input_dir, out_dir, tick_value, session, timezone,
// split_regimes, include_flagged, wyart_c, threads, and per asset
// asset.<id>.{tick_value,session,timezone,tick_changes}.
[[nodiscard]] inline PipelineConfig pipeline_config_from(const KeyValueConfig& kv) {
  static const char* const kKeys[] = {"input_dir", "out_dir",         "tick_value", "session",
                                      "timezone",  "split_regimes",   "include_flagged",
                                      "wyart_c",   "threads"};
  static const char* const kAssetKeys[] = {"tick_value", "session", "timezone", "tick_changes"};

  PipelineConfig cfg;
  for (const auto& [key, value] : kv.values()) {
    if (key.rfind("asset.", 0) == 0) {
      const auto dot = key.rfind('.');
      const std::string id = key.substr(6, dot - 6);
      const std::string field = key.substr(dot + 1);
      if (dot <= 6 || std::find(std::begin(kAssetKeys), std::end(kAssetKeys), field) == std::end(kAssetKeys)) {
        throw ParameterError("unknown config key '" + key + "'");
      }
      cfg.asset_overrides[id].set(field, value);
    } else if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw ParameterError("unknown config key '" + key + "'");
    }
  }
  if (auto v = kv.get("input_dir")) cfg.input_dir = *v;
  if (auto v = kv.get("out_dir")) cfg.out_dir = *v;
  if (auto v = kv.get("tick_value")) cfg.default_tick = Price::parse(*v);
  const Timezone tz(kv.get("timezone").value_or("UTC"));
  cfg.default_session = parse_session(kv.get("session").value_or("00:00-24:00"), tz);
  cfg.fit.split_regimes = kv.get_bool("split_regimes", false);
  cfg.fit.include_flagged = kv.get_bool("include_flagged", false);
  if (auto v = kv.get("wyart_c")) cfg.wyart_c = parse_double(*v, 0, "wyart_c");
  if (auto v = kv.get("threads")) cfg.threads = static_cast<unsigned>(parse_int(*v, 0, "threads"));
  return cfg;
}

// A problem tied to a pipeline stage and, where known, an asset and date.
struct StageIssue {
  std::string stage;
  std::string asset;
  std::string date;
  std::string message;

  [[nodiscard]] std::string to_string() const {
    std::string s = "[" + stage + "]";
    if (!asset.empty()) s += " " + asset;
    if (!date.empty()) s += " " + date;
    return s + ": " + message;
  }
};

struct PipelineResult {
  std::vector<DailyRecord> records;
  std::vector<RegressionFit> fits;
  std::vector<StageIssue> warnings;  // skipped days, discarded maturities
  std::vector<StageIssue> errors;

  [[nodiscard]] bool ok() const noexcept { return errors.empty(); }
};

inline void emit_cloud_csv(std::span<const DailyRecord> records, std::span<const RegressionFit> fits,
                           const FitOptions& opts, std::ostream& raw, std::ostream& adjusted) {
  std::vector<CloudPoint> raw_points;
  std::vector<CloudPoint> adj_points;
  const auto groups = group_records(records, opts);
  for (const RecordGroup& g : groups) {
    const auto fit = std::find_if(fits.begin(), fits.end(),
                                  [&](const RegressionFit& f) { return f.asset_id == g.label; });
    for (const DailyRecord& r : g.records) {
      raw_points.push_back(raw_cloud_point(r));
      if (fit != fits.end()) adj_points.push_back(adjusted_cloud_point(r, *fit));
    }
  }
  write_cloud_csv(raw, raw_points);
  write_cloud_csv(adjusted, adj_points);
}

namespace detail {

[[nodiscard]] inline std::vector<std::filesystem::path> csv_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

[[nodiscard]] inline Price grid_gcd(const AssetConfig& a) {
  std::int64_t g = a.tick.nanos();
  for (const TickChange& c : a.tick_changes) g = std::gcd(g, c.tick.nanos());
  return Price::from_nanos(g);
}

struct AssetIngest {
  std::vector<TradeTape> tapes;
  std::vector<StageIssue> warnings;
  std::vector<StageIssue> errors;
};

[[nodiscard]] inline AssetIngest ingest_asset(const PipelineConfig& cfg, const std::string& id,
                                              const std::vector<std::filesystem::path>& files) {
  AssetIngest out;
  try {
    const AssetConfig ac = cfg.asset(id);
    const AssetSpec base{id, grid_gcd(ac), std::nullopt};
    IngestResult res = ingest_trades(files, base, ac.session);
    for (auto& w : res.warnings) out.warnings.push_back({"ingest", id, "", std::move(w)});
    for (TradeTape& tape : res.tapes) {
      tape.asset.tick = ac.tick_on(parse_date(tape.date));
      const auto off = std::find_if(tape.events.begin(), tape.events.end(), [&](const TradeEvent& e) {
        return !tape.asset.on_grid(e.price) || (e.pre_bid && !tape.asset.on_grid(*e.pre_bid)) ||
               (e.pre_ask && !tape.asset.on_grid(*e.pre_ask));
      });
      if (off != tape.events.end()) {
        out.errors.push_back({"ingest", id, tape.date,
                              "price off the tick grid " + tape.asset.tick.to_string()});
        continue;
      }
      out.tapes.push_back(std::move(tape));
    }
  } catch (const Error& e) {
    out.errors.push_back({"ingest", id, "", e.what()});
  }
  return out;
}

}  // namespace detail

// Ingests every asset directory, builds daily records, fits the regression
// per asset and writes daily_records.csv, regression.csv, cloud_raw.csv,
// cloud_adjusted.csv and optimal_tick.csv into out_dir (when set).
[[nodiscard]] inline PipelineResult run_pipeline(const PipelineConfig& cfg) {
  PipelineResult result;
  namespace fs = std::filesystem;
  if (cfg.input_dir.empty() || !fs::is_directory(cfg.input_dir)) {
    throw NoInputError("no input: input directory '" + cfg.input_dir.string() + "' does not exist");
  }

  std::vector<std::pair<std::string, std::vector<fs::path>>> assets;
  for (const auto& entry : fs::directory_iterator(cfg.input_dir)) {
    if (!entry.is_directory()) continue;
    auto files = detail::csv_files(entry.path());
    if (!files.empty()) assets.emplace_back(entry.path().filename().string(), std::move(files));
  }
  std::sort(assets.begin(), assets.end());
  if (assets.empty()) {
    throw NoInputError("no input: no asset directories with trade CSV files under '" +
                       cfg.input_dir.string() + "'");
  }

  std::vector<detail::AssetIngest> ingested(assets.size());
  parallel_for(assets.size(), cfg.threads, [&](std::size_t i) {
    ingested[i] = detail::ingest_asset(cfg, assets[i].first, assets[i].second);
  });

  std::vector<const TradeTape*> tapes;
  for (auto& a : ingested) {
    for (auto& w : a.warnings) result.warnings.push_back(std::move(w));
    for (auto& e : a.errors) result.errors.push_back(std::move(e));
    for (const TradeTape& t : a.tapes) tapes.push_back(&t);
  }

  std::vector<std::optional<DailyRecord>> built(tapes.size());
  std::vector<std::optional<StageIssue>> skipped(tapes.size());
  std::vector<std::optional<StageIssue>> failed(tapes.size());
  parallel_for(tapes.size(), cfg.threads, [&](std::size_t i) {
    const TradeTape& t = *tapes[i];
    try {
      built[i] = build_daily_record(t);
    } catch (const InsufficientDataError& e) {
      skipped[i] = StageIssue{"estimate", t.asset.asset_id, t.date, std::string("day skipped: ") + e.what()};
    } catch (const DegenerateTapeError& e) {
      skipped[i] = StageIssue{"estimate", t.asset.asset_id, t.date, std::string("day skipped: ") + e.what()};
    } catch (const Error& e) {
      failed[i] = StageIssue{"estimate", t.asset.asset_id, t.date, e.what()};
    }
  });
  for (std::size_t i = 0; i < tapes.size(); ++i) {
    if (built[i]) result.records.push_back(std::move(*built[i]));
    if (skipped[i]) result.warnings.push_back(std::move(*skipped[i]));
    if (failed[i]) result.errors.push_back(std::move(*failed[i]));
  }

  for (const DailyRecord& r : result.records) {
    if (r.eta_flagged() && !cfg.fit.include_flagged) {
      result.warnings.push_back({"regress", r.asset_id, r.date,
                                 "eta_hat " + format_double(r.eta_hat) + " > 0.55, excluded from fit"});
    }
  }

  const auto groups = group_records(result.records, cfg.fit);
  std::vector<std::pair<const RecordGroup*, RegressionFit>> fitted;
  for (const RecordGroup& g : groups) {
    try {
      fitted.emplace_back(&g, fit_group(g));
    } catch (const Error& e) {
      result.errors.push_back({"regress", g.label, "", e.what()});
    }
  }
  for (const auto& [g, f] : fitted) result.fits.push_back(f);

  std::vector<OptimalTickRow> scenarios;
  for (const auto& [g, f] : fitted) {
    double eta_sum = 0.0;
    for (const DailyRecord& r : g->records) eta_sum += r.eta_hat;
    TickScenario s;
    s.alpha0 = g->records.back().alpha;
    s.eta0 = eta_sum / static_cast<double>(g->records.size());
    s.p1_0 = f.p1;
    s.p2_0 = f.p2;
    static constexpr int kVersions[] = {1, 2, 3};
    try {
      for (auto& row : optimal_tick_rows(g->label, s, kVersions)) scenarios.push_back(std::move(row));
    } catch (const Error& e) {
      result.warnings.push_back({"scenario", g->label, "", e.what()});
    }
  }

  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    auto open = [&](const char* name) {
      std::ofstream f(cfg.out_dir / name, std::ios::binary | std::ios::trunc);
      if (!f) throw Error("cannot write " + (cfg.out_dir / name).string());
      return f;
    };
    {
      auto f = open("daily_records.csv");
      write_daily_csv(f, result.records, cfg.wyart_c);
    }
    {
      auto f = open("regression.csv");
      write_fit_csv(f, result.fits);
    }
    {
      auto raw = open("cloud_raw.csv");
      auto adjusted = open("cloud_adjusted.csv");
      emit_cloud_csv(result.records, result.fits, cfg.fit, raw, adjusted);
    }
    {
      auto f = open("optimal_tick.csv");
      write_optimal_tick_csv(f, scenarios);
    }
  }
  return result;
}

}  // namespace tickzone::io
