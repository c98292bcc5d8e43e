// tickzone command-line interface.
//
// Every setting can come from a "key = value" file (--config) or a flag;
// flags win. Output goes to --out when given, stdout otherwise.

#include <tickzone/tickzone.hpp>
#include <tickzone/io/config.hpp>
#include <tickzone/io/csv.hpp>
#include <tickzone/io/fixture.hpp>
#include <tickzone/io/ingest.hpp>
#include <tickzone/io/pipeline.hpp>
#include <tickzone/io/session.hpp>
#include <tickzone/io/synthetic.hpp>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#ifndef TICKZONE_DEFAULT_FIXTURE
#define TICKZONE_DEFAULT_FIXTURE "data/futures_2009.csv"
#endif

namespace fs = std::filesystem;
using namespace tickzone;
using namespace tickzone::io;

namespace {

// Flag values keyed by config key, overlaid on the config file.
struct Settings {
  std::string config_path;
  std::map<std::string, std::string> flags;
  std::vector<std::string> inputs;
  std::set<std::string> allowed;

  [[nodiscard]] KeyValueConfig merged() const {
    KeyValueConfig kv;
    if (!config_path.empty()) kv = KeyValueConfig::load(config_path);
    if (!allowed.empty()) {
      for (const auto& [key, value] : kv.values()) {
        if (!allowed.count(key)) throw ParameterError("unknown config key '" + key + "'");
      }
    }
    for (const auto& [key, value] : flags) kv.set(key, value);
    return kv;
  }
};

void add_flag(CLI::App* app, Settings& s, const std::string& name, const std::string& key,
              const std::string& help) {
  app->add_option_function<std::string>(
      name, [&s, key](const std::string& v) { s.flags[key] = v; }, help);
  s.allowed.insert(key);
}

void add_switch(CLI::App* app, Settings& s, const std::string& name, const std::string& key,
                const std::string& help) {
  app->add_flag_callback(name, [&s, key] { s.flags[key] = "true"; }, help);
  s.allowed.insert(key);
}

std::string require(const KeyValueConfig& kv, const std::string& key) {
  auto v = kv.get(key);
  if (!v || v->empty()) throw ParameterError("missing required setting '" + key + "'");
  return *v;
}

double require_double(const KeyValueConfig& kv, const std::string& key) {
  return parse_double(require(kv, key), 0, key.c_str());
}

double get_double(const KeyValueConfig& kv, const std::string& key, double fallback) {
  auto v = kv.get(key);
  return v ? parse_double(*v, 0, key.c_str()) : fallback;
}

std::optional<double> get_optional_double(const KeyValueConfig& kv, const std::string& key) {
  auto v = kv.get(key);
  if (!v) return std::nullopt;
  return parse_double(*v, 0, key.c_str());
}

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ParameterError("--seed must be an unsigned 64-bit integer, got '" + text + "'");
  }
  return v;
}

std::vector<double> betas_from(const KeyValueConfig& kv) {
  auto v = kv.get("beta");
  if (!v) return {kBetaLinear, kBetaSquareRoot};
  if (*v == "1") return {kBetaLinear};
  if (*v == "0.5") return {kBetaSquareRoot};
  throw ParameterError("--beta must be 1 or 0.5, got '" + *v + "'");
}

std::vector<int> versions_from(const KeyValueConfig& kv, std::vector<int> fallback) {
  auto v = kv.get("version");
  if (!v) return fallback;
  if (*v == "1" || *v == "2" || *v == "3") return {std::stoi(*v)};
  throw ParameterError("--version must be 1, 2 or 3, got '" + *v + "'");
}

SessionFilter session_from(const KeyValueConfig& kv, const std::string& fallback) {
  const Timezone tz(kv.get("timezone").value_or("UTC"));
  return parse_session(kv.get("session").value_or(fallback), tz);
}

// Writes to <out_dir>/<name> when out_dir is set, else to stdout.
void emit(const KeyValueConfig& kv, const std::string& name,
          const std::function<void(std::ostream&)>& write) {
  auto dir = kv.get("out_dir");
  if (!dir) {
    write(std::cout);
    return;
  }
  fs::create_directories(*dir);
  const fs::path path = fs::path(*dir) / name;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path.string());
  write(f);
  spdlog::info("wrote {}", path.string());
}

std::vector<fs::path> input_paths(const Settings& s, const KeyValueConfig& kv) {
  std::vector<fs::path> out(s.inputs.begin(), s.inputs.end());
  if (out.empty()) {
    if (auto v = kv.get("input")) out.emplace_back(*v);
  }
  if (out.empty()) throw NoInputError("no input files given");
  return out;
}

AssetSpec asset_from(const KeyValueConfig& kv) {
  AssetSpec a;
  a.asset_id = kv.get("asset").value_or("ASSET");
  a.tick = Price::parse(require(kv, "tick_value"));
  if (auto eta = get_optional_double(kv, "eta")) a.eta = eta;
  a.validate();
  return a;
}

IngestResult ingest(const Settings& s, const KeyValueConfig& kv, const AssetSpec& asset) {
  auto res = ingest_trades(input_paths(s, kv), asset, session_from(kv, "00:00-24:00"));
  for (const auto& w : res.warnings) spdlog::warn("{}", w);
  return res;
}

// ---------------------------------------------------------------------------

int run_simulate(const Settings& s) {
  const KeyValueConfig kv = s.merged();
  SyntheticMarketSpec spec;
  spec.asset = asset_from(kv);
  spec.asset.eta = require_double(kv, "eta");
  spec.start_date = kv.get("start_date").value_or(spec.start_date);
  spec.days = static_cast<int>(get_double(kv, "days", 1));
  spec.session = session_from(kv, "09:00-17:00");
  spec.x0 = get_double(kv, "x0", spec.x0);
  spec.sigma = get_double(kv, "sigma", spec.sigma);
  spec.sigma_dispersion = get_double(kv, "sigma_dispersion", 0.0);
  spec.drift = get_double(kv, "drift", 0.0);
  spec.trade_intensity = get_double(kv, "trade_intensity", 0.0);
  spec.equilibrium_trades = kv.get_bool("equilibrium_trades", false);
  spec.dt = get_double(kv, "dt", 0.0);
  spec.seed = parse_seed(kv.get("seed").value_or("0"));
  const fs::path out = require(kv, "out_dir");

  const auto days = write_simulated_market(spec, out);
  for (const SimulatedDay& d : days) {
    spdlog::info("{} {}: {} trades, {} price changes", spec.asset.asset_id, d.tape.date,
                 d.tape.events.size(), d.truth.n_changes);
  }
  return 0;
}

int run_estimate(const Settings& s) {
  const KeyValueConfig kv = s.merged();
  const AssetSpec asset = asset_from(kv);
  const auto res = ingest(s, kv, asset);
  std::vector<DailyRecord> records;
  for (const TradeTape& tape : res.tapes) {
    try {
      records.push_back(build_daily_record(tape));
    } catch (const InsufficientDataError& e) {
      spdlog::warn("{} {}: day skipped: {}", asset.asset_id, tape.date, e.what());
    } catch (const DegenerateTapeError& e) {
      spdlog::warn("{} {}: day skipped: {}", asset.asset_id, tape.date, e.what());
    }
  }
  for (const DailyRecord& r : records) {
    if (r.eta_flagged()) spdlog::warn("{} {}: eta_hat {} above 0.55", r.asset_id, r.date, r.eta_hat);
  }
  const double c = get_double(kv, "wyart_c", kDefaultWyartC);
  emit(kv, "daily_records.csv", [&](std::ostream& o) { write_daily_csv(o, records, c); });
  return 0;
}

int run_regress(const Settings& s) {
  const KeyValueConfig kv = s.merged();
  std::vector<DailyRecord> records;
  for (const fs::path& p : input_paths(s, kv)) {
    std::ifstream in(p);
    if (!in) throw ParseError("cannot open " + p.string(), 0);
    try {
      auto rows = read_daily_csv(in);
      records.insert(records.end(), rows.begin(), rows.end());
    } catch (const ParseError& e) {
      throw ParseError(p.string() + ": " + e.what(), e.line());
    }
  }
  FitOptions opts;
  opts.split_regimes = kv.get_bool("split_regimes", false);
  opts.include_flagged = kv.get_bool("include_flagged", false);
  const auto fits = fit_by_asset(records, opts);
  emit(kv, "regression.csv", [&](std::ostream& o) { write_fit_csv(o, fits); });
  if (kv.get("out_dir")) {
    const fs::path dir = *kv.get("out_dir");
    std::ofstream raw(dir / "cloud_raw.csv", std::ios::binary | std::ios::trunc);
    std::ofstream adjusted(dir / "cloud_adjusted.csv", std::ios::binary | std::ios::trunc);
    if (!raw || !adjusted) throw Error("cannot write cloud files in " + dir.string());
    emit_cloud_csv(records, fits, opts, raw, adjusted);
  }
  return 0;
}

int run_predict(const Settings& s) {
  const KeyValueConfig kv = s.merged();
  TickScenario base;
  base.alpha0 = require_double(kv, "alpha0");
  base.alpha = require_double(kv, "alpha");
  base.eta0 = require_double(kv, "eta0");
  base.p1_0 = get_double(kv, "p1", 1.0);
  base.p2_0 = get_double(kv, "p2", 0.0);
  base.m0 = get_optional_double(kv, "m0");
  const auto sigma = get_optional_double(kv, "sigma");

  emit(kv, "predict.csv", [&](std::ostream& o) {
    o << "version,beta,eta_pred,large_tick_regime,market_order_cost,m_pred,one_tick_spread,warning\n";
    for (int v : versions_from(kv, {1, 2, 3})) {
      for (double beta : betas_from(kv)) {
        TickScenario sc = base;
        sc.beta = beta;
        const EtaForecast f = predict_eta(sc, v);
        std::optional<double> m_pred;
        if (sc.m0) m_pred = scale_trade_count(*sc.m0, sc.alpha0, sc.alpha, beta);
        std::string one_tick;
        if (m_pred && sigma) one_tick = check_large_tick_regime(sc.alpha, *sigma, *m_pred) ? "1" : "0";
        o << v << ',' << format_double(beta) << ',' << format_double(f.eta_pred) << ','
          << (f.in_large_tick_regime ? 1 : 0) << ','
          << (f.in_large_tick_regime ? format_double(market_order_cost(sc.alpha, f.eta_pred)) : "")
          << ',' << (m_pred ? format_double(*m_pred) : "") << ',' << one_tick << ','
          << f.warning.value_or("") << '\n';
        if (f.warning) spdlog::warn("version {} beta {}: {}", v, beta, *f.warning);
      }
    }
  });
  return 0;
}

int run_optimal_tick(const Settings& s) {
  const KeyValueConfig kv = s.merged();
  const auto versions = versions_from(kv, {1, 2, 3});
  std::vector<OptimalTickRow> rows;
  if (kv.get("eta0")) {
    TickScenario sc;
    sc.alpha0 = require_double(kv, "alpha0");
    sc.eta0 = require_double(kv, "eta0");
    sc.p1_0 = get_double(kv, "p1", 1.0);
    sc.p2_0 = get_double(kv, "p2", 0.0);
    rows = optimal_tick_rows(kv.get("asset").value_or("ASSET"), sc, versions);
  } else {
    const fs::path fixture = kv.get("fixture").value_or(TICKZONE_DEFAULT_FIXTURE);
    for (const FixtureRow& r : read_fixture(fixture)) {
      if (auto only = kv.get("asset"); only && *only != r.asset) continue;
      TickScenario sc;
      sc.alpha0 = r.tick_value;
      sc.eta0 = r.eta;
      sc.p1_0 = r.p1;
      sc.p2_0 = r.p2;
      for (auto& row : optimal_tick_rows(r.asset, sc, versions)) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw NoInputError("no fixture rows selected from " + fixture.string());
  }
  if (kv.get("beta")) {
    const double beta = betas_from(kv).front();
    for (auto& r : rows) (beta == kBetaLinear ? r.beta_sqrt : r.beta_linear).reset();
  }
  emit(kv, "optimal_tick.csv", [&](std::ostream& o) { write_optimal_tick_csv(o, rows); });
  return 0;
}

int run_signature(const Settings& s) {
  const KeyValueConfig kv = s.merged();
  const AssetSpec asset = asset_from(kv);
  const auto res = ingest(s, kv, asset);
  const double n = get_double(kv, "n", 1.0);
  const int delta_max = static_cast<int>(get_double(kv, "delta_max", 50));
  emit(kv, "signature.csv", [&](std::ostream& o) {
    o << "date,delta,realized_variance\n";
    for (const TradeTape& tape : res.tapes) {
      const auto curve = signature_plot(tape, n, delta_max);
      for (const auto& [delta, rv] : curve.points) {
        o << tape.date << ',' << delta << ',' << format_double(rv) << '\n';
      }
    }
  });
  return 0;
}

int run_pipeline_cmd(const Settings& s) {
  KeyValueConfig kv;
  if (!s.config_path.empty()) kv = KeyValueConfig::load(s.config_path);
  for (const auto& [key, value] : s.flags) kv.set(key, value);
  if (!s.inputs.empty()) kv.set("input_dir", s.inputs.front());
  const PipelineConfig cfg = pipeline_config_from(kv);
  const PipelineResult res = run_pipeline(cfg);
  for (const StageIssue& w : res.warnings) spdlog::warn("{}", w.to_string());
  spdlog::info("{} daily records, {} regressions", res.records.size(), res.fits.size());
  if (!res.ok()) {
    std::cerr << "pipeline failed with " << res.errors.size() << " error(s):\n";
    for (const StageIssue& e : res.errors) std::cerr << "  " << e.to_string() << '\n';
    return 1;
  }
  return 0;
}

void setup_logging() {
  auto logger = spdlog::stderr_logger_st("tickzone");
  logger->set_pattern("%l: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("TICKZONE_LOG")) {
    const std::string v = env;
    const auto level = spdlog::level::from_str(v);
    if (level == spdlog::level::off && v != "off") {
      spdlog::warn("TICKZONE_LOG='{}' not recognised; use trace, debug, info, warn, error or off", v);
    } else {
      spdlog::set_level(level);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Uncertainty-zone market microstructure toolkit"};
  app.require_subcommand(1);

  std::map<std::string, Settings> settings;
  std::map<std::string, std::function<int(const Settings&)>> handlers;

  auto sub = [&](const std::string& name, const std::string& help,
                 std::function<int(const Settings&)> fn) {
    CLI::App* cmd = app.add_subcommand(name, help);
    Settings& s = settings[name];
    cmd->add_option("--config", s.config_path, "key = value settings file");
    add_flag(cmd, s, "--out", "out_dir", "output directory");
    handlers[name] = std::move(fn);
    return std::pair<CLI::App*, Settings*>{cmd, &s};
  };

  {
    auto [cmd, s] = sub("simulate", "simulate trading days and write trade CSVs", run_simulate);
    add_flag(cmd, *s, "--seed", "seed", "random seed (u64)");
    add_flag(cmd, *s, "--asset", "asset", "asset id");
    add_flag(cmd, *s, "--tick-value", "tick_value", "tick value, decimal");
    add_flag(cmd, *s, "--eta", "eta", "uncertainty-zone parameter");
    add_flag(cmd, *s, "--sigma", "sigma", "volatility per sqrt(second)");
    add_flag(cmd, *s, "--sigma-dispersion", "sigma_dispersion", "daily volatility spread in [0,1)");
    add_flag(cmd, *s, "--drift", "drift", "drift per second");
    add_flag(cmd, *s, "--x0", "x0", "initial efficient price");
    add_flag(cmd, *s, "--days", "days", "number of weekdays");
    add_flag(cmd, *s, "--start-date", "start_date", "first date, YYYY-MM-DD");
    add_flag(cmd, *s, "--session", "session", "HH:MM-HH:MM");
    add_flag(cmd, *s, "--timezone", "timezone", "UTC or a POSIX timezone rule");
    add_flag(cmd, *s, "--trade-intensity", "trade_intensity", "extra trades per second");
    add_switch(cmd, *s, "--equilibrium-trades", "equilibrium_trades", "break-even trade intensity");
    add_flag(cmd, *s, "--dt", "dt", "simulation step in seconds");
  }
  {
    auto [cmd, s] = sub("estimate", "daily records from trade CSVs", run_estimate);
    cmd->add_option("inputs", s->inputs, "trade CSV files");
    add_flag(cmd, *s, "--asset", "asset", "asset id");
    add_flag(cmd, *s, "--tick-value", "tick_value", "tick value, decimal");
    add_flag(cmd, *s, "--session", "session", "HH:MM-HH:MM");
    add_flag(cmd, *s, "--timezone", "timezone", "UTC or a POSIX timezone rule");
    add_flag(cmd, *s, "--wyart-c", "wyart_c", "market-maker cost constant in [1,2]");
    s->allowed.insert("input");
  }
  {
    auto [cmd, s] = sub("regress", "spread-volatility regression per asset", run_regress);
    cmd->add_option("inputs", s->inputs, "daily-record CSV files");
    add_switch(cmd, *s, "--split-regimes", "split_regimes", "fit each tick value separately");
    add_switch(cmd, *s, "--include-flagged", "include_flagged", "keep days with eta_hat > 0.55");
    s->allowed.insert("input");
  }
  {
    auto [cmd, s] = sub("predict", "forecast eta after a tick-value change", run_predict);
    add_flag(cmd, *s, "--alpha0,--tick-value", "alpha0", "current tick value");
    add_flag(cmd, *s, "--alpha,--new-tick", "alpha", "tick value after the change");
    add_flag(cmd, *s, "--eta0", "eta0", "current eta");
    add_flag(cmd, *s, "--p1", "p1", "regression coefficient p1");
    add_flag(cmd, *s, "--p2", "p2", "regression coefficient p2");
    add_flag(cmd, *s, "--m0", "m0", "current trades per day");
    add_flag(cmd, *s, "--sigma", "sigma", "daily volatility, for the one-tick check");
    add_flag(cmd, *s, "--beta", "beta", "1 or 0.5 (default both)");
    add_flag(cmd, *s, "--version", "version", "1, 2 or 3 (default all)");
  }
  {
    auto [cmd, s] = sub("optimal-tick", "tick value giving eta = 1/2", run_optimal_tick);
    add_flag(cmd, *s, "--fixture", "fixture", "asset statistics CSV");
    add_flag(cmd, *s, "--asset", "asset", "restrict to one asset");
    add_flag(cmd, *s, "--alpha0,--tick-value", "alpha0", "current tick value (single scenario)");
    add_flag(cmd, *s, "--eta0", "eta0", "current eta (single scenario)");
    add_flag(cmd, *s, "--p1", "p1", "regression coefficient p1");
    add_flag(cmd, *s, "--p2", "p2", "regression coefficient p2");
    add_flag(cmd, *s, "--beta", "beta", "1 or 0.5 (default both)");
    add_flag(cmd, *s, "--version", "version", "1, 2 or 3 (default all)");
  }
  {
    auto [cmd, s] = sub("signature", "realized variance against sampling interval", run_signature);
    cmd->add_option("inputs", s->inputs, "trade CSV files");
    add_flag(cmd, *s, "--asset", "asset", "asset id");
    add_flag(cmd, *s, "--tick-value", "tick_value", "tick value, decimal");
    add_flag(cmd, *s, "--session", "session", "HH:MM-HH:MM");
    add_flag(cmd, *s, "--timezone", "timezone", "UTC or a POSIX timezone rule");
    add_flag(cmd, *s, "--n", "n", "samples per second at delta = 1");
    add_flag(cmd, *s, "--delta-max", "delta_max", "largest sampling multiple");
    s->allowed.insert("input");
  }
  {
    auto [cmd, s] = sub("pipeline", "ingest, estimate, regress and report", run_pipeline_cmd);
    cmd->add_option("input_dir", s->inputs, "directory with one sub-directory per asset");
    add_flag(cmd, *s, "--input-dir", "input_dir", "directory with one sub-directory per asset");
    add_flag(cmd, *s, "--tick-value", "tick_value", "default tick value");
    add_flag(cmd, *s, "--session", "session", "default session HH:MM-HH:MM");
    add_flag(cmd, *s, "--timezone", "timezone", "default timezone");
    add_flag(cmd, *s, "--threads", "threads", "worker threads (0 = hardware)");
    add_flag(cmd, *s, "--wyart-c", "wyart_c", "market-maker cost constant in [1,2]");
    add_switch(cmd, *s, "--split-regimes", "split_regimes", "fit each tick value separately");
    add_switch(cmd, *s, "--include-flagged", "include_flagged", "keep days with eta_hat > 0.55");
  }

  CLI11_PARSE(app, argc, argv);

  for (const auto& [name, fn] : handlers) {
    if (!app.got_subcommand(name)) continue;
    try {
      return fn(settings[name]);
    } catch (const ParseError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    } catch (const NoInputError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 3;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 1;
}
