#pragma once

#include <tickzone/errors.hpp>
#include <tickzone/io/csv.hpp>
#include <tickzone/io/session.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tickzone::io {

// Plain "key = value" configuration; '#' starts a comment.
class KeyValueConfig {
 public:
  [[nodiscard]] static KeyValueConfig parse(std::istream& in) {
    KeyValueConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto t = trim(line);
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no);
      const auto key = trim(t.substr(0, eq));
      const auto value = trim(t.substr(eq + 1));
      if (key.empty()) throw ParseError("empty key", line_no);
      cfg.values_[std::string(key)] = std::string(value);
    }
    return cfg;
  }

  [[nodiscard]] static KeyValueConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config " + path.string(), 0);
    try {
      return parse(in);
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": " + e.what(), e.line());
    }
  }

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  [[nodiscard]] std::optional<std::string> get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ParameterError("config key '" + key + "' expects a boolean, got '" + *v + "'");
  }

  [[nodiscard]] const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Tick value applicable from a date onwards.
struct TickChange {
  Date from;
  Price tick;
};

struct AssetConfig {
  std::string id;
  Price tick;
  std::vector<TickChange> tick_changes;  // ascending
  SessionFilter session;

  [[nodiscard]] Price tick_on(const Date& d) const {
    Price t = tick;
    for (const TickChange& c : tick_changes) {
      if (c.from <= d) t = c.tick;
    }
    return t;
  }
};

// "2009-06-15:0.01;2010-01-04:0.005"
[[nodiscard]] inline std::vector<TickChange> parse_tick_changes(std::string_view text) {
  std::vector<TickChange> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find(';', start);
    if (end == std::string_view::npos) end = text.size();
    const auto item = trim(text.substr(start, end - start));
    start = end + 1;
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw ParameterError("tick change '" + std::string(item) + "' must be DATE:VALUE");
    }
    out.push_back({parse_date(trim(item.substr(0, colon))), Price::parse(item.substr(colon + 1))});
  }
  std::sort(out.begin(), out.end(), [](const TickChange& a, const TickChange& b) { return a.from < b.from; });
  return out;
}

}  // namespace tickzone::io
