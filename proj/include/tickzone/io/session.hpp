#pragma once

#include <tickzone/errors.hpp>

#include <boost/date_time/gregorian/gregorian.hpp>
#include <boost/date_time/local_time/local_time.hpp>
#include <boost/date_time/posix_time/posix_time.hpp>

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

namespace tickzone::io {

using Date = boost::gregorian::date;

[[nodiscard]] inline Date parse_date(std::string_view text) {
  try {
    return boost::gregorian::from_simple_string(std::string(text));
  } catch (const std::exception&) {
    throw ParameterError("invalid date '" + std::string(text) + "', expected YYYY-MM-DD");
  }
}

[[nodiscard]] inline std::string format_date(const Date& d) {
  return boost::gregorian::to_iso_extended_string(d);
}

// Exchange timezone. "UTC" or a POSIX-style rule in Boost's sign
// convention (east of Greenwich positive), e.g.
// "CET+01CEST+01,M3.5.0/02,M10.5.0/03" or "CST-06CDT+01,M3.2.0/02,M11.1.0/02".
class Timezone {
 public:
  Timezone() = default;

  explicit Timezone(std::string spec) : spec_(std::move(spec)) {
    if (spec_.empty() || spec_ == "UTC") {
      spec_ = "UTC";
      return;
    }
    try {
      zone_ = boost::local_time::time_zone_ptr(new boost::local_time::posix_time_zone(spec_));
    } catch (const std::exception& e) {
      throw ParameterError("invalid timezone '" + spec_ + "': " + e.what());
    }
  }

  [[nodiscard]] const std::string& spec() const noexcept { return spec_; }

  [[nodiscard]] boost::posix_time::ptime to_local(boost::posix_time::ptime utc) const {
    if (!zone_) return utc;
    return boost::local_time::local_date_time(utc, zone_).local_time();
  }

  [[nodiscard]] boost::posix_time::ptime to_utc(boost::posix_time::ptime local) const {
    if (!zone_) return local;
    boost::local_time::local_date_time ldt(local.date(), local.time_of_day(), zone_,
                                           boost::local_time::local_date_time::NOT_DATE_TIME_ON_ERROR);
    if (ldt.is_not_a_date_time()) {
      throw ParameterError("local time " + boost::posix_time::to_simple_string(local) +
                           " does not exist in timezone " + spec_);
    }
    return ldt.utc_time();
  }

 private:
  std::string spec_ = "UTC";
  boost::local_time::time_zone_ptr zone_;
};

namespace detail {

inline const boost::posix_time::ptime& epoch() {
  static const boost::posix_time::ptime e(Date(1970, 1, 1));
  return e;
}

}  // namespace detail

[[nodiscard]] inline boost::posix_time::ptime from_epoch_ms(std::int64_t ms) {
  return detail::epoch() + boost::posix_time::milliseconds(ms);
}

[[nodiscard]] inline std::int64_t to_epoch_ms(boost::posix_time::ptime t) {
  return (t - detail::epoch()).total_milliseconds();
}

// Daily trading window [open, close] in exchange local time.
struct SessionFilter {
  int open_minutes = 0;
  int close_minutes = 24 * 60;
  Timezone timezone;

  void validate() const {
    if (!(open_minutes >= 0 && close_minutes <= 24 * 60 && open_minutes < close_minutes)) {
      throw ParameterError("session open must precede close");
    }
  }

  [[nodiscard]] std::int64_t length_ms() const noexcept {
    return static_cast<std::int64_t>(close_minutes - open_minutes) * 60'000;
  }

  // UTC epoch milliseconds of the session open and close on local date d.
  [[nodiscard]] std::pair<std::int64_t, std::int64_t> bounds(const Date& d) const {
    using boost::posix_time::minutes;
    using boost::posix_time::ptime;
    const auto open = to_epoch_ms(timezone.to_utc(ptime(d, minutes(open_minutes))));
    const auto close = to_epoch_ms(timezone.to_utc(ptime(d, minutes(close_minutes))));
    return {open, close};
  }

  [[nodiscard]] Date local_date(std::int64_t epoch_ms) const {
    return timezone.to_local(from_epoch_ms(epoch_ms)).date();
  }
};

// "HH:MM-HH:MM"
[[nodiscard]] inline SessionFilter parse_session(std::string_view text, Timezone tz = {}) {
  int oh = 0, om = 0, ch = 0, cm = 0;
  char tail = 0;
  const std::string s(text);
  if (std::sscanf(s.c_str(), "%d:%d-%d:%d%c", &oh, &om, &ch, &cm, &tail) != 4 || oh < 0 ||
      om < 0 || om > 59 || ch < 0 || cm < 0 || cm > 59) {
    throw ParameterError("invalid session '" + s + "', expected HH:MM-HH:MM");
  }
  SessionFilter f{oh * 60 + om, ch * 60 + cm, std::move(tz)};
  f.validate();
  return f;
}

[[nodiscard]] inline std::string format_session(const SessionFilter& f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d:%02d-%02d:%02d", f.open_minutes / 60, f.open_minutes % 60,
                f.close_minutes / 60, f.close_minutes % 60);
  return buf;
}

}  // namespace tickzone::io
