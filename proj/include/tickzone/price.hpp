#pragma once

#include <tickzone/errors.hpp>

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>
#include <string_view>

namespace tickzone {

// Fixed-point currency amount with a quantum of 1e-9 currency units.
// Grid membership and spread comparisons are done on the integer
// representation; conversion to double happens only when a statistic
// needs real arithmetic.
class Price {
 public:
  static constexpr std::int64_t kScale = 1'000'000'000;
  static constexpr int kDecimals = 9;

  constexpr Price() noexcept = default;

  [[nodiscard]] static constexpr Price from_nanos(std::int64_t nanos) noexcept {
    Price p;
    p.nanos_ = nanos;
    return p;
  }

  // Nearest quantum; only used where a value originates as a double
  // (simulation parameters, CLI flags).
  [[nodiscard]] static Price from_double(double value) {
    const double scaled = std::nearbyint(value * static_cast<double>(kScale));
    if (!std::isfinite(scaled) || std::fabs(scaled) > 9.0e18) {
      throw ParameterError("price out of representable range: " + std::to_string(value));
    }
    return from_nanos(static_cast<std::int64_t>(scaled));
  }

  // Exact decimal parse ("101.25", "-0.5", "7.8125"). Digits beyond the
  // ninth decimal must be zero.
  [[nodiscard]] static Price parse(std::string_view text) {
    auto fail = [&](const char* why) -> Price {
      throw ParameterError(std::string("invalid decimal '") + std::string(text) + "': " + why);
    };
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
      text.remove_suffix(1);
    }
    if (text.empty()) return fail("empty");
    bool negative = false;
    if (text.front() == '+' || text.front() == '-') {
      negative = text.front() == '-';
      text.remove_prefix(1);
    }
    if (text.empty()) return fail("no digits");

    std::int64_t integral = 0;
    std::int64_t fraction = 0;
    int fraction_digits = 0;
    bool seen_point = false;
    bool seen_digit = false;
    constexpr std::int64_t kMaxIntegral = std::numeric_limits<std::int64_t>::max() / kScale - 1;
    for (char c : text) {
      if (c == '.') {
        if (seen_point) return fail("two decimal points");
        seen_point = true;
        continue;
      }
      if (c < '0' || c > '9') return fail("unexpected character");
      seen_digit = true;
      const int digit = c - '0';
      if (!seen_point) {
        integral = integral * 10 + digit;
        if (integral > kMaxIntegral) return fail("out of range");
      } else if (fraction_digits < kDecimals) {
        fraction = fraction * 10 + digit;
        ++fraction_digits;
      } else if (digit != 0) {
        return fail("more than 9 significant decimals");
      }
    }
    if (!seen_digit) return fail("no digits");
    for (int i = fraction_digits; i < kDecimals; ++i) fraction *= 10;
    const std::int64_t nanos = integral * kScale + fraction;
    return from_nanos(negative ? -nanos : nanos);
  }

  [[nodiscard]] constexpr std::int64_t nanos() const noexcept { return nanos_; }
  [[nodiscard]] constexpr double to_double() const noexcept {
    return static_cast<double>(nanos_) / static_cast<double>(kScale);
  }

  // Shortest exact decimal form: "101", "101.25", "-0.000000001".
  [[nodiscard]] std::string to_string() const {
    const bool negative = nanos_ < 0;
    const std::uint64_t mag = negative ? static_cast<std::uint64_t>(-(nanos_ + 1)) + 1u
                                       : static_cast<std::uint64_t>(nanos_);
    std::string out = negative ? "-" : "";
    out += std::to_string(mag / kScale);
    std::uint64_t frac = mag % kScale;
    if (frac != 0) {
      std::string digits = std::to_string(frac);
      digits.insert(0, static_cast<std::size_t>(kDecimals) - digits.size(), '0');
      while (!digits.empty() && digits.back() == '0') digits.pop_back();
      out += '.';
      out += digits;
    }
    return out;
  }

  constexpr auto operator<=>(const Price&) const noexcept = default;

  constexpr Price operator+(Price o) const noexcept { return from_nanos(nanos_ + o.nanos_); }
  constexpr Price operator-(Price o) const noexcept { return from_nanos(nanos_ - o.nanos_); }
  constexpr Price operator-() const noexcept { return from_nanos(-nanos_); }
  constexpr Price operator*(std::int64_t k) const noexcept { return from_nanos(nanos_ * k); }
  constexpr Price& operator+=(Price o) noexcept {
    nanos_ += o.nanos_;
    return *this;
  }

 private:
  std::int64_t nanos_ = 0;
};

}  // namespace tickzone
