#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "cohana/core/types.hpp"

namespace cohana {

enum class TimeUnit : std::uint8_t { Day, Week, Month };

/// A month is a fixed 30 days; there is no calendar arithmetic.
constexpr std::int64_t unit_seconds(TimeUnit unit) noexcept {
  switch (unit) {
    case TimeUnit::Day:
      return 86400;
    case TimeUnit::Week:
      return 7 * 86400;
    case TimeUnit::Month:
      return 30 * 86400;
  }
  return 86400;
}

const char* to_string(TimeUnit unit) noexcept;
std::optional<TimeUnit> parse_time_unit(std::string_view text) noexcept;

/// Number of whole time units elapsed since a user's birth.
struct Age {
  std::int64_t value = 0;

  friend auto operator<=>(const Age&, const Age&) = default;
};

/// ceil(delta_seconds / unit). Zero only at the birth instant itself, so every
/// strictly later tuple lands in age >= 1. Throws std::invalid_argument on a
/// negative delta.
Age normalize_age(std::int64_t delta_seconds, TimeUnit unit);

/// Accepts `YYYY/MM/DD:HHMM`, `YYYY-MM-DD`, `YYYY/MM/DD`, and ISO-8601
/// `YYYY-MM-DD[T ]HH:MM[:SS][Z]`. All times are UTC.
std::optional<Timestamp> parse_timestamp(std::string_view text) noexcept;

/// True when `text` parses as a timestamp with no time-of-day component.
bool is_date_only(std::string_view text) noexcept;

/// `YYYY-MM-DD HH:MM:SS`.
std::string format_timestamp(Timestamp ts);

}  // namespace cohana
