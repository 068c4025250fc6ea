#include <cctype>
#include "cohana/core/time.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <stdexcept>

namespace cohana {

namespace {

// Parses exactly `width` decimal digits at `pos`.
bool read_digits(std::string_view text, std::size_t& pos, std::size_t width, int& out) {
  if (pos + width > text.size()) return false;
  int value = 0;
  for (std::size_t i = 0; i < width; ++i) {
    const char c = text[pos + i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  pos += width;
  return true;
}

bool expect(std::string_view text, std::size_t& pos, char c) {
  if (pos >= text.size() || text[pos] != c) return false;
  ++pos;
  return true;
}

struct Parsed {
  Timestamp ts = 0;
  bool has_time = false;
};

std::optional<Parsed> parse_impl(std::string_view text) noexcept {
  using namespace std::chrono;
  std::size_t pos = 0;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!read_digits(text, pos, 4, y)) return std::nullopt;
  if (pos >= text.size() || (text[pos] != '-' && text[pos] != '/')) return std::nullopt;
  const char sep = text[pos++];
  if (!read_digits(text, pos, 2, mo) || !expect(text, pos, sep) || !read_digits(text, pos, 2, d)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;

  bool has_time = false;
  if (pos < text.size()) {
    has_time = true;
    if (sep == '/' && text[pos] == ':') {
      // YYYY/MM/DD:HHMM
      ++pos;
      if (!read_digits(text, pos, 2, h) || !read_digits(text, pos, 2, mi)) return std::nullopt;
    } else if (text[pos] == 'T' || text[pos] == ' ') {
      ++pos;
      if (!read_digits(text, pos, 2, h) || !expect(text, pos, ':') ||
          !read_digits(text, pos, 2, mi)) {
        return std::nullopt;
      }
      if (pos < text.size() && text[pos] == ':') {
        ++pos;
        if (!read_digits(text, pos, 2, s)) return std::nullopt;
      }
      if (pos < text.size() && text[pos] == 'Z') ++pos;
    } else {
      return std::nullopt;
    }
    if (pos != text.size()) return std::nullopt;
    if (h > 23 || mi > 59 || s > 59) return std::nullopt;
  }

  const auto days = sys_days{ymd}.time_since_epoch().count();
  Parsed out;
  out.ts = static_cast<Timestamp>(days) * 86400 + h * 3600 + mi * 60 + s;
  out.has_time = has_time;
  return out;
}

}  // namespace

const char* to_string(TimeUnit unit) noexcept {
  switch (unit) {
    case TimeUnit::Day:
      return "day";
    case TimeUnit::Week:
      return "week";
    case TimeUnit::Month:
      return "month";
  }
  return "day";
}

std::optional<TimeUnit> parse_time_unit(std::string_view raw) noexcept {
  std::string text(raw);
  for (auto& c : text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (text == "day" || text == "days") return TimeUnit::Day;
  if (text == "week" || text == "weeks") return TimeUnit::Week;
  if (text == "month" || text == "months") return TimeUnit::Month;
  return std::nullopt;
}

Age normalize_age(std::int64_t delta_seconds, TimeUnit unit) {
  if (delta_seconds < 0) {
    throw std::invalid_argument("normalize_age: negative delta " + std::to_string(delta_seconds));
  }
  const std::int64_t u = unit_seconds(unit);
  return Age{delta_seconds / u + (delta_seconds % u != 0 ? 1 : 0)};
}

std::optional<Timestamp> parse_timestamp(std::string_view text) noexcept {
  if (auto p = parse_impl(text)) return p->ts;
  return std::nullopt;
}

bool is_date_only(std::string_view text) noexcept {
  const auto p = parse_impl(text);
  return p && !p->has_time;
}

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  std::int64_t days = ts / 86400;
  std::int64_t secs = ts % 86400;
  if (secs < 0) {
    secs += 86400;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02lld:%02lld:%02lld", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), static_cast<long long>(secs / 3600),
                static_cast<long long>(secs / 60 % 60), static_cast<long long>(secs % 60));
  return buf;
}

}  // namespace cohana
