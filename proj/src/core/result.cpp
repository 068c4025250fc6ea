#include "cohana/core/result.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace cohana {

const char* to_string(AggFunc f) noexcept {
  switch (f) {
    case AggFunc::Sum:
      return "Sum";
    case AggFunc::Avg:
      return "Avg";
    case AggFunc::Count:
      return "Count";
    case AggFunc::Min:
      return "Min";
    case AggFunc::Max:
      return "Max";
    case AggFunc::UserCount:
      return "UserCount";
  }
  return "?";
}

std::optional<AggFunc> parse_agg_func(std::string_view name) noexcept {
  constexpr AggFunc all[] = {AggFunc::Sum, AggFunc::Avg, AggFunc::Count,
                             AggFunc::Min, AggFunc::Max, AggFunc::UserCount};
  for (AggFunc f : all) {
    const std::string_view canon = to_string(f);
    if (canon.size() == name.size() &&
        std::equal(canon.begin(), canon.end(), name.begin(), [](char a, char b) {
          return std::tolower(static_cast<unsigned char>(a)) ==
                 std::tolower(static_cast<unsigned char>(b));
        })) {
      return f;
    }
  }
  return std::nullopt;
}

bool result_row_less(const CohortResultRow& a, const CohortResultRow& b) noexcept {
  if (a.cohort != b.cohort) return a.cohort < b.cohort;
  return a.age < b.age;
}

bool results_match(const std::vector<CohortResultRow>& a,
                   const std::vector<CohortResultRow>& b,
                   double rel_tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.cohort != y.cohort || x.age != y.age || x.size != y.size ||
        x.measures.size() != y.measures.size()) {
      return false;
    }
    for (std::size_t m = 0; m < x.measures.size(); ++m) {
      if (x.measures[m].index() != y.measures[m].index()) return false;
      if (const auto* dx = std::get_if<double>(&x.measures[m])) {
        const double dy = std::get<double>(y.measures[m]);
        const double scale = std::max({std::abs(*dx), std::abs(dy), 1e-300});
        if (std::abs(*dx - dy) > rel_tol * scale) return false;
      } else if (x.measures[m] != y.measures[m]) {
        return false;
      }
    }
  }
  return true;
}

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

std::string format_value(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return std::to_string(std::get<std::int64_t>(v));
}

std::string format_agg_value(const AggValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_double(*d);
  return std::to_string(std::get<std::int64_t>(v));
}

}  // namespace cohana
