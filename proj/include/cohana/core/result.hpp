#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cohana/core/types.hpp"

namespace cohana {

enum class AggFunc : std::uint8_t { Sum, Avg, Count, Min, Max, UserCount };

/// Canonical spelling: Sum, Avg, Count, Min, Max, UserCount.
const char* to_string(AggFunc f) noexcept;
/// Case-insensitive.
std::optional<AggFunc> parse_agg_func(std::string_view name) noexcept;

/// An aggregate over one measure column, or over tuples/users when `column`
/// is empty (Count, UserCount).
struct AggregateSpec {
  AggFunc func = AggFunc::Count;
  std::optional<std::size_t> column;

  friend bool operator==(const AggregateSpec&, const AggregateSpec&) = default;
};

/// Avg yields a double, everything else an integer.
using AggValue = std::variant<std::int64_t, double>;

/// One (cohort, age) bucket.
struct CohortResultRow {
  std::vector<Value> cohort;
  std::int64_t age = 0;
  std::uint64_t size = 0;
  std::vector<AggValue> measures;

  friend bool operator==(const CohortResultRow&, const CohortResultRow&) = default;
};

/// Orders by (cohort, age).
bool result_row_less(const CohortResultRow& a, const CohortResultRow& b) noexcept;

/// Same keys, sizes and integer aggregates, and doubles equal within
/// `rel_tol` relative error. Both inputs must be sorted.
bool results_match(const std::vector<CohortResultRow>& a,
                   const std::vector<CohortResultRow>& b,
                   double rel_tol = 1e-9);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);
std::string format_value(const Value& v);
std::string format_agg_value(const AggValue& v);

}  // namespace cohana
