#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cohana/core/predicate.hpp"
#include "cohana/core/result.hpp"
#include "cohana/core/time.hpp"

namespace cohana::query {

struct SelectItem {
  enum class Kind : std::uint8_t { Attribute, CohortSize, Age, Aggregate };

  Kind kind = Kind::Attribute;
  std::string name;      // Attribute: attribute name; Aggregate: argument (may be empty)
  AggFunc func = AggFunc::Count;
  std::string alias;     // empty when none

  friend bool operator==(const SelectItem&, const SelectItem&) = default;
};

/// A parsed, not yet validated cohort query.
struct QuerySpec {
  std::vector<SelectItem> select;
  std::string table;
  std::string birth_attribute;  // left side of BIRTH FROM <attr> = "e"
  std::string birth_action;
  std::optional<Expr> birth_predicate;
  std::optional<Expr> age_predicate;
  /// True when AGE ACTIVITIES IN was written before BIRTH FROM.
  bool age_clause_first = false;
  std::vector<std::string> cohort_by;
  TimeUnit age_unit = TimeUnit::Day;

  friend bool operator==(const QuerySpec&, const QuerySpec&) = default;
};

/// Throws ParseError with a byte offset into `text`.
QuerySpec parse(std::string_view text);

/// Canonical text: upper-case keywords, double-quoted strings, parentheses
/// only where needed. parse(print(q)) == q for every parsed q.
std::string print(const QuerySpec& spec);
std::string print(const Expr& expr);

}  // namespace cohana::query
