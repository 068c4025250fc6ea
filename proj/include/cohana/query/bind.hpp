#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cohana/core/predicate.hpp"
#include "cohana/core/result.hpp"
#include "cohana/core/time.hpp"
#include "cohana/core/types.hpp"
#include "cohana/query/query.hpp"

namespace cohana::query {

struct OutputColumn {
  enum class Kind : std::uint8_t { Cohort, CohortSize, Age, Aggregate };

  Kind kind = Kind::Cohort;
  std::size_t index = 0;  // into cohort_columns or aggregates
  std::string label;

  friend bool operator==(const OutputColumn&, const OutputColumn&) = default;
};

/// A query resolved against a schema.
struct BoundQuery {
  ActivitySchema schema;
  std::string birth_action;
  std::optional<BoundExpr> birth_predicate;
  std::optional<BoundExpr> age_predicate;
  bool age_clause_first = false;
  std::vector<std::size_t> cohort_columns;
  std::vector<AggregateSpec> aggregates;
  std::vector<OutputColumn> output;
  TimeUnit age_unit = TimeUnit::Day;
};

/// Resolves names and types. Throws ValidationError for unknown attributes,
/// a cohort list naming the user or action attribute, Birth() or AGE outside
/// the age predicate, aggregate arguments that are not measures, and
/// comparisons between incompatible kinds.
///
/// String literals compared with the time attribute are read as timestamps;
/// a date-only upper bound of BETWEEN covers its whole day.
BoundQuery validate(const QuerySpec& spec, const ActivitySchema& schema);

/// Binds a standalone predicate. `age_context` permits Birth() and AGE.
BoundExpr bind_predicate(const Expr& expr, const ActivitySchema& schema, bool age_context);

}  // namespace cohana::query
