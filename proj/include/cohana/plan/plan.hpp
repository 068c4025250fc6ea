#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cohana/core/predicate.hpp"
#include "cohana/core/result.hpp"
#include "cohana/core/time.hpp"
#include "cohana/core/types.hpp"
#include "cohana/query/bind.hpp"
#include "cohana/storage/chunkset.hpp"

namespace cohana::plan {

struct BirthSelectOp {
  BoundExpr predicate;
  friend bool operator==(const BirthSelectOp&, const BirthSelectOp&) = default;
};

struct AgeSelectOp {
  BoundExpr predicate;
  friend bool operator==(const AgeSelectOp&, const AgeSelectOp&) = default;
};

using SelectionOp = std::variant<BirthSelectOp, AgeSelectOp>;

struct CohortAggSpec {
  std::vector<std::size_t> cohort_columns;
  std::vector<AggregateSpec> aggregates;
  TimeUnit unit = TimeUnit::Day;
  friend bool operator==(const CohortAggSpec&, const CohortAggSpec&) = default;
};

/// Scan -> selections[0] -> selections[1] -> ... -> CohortAgg. Every operator
/// uses the same birth action.
struct LogicalPlan {
  ActivitySchema schema;
  std::string birth_action;
  std::vector<SelectionOp> selections;  // bottom to top
  CohortAggSpec aggregate;
  std::vector<query::OutputColumn> output;
};

/// One selection per clause, in the order the clauses were written.
LogicalPlan build_plan(const query::BoundQuery& q);

/// Moves every birth selection below every age selection, keeping the
/// relative order within each group.
LogicalPlan push_down_birth(LogicalPlan plan);

bool in_push_down_normal_form(const LogicalPlan& plan) noexcept;

/// Closed interval of values an integer column may take for a row to pass
/// every top-level conjunct of `predicate`, or nullopt when the conjuncts do
/// not constrain the column. An empty interval has lo > hi.
std::optional<std::pair<std::int64_t, std::int64_t>> column_range(const BoundExpr& predicate,
                                                                   std::size_t column);

/// Largest age an age-selection predicate admits, from a top-level
/// `AGE < k` or `AGE <= k` conjunct (tightest wins).
std::optional<std::int64_t> max_admitted_age(const BoundExpr& predicate);

struct ChunkPlan {
  LogicalPlan plan;
  std::vector<std::uint32_t> chunks;  // survivors, ascending
  std::size_t pruned_by_action = 0;
  std::size_t pruned_by_range = 0;
  bool action_unknown = false;  // birth action absent from the whole table
};

/// Drops chunks in which no user can be born from the birth action, and
/// chunks whose MIN/MAX excludes every birth tuple under a range conjunct of
/// a birth selection on the time attribute or an integer dimension.
ChunkPlan prune_chunks(const LogicalPlan& plan, const storage::ChunkSet& chunks);

/// Keeps every chunk.
ChunkPlan all_chunks(const LogicalPlan& plan, const storage::ChunkSet& chunks);

/// Indented operator tree, root first.
std::string explain(const LogicalPlan& plan, const ChunkPlan* chunks = nullptr);

/// Human-readable predicate with attribute names.
std::string describe(const BoundExpr& expr, const ActivitySchema& schema);

}  // namespace cohana::plan
