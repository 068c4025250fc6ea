#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "cohana/core/predicate.hpp"
#include "cohana/core/result.hpp"
#include "cohana/core/time.hpp"
#include "cohana/core/types.hpp"
#include "cohana/plan/plan.hpp"
#include "cohana/query/bind.hpp"

/// Tuple-at-a-time reference implementation of the cohort operators. It works
/// on decoded tuples in any order and shares nothing with the engine beyond
/// predicate evaluation and age normalization.
namespace cohana::oracle {

/// Earliest tuple of `user` whose action is `action`; the index is into `table`.
BirthInfo oracle_birth(std::span<const ActivityTuple> table,
                       std::string_view user,
                       std::string_view action);

/// All tuples of users whose birth tuple satisfies `predicate`.
std::vector<ActivityTuple> birth_select(std::span<const ActivityTuple> table,
                                        const BoundExpr& predicate,
                                        std::string_view action);

/// Tuples of born users at their birth instant, plus later tuples satisfying
/// `predicate`.
std::vector<ActivityTuple> age_select(std::span<const ActivityTuple> table,
                                      const BoundExpr& predicate,
                                      std::string_view action,
                                      TimeUnit unit);

/// Applies the plan's selections bottom to top, in primary-key order.
std::vector<ActivityTuple> apply_selections(const plan::LogicalPlan& plan,
                                            std::span<const ActivityTuple> table);

/// Cohort aggregation of `table` under the plan's aggregate spec.
std::vector<CohortResultRow> cohort_aggregate(std::span<const ActivityTuple> table,
                                              std::string_view action,
                                              const plan::CohortAggSpec& spec);

std::vector<CohortResultRow> evaluate(const plan::LogicalPlan& plan,
                                      std::span<const ActivityTuple> table);

std::vector<CohortResultRow> oracle_eval(const query::BoundQuery& q,
                                         std::span<const ActivityTuple> table);

}  // namespace cohana::oracle
