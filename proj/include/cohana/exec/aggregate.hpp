#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "cohana/core/result.hpp"
#include "cohana/exec/operators.hpp"
#include "cohana/plan/plan.hpp"

namespace cohana::exec {

/// Running state of one aggregate in one (cohort, age) bucket.
struct Accumulator {
  std::int64_t sum = 0;
  std::int64_t count = 0;
  std::int64_t min = std::numeric_limits<std::int64_t>::max();
  std::int64_t max = std::numeric_limits<std::int64_t>::min();
  std::uint64_t users = 0;

  void merge(const Accumulator& o) noexcept {
    sum += o.sum;
    count += o.count;
    min = std::min(min, o.min);
    max = std::max(max, o.max);
    users += o.users;
  }

  friend bool operator==(const Accumulator&, const Accumulator&) = default;
};

struct CohortPartial {
  std::uint64_t size = 0;                                 // born users reaching the aggregation
  std::map<std::int64_t, std::vector<Accumulator>> ages;  // age > 0 only

  friend bool operator==(const CohortPartial&, const CohortPartial&) = default;
};

/// Aggregation state of one or more chunks, keyed by decoded cohort values.
using PartialResult = std::map<std::vector<Value>, CohortPartial>;

/// Drains `root` and aggregates the chunk's qualifying users.
PartialResult aggregate_chunk(Operator& root,
                              const plan::CohortAggSpec& spec,
                              const storage::ChunkSet& set,
                              const storage::ChunkView& chunk);

/// Folds `from` into `into`.
void merge_into(PartialResult& into, const PartialResult& from);

/// Rows sorted by (cohort, age).
std::vector<CohortResultRow> finalize(const PartialResult& state, const plan::CohortAggSpec& spec);

std::vector<CohortResultRow> merge_partials(std::span<const PartialResult> parts,
                                            const plan::CohortAggSpec& spec);

}  // namespace cohana::exec
