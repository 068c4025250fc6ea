#pragma once

#include <cstdint>
#include <vector>

#include "cohana/core/result.hpp"
#include "cohana/exec/aggregate.hpp"
#include "cohana/exec/scan.hpp"
#include "cohana/plan/plan.hpp"

namespace cohana::exec {

struct ExecOptions {
  int threads = 0;  // 0: OpenMP default
  bool prune = true;
};

struct ExecResult {
  std::vector<CohortResultRow> rows;
  ScanStats stats;
  plan::ChunkPlan chunks;
};

/// Runs the plan's pipeline over one chunk.
PartialResult execute_chunk(const plan::LogicalPlan& plan,
                            const storage::ChunkSet& set,
                            std::size_t chunk_id,
                            ScanStats& stats);

/// Single-threaded reference execution.
ExecResult execute_serial(const plan::LogicalPlan& plan,
                          const storage::ChunkSet& set,
                          bool prune = true);

/// Chunks are processed in parallel and merged in chunk order.
ExecResult execute_parallel(const plan::LogicalPlan& plan,
                            const storage::ChunkSet& set,
                            const ExecOptions& options = {});

}  // namespace cohana::exec
