#include "cohana/exec/executor.hpp"

#include <exception>

#include <omp.h>

namespace cohana::exec {

PartialResult execute_chunk(const plan::LogicalPlan& plan,
                            const storage::ChunkSet& set,
                            std::size_t chunk_id,
                            ScanStats& stats) {
  ++stats.chunks_opened;
  const storage::ChunkView chunk = set.chunk(chunk_id);
  ScanCursor cursor(chunk, birth_action_code(plan, set, chunk), stats);
  auto root = build_pipeline(plan, set, chunk, cursor, true);
  return aggregate_chunk(*root, plan.aggregate, set, chunk);
}

namespace {

plan::ChunkPlan choose_chunks(const plan::LogicalPlan& plan,
                              const storage::ChunkSet& set,
                              bool prune) {
  return prune ? plan::prune_chunks(plan, set) : plan::all_chunks(plan, set);
}

}  // namespace

ExecResult execute_serial(const plan::LogicalPlan& plan, const storage::ChunkSet& set, bool prune) {
  ExecResult out;
  out.chunks = choose_chunks(plan, set, prune);
  PartialResult state;
  for (const auto id : out.chunks.chunks) {
    merge_into(state, execute_chunk(plan, set, id, out.stats));
  }
  out.rows = finalize(state, plan.aggregate);
  return out;
}

ExecResult execute_parallel(const plan::LogicalPlan& plan,
                            const storage::ChunkSet& set,
                            const ExecOptions& options) {
  ExecResult out;
  out.chunks = choose_chunks(plan, set, options.prune);
  const auto& ids = out.chunks.chunks;
  const auto n = static_cast<std::int64_t>(ids.size());
  std::vector<PartialResult> parts(ids.size());
  std::vector<ScanStats> stats(ids.size());
  std::exception_ptr failure;
  const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      parts[i] = execute_chunk(plan, set, ids[i], stats[i]);
    } catch (...) {
#pragma omp critical(cohana_exec_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& s : stats) out.stats += s;
  out.rows = merge_partials(parts, plan.aggregate);
  return out;
}

}  // namespace cohana::exec
