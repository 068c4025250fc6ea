#include "cohana/ingest/partition.hpp"

#include <algorithm>
#include <stdexcept>

namespace cohana::ingest {

std::vector<std::size_t> partition_points(std::span<const ActivityTuple> sorted,
                                          std::size_t chunk_size) {
  if (chunk_size == 0) throw std::invalid_argument("chunk size must be positive");
  std::vector<std::size_t> starts;
  if (sorted.empty()) return starts;
  starts.push_back(0);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].user != sorted[i - 1].user && i - starts.back() >= chunk_size) {
      starts.push_back(i);
    }
  }
  return starts;
}

storage::PartitionedTable sort_and_partition(std::vector<ActivityTuple> tuples,
                                             std::size_t chunk_size) {
  if (chunk_size == 0) throw std::invalid_argument("chunk size must be positive");
  std::sort(tuples.begin(), tuples.end(), primary_key_less);
  storage::PartitionedTable out;
  out.chunk_starts = partition_points(tuples, chunk_size);
  out.tuples = std::move(tuples);
  return out;
}

bool has_duplicate_keys(std::span<const ActivityTuple> sorted) noexcept {
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (primary_key_equal(sorted[i - 1], sorted[i])) return true;
  }
  return false;
}

}  // namespace cohana::ingest
