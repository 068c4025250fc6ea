#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cohana/core/types.hpp"
#include "cohana/storage/chunkset.hpp"

namespace cohana::ingest {

/// Sorts by (user, time, action) and cuts the result into user-aligned
/// chunks. A chunk is closed at the first user boundary once it holds at
/// least `chunk_size` tuples, so a user never straddles two chunks and a
/// chunk may exceed the target. Throws std::invalid_argument when
/// `chunk_size` is zero.
storage::PartitionedTable sort_and_partition(std::vector<ActivityTuple> tuples,
                                             std::size_t chunk_size);

/// Chunk start offsets for tuples already in primary-key order.
std::vector<std::size_t> partition_points(std::span<const ActivityTuple> sorted,
                                          std::size_t chunk_size);

/// True when two neighbouring tuples of a primary-key-sorted sequence share
/// (user, time, action).
bool has_duplicate_keys(std::span<const ActivityTuple> sorted) noexcept;

}  // namespace cohana::ingest
