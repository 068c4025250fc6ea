#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cohana/storage/dictionary.hpp"
#include "cohana/storage/packed_array.hpp"

namespace cohana::storage {

/// Read-side view of one string column inside a chunk: the sorted global-ids
/// present in the chunk, and one chunk-id (index into `chunk_dict`) per row.
struct StringColumnView {
  std::span<const std::uint32_t> chunk_dict;
  PackedView codes;

  std::uint32_t code_at(std::size_t row) const noexcept {
    return static_cast<std::uint32_t>(codes[row]);
  }
  std::uint32_t global_id_at(std::size_t row) const noexcept { return chunk_dict[code_at(row)]; }

  /// Chunk-id of `global_id`, or -1 when the chunk does not contain it.
  std::int64_t find_code(std::uint32_t global_id) const noexcept;
};

/// Read-side view of one integer column inside a chunk: values are stored as
/// non-negative deltas from the chunk minimum.
struct IntColumnView {
  std::int64_t chunk_min = 0;
  std::int64_t chunk_max = 0;
  PackedView deltas;

  std::int64_t value_at(std::size_t row) const noexcept {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(chunk_min) + deltas[row]);
  }
};

struct StringColumnSegment {
  std::vector<std::uint32_t> chunk_dict;
  PackedArray codes;

  StringColumnView view() const { return {chunk_dict, codes.view()}; }
};

struct IntColumnSegment {
  std::int64_t chunk_min = 0;
  std::int64_t chunk_max = 0;
  PackedArray deltas;

  IntColumnView view() const { return {chunk_min, chunk_max, deltas.view()}; }
};

/// Encodes rows given as global-ids.
StringColumnSegment encode_string_segment(std::span<const std::uint32_t> global_ids);
/// Encodes rows given as strings; throws StorageError when a value is missing
/// from the global dictionary.
StringColumnSegment encode_string_segment(std::span<const std::string_view> rows,
                                          const GlobalDictionary& dict);
std::string_view decode_at(const StringColumnView& segment,
                           const GlobalDictionary& dict,
                           std::size_t row);

IntColumnSegment encode_int_segment(std::span<const std::int64_t> rows);
/// Bounds-checked; throws std::out_of_range.
std::int64_t decode_at(const IntColumnView& segment, std::size_t row);

}  // namespace cohana::storage
