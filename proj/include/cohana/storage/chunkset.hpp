#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "cohana/core/types.hpp"
#include "cohana/storage/dictionary.hpp"
#include "cohana/storage/packed_array.hpp"
#include "cohana/storage/rle.hpp"
#include "cohana/storage/segments.hpp"

namespace cohana::storage {

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::size_t kDefaultChunkSize = 262144;

inline constexpr const char* kManifestFileName = "manifest.bin";
inline constexpr const char* kDataFileName = "chunks.bin";

/// Tuples sorted by (user, time, action), cut into user-aligned chunks.
struct PartitionedTable {
  std::vector<ActivityTuple> tuples;
  /// Index of the first tuple of every chunk. Empty iff `tuples` is empty.
  std::vector<std::size_t> chunk_starts;

  std::size_t chunk_count() const noexcept { return chunk_starts.size(); }
  std::span<const ActivityTuple> chunk(std::size_t i) const;
};

/// Location of one packed array inside the data file.
struct SegmentRef {
  std::uint64_t offset = 0;  // absolute byte offset
  std::uint32_t length = 0;  // number of packed values
  std::uint32_t word_count = 0;
  std::uint8_t bit_width = 1;
  std::uint32_t crc = 0;  // CRC-32 of the segment's words

  friend bool operator==(const SegmentRef&, const SegmentRef&) = default;
};

/// Per-chunk, per-column metadata held in the manifest. String columns carry
/// their chunk dictionary; integer columns carry their chunk MIN/MAX.
struct ColumnMeta {
  ColumnKind kind = ColumnKind::String;
  std::vector<std::uint32_t> chunk_dict;
  std::int64_t min = 0;
  std::int64_t max = 0;
  SegmentRef data;

  friend bool operator==(const ColumnMeta&, const ColumnMeta&) = default;
};

struct ChunkMeta {
  std::uint32_t rows = 0;
  std::uint32_t users = 0;
  SegmentRef run_users;
  SegmentRef run_firsts;
  SegmentRef run_lengths;
  std::vector<ColumnMeta> columns;  // flat schema index; the user slot is unused

  friend bool operator==(const ChunkMeta&, const ChunkMeta&) = default;
};

struct Manifest {
  std::uint32_t version = kFormatVersion;
  std::uint64_t chunk_size = kDefaultChunkSize;
  std::uint64_t tuple_count = 0;
  ActivitySchema schema;
  std::vector<GlobalDictionary> dictionaries;  // per column; empty for integer columns
  std::vector<std::pair<std::int64_t, std::int64_t>> ranges;  // per column; global MIN/MAX
  std::vector<ChunkMeta> chunks;
};

struct ColumnView {
  ColumnKind kind = ColumnKind::String;
  StringColumnView str;
  IntColumnView num;
};

/// Zero-copy view of one chunk's compressed columns.
struct ChunkView {
  std::uint32_t id = 0;
  std::uint32_t rows = 0;
  std::uint32_t users = 0;
  PackedView run_users;
  PackedView run_firsts;
  PackedView run_lengths;
  std::vector<ColumnView> columns;

  RleTriple run(std::size_t i) const noexcept {
    return {static_cast<std::uint32_t>(run_users[i]), static_cast<std::uint32_t>(run_firsts[i]),
            static_cast<std::uint32_t>(run_lengths[i])};
  }
};

/// Read-only memory mapping of a whole file.
class MappedFile {
 public:
  MappedFile() = default;
  static MappedFile open(const std::filesystem::path& path);
  ~MappedFile();
  MappedFile(MappedFile&& other) noexcept;
  MappedFile& operator=(MappedFile&& other) noexcept;
  MappedFile(const MappedFile&) = delete;
  MappedFile& operator=(const MappedFile&) = delete;

  std::span<const std::byte> bytes() const noexcept {
    return {static_cast<const std::byte*>(addr_), size_};
  }

 private:
  void* addr_ = nullptr;
  std::size_t size_ = 0;
};

struct OpenOptions {
  bool verify_checksums = true;
};

class ChunkSet;
ChunkSet open_chunkset(const std::filesystem::path& dir, OpenOptions options);

/// An opened, immutable compressed activity table. Safe for concurrent reads.
class ChunkSet {
 public:
  const Manifest& manifest() const noexcept { return manifest_; }
  const ActivitySchema& schema() const noexcept { return manifest_.schema; }
  std::size_t chunk_count() const noexcept { return manifest_.chunks.size(); }
  const ChunkMeta& chunk_meta(std::size_t i) const { return manifest_.chunks.at(i); }
  const GlobalDictionary& dictionary(std::size_t column) const {
    return manifest_.dictionaries.at(column);
  }

  ChunkView chunk(std::size_t i) const;

  std::vector<ActivityTuple> decode_chunk(std::size_t i) const;
  std::vector<ActivityTuple> decode_all() const;

  std::uint64_t data_bytes() const noexcept { return data_.bytes().size(); }

 private:
  friend ChunkSet open_chunkset(const std::filesystem::path& dir, OpenOptions options);

  PackedView segment(const SegmentRef& ref) const;

  Manifest manifest_;
  MappedFile data_;
};

struct WriteStats {
  std::uint64_t tuples = 0;
  std::size_t chunks = 0;
  std::uint64_t manifest_bytes = 0;
  std::uint64_t data_bytes = 0;
};

/// Writes `table` into directory `dir` (created if needed). Throws
/// StorageError(InvalidInput) when the table violates the sort order,
/// user alignment, or schema shape.
WriteStats write_chunkset(const ActivitySchema& schema,
                          const PartitionedTable& table,
                          std::size_t chunk_size,
                          const std::filesystem::path& dir);

/// Throws StorageError with kind Io, BadMagic, VersionMismatch, Truncated,
/// ChecksumMismatch or Corrupt.
ChunkSet open_chunkset(const std::filesystem::path& dir);

/// Binary search of the action column's chunk dictionary.
bool chunk_has_action(const ChunkMeta& chunk, std::uint32_t action_global_id) noexcept;

/// Closed-interval overlap of [lo, hi] with the chunk's MIN/MAX of an integer
/// column.
bool chunk_range_overlaps(const ChunkMeta& chunk,
                          std::size_t column,
                          std::int64_t lo,
                          std::int64_t hi) noexcept;

}  // namespace cohana::storage
