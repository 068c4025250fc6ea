#pragma once

#include <cstdint>
#include <optional>

#include "cohana/storage/chunkset.hpp"

namespace cohana::exec {

struct ScanStats {
  /// Rows of which at least one column was decoded. Counted per user as the
  /// prefix of the user's run up to the furthest row touched.
  std::uint64_t rows_decoded = 0;
  std::uint64_t users_visited = 0;
  /// Users abandoned by a selection without reading their remaining rows.
  std::uint64_t users_skipped = 0;
  std::uint64_t chunks_opened = 0;

  ScanStats& operator+=(const ScanStats& o) noexcept {
    rows_decoded += o.rows_decoded;
    users_visited += o.users_visited;
    users_skipped += o.users_skipped;
    chunks_opened += o.chunks_opened;
    return *this;
  }
};

/// User-at-a-time cursor over one chunk. Every column is random access, so
/// a single row position stands for the per-column file pointers.
class ScanCursor {
 public:
  /// `birth_action_code` is the chunk-id of the birth action in the chunk's
  /// action dictionary, or -1 when the chunk lacks it.
  ScanCursor(const storage::ChunkView& chunk, std::int64_t birth_action_code, ScanStats& stats);

  const storage::ChunkView& chunk() const noexcept { return chunk_; }
  ScanStats& stats() noexcept { return stats_; }

  /// Positions the cursor at the next user's first row. False at the end
  /// of the chunk.
  bool next_user();
  const storage::RleTriple& user() const noexcept { return run_; }
  std::uint32_t user_end() const noexcept { return run_.first + run_.length; }
  std::uint32_t position() const noexcept { return pos_; }

  /// Next row of the current user, or nullopt once the run is exhausted.
  std::optional<std::uint32_t> next() noexcept {
    if (pos_ >= user_end()) return std::nullopt;
    touch(pos_);
    return pos_++;
  }

  /// Moves within the current user's run.
  void seek(std::uint32_t row) noexcept { pos_ = row; }

  /// Advances past the rest of the current user; returns the rows skipped.
  std::uint32_t skip_cur_user() noexcept {
    const std::uint32_t skipped = pos_ < user_end() ? user_end() - pos_ : 0;
    pos_ = user_end();
    return skipped;
  }

  /// First row of the current user whose action is the birth action;
  /// computed once per user by scanning the action column.
  std::optional<std::uint32_t> birth_row();

  /// Marks `row` as decoded.
  void touch(std::uint32_t row) noexcept {
    if (row >= high_) {
      stats_.rows_decoded += row + 1 - high_;
      high_ = row + 1;
    }
  }

 private:
  const storage::ChunkView& chunk_;
  std::int64_t birth_code_;
  ScanStats& stats_;
  std::uint32_t next_run_ = 0;
  storage::RleTriple run_{};
  std::uint32_t pos_ = 0;
  std::uint32_t high_ = 0;
  bool birth_known_ = false;
  std::optional<std::uint32_t> birth_;
};

/// GetBirthTuple: the birth row of the cursor's current user, if any.
inline std::optional<std::uint32_t> get_birth_tuple(ScanCursor& cursor) {
  return cursor.birth_row();
}

}  // namespace cohana::exec
