#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cohana::storage {

/// One run of the user column: user global-id, first row, run length.
struct RleTriple {
  std::uint32_t user = 0;
  std::uint32_t first = 0;
  std::uint32_t length = 0;

  friend bool operator==(const RleTriple&, const RleTriple&) = default;
};

/// Run-length encodes a user column. Each user must appear in one contiguous
/// run; a user reappearing after another user throws StorageError.
std::vector<RleTriple> encode_user_column(std::span<const std::uint32_t> user_ids);

std::vector<std::uint32_t> decode_user_column(std::span<const RleTriple> runs);

}  // namespace cohana::storage
