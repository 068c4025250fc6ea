#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "cohana/core/errors.hpp"
#include "cohana/storage/dictionary.hpp"
#include "cohana/storage/rle.hpp"
#include "cohana/storage/segments.hpp"

namespace cohana::storage {

// --- global dictionary -------------------------------------------------------

GlobalDictionary::GlobalDictionary(std::vector<std::string> sorted_unique)
    : values_(std::move(sorted_unique)) {
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (!(values_[i - 1] < values_[i])) {
      throw std::invalid_argument("global dictionary must be strictly increasing");
    }
  }
}

std::optional<std::uint32_t> GlobalDictionary::find(std::string_view value) const noexcept {
  const std::uint32_t pos = lower_bound(value);
  if (pos < values_.size() && values_[pos] == value) return pos;
  return std::nullopt;
}

std::uint32_t GlobalDictionary::lower_bound(std::string_view value) const noexcept {
  const auto it = std::lower_bound(values_.begin(), values_.end(), value,
                                   [](const std::string& a, std::string_view b) { return a < b; });
  return static_cast<std::uint32_t>(it - values_.begin());
}

GlobalDictionary build_global_dict(std::span<const std::string_view> values) {
  std::vector<std::string_view> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  return GlobalDictionary(std::vector<std::string>(sorted.begin(), sorted.end()));
}

GlobalDictionary build_global_dict(std::span<const std::string> values) {
  std::vector<std::string_view> views(values.begin(), values.end());
  return build_global_dict(std::span<const std::string_view>(views));
}

// --- user column RLE ---------------------------------------------------------

std::vector<RleTriple> encode_user_column(std::span<const std::uint32_t> user_ids) {
  std::vector<RleTriple> runs;
  std::unordered_set<std::uint32_t> seen;
  for (std::size_t i = 0; i < user_ids.size(); ++i) {
    if (!runs.empty() && runs.back().user == user_ids[i]) {
      ++runs.back().length;
      continue;
    }
    if (!seen.insert(user_ids[i]).second) {
      throw StorageError(StorageErrorKind::InvalidInput,
                         "user " + std::to_string(user_ids[i]) + " reappears at row " +
                             std::to_string(i) + " after its run ended");
    }
    runs.push_back({user_ids[i], static_cast<std::uint32_t>(i), 1});
  }
  return runs;
}

std::vector<std::uint32_t> decode_user_column(std::span<const RleTriple> runs) {
  std::vector<std::uint32_t> out;
  for (const auto& r : runs) {
    if (r.first != out.size()) {
      throw StorageError(StorageErrorKind::Corrupt, "RLE runs are not contiguous");
    }
    out.insert(out.end(), r.length, r.user);
  }
  return out;
}

// --- string segments ---------------------------------------------------------

std::int64_t StringColumnView::find_code(std::uint32_t global_id) const noexcept {
  const auto it = std::lower_bound(chunk_dict.begin(), chunk_dict.end(), global_id);
  if (it == chunk_dict.end() || *it != global_id) return -1;
  return it - chunk_dict.begin();
}

StringColumnSegment encode_string_segment(std::span<const std::uint32_t> global_ids) {
  StringColumnSegment seg;
  seg.chunk_dict.assign(global_ids.begin(), global_ids.end());
  std::sort(seg.chunk_dict.begin(), seg.chunk_dict.end());
  seg.chunk_dict.erase(std::unique(seg.chunk_dict.begin(), seg.chunk_dict.end()),
                       seg.chunk_dict.end());

  std::vector<std::uint64_t> codes(global_ids.size());
  for (std::size_t i = 0; i < global_ids.size(); ++i) {
    codes[i] = static_cast<std::uint64_t>(
        std::lower_bound(seg.chunk_dict.begin(), seg.chunk_dict.end(), global_ids[i]) -
        seg.chunk_dict.begin());
  }
  seg.codes = PackedArray::pack(codes);
  return seg;
}

StringColumnSegment encode_string_segment(std::span<const std::string_view> rows,
                                          const GlobalDictionary& dict) {
  std::vector<std::uint32_t> ids(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto id = dict.find(rows[i]);
    if (!id) {
      throw StorageError(StorageErrorKind::InvalidInput,
                         "value '" + std::string(rows[i]) + "' missing from global dictionary");
    }
    ids[i] = *id;
  }
  return encode_string_segment(ids);
}

std::string_view decode_at(const StringColumnView& segment,
                           const GlobalDictionary& dict,
                           std::size_t row) {
  const auto code = segment.codes.get(row);
  if (code >= segment.chunk_dict.size()) {
    throw StorageError(StorageErrorKind::Corrupt, "chunk-id outside chunk dictionary");
  }
  return dict.at(segment.chunk_dict[code]);
}

// --- integer segments --------------------------------------------------------

IntColumnSegment encode_int_segment(std::span<const std::int64_t> rows) {
  IntColumnSegment seg;
  if (!rows.empty()) {
    const auto [lo, hi] = std::minmax_element(rows.begin(), rows.end());
    seg.chunk_min = *lo;
    seg.chunk_max = *hi;
  }
  std::vector<std::uint64_t> deltas(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    deltas[i] = static_cast<std::uint64_t>(rows[i]) - static_cast<std::uint64_t>(seg.chunk_min);
  }
  seg.deltas = PackedArray::pack(deltas);
  return seg;
}

std::int64_t decode_at(const IntColumnView& segment, std::size_t row) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(segment.chunk_min) +
                                   segment.deltas.get(row));
}

}  // namespace cohana::storage
