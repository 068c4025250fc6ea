#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cohana::storage {

/// Minimum number of bits needed to represent `max_value`; at least 1.
unsigned bits_for(std::uint64_t max_value) noexcept;

/// Read-only view of fixed-width packed integers.
///
/// Values are `bit_width` bits each, packed from the least significant end of
/// 64-bit words. A value never straddles two words, so a word holds
/// floor(64 / bit_width) values and `get(i)` is one load, one shift and one
/// mask.
class PackedView {
 public:
  PackedView() = default;
  PackedView(std::span<const std::uint64_t> words, std::size_t size, unsigned bit_width);

  std::size_t size() const noexcept { return size_; }
  unsigned bit_width() const noexcept { return bit_width_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  /// Unchecked access.
  std::uint64_t operator[](std::size_t i) const noexcept {
    const std::size_t word = i / per_word_;
    const unsigned shift = static_cast<unsigned>(i - word * per_word_) * bit_width_;
    return (words_[word] >> shift) & mask_;
  }

  /// Bounds-checked access; throws std::out_of_range.
  std::uint64_t get(std::size_t i) const;

 private:
  std::span<const std::uint64_t> words_;
  std::size_t size_ = 0;
  unsigned bit_width_ = 1;
  unsigned per_word_ = 64;
  std::uint64_t mask_ = 1;
};

/// Owning packed integer array.
class PackedArray {
 public:
  PackedArray() = default;

  /// Packs with the minimum width for the largest value.
  static PackedArray pack(std::span<const std::uint64_t> values);
  /// Packs with an explicit width; throws std::invalid_argument when a value
  /// does not fit or the width is outside [1, 64].
  static PackedArray pack(std::span<const std::uint64_t> values, unsigned bit_width);

  static std::size_t word_count_for(std::size_t size, unsigned bit_width) noexcept;

  std::size_t size() const noexcept { return size_; }
  unsigned bit_width() const noexcept { return bit_width_; }
  std::size_t word_count() const noexcept { return words_.size(); }
  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  std::uint64_t get(std::size_t i) const { return view().get(i); }
  PackedView view() const { return PackedView(words_, size_, bit_width_); }

  std::vector<std::uint64_t> unpack() const;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
  unsigned bit_width_ = 1;
};

}  // namespace cohana::storage
