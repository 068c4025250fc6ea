#include "cohana/storage/packed_array.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace cohana::storage {

namespace {

constexpr std::uint64_t mask_for(unsigned bit_width) noexcept {
  return bit_width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << bit_width) - 1);
}

}  // namespace

unsigned bits_for(std::uint64_t max_value) noexcept {
  if (max_value == 0) return 1;
  return 64u - static_cast<unsigned>(std::countl_zero(max_value));
}

PackedView::PackedView(std::span<const std::uint64_t> words, std::size_t size, unsigned bit_width)
    : words_(words),
      size_(size),
      bit_width_(bit_width),
      per_word_(64 / bit_width),
      mask_(mask_for(bit_width)) {
  if (bit_width < 1 || bit_width > 64) {
    throw std::invalid_argument("packed bit width must be in [1, 64]");
  }
  if (words.size() < PackedArray::word_count_for(size, bit_width)) {
    throw std::invalid_argument("packed view has too few words for its length");
  }
}

std::uint64_t PackedView::get(std::size_t i) const {
  if (i >= size_) {
    throw std::out_of_range("packed index " + std::to_string(i) + " >= size " +
                            std::to_string(size_));
  }
  return (*this)[i];
}

std::size_t PackedArray::word_count_for(std::size_t size, unsigned bit_width) noexcept {
  const std::size_t per_word = 64 / bit_width;
  return (size + per_word - 1) / per_word;
}

PackedArray PackedArray::pack(std::span<const std::uint64_t> values) {
  const std::uint64_t max_value =
      values.empty() ? 0 : *std::max_element(values.begin(), values.end());
  return pack(values, bits_for(max_value));
}

PackedArray PackedArray::pack(std::span<const std::uint64_t> values, unsigned bit_width) {
  if (bit_width < 1 || bit_width > 64) {
    throw std::invalid_argument("packed bit width must be in [1, 64]");
  }
  const std::uint64_t mask = mask_for(bit_width);
  const std::size_t per_word = 64 / bit_width;

  PackedArray out;
  out.size_ = values.size();
  out.bit_width_ = bit_width;
  out.words_.assign(word_count_for(values.size(), bit_width), 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if ((values[i] & ~mask) != 0) {
      throw std::invalid_argument("value does not fit in " + std::to_string(bit_width) + " bits");
    }
    const std::size_t word = i / per_word;
    const unsigned shift = static_cast<unsigned>(i - word * per_word) * bit_width;
    out.words_[word] |= values[i] << shift;
  }
  return out;
}

std::vector<std::uint64_t> PackedArray::unpack() const {
  const PackedView v = view();
  std::vector<std::uint64_t> out(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = v[i];
  return out;
}

}  // namespace cohana::storage
