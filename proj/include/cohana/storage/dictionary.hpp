#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cohana::storage {

/// Table-wide sorted dictionary of the distinct values of one string column.
/// A value's global-id is its rank in the dictionary, so global-id order is
/// string order.
class GlobalDictionary {
 public:
  GlobalDictionary() = default;
  /// `sorted_unique` must be strictly increasing; throws std::invalid_argument
  /// otherwise.
  explicit GlobalDictionary(std::vector<std::string> sorted_unique);

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  const std::vector<std::string>& values() const noexcept { return values_; }
  std::string_view at(std::uint32_t global_id) const { return values_.at(global_id); }

  std::optional<std::uint32_t> find(std::string_view value) const noexcept;
  /// Number of dictionary entries strictly less than `value`.
  std::uint32_t lower_bound(std::string_view value) const noexcept;

  friend bool operator==(const GlobalDictionary&, const GlobalDictionary&) = default;

 private:
  std::vector<std::string> values_;
};

GlobalDictionary build_global_dict(std::span<const std::string_view> values);
GlobalDictionary build_global_dict(std::span<const std::string> values);

}  // namespace cohana::storage
