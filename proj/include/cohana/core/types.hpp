#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace cohana {

/// Seconds since the Unix epoch (UTC).
using Timestamp = std::int64_t;

/// A decoded attribute value. Time and measures are integers; dimensions are
/// either strings or integers depending on the schema.
using Value = std::variant<std::int64_t, std::string>;

/// Non-owning view of a value, used on evaluation paths.
using CellRef = std::variant<std::int64_t, std::string_view>;

enum class ColumnKind : std::uint8_t { String = 0, Integer = 1 };

enum class ColumnRole : std::uint8_t { User, Time, Action, Dimension, Measure };

struct ColumnDef {
  std::string name;
  ColumnKind kind = ColumnKind::String;
  ColumnRole role = ColumnRole::Dimension;

  friend bool operator==(const ColumnDef&, const ColumnDef&) = default;
};

/// The activity relation (user, time, action, dimensions..., measures...).
///
/// Columns are addressed by a flat index: 0 is the user attribute, 1 the time
/// attribute, 2 the action attribute, followed by the dimensions in order and
/// then the measures in order.
class ActivitySchema {
 public:
  static constexpr std::size_t kUserColumn = 0;
  static constexpr std::size_t kTimeColumn = 1;
  static constexpr std::size_t kActionColumn = 2;
  static constexpr std::size_t kFirstDimensionColumn = 3;

  ActivitySchema() = default;

  /// Throws ValidationError when attribute names collide or are empty.
  ActivitySchema(std::string user_attr,
                 std::string time_attr,
                 std::string action_attr,
                 std::vector<std::pair<std::string, ColumnKind>> dimensions,
                 std::vector<std::string> measures);

  std::size_t column_count() const noexcept { return columns_.size(); }
  const ColumnDef& column(std::size_t index) const { return columns_.at(index); }
  const std::vector<ColumnDef>& columns() const noexcept { return columns_; }

  std::optional<std::size_t> find(std::string_view name) const;

  std::size_t dimension_count() const noexcept { return dimension_count_; }
  std::size_t measure_count() const noexcept {
    return columns_.size() - kFirstDimensionColumn - dimension_count_;
  }
  std::size_t first_measure_column() const noexcept {
    return kFirstDimensionColumn + dimension_count_;
  }

  const std::string& user_attr() const { return columns_.at(kUserColumn).name; }
  const std::string& time_attr() const { return columns_.at(kTimeColumn).name; }
  const std::string& action_attr() const { return columns_.at(kActionColumn).name; }

  friend bool operator==(const ActivitySchema&, const ActivitySchema&) = default;

 private:
  std::vector<ColumnDef> columns_;
  std::size_t dimension_count_ = 0;
};

/// One user activity. Primary key is (user, time, action).
struct ActivityTuple {
  std::string user;
  Timestamp time = 0;
  std::string action;
  std::vector<Value> dims;
  std::vector<std::int64_t> measures;

  friend bool operator==(const ActivityTuple&, const ActivityTuple&) = default;
};

/// Orders tuples by the primary key (user, time, action).
bool primary_key_less(const ActivityTuple& a, const ActivityTuple& b) noexcept;
bool primary_key_equal(const ActivityTuple& a, const ActivityTuple& b) noexcept;

/// Value of the column at flat index `column` (see ActivitySchema).
CellRef cell(const ActivityTuple& tuple, std::size_t column);
Value to_value(CellRef ref);

inline constexpr Timestamp kNever = -1;

/// Birth of one user for one birth action. `birth_time == kNever` exactly when
/// the user never performed the action, in which case there is no tuple index.
struct BirthInfo {
  Timestamp birth_time = kNever;
  std::optional<std::size_t> birth_tuple_index;

  bool born() const noexcept { return birth_tuple_index.has_value(); }

  friend bool operator==(const BirthInfo&, const BirthInfo&) = default;
};

}  // namespace cohana
