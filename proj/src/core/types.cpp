#include "cohana/core/types.hpp"

#include <set>

#include "cohana/core/errors.hpp"

namespace cohana {

const char* to_string(StorageErrorKind kind) noexcept {
  switch (kind) {
    case StorageErrorKind::Io:
      return "io error";
    case StorageErrorKind::BadMagic:
      return "bad magic";
    case StorageErrorKind::VersionMismatch:
      return "version mismatch";
    case StorageErrorKind::Truncated:
      return "truncated file";
    case StorageErrorKind::ChecksumMismatch:
      return "checksum mismatch";
    case StorageErrorKind::Corrupt:
      return "corrupt data";
    case StorageErrorKind::InvalidInput:
      return "invalid input";
  }
  return "storage error";
}

ActivitySchema::ActivitySchema(std::string user_attr,
                               std::string time_attr,
                               std::string action_attr,
                               std::vector<std::pair<std::string, ColumnKind>> dimensions,
                               std::vector<std::string> measures) {
  columns_.reserve(3 + dimensions.size() + measures.size());
  columns_.push_back({std::move(user_attr), ColumnKind::String, ColumnRole::User});
  columns_.push_back({std::move(time_attr), ColumnKind::Integer, ColumnRole::Time});
  columns_.push_back({std::move(action_attr), ColumnKind::String, ColumnRole::Action});
  for (auto& [name, kind] : dimensions) {
    columns_.push_back({std::move(name), kind, ColumnRole::Dimension});
  }
  for (auto& name : measures) {
    columns_.push_back({std::move(name), ColumnKind::Integer, ColumnRole::Measure});
  }
  dimension_count_ = dimensions.size();

  std::set<std::string_view> seen;
  for (const auto& col : columns_) {
    if (col.name.empty()) {
      throw ValidationError("schema attribute names must be non-empty");
    }
    if (!seen.insert(col.name).second) {
      throw ValidationError("duplicate schema attribute '" + col.name + "'");
    }
  }
}

std::optional<std::size_t> ActivitySchema::find(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

bool primary_key_less(const ActivityTuple& a, const ActivityTuple& b) noexcept {
  if (a.user != b.user) return a.user < b.user;
  if (a.time != b.time) return a.time < b.time;
  return a.action < b.action;
}

bool primary_key_equal(const ActivityTuple& a, const ActivityTuple& b) noexcept {
  return a.user == b.user && a.time == b.time && a.action == b.action;
}

CellRef cell(const ActivityTuple& tuple, std::size_t column) {
  switch (column) {
    case ActivitySchema::kUserColumn:
      return std::string_view(tuple.user);
    case ActivitySchema::kTimeColumn:
      return tuple.time;
    case ActivitySchema::kActionColumn:
      return std::string_view(tuple.action);
    default:
      break;
  }
  const std::size_t dim = column - ActivitySchema::kFirstDimensionColumn;
  if (dim < tuple.dims.size()) {
    const Value& v = tuple.dims[dim];
    if (const auto* s = std::get_if<std::string>(&v)) return std::string_view(*s);
    return std::get<std::int64_t>(v);
  }
  const std::size_t measure = dim - tuple.dims.size();
  if (measure >= tuple.measures.size()) {
    throw Error("column index " + std::to_string(column) + " out of range for tuple");
  }
  return tuple.measures[measure];
}

Value to_value(CellRef ref) {
  if (const auto* s = std::get_if<std::string_view>(&ref)) return std::string(*s);
  return std::get<std::int64_t>(ref);
}

}  // namespace cohana
