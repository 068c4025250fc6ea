#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cohana/core/types.hpp"

namespace cohana::ingest {

/// How CSV fields map onto the activity schema.
///
/// With an explicit schema, header names select the columns (extra CSV
/// columns are ignored). Without one, the first three columns are taken as
/// user, time and action; every remaining column whose values are all
/// integers becomes a measure, the rest become string dimensions.
struct CsvSpec {
  std::optional<ActivitySchema> schema;
  char delimiter = ',';
};

struct LoadedTable {
  ActivitySchema schema;
  std::vector<ActivityTuple> tuples;  // in file order
};

/// Throws IngestError; parse and missing-field errors name the 1-based data
/// row, duplicate (user, time, action) keys name the later of the two rows.
LoadedTable load_csv(const std::filesystem::path& path, const CsvSpec& spec = {});
LoadedTable load_csv(std::istream& in, const CsvSpec& spec = {});

/// Reads a schema description of the form
///   {"user": "player", "time": "time", "action": "action",
///    "dimensions": [{"name": "role", "kind": "string"}, ...],
///    "measures": ["gold", ...]}
/// Dimension entries may also be bare names (string kind).
ActivitySchema schema_from_json(std::string_view text);
std::string schema_to_json(const ActivitySchema& schema);

/// Splits RFC 4180 records. Quoted fields may contain delimiters, doubled
/// quotes and line breaks.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in, char delimiter = ',');

  /// False at end of input. Throws IngestError(Parse) on an unterminated
  /// quoted field.
  bool next(std::vector<std::string>& fields);
  /// 1-based index of the record last returned by next().
  std::size_t record() const noexcept { return record_; }

 private:
  std::istream& in_;
  char delim_;
  std::size_t record_ = 0;
};

/// Quotes `field` when it contains the delimiter, a quote, or a line break.
std::string csv_escape(std::string_view field, char delimiter = ',');

/// Header row, then one row per tuple; times as `YYYY-MM-DD HH:MM:SS`.
void write_csv(std::ostream& out, const ActivitySchema& schema, std::span<const ActivityTuple> tuples);

}  // namespace cohana::ingest
