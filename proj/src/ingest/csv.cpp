#include "cohana/ingest/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "cohana/core/errors.hpp"
#include "cohana/core/time.hpp"
#include "json.hpp"

namespace cohana::ingest {

namespace {

std::optional<std::int64_t> parse_int(std::string_view s) noexcept {
  std::int64_t v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

bool is_blank_record(const std::vector<std::string>& fields) {
  return fields.size() == 1 && fields.front().empty();
}

ActivitySchema infer_schema(const std::vector<std::string>& header,
                            const std::vector<std::vector<std::string>>& rows) {
  if (header.size() < 3) {
    throw IngestError(IngestErrorKind::MissingField, 0,
                      "header needs at least user, time and action columns");
  }
  std::vector<std::pair<std::string, ColumnKind>> dims;
  std::vector<std::string> measures;
  for (std::size_t c = 3; c < header.size(); ++c) {
    const bool numeric = !rows.empty() && std::all_of(rows.begin(), rows.end(), [&](const auto& r) {
      return c >= r.size() || parse_int(r[c]).has_value();
    });
    if (numeric) {
      measures.push_back(header[c]);
    } else {
      dims.emplace_back(header[c], ColumnKind::String);
    }
  }
  try {
    return ActivitySchema(header[0], header[1], header[2], std::move(dims), std::move(measures));
  } catch (const ValidationError& e) {
    throw IngestError(IngestErrorKind::Parse, 0, std::string("header: ") + e.what());
  }
}

}  // namespace

// --- reader ------------------------------------------------------------------

CsvReader::CsvReader(std::istream& in, char delimiter) : in_(in), delim_(delimiter) {}

bool CsvReader::next(std::vector<std::string>& fields) {
  fields.clear();
  auto* buf = in_.rdbuf();
  using traits = std::char_traits<char>;
  if (buf == nullptr || traits::eq_int_type(buf->sgetc(), traits::eof())) return false;

  ++record_;
  std::string field;
  bool quoted = false;
  for (;;) {
    const auto ci = buf->sbumpc();
    if (traits::eq_int_type(ci, traits::eof())) {
      if (quoted) {
        throw IngestError(IngestErrorKind::Parse, record_ > 0 ? record_ - 1 : 0,
                          "unterminated quoted field");
      }
      fields.push_back(std::move(field));
      return true;
    }
    const char c = traits::to_char_type(ci);
    if (quoted) {
      if (c == '"') {
        if (traits::eq_int_type(buf->sgetc(), traits::to_int_type('"'))) {
          buf->sbumpc();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == delim_) {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && traits::eq_int_type(buf->sgetc(), traits::to_int_type('\n'))) buf->sbumpc();
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(c);
    }
  }
}

// --- loading -----------------------------------------------------------------

LoadedTable load_csv(const std::filesystem::path& path, const CsvSpec& spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(IngestErrorKind::Io, 0, "cannot open " + path.string());
  return load_csv(in, spec);
}

LoadedTable load_csv(std::istream& in, const CsvSpec& spec) {
  CsvReader reader(in, spec.delimiter);
  std::vector<std::string> header;
  if (!reader.next(header) || is_blank_record(header)) {
    throw IngestError(IngestErrorKind::MissingField, 0, "missing header row");
  }

  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_numbers;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (is_blank_record(fields)) continue;
    row_numbers.push_back(reader.record() - 1);
    rows.push_back(fields);
  }

  LoadedTable out;
  out.schema = spec.schema ? *spec.schema : infer_schema(header, rows);
  const auto& schema = out.schema;

  // schema column -> CSV field
  std::vector<std::size_t> source(schema.column_count());
  std::unordered_map<std::string, std::size_t> by_name;
  for (std::size_t i = 0; i < header.size(); ++i) by_name.emplace(header[i], i);
  for (std::size_t c = 0; c < schema.column_count(); ++c) {
    const auto it = by_name.find(schema.column(c).name);
    if (it == by_name.end()) {
      throw IngestError(IngestErrorKind::MissingField, 0,
                        "header lacks column '" + schema.column(c).name + "'");
    }
    source[c] = it->second;
  }

  out.tuples.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t line = row_numbers[r];
    if (row.size() < header.size()) {
      throw IngestError(IngestErrorKind::MissingField, line,
                        "expected " + std::to_string(header.size()) + " fields, found " +
                            std::to_string(row.size()));
    }
    if (row.size() > header.size()) {
      throw IngestError(IngestErrorKind::Parse, line,
                        "expected " + std::to_string(header.size()) + " fields, found " +
                            std::to_string(row.size()));
    }

    ActivityTuple t;
    t.dims.reserve(schema.dimension_count());
    t.measures.reserve(schema.measure_count());
    for (std::size_t c = 0; c < schema.column_count(); ++c) {
      const auto& def = schema.column(c);
      const std::string& text = row[source[c]];
      if (text.empty()) {
        throw IngestError(IngestErrorKind::MissingField, line, "empty value for '" + def.name + "'");
      }
      switch (def.role) {
        case ColumnRole::User:
          t.user = text;
          break;
        case ColumnRole::Action:
          t.action = text;
          break;
        case ColumnRole::Time: {
          auto ts = parse_timestamp(text);
          if (!ts) ts = parse_int(text);
          if (!ts) {
            throw IngestError(IngestErrorKind::Parse, line, "bad timestamp '" + text + "'");
          }
          t.time = *ts;
          break;
        }
        case ColumnRole::Dimension:
        case ColumnRole::Measure: {
          if (def.kind == ColumnKind::String) {
            t.dims.emplace_back(text);
            break;
          }
          const auto v = parse_int(text);
          if (!v) {
            throw IngestError(IngestErrorKind::Parse, line,
                              "'" + def.name + "' expects an integer, got '" + text + "'");
          }
          if (def.role == ColumnRole::Measure) {
            t.measures.push_back(*v);
          } else {
            t.dims.emplace_back(*v);
          }
          break;
        }
      }
    }
    out.tuples.push_back(std::move(t));
  }

  std::vector<std::size_t> order(out.tuples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (primary_key_equal(out.tuples[a], out.tuples[b])) return a < b;
    return primary_key_less(out.tuples[a], out.tuples[b]);
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& a = out.tuples[order[i - 1]];
    const auto& b = out.tuples[order[i]];
    if (primary_key_equal(a, b)) {
      throw IngestError(IngestErrorKind::DuplicateKey, row_numbers[order[i]],
                        "duplicate key (" + b.user + ", " + format_timestamp(b.time) + ", " +
                            b.action + ") first seen at row " +
                            std::to_string(row_numbers[order[i - 1]]));
    }
  }
  return out;
}

// --- schema JSON -------------------------------------------------------------

ActivitySchema schema_from_json(std::string_view text) {
  using nlohmann::json;
  try {
    const json j = json::parse(text);
    std::vector<std::pair<std::string, ColumnKind>> dims;
    for (const auto& d : j.value("dimensions", json::array())) {
      if (d.is_string()) {
        dims.emplace_back(d.get<std::string>(), ColumnKind::String);
        continue;
      }
      const auto kind = d.value("kind", std::string("string"));
      if (kind != "string" && kind != "integer") {
        throw IngestError(IngestErrorKind::Parse, 0, "schema: unknown dimension kind '" + kind + "'");
      }
      dims.emplace_back(d.at("name").get<std::string>(),
                        kind == "string" ? ColumnKind::String : ColumnKind::Integer);
    }
    auto measures = j.value("measures", std::vector<std::string>{});
    return ActivitySchema(j.at("user").get<std::string>(), j.at("time").get<std::string>(),
                          j.at("action").get<std::string>(), std::move(dims), std::move(measures));
  } catch (const json::exception& e) {
    throw IngestError(IngestErrorKind::Parse, 0, std::string("schema: ") + e.what());
  } catch (const ValidationError& e) {
    throw IngestError(IngestErrorKind::Parse, 0, std::string("schema: ") + e.what());
  }
}

std::string schema_to_json(const ActivitySchema& schema) {
  using nlohmann::json;
  json j;
  j["user"] = schema.user_attr();
  j["time"] = schema.time_attr();
  j["action"] = schema.action_attr();
  j["dimensions"] = json::array();
  for (std::size_t d = 0; d < schema.dimension_count(); ++d) {
    const auto& col = schema.column(ActivitySchema::kFirstDimensionColumn + d);
    j["dimensions"].push_back(
        {{"name", col.name}, {"kind", col.kind == ColumnKind::String ? "string" : "integer"}});
  }
  j["measures"] = json::array();
  for (std::size_t m = 0; m < schema.measure_count(); ++m) {
    j["measures"].push_back(schema.column(schema.first_measure_column() + m).name);
  }
  return j.dump(2);
}

// --- writing -----------------------------------------------------------------

std::string csv_escape(std::string_view field, char delimiter) {
  if (field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv(std::ostream& out, const ActivitySchema& schema, std::span<const ActivityTuple> tuples) {
  for (std::size_t c = 0; c < schema.column_count(); ++c) {
    if (c > 0) out << ',';
    out << csv_escape(schema.column(c).name);
  }
  out << '\n';
  std::string line;
  for (const auto& t : tuples) {
    line.clear();
    for (std::size_t c = 0; c < schema.column_count(); ++c) {
      if (c > 0) line.push_back(',');
      if (c == ActivitySchema::kTimeColumn) {
        line += format_timestamp(t.time);
        continue;
      }
      const CellRef v = cell(t, c);
      if (const auto* s = std::get_if<std::string_view>(&v)) {
        line += csv_escape(*s);
      } else {
        line += std::to_string(std::get<std::int64_t>(v));
      }
    }
    line.push_back('\n');
    out << line;
  }
}

}  // namespace cohana::ingest
