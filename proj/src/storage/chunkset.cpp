#include "cohana/storage/chunkset.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <string>

#include "byte_io.hpp"
#include "cohana/core/errors.hpp"

namespace cohana::storage {

static_assert(std::endian::native == std::endian::little,
              "packed segments are mapped in place and require a little-endian host");

namespace {

constexpr char kManifestMagic[8] = {'C', 'H', 'N', 'A', 'M', 'A', 'N', 'I'};
constexpr char kDataMagic[8] = {'C', 'H', 'N', 'A', 'D', 'A', 'T', 'A'};
constexpr std::size_t kDataHeaderBytes = 16;
constexpr std::size_t kManifestHeaderBytes = 16;  // magic, version, body length

std::uint32_t crc_of(const void* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  const auto* p = static_cast<const Bytef*>(data);
  while (n > 0) {
    const auto step = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, p, step);
    p += step;
    n -= step;
  }
  return static_cast<std::uint32_t>(crc);
}

StorageError invalid(const std::string& msg) {
  return StorageError(StorageErrorKind::InvalidInput, msg);
}

StorageError corrupt(const std::string& msg) {
  return StorageError(StorageErrorKind::Corrupt, msg);
}

void check_table(const ActivitySchema& schema, const PartitionedTable& table) {
  const auto& t = table.tuples;
  if (t.empty() != table.chunk_starts.empty()) {
    throw invalid("chunk boundaries do not match tuple count");
  }
  for (std::size_t i = 0; i < table.chunk_starts.size(); ++i) {
    const std::size_t s = table.chunk_starts[i];
    if ((i == 0 && s != 0) || (i > 0 && s <= table.chunk_starts[i - 1]) || s >= t.size()) {
      throw invalid("chunk boundaries must start at 0 and strictly increase");
    }
    if (i > 0 && t[s - 1].user == t[s].user) {
      throw invalid("user '" + t[s].user + "' spans chunks " + std::to_string(i - 1) + " and " +
                    std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0 && !primary_key_less(t[i - 1], t[i])) {
      throw invalid("tuples not strictly sorted by (user, time, action) at index " +
                    std::to_string(i));
    }
    if (t[i].dims.size() != schema.dimension_count() ||
        t[i].measures.size() != schema.measure_count()) {
      throw invalid("tuple " + std::to_string(i) + " does not match the schema shape");
    }
    for (std::size_t d = 0; d < t[i].dims.size(); ++d) {
      const bool is_string = std::holds_alternative<std::string>(t[i].dims[d]);
      const auto kind = schema.column(ActivitySchema::kFirstDimensionColumn + d).kind;
      if (is_string != (kind == ColumnKind::String)) {
        throw invalid("tuple " + std::to_string(i) + " has a mistyped dimension value");
      }
    }
  }
}

std::string_view string_cell(const ActivityTuple& t, std::size_t column) {
  return std::get<std::string_view>(cell(t, column));
}

std::int64_t int_cell(const ActivityTuple& t, std::size_t column) {
  return std::get<std::int64_t>(cell(t, column));
}

class DataWriter {
 public:
  explicit DataWriter(const std::filesystem::path& path)
      : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw StorageError(StorageErrorKind::Io, "cannot create " + path.string());
    out_.write(kDataMagic, sizeof kDataMagic);
    detail::ByteWriter header;
    header.u32(kFormatVersion);
    header.u32(0);
    out_.write(reinterpret_cast<const char*>(header.bytes().data()),
               static_cast<std::streamsize>(header.bytes().size()));
    offset_ = kDataHeaderBytes;
  }

  SegmentRef append(const PackedArray& arr) {
    SegmentRef ref;
    ref.offset = offset_;
    ref.length = static_cast<std::uint32_t>(arr.size());
    ref.word_count = static_cast<std::uint32_t>(arr.word_count());
    ref.bit_width = static_cast<std::uint8_t>(arr.bit_width());
    const std::size_t bytes = arr.word_count() * sizeof(std::uint64_t);
    ref.crc = crc_of(arr.words().data(), bytes);
    out_.write(reinterpret_cast<const char*>(arr.words().data()),
               static_cast<std::streamsize>(bytes));
    offset_ += bytes;
    return ref;
  }

  std::uint64_t finish() {
    out_.flush();
    if (!out_) throw StorageError(StorageErrorKind::Io, "write to data file failed");
    return offset_;
  }

 private:
  std::ofstream out_;
  std::uint64_t offset_ = 0;
};

void put_segment(detail::ByteWriter& w, const SegmentRef& r) {
  w.u64(r.offset);
  w.u32(r.length);
  w.u32(r.word_count);
  w.u8(r.bit_width);
  w.u32(r.crc);
}

SegmentRef get_segment(detail::ByteReader& r) {
  SegmentRef s;
  s.offset = r.u64();
  s.length = r.u32();
  s.word_count = r.u32();
  s.bit_width = r.u8();
  s.crc = r.u32();
  return s;
}

std::vector<std::uint8_t> serialize_body(const Manifest& m) {
  detail::ByteWriter w;
  w.u64(m.chunk_size);
  w.u64(m.tuple_count);

  const auto& schema = m.schema;
  w.str(schema.user_attr());
  w.str(schema.time_attr());
  w.str(schema.action_attr());
  w.u32(static_cast<std::uint32_t>(schema.dimension_count()));
  for (std::size_t d = 0; d < schema.dimension_count(); ++d) {
    const auto& col = schema.column(ActivitySchema::kFirstDimensionColumn + d);
    w.str(col.name);
    w.u8(static_cast<std::uint8_t>(col.kind));
  }
  w.u32(static_cast<std::uint32_t>(schema.measure_count()));
  for (std::size_t i = 0; i < schema.measure_count(); ++i) {
    w.str(schema.column(schema.first_measure_column() + i).name);
  }

  for (std::size_t c = 0; c < schema.column_count(); ++c) {
    if (schema.column(c).kind == ColumnKind::String) {
      const auto& dict = m.dictionaries[c];
      w.u32(static_cast<std::uint32_t>(dict.size()));
      for (const auto& v : dict.values()) w.str(v);
    } else {
      w.i64(m.ranges[c].first);
      w.i64(m.ranges[c].second);
    }
  }

  w.u32(static_cast<std::uint32_t>(m.chunks.size()));
  for (const auto& chunk : m.chunks) {
    w.u32(chunk.rows);
    w.u32(chunk.users);
    put_segment(w, chunk.run_users);
    put_segment(w, chunk.run_firsts);
    put_segment(w, chunk.run_lengths);
    for (std::size_t c = 1; c < schema.column_count(); ++c) {
      const auto& col = chunk.columns[c];
      if (col.kind == ColumnKind::String) {
        w.u32(static_cast<std::uint32_t>(col.chunk_dict.size()));
        for (auto id : col.chunk_dict) w.u32(id);
      } else {
        w.i64(col.min);
        w.i64(col.max);
      }
      put_segment(w, col.data);
    }
  }
  return w.bytes();
}

Manifest parse_body(std::span<const std::uint8_t> body, std::uint32_t version) {
  detail::ByteReader r(body);
  Manifest m;
  m.version = version;
  m.chunk_size = r.u64();
  m.tuple_count = r.u64();

  std::string user = r.str();
  std::string time = r.str();
  std::string action = r.str();
  std::vector<std::pair<std::string, ColumnKind>> dims(r.u32());
  for (auto& [name, kind] : dims) {
    name = r.str();
    const auto k = r.u8();
    if (k > 1) throw corrupt("unknown column kind");
    kind = static_cast<ColumnKind>(k);
  }
  std::vector<std::string> measures(r.u32());
  for (auto& name : measures) name = r.str();
  try {
    m.schema = ActivitySchema(std::move(user), std::move(time), std::move(action), std::move(dims),
                              std::move(measures));
  } catch (const ValidationError& e) {
    throw corrupt(std::string("manifest schema: ") + e.what());
  }

  const auto& schema = m.schema;
  m.dictionaries.resize(schema.column_count());
  m.ranges.resize(schema.column_count());
  for (std::size_t c = 0; c < schema.column_count(); ++c) {
    if (schema.column(c).kind == ColumnKind::String) {
      std::vector<std::string> values(r.u32());
      for (auto& v : values) v = r.str();
      try {
        m.dictionaries[c] = GlobalDictionary(std::move(values));
      } catch (const std::invalid_argument&) {
        throw corrupt("global dictionary is not sorted");
      }
    } else {
      m.ranges[c].first = r.i64();
      m.ranges[c].second = r.i64();
    }
  }

  m.chunks.resize(r.u32());
  std::uint64_t rows_total = 0;
  for (auto& chunk : m.chunks) {
    chunk.rows = r.u32();
    chunk.users = r.u32();
    rows_total += chunk.rows;
    chunk.run_users = get_segment(r);
    chunk.run_firsts = get_segment(r);
    chunk.run_lengths = get_segment(r);
    chunk.columns.resize(schema.column_count());
    for (std::size_t c = 1; c < schema.column_count(); ++c) {
      auto& col = chunk.columns[c];
      col.kind = schema.column(c).kind;
      if (col.kind == ColumnKind::String) {
        col.chunk_dict.resize(r.u32());
        for (auto& id : col.chunk_dict) id = r.u32();
        for (std::size_t i = 0; i < col.chunk_dict.size(); ++i) {
          if (col.chunk_dict[i] >= m.dictionaries[c].size() ||
              (i > 0 && col.chunk_dict[i] <= col.chunk_dict[i - 1])) {
            throw corrupt("chunk dictionary inconsistent with global dictionary");
          }
        }
      } else {
        col.min = r.i64();
        col.max = r.i64();
      }
      col.data = get_segment(r);
      if (col.data.length != chunk.rows) throw corrupt("column segment length mismatch");
    }
    if (chunk.run_users.length != chunk.users || chunk.run_firsts.length != chunk.users ||
        chunk.run_lengths.length != chunk.users) {
      throw corrupt("RLE segment length mismatch");
    }
  }
  if (rows_total != m.tuple_count) throw corrupt("chunk row counts do not sum to tuple count");
  if (!r.done()) throw corrupt("trailing bytes in manifest body");
  return m;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError(StorageErrorKind::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace

std::span<const ActivityTuple> PartitionedTable::chunk(std::size_t i) const {
  const std::size_t begin = chunk_starts.at(i);
  const std::size_t end = i + 1 < chunk_starts.size() ? chunk_starts[i + 1] : tuples.size();
  return std::span<const ActivityTuple>(tuples).subspan(begin, end - begin);
}

// --- MappedFile --------------------------------------------------------------

MappedFile MappedFile::open(const std::filesystem::path& path) {
  const int fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd < 0) {
    throw StorageError(StorageErrorKind::Io,
                       "cannot open " + path.string() + ": " + std::strerror(errno));
  }
  struct stat st {};
  if (::fstat(fd, &st) != 0) {
    ::close(fd);
    throw StorageError(StorageErrorKind::Io, "cannot stat " + path.string());
  }
  MappedFile f;
  f.size_ = static_cast<std::size_t>(st.st_size);
  if (f.size_ > 0) {
    void* addr = ::mmap(nullptr, f.size_, PROT_READ, MAP_PRIVATE, fd, 0);
    if (addr == MAP_FAILED) {
      ::close(fd);
      throw StorageError(StorageErrorKind::Io, "cannot map " + path.string());
    }
    f.addr_ = addr;
  }
  ::close(fd);
  return f;
}

MappedFile::~MappedFile() {
  if (addr_ != nullptr) ::munmap(addr_, size_);
}

MappedFile::MappedFile(MappedFile&& other) noexcept
    : addr_(std::exchange(other.addr_, nullptr)), size_(std::exchange(other.size_, 0)) {}

MappedFile& MappedFile::operator=(MappedFile&& other) noexcept {
  if (this != &other) {
    if (addr_ != nullptr) ::munmap(addr_, size_);
    addr_ = std::exchange(other.addr_, nullptr);
    size_ = std::exchange(other.size_, 0);
  }
  return *this;
}

// --- writer ------------------------------------------------------------------

WriteStats write_chunkset(const ActivitySchema& schema,
                          const PartitionedTable& table,
                          std::size_t chunk_size,
                          const std::filesystem::path& dir) {
  check_table(schema, table);

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw StorageError(StorageErrorKind::Io, "cannot create " + dir.string());

  Manifest m;
  m.chunk_size = chunk_size;
  m.tuple_count = table.tuples.size();
  m.schema = schema;
  m.dictionaries.resize(schema.column_count());
  m.ranges.resize(schema.column_count());

  const auto& tuples = table.tuples;
  for (std::size_t c = 0; c < schema.column_count(); ++c) {
    if (schema.column(c).kind == ColumnKind::String) {
      std::vector<std::string_view> values(tuples.size());
      for (std::size_t i = 0; i < tuples.size(); ++i) values[i] = string_cell(tuples[i], c);
      m.dictionaries[c] = build_global_dict(values);
    } else if (!tuples.empty()) {
      auto& [lo, hi] = m.ranges[c];
      lo = hi = int_cell(tuples.front(), c);
      for (const auto& t : tuples) {
        const auto v = int_cell(t, c);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }

  DataWriter data(dir / kDataFileName);
  for (std::size_t k = 0; k < table.chunk_count(); ++k) {
    const auto rows = table.chunk(k);
    if (rows.size() > UINT32_MAX) throw invalid("chunk exceeds 2^32 rows");

    ChunkMeta meta;
    meta.rows = static_cast<std::uint32_t>(rows.size());

    std::vector<std::uint32_t> user_ids(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      user_ids[i] = *m.dictionaries[ActivitySchema::kUserColumn].find(rows[i].user);
    }
    const auto runs = encode_user_column(user_ids);
    meta.users = static_cast<std::uint32_t>(runs.size());
    std::vector<std::uint64_t> us(runs.size()), fs(runs.size()), ns(runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) {
      us[i] = runs[i].user;
      fs[i] = runs[i].first;
      ns[i] = runs[i].length;
    }
    meta.run_users = data.append(PackedArray::pack(us));
    meta.run_firsts = data.append(PackedArray::pack(fs));
    meta.run_lengths = data.append(PackedArray::pack(ns));

    meta.columns.resize(schema.column_count());
    for (std::size_t c = 1; c < schema.column_count(); ++c) {
      auto& col = meta.columns[c];
      col.kind = schema.column(c).kind;
      if (col.kind == ColumnKind::String) {
        std::vector<std::uint32_t> ids(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
          ids[i] = *m.dictionaries[c].find(string_cell(rows[i], c));
        }
        auto seg = encode_string_segment(ids);
        col.chunk_dict = std::move(seg.chunk_dict);
        col.data = data.append(seg.codes);
      } else {
        std::vector<std::int64_t> values(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) values[i] = int_cell(rows[i], c);
        auto seg = encode_int_segment(values);
        col.min = seg.chunk_min;
        col.max = seg.chunk_max;
        col.data = data.append(seg.deltas);
      }
    }
    m.chunks.push_back(std::move(meta));
  }

  WriteStats stats;
  stats.tuples = tuples.size();
  stats.chunks = m.chunks.size();
  stats.data_bytes = data.finish();

  const auto body = serialize_body(m);
  detail::ByteWriter file;
  file.raw(kManifestMagic, sizeof kManifestMagic);
  file.u32(kFormatVersion);
  file.u32(static_cast<std::uint32_t>(body.size()));
  file.raw(body.data(), body.size());
  file.u32(crc_of(body.data(), body.size()));

  std::ofstream out(dir / kManifestFileName, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(file.bytes().data()),
            static_cast<std::streamsize>(file.bytes().size()));
  out.flush();
  if (!out) throw StorageError(StorageErrorKind::Io, "write to manifest failed");
  stats.manifest_bytes = file.bytes().size();
  return stats;
}

// --- reader ------------------------------------------------------------------

ChunkSet open_chunkset(const std::filesystem::path& dir) { return open_chunkset(dir, {}); }

ChunkSet open_chunkset(const std::filesystem::path& dir, OpenOptions options) {
  const auto bytes = read_file(dir / kManifestFileName);
  if (bytes.size() < kManifestHeaderBytes) {
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), kManifestMagic, 8) != 0) {
      throw StorageError(StorageErrorKind::BadMagic, "not a manifest file");
    }
    throw StorageError(StorageErrorKind::Truncated, "manifest header incomplete");
  }
  if (std::memcmp(bytes.data(), kManifestMagic, 8) != 0) {
    throw StorageError(StorageErrorKind::BadMagic, "not a manifest file");
  }
  const std::span<const std::uint8_t> all(bytes);
  detail::ByteReader header(all.subspan(8, 8));
  const std::uint32_t version = header.u32();
  const std::uint32_t body_len = header.u32();
  if (version != kFormatVersion) {
    throw StorageError(StorageErrorKind::VersionMismatch,
                       "manifest version " + std::to_string(version) + ", expected " +
                           std::to_string(kFormatVersion));
  }
  if (bytes.size() < kManifestHeaderBytes + std::size_t{body_len} + 4) {
    throw StorageError(StorageErrorKind::Truncated, "manifest body shorter than declared");
  }
  const auto body = all.subspan(kManifestHeaderBytes, body_len);
  detail::ByteReader trailer(all.subspan(kManifestHeaderBytes + body_len, 4));
  if (trailer.u32() != crc_of(body.data(), body.size())) {
    throw StorageError(StorageErrorKind::ChecksumMismatch, "manifest checksum");
  }

  ChunkSet set;
  set.manifest_ = parse_body(body, version);
  set.data_ = MappedFile::open(dir / kDataFileName);

  const auto data = set.data_.bytes();
  if (data.size() < kDataHeaderBytes) {
    throw StorageError(StorageErrorKind::Truncated, "data file header incomplete");
  }
  if (std::memcmp(data.data(), kDataMagic, 8) != 0) {
    throw StorageError(StorageErrorKind::BadMagic, "not a chunk data file");
  }
  std::uint32_t data_version = 0;
  std::memcpy(&data_version, data.data() + 8, 4);
  if (data_version != kFormatVersion) {
    throw StorageError(StorageErrorKind::VersionMismatch,
                       "data file version " + std::to_string(data_version));
  }

  auto check = [&](const SegmentRef& ref) {
    if (ref.bit_width < 1 || ref.bit_width > 64 || ref.offset % 8 != 0 ||
        ref.word_count < PackedArray::word_count_for(ref.length, ref.bit_width)) {
      throw corrupt("malformed segment descriptor");
    }
    const std::uint64_t bytes_needed = std::uint64_t{ref.word_count} * 8;
    if (ref.offset < kDataHeaderBytes || ref.offset + bytes_needed > data.size()) {
      throw StorageError(StorageErrorKind::Truncated,
                         "segment at offset " + std::to_string(ref.offset) + " beyond end of data");
    }
    if (options.verify_checksums && crc_of(data.data() + ref.offset, bytes_needed) != ref.crc) {
      throw StorageError(StorageErrorKind::ChecksumMismatch,
                         "segment at offset " + std::to_string(ref.offset));
    }
  };
  for (const auto& chunk : set.manifest_.chunks) {
    check(chunk.run_users);
    check(chunk.run_firsts);
    check(chunk.run_lengths);
    for (std::size_t c = 1; c < chunk.columns.size(); ++c) check(chunk.columns[c].data);
  }
  return set;
}

PackedView ChunkSet::segment(const SegmentRef& ref) const {
  const auto* base = reinterpret_cast<const std::uint64_t*>(data_.bytes().data() + ref.offset);
  return PackedView(std::span<const std::uint64_t>(base, ref.word_count), ref.length,
                    ref.bit_width);
}

ChunkView ChunkSet::chunk(std::size_t i) const {
  const ChunkMeta& meta = manifest_.chunks.at(i);
  ChunkView v;
  v.id = static_cast<std::uint32_t>(i);
  v.rows = meta.rows;
  v.users = meta.users;
  v.run_users = segment(meta.run_users);
  v.run_firsts = segment(meta.run_firsts);
  v.run_lengths = segment(meta.run_lengths);
  v.columns.resize(meta.columns.size());
  for (std::size_t c = 1; c < meta.columns.size(); ++c) {
    const auto& cm = meta.columns[c];
    auto& cv = v.columns[c];
    cv.kind = cm.kind;
    if (cm.kind == ColumnKind::String) {
      cv.str = StringColumnView{cm.chunk_dict, segment(cm.data)};
    } else {
      cv.num = IntColumnView{cm.min, cm.max, segment(cm.data)};
    }
  }
  return v;
}

std::vector<ActivityTuple> ChunkSet::decode_chunk(std::size_t i) const {
  const ChunkView v = chunk(i);
  const auto& schema = manifest_.schema;
  std::vector<ActivityTuple> out(v.rows);
  for (std::size_t u = 0; u < v.users; ++u) {
    const RleTriple run = v.run(u);
    if (std::uint64_t{run.first} + run.length > v.rows) throw corrupt("RLE run beyond chunk end");
    const auto name = dictionary(ActivitySchema::kUserColumn).at(run.user);
    for (std::size_t r = run.first; r < run.first + run.length; ++r) out[r].user = name;
  }
  for (std::size_t r = 0; r < v.rows; ++r) {
    auto& t = out[r];
    t.dims.reserve(schema.dimension_count());
    t.measures.reserve(schema.measure_count());
    for (std::size_t c = 1; c < schema.column_count(); ++c) {
      const auto& col = v.columns[c];
      const auto role = schema.column(c).role;
      if (col.kind == ColumnKind::String) {
        std::string s(decode_at(col.str, dictionary(c), r));
        if (role == ColumnRole::Action) {
          t.action = std::move(s);
        } else {
          t.dims.emplace_back(std::move(s));
        }
      } else {
        const std::int64_t value = decode_at(col.num, r);
        if (role == ColumnRole::Time) {
          t.time = value;
        } else if (role == ColumnRole::Measure) {
          t.measures.push_back(value);
        } else {
          t.dims.emplace_back(value);
        }
      }
    }
  }
  return out;
}

std::vector<ActivityTuple> ChunkSet::decode_all() const {
  std::vector<ActivityTuple> out;
  out.reserve(manifest_.tuple_count);
  for (std::size_t i = 0; i < chunk_count(); ++i) {
    auto part = decode_chunk(i);
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  return out;
}

bool chunk_has_action(const ChunkMeta& chunk, std::uint32_t action_global_id) noexcept {
  if (chunk.columns.size() <= ActivitySchema::kActionColumn) return false;
  const auto& dict = chunk.columns[ActivitySchema::kActionColumn].chunk_dict;
  return std::binary_search(dict.begin(), dict.end(), action_global_id);
}

bool chunk_range_overlaps(const ChunkMeta& chunk,
                          std::size_t column,
                          std::int64_t lo,
                          std::int64_t hi) noexcept {
  if (column >= chunk.columns.size() || chunk.rows == 0) return false;
  const auto& col = chunk.columns[column];
  return col.min <= hi && lo <= col.max;
}

}  // namespace cohana::storage
