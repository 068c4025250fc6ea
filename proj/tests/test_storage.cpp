#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <fstream>
#include <random>
#include <set>

#include "cohana/core/errors.hpp"
#include "cohana/storage/chunkset.hpp"
#include "support/fixtures.hpp"

using namespace cohana;
using namespace cohana::storage;

namespace {

unsigned reference_width(std::uint64_t max) { return max == 0 ? 1 : 64 - std::countl_zero(max); }

std::uint64_t random_below_bits(std::mt19937_64& rng, unsigned bits) {
  const std::uint64_t v = rng();
  return bits >= 64 ? v : v & ((std::uint64_t{1} << bits) - 1);
}

void corrupt_byte(const std::filesystem::path& p, std::size_t offset) {
  std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
  f.seekg(static_cast<std::streamoff>(offset));
  char c = 0;
  f.read(&c, 1);
  c = static_cast<char>(c ^ 0x5a);
  f.seekp(static_cast<std::streamoff>(offset));
  f.write(&c, 1);
}

void truncate_file(const std::filesystem::path& p, std::uintmax_t size) {
  std::filesystem::resize_file(p, size);
}

StorageErrorKind open_error(const std::filesystem::path& dir) {
  try {
    open_chunkset(dir);
  } catch (const StorageError& e) {
    return e.kind();
  }
  FAIL("open_chunkset did not throw");
  return StorageErrorKind::Io;
}

std::vector<std::uint32_t> user_ids_of(const ChunkSet& set, std::size_t chunk) {
  const auto v = set.chunk(chunk);
  std::vector<RleTriple> runs;
  for (std::size_t i = 0; i < v.users; ++i) runs.push_back(v.run(i));
  return decode_user_column(runs);
}

}  // namespace

TEST_CASE("packed arrays: fixed examples") {
  const std::vector<std::uint64_t> a{0, 1, 2, 3};
  const auto p = PackedArray::pack(a);
  CHECK_EQ(p.bit_width(), 2);
  CHECK_EQ(p.get(2), 2);
  const std::vector<std::uint64_t> b{7};
  CHECK_EQ(PackedArray::pack(b).bit_width(), 3);
  CHECK_EQ(PackedArray::pack(b).get(0), 7);
  const std::vector<std::uint64_t> zeros(5, 0);
  CHECK_EQ(PackedArray::pack(zeros).bit_width(), 1);
  CHECK_THROWS_AS(p.get(4), std::out_of_range);
  CHECK_EQ(bits_for(0), 1);
  CHECK_EQ(bits_for(~std::uint64_t{0}), 64);
  // 21 three-bit values fit per word; the 22nd starts a new word.
  CHECK_EQ(PackedArray::word_count_for(21, 3), 1);
  CHECK_EQ(PackedArray::word_count_for(22, 3), 2);
  const std::vector<std::uint64_t> wide{8};
  CHECK_THROWS_AS(PackedArray::pack(wide, 3), std::invalid_argument);
}

TEST_CASE("packed arrays: random round trip at every index") {
  std::mt19937_64 rng(11);
  std::size_t cases = 0;
  for (int iter = 0; iter < 40000; ++iter, ++cases) {
    const unsigned bits = 1 + static_cast<unsigned>(rng() % 64);
    const std::size_t n = rng() % 70;
    std::vector<std::uint64_t> values(n);
    for (auto& v : values) v = random_below_bits(rng, bits);
    const auto p = PackedArray::pack(values);
    std::uint64_t max = 0;
    for (auto v : values) max = std::max(max, v);
    REQUIRE_EQ(p.bit_width(), reference_width(max));
    REQUIRE_EQ(p.size(), n);
    const unsigned per_word = 64 / p.bit_width();
    REQUIRE_EQ(p.word_count(), (n + per_word - 1) / per_word);
    const auto view = p.view();
    for (std::size_t i = 0; i < n; ++i) {
      REQUIRE_EQ(view[i], values[i]);
      REQUIRE_EQ(view.get(i), values[i]);
    }
    REQUIRE_EQ(p.unpack(), values);
  }
  CHECK_GE(cases, 40000);
}

TEST_CASE("global dictionary") {
  const std::vector<std::string> actions{"launch", "shop", "shop", "shop", "fight",
                                         "launch", "shop", "shop", "launch", "fight"};
  const auto d = build_global_dict(actions);
  CHECK_EQ(d.values(), std::vector<std::string>{"fight", "launch", "shop"});
  CHECK_EQ(d.find("launch"), std::optional<std::uint32_t>(1));
  CHECK_FALSE(d.find("quit"));
  CHECK_EQ(d.lower_bound("g"), 1);
  CHECK_EQ(d.lower_bound("zzz"), 3);
  CHECK(build_global_dict(std::vector<std::string>{}).empty());
  const auto one = build_global_dict(std::vector<std::string>{"a", "a", "a"});
  CHECK_EQ(one.values(), std::vector<std::string>{"a"});
  CHECK_EQ(one.find("a"), std::optional<std::uint32_t>(0));
  CHECK_THROWS(GlobalDictionary({"b", "a"}));
}

TEST_CASE("user RLE") {
  const std::vector<std::uint32_t> users{0, 0, 0, 0, 0, 1, 1, 1, 2, 2};
  const auto runs = encode_user_column(users);
  CHECK_EQ(runs, std::vector<RleTriple>{{0, 0, 5}, {1, 5, 3}, {2, 8, 2}});
  CHECK_EQ(decode_user_column(runs), users);
  CHECK_EQ(encode_user_column(std::vector<std::uint32_t>{9}), std::vector<RleTriple>{{9, 0, 1}});
  CHECK_THROWS_AS(encode_user_column(std::vector<std::uint32_t>{1, 2, 1}), StorageError);

  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 20000; ++iter) {
    std::vector<std::uint32_t> col;
    std::uint32_t u = static_cast<std::uint32_t>(rng() % 1000);
    for (int r = static_cast<int>(rng() % 8); r > 0; --r) {
      col.insert(col.end(), 1 + rng() % 6, u);
      u += 1 + static_cast<std::uint32_t>(rng() % 50);
    }
    const auto enc = encode_user_column(col);
    std::size_t total = 0;
    for (std::size_t i = 0; i < enc.size(); ++i) {
      REQUIRE_EQ(enc[i].first, total);
      total += enc[i].length;
    }
    REQUIRE_EQ(total, col.size());
    REQUIRE_EQ(decode_user_column(enc), col);
  }
}

TEST_CASE("string segments") {
  const auto dict = build_global_dict(std::vector<std::string>{"fight", "launch", "shop"});
  const std::vector<std::string_view> rows{"launch", "shop", "shop", "launch"};
  const auto seg = encode_string_segment(rows, dict);
  CHECK_EQ(seg.chunk_dict, std::vector<std::uint32_t>{1, 2});
  CHECK_EQ(seg.codes.get(1), 1);
  CHECK_EQ(seg.view().find_code(2), 1);
  CHECK_EQ(seg.view().find_code(0), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK_EQ(decode_at(seg.view(), dict, i), rows[i]);
  const std::vector<std::string_view> single{"shop", "shop"};
  const auto s1 = encode_string_segment(single, dict);
  CHECK_EQ(s1.codes.bit_width(), 1);
  CHECK_EQ(s1.codes.get(0), 0);
  const std::vector<std::string_view> unknown{"quit"};
  CHECK_THROWS_AS(encode_string_segment(unknown, dict), StorageError);

  std::mt19937_64 rng(17);
  for (int iter = 0; iter < 20000; ++iter) {
    std::vector<std::string> vocab;
    for (int v = 1 + static_cast<int>(rng() % 12); v > 0; --v) vocab.push_back("v" + std::to_string(rng() % 40));
    const auto d = build_global_dict(vocab);
    std::vector<std::string_view> col;
    for (int r = static_cast<int>(rng() % 30); r > 0; --r) col.push_back(vocab[rng() % vocab.size()]);
    const auto s = encode_string_segment(col, d);
    REQUIRE(std::is_sorted(s.chunk_dict.begin(), s.chunk_dict.end()));
    REQUIRE(std::adjacent_find(s.chunk_dict.begin(), s.chunk_dict.end()) == s.chunk_dict.end());
    REQUIRE_LE(s.chunk_dict.size(), d.size());
    for (std::size_t i = 0; i < col.size(); ++i) {
      REQUIRE_LT(s.codes.get(i), s.chunk_dict.size());
      REQUIRE_EQ(decode_at(s.view(), d, i), col[i]);
    }
  }
}

TEST_CASE("integer segments") {
  const std::vector<std::int64_t> rows{100, 103, 101};
  const auto seg = encode_int_segment(rows);
  CHECK_EQ(seg.chunk_min, 100);
  CHECK_EQ(seg.chunk_max, 103);
  CHECK_EQ(seg.deltas.unpack(), std::vector<std::uint64_t>{0, 3, 1});
  const auto c = encode_int_segment(std::vector<std::int64_t>{5, 5, 5});
  CHECK_EQ(c.deltas.bit_width(), 1);
  CHECK_EQ(c.deltas.unpack(), std::vector<std::uint64_t>{0, 0, 0});

  const std::vector<std::int64_t> extremes{INT64_MIN, INT64_MAX, 0, -1};
  const auto e = encode_int_segment(extremes);
  for (std::size_t i = 0; i < extremes.size(); ++i) CHECK_EQ(decode_at(e.view(), i), extremes[i]);

  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 30000; ++iter) {
    const unsigned bits = 1 + static_cast<unsigned>(rng() % 63);
    const std::int64_t base = static_cast<std::int64_t>(rng()) >> (rng() % 64);
    std::vector<std::int64_t> col;
    for (int r = 1 + static_cast<int>(rng() % 30); r > 0; --r) {
      col.push_back(static_cast<std::int64_t>(static_cast<std::uint64_t>(base) +
                                              random_below_bits(rng, bits)));
    }
    const auto s = encode_int_segment(col);
    REQUIRE_EQ(s.chunk_min, *std::min_element(col.begin(), col.end()));
    REQUIRE_EQ(s.chunk_max, *std::max_element(col.begin(), col.end()));
    for (std::size_t i = 0; i < col.size(); ++i) {
      const auto v = decode_at(s.view(), i);
      REQUIRE_EQ(v, col[i]);
      REQUIRE(v >= s.chunk_min);
      REQUIRE(v <= s.chunk_max);
    }
  }
}

TEST_CASE("the sample log with chunk size 8") {
  fixtures::TempDir dir;
  const auto set = fixtures::build_set(fixtures::sample_schema(), fixtures::sample_log(), 8, dir.path());
  REQUIRE_EQ(set.chunk_count(), 2);
  CHECK_EQ(set.chunk_meta(0).rows, 8);
  CHECK_EQ(set.chunk_meta(1).rows, 2);
  CHECK_EQ(set.chunk_meta(0).users, 2);
  CHECK_EQ(set.dictionary(2).values(), std::vector<std::string>{"fight", "launch", "shop"});
  CHECK_EQ(set.dictionary(0).values(), std::vector<std::string>{"001", "002", "003"});

  const auto c0 = set.chunk(0);
  CHECK_EQ(c0.run(0), RleTriple{0, 0, 5});
  CHECK_EQ(c0.run(1), RleTriple{1, 5, 3});
  CHECK_EQ(set.chunk(1).run(0), RleTriple{2, 0, 2});
  // Chunk 1 holds only launch and fight.
  CHECK_EQ(set.chunk_meta(1).columns[2].chunk_dict, std::vector<std::uint32_t>{0, 1});

  CHECK(chunk_has_action(set.chunk_meta(0), 2));
  CHECK_FALSE(chunk_has_action(set.chunk_meta(1), 2));
  CHECK(chunk_has_action(set.chunk_meta(1), 1));

  const auto t10 = fixtures::ts("2013/05/21:1000");
  CHECK(chunk_range_overlaps(set.chunk_meta(1), 1, t10, t10 + 100));
  CHECK_FALSE(chunk_range_overlaps(set.chunk_meta(1), 1, t10 + 1, t10 + 100));
  CHECK(chunk_range_overlaps(set.chunk_meta(0), 5, 100, 200));
  CHECK_FALSE(chunk_range_overlaps(set.chunk_meta(0), 5, 101, 200));
  CHECK_EQ(set.manifest().ranges[5], std::pair<std::int64_t, std::int64_t>(0, 100));

  CHECK_EQ(set.decode_all(), fixtures::sample_log());
}

TEST_CASE("empty table") {
  fixtures::TempDir dir;
  const auto set = fixtures::build_set(fixtures::sample_schema(), {}, 8, dir.path());
  CHECK_EQ(set.chunk_count(), 0);
  CHECK(set.decode_all().empty());
  CHECK(set.dictionary(2).empty());
  ChunkMeta empty;
  empty.columns.resize(6);
  CHECK_FALSE(chunk_has_action(empty, 0));
  CHECK_FALSE(chunk_range_overlaps(empty, 1, INT64_MIN, INT64_MAX));
}

TEST_CASE("writer rejects unsorted or misaligned input") {
  fixtures::TempDir dir;
  PartitionedTable bad;
  bad.tuples = fixtures::sample_log();
  std::swap(bad.tuples[0], bad.tuples[1]);
  bad.chunk_starts = {0};
  CHECK_THROWS_AS(write_chunkset(fixtures::sample_schema(), bad, 8, dir.path()), StorageError);
  bad.tuples = fixtures::sample_log();
  bad.chunk_starts = {0, 4};  // splits user 001
  CHECK_THROWS_AS(write_chunkset(fixtures::sample_schema(), bad, 8, dir.path()), StorageError);
}

TEST_CASE("random tables round trip and keep chunk invariants") {
  std::mt19937_64 rng(29);
  for (int iter = 0; iter < 150; ++iter) {
    const auto tuples = fixtures::random_table(rng);
    const std::size_t chunk_size = 1 + rng() % 20;
    fixtures::TempDir dir;
    const auto set = fixtures::build_set(fixtures::random_schema(), tuples, chunk_size, dir.path());

    auto expected = tuples;
    std::sort(expected.begin(), expected.end(), primary_key_less);
    REQUIRE_EQ(set.decode_all(), expected);

    std::set<std::uint32_t> seen_users;
    for (std::size_t c = 0; c < set.chunk_count(); ++c) {
      const auto& meta = set.chunk_meta(c);
      REQUIRE_GT(meta.rows, 0);
      const auto ids = user_ids_of(set, c);
      for (auto u : std::set<std::uint32_t>(ids.begin(), ids.end())) {
        REQUIRE(seen_users.insert(u).second);  // a user lives in exactly one chunk
      }
      for (std::size_t col = 2; col < set.schema().column_count(); ++col) {
        const auto& cm = meta.columns[col];
        if (cm.kind != ColumnKind::String) continue;
        REQUIRE_LE(cm.chunk_dict.size(), set.dictionary(col).size());
        for (auto g : cm.chunk_dict) REQUIRE_LT(g, set.dictionary(col).size());
      }
      const auto rows = set.decode_chunk(c);
      for (std::uint32_t a = 0; a < set.dictionary(2).size(); ++a) {
        const bool present = std::any_of(rows.begin(), rows.end(), [&](const ActivityTuple& t) {
          return t.action == set.dictionary(2).at(a);
        });
        REQUIRE_EQ(chunk_has_action(meta, a), present);
      }
    }
  }
}

TEST_CASE("corrupted files are rejected with distinct error kinds") {
  const auto write = [](const fixtures::TempDir& dir) {
    fixtures::build_set(fixtures::sample_schema(), fixtures::sample_log(), 8, dir.path());
  };
  const auto manifest = [](const fixtures::TempDir& d) { return d / kManifestFileName; };
  const auto data = [](const fixtures::TempDir& d) { return d / kDataFileName; };

  SUBCASE("manifest magic") {
    fixtures::TempDir d;
    write(d);
    corrupt_byte(manifest(d), 0);
    CHECK_EQ(open_error(d.path()), StorageErrorKind::BadMagic);
  }
  SUBCASE("manifest version") {
    fixtures::TempDir d;
    write(d);
    corrupt_byte(manifest(d), 8);
    CHECK_EQ(open_error(d.path()), StorageErrorKind::VersionMismatch);
  }
  SUBCASE("manifest body byte") {
    fixtures::TempDir d;
    write(d);
    corrupt_byte(manifest(d), 40);
    CHECK_EQ(open_error(d.path()), StorageErrorKind::ChecksumMismatch);
  }
  SUBCASE("manifest truncated") {
    fixtures::TempDir d;
    write(d);
    truncate_file(manifest(d), std::filesystem::file_size(manifest(d)) - 3);
    CHECK_EQ(open_error(d.path()), StorageErrorKind::Truncated);
    truncate_file(manifest(d), 10);
    CHECK_EQ(open_error(d.path()), StorageErrorKind::Truncated);
  }
  SUBCASE("data magic") {
    fixtures::TempDir d;
    write(d);
    corrupt_byte(data(d), 1);
    CHECK_EQ(open_error(d.path()), StorageErrorKind::BadMagic);
  }
  SUBCASE("data version") {
    fixtures::TempDir d;
    write(d);
    corrupt_byte(data(d), 8);
    CHECK_EQ(open_error(d.path()), StorageErrorKind::VersionMismatch);
  }
  SUBCASE("data segment byte") {
    fixtures::TempDir d;
    write(d);
    corrupt_byte(data(d), std::filesystem::file_size(data(d)) - 1);
    CHECK_EQ(open_error(d.path()), StorageErrorKind::ChecksumMismatch);
    CHECK_NOTHROW(open_chunkset(d.path(), OpenOptions{false}));
  }
  SUBCASE("data truncated") {
    fixtures::TempDir d;
    write(d);
    truncate_file(data(d), std::filesystem::file_size(data(d)) - 8);
    CHECK_EQ(open_error(d.path()), StorageErrorKind::Truncated);
  }
  SUBCASE("missing directory") {
    CHECK_EQ(open_error("/nonexistent/cohana"), StorageErrorKind::Io);
  }
}
