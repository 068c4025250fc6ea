#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cohana/core/predicate.hpp"
#include "cohana/core/time.hpp"
#include "cohana/core/types.hpp"
#include "cohana/ingest/partition.hpp"
#include "cohana/plan/plan.hpp"
#include "cohana/storage/chunkset.hpp"

namespace fixtures {

using namespace cohana;

inline ActivitySchema sample_schema() {
  return ActivitySchema("player", "time", "action",
                        {{"role", ColumnKind::String}, {"country", ColumnKind::String}}, {"gold"});
}

inline Timestamp ts(const char* text) { return *parse_timestamp(text); }

/// The ten-tuple game log used throughout the tests, t1..t10 in order.
inline std::vector<ActivityTuple> sample_log() {
  const auto t = [](const char* u, const char* time, const char* a, const char* role,
                    const char* country, std::int64_t gold) {
    return ActivityTuple{u, ts(time), a, {std::string(role), std::string(country)}, {gold}};
  };
  return {
      t("001", "2013/05/19:1000", "launch", "dwarf", "Australia", 0),
      t("001", "2013/05/20:0800", "shop", "dwarf", "Australia", 50),
      t("001", "2013/05/20:1400", "shop", "dwarf", "Australia", 100),
      t("001", "2013/05/21:1400", "shop", "assassin", "Australia", 50),
      t("001", "2013/05/22:0900", "fight", "assassin", "Australia", 0),
      t("002", "2013/05/20:0900", "launch", "wizard", "United States", 0),
      t("002", "2013/05/21:1500", "shop", "wizard", "United States", 30),
      t("002", "2013/05/22:1700", "shop", "wizard", "United States", 40),
      t("003", "2013/05/20:1000", "launch", "bandit", "China", 0),
      t("003", "2013/05/21:1000", "fight", "bandit", "China", 0),
  };
}

inline const char* kSampleCsv =
    "player,time,action,role,country,gold\n"
    "001,2013/05/19:1000,launch,dwarf,Australia,0\n"
    "001,2013/05/20:0800,shop,dwarf,Australia,50\n"
    "001,2013/05/20:1400,shop,dwarf,Australia,100\n"
    "001,2013/05/21:1400,shop,assassin,Australia,50\n"
    "001,2013/05/22:0900,fight,assassin,Australia,0\n"
    "002,2013/05/20:0900,launch,wizard,United States,0\n"
    "002,2013/05/21:1500,shop,wizard,United States,30\n"
    "002,2013/05/22:1700,shop,wizard,United States,40\n"
    "003,2013/05/20:1000,launch,bandit,China,0\n"
    "003,2013/05/21:1000,fight,bandit,China,0\n";

/// Directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("cohana_test_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline storage::ChunkSet build_set(const ActivitySchema& schema,
                                   std::vector<ActivityTuple> tuples,
                                   std::size_t chunk_size,
                                   const std::filesystem::path& dir) {
  const auto table = ingest::sort_and_partition(std::move(tuples), chunk_size);
  storage::write_chunkset(schema, table, chunk_size, dir);
  return storage::open_chunkset(dir);
}

// ---------------------------------------------------------------------------
// Random activity tables: small vocabularies so predicates hit and miss.
// ---------------------------------------------------------------------------

inline ActivitySchema random_schema() {
  return ActivitySchema("user", "time", "action",
                        {{"role", ColumnKind::String},
                         {"country", ColumnKind::String},
                         {"level", ColumnKind::Integer}},
                        {"gold", "score"});
}

inline const std::vector<std::string>& random_actions() {
  static const std::vector<std::string> v{"fight", "launch", "quit", "shop"};
  return v;
}
inline const std::vector<std::string>& random_roles() {
  static const std::vector<std::string> v{"bandit", "dwarf", "wizard"};
  return v;
}
inline const std::vector<std::string>& random_countries() {
  static const std::vector<std::string> v{"Australia", "China", "Germany", "United States"};
  return v;
}

inline constexpr Timestamp kRandomEpoch = 1368921600;  // 2013-05-19

struct RandomTableSpec {
  std::size_t max_users = 12;
  std::size_t max_rows_per_user = 12;
  Timestamp span_seconds = 20 * 86400;
};

inline std::vector<ActivityTuple> random_table(std::mt19937_64& rng, const RandomTableSpec& spec = {}) {
  std::uniform_int_distribution<std::size_t> nusers(0, spec.max_users);
  std::uniform_int_distribution<std::size_t> nrows(1, spec.max_rows_per_user);
  std::uniform_int_distribution<Timestamp> when(0, spec.span_seconds);
  std::uniform_int_distribution<std::int64_t> level(0, 5);
  std::uniform_int_distribution<std::int64_t> gold(-5, 100);
  std::uniform_int_distribution<std::int64_t> score(0, 1000000);
  const auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };

  std::vector<ActivityTuple> out;
  const std::size_t users = nusers(rng);
  for (std::size_t u = 0; u < users; ++u) {
    const std::string name = "u" + std::to_string(u);
    const std::size_t rows = nrows(rng);
    for (std::size_t i = 0; i < rows; ++i) {
      ActivityTuple t;
      t.user = name;
      // Coarse times make equal timestamps within a user common.
      t.time = kRandomEpoch + when(rng) / 3600 * 3600;
      t.action = pick(random_actions());
      t.dims = {pick(random_roles()), pick(random_countries()), level(rng)};
      t.measures = {gold(rng), score(rng)};
      out.push_back(std::move(t));
    }
  }
  // Keep the primary key unique.
  std::sort(out.begin(), out.end(), primary_key_less);
  out.erase(std::unique(out.begin(), out.end(), primary_key_equal), out.end());
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

// ---------------------------------------------------------------------------
// Random bound predicates over random_schema().
// ---------------------------------------------------------------------------

class PredicateGen {
 public:
  PredicateGen(std::mt19937_64& rng, bool age_context) : rng_(rng), age_context_(age_context) {}

  BoundExpr make(int depth = 2) {
    const int roll = uniform(0, 9);
    if (depth > 0 && roll < 3) {
      const int n = uniform(1, 3);
      std::vector<BoundExpr> terms;
      for (int i = 0; i < n; ++i) terms.push_back(make(depth - 1));
      return roll == 0 ? BoundExpr::conjunction(std::move(terms))
             : roll == 1 ? BoundExpr::disjunction(std::move(terms))
                         : BoundExpr::negation(std::move(terms.front()));
    }
    return leaf();
  }

  BoundExpr leaf() {
    const int kind = uniform(0, age_context_ ? 9 : 6);
    switch (kind) {
      case 0:
        return BoundExpr::always(uniform(0, 4) != 0);
      case 1:
      case 2: {
        const std::size_t col = uniform(0, 1) == 0 ? 2 : static_cast<std::size_t>(uniform(3, 4));
        return BoundExpr::compare(BoundOperand::make_column(col, ColumnKind::String), op(),
                                  BoundOperand::make_literal(string_literal(col)));
      }
      case 3: {
        const std::size_t col = int_column();
        return BoundExpr::compare(BoundOperand::make_column(col, ColumnKind::Integer), op(),
                                  BoundOperand::make_literal(int_literal(col)));
      }
      case 4: {
        const std::size_t col = static_cast<std::size_t>(uniform(2, 4));
        std::vector<Value> values;
        for (int i = uniform(0, 3); i > 0; --i) values.emplace_back(string_literal(col));
        return BoundExpr::in(BoundOperand::make_column(col, ColumnKind::String), std::move(values));
      }
      case 5: {
        const std::size_t col = int_column();
        std::vector<Value> values;
        for (int i = uniform(0, 3); i > 0; --i) values.emplace_back(int_literal(col));
        return BoundExpr::in(BoundOperand::make_column(col, ColumnKind::Integer), std::move(values));
      }
      case 6: {
        // Column against column of the same kind.
        if (uniform(0, 1) == 0) {
          return BoundExpr::compare(BoundOperand::make_column(3, ColumnKind::String), op(),
                                    BoundOperand::make_column(uniform(0, 1) == 0 ? 4 : 2,
                                                              ColumnKind::String));
        }
        return BoundExpr::compare(BoundOperand::make_column(5, ColumnKind::Integer), op(),
                                  BoundOperand::make_column(6, ColumnKind::Integer));
      }
      case 7: {
        const std::size_t col = static_cast<std::size_t>(uniform(2, 5));
        const auto type = col == 5 ? ColumnKind::Integer : ColumnKind::String;
        const std::size_t other = col == 5 ? 5 : (uniform(0, 2) == 0 ? 4 : col);
        return BoundExpr::compare(BoundOperand::make_column(other, type), op(),
                                  BoundOperand::make_birth(col, type));
      }
      case 8:
        return BoundExpr::compare(BoundOperand::make_age(), op(),
                                  BoundOperand::make_literal(std::int64_t{uniform(-1, 8)}));
      default: {
        std::vector<Value> values;
        for (int i = uniform(0, 4); i > 0; --i) values.emplace_back(std::int64_t{uniform(0, 8)});
        return BoundExpr::in(BoundOperand::make_age(), std::move(values));
      }
    }
  }

 private:
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  CompareOp op() { return static_cast<CompareOp>(uniform(0, 5)); }

  std::size_t int_column() {
    static const std::size_t cols[] = {1, 5, 6, 7};
    return cols[uniform(0, 3)];
  }

  std::string string_literal(std::size_t col) {
    const auto& v = col == 2 ? random_actions() : col == 3 ? random_roles() : random_countries();
    // Some literals fall outside the vocabulary, between and around its entries.
    switch (uniform(0, 5)) {
      case 0:
        return "";
      case 1:
        return v[uniform(0, static_cast<int>(v.size()) - 1)] + "x";
      case 2:
        return "zzz";
      default:
        return v[uniform(0, static_cast<int>(v.size()) - 1)];
    }
  }

  std::int64_t int_literal(std::size_t col) {
    switch (col) {
      case 1:
        return kRandomEpoch + std::int64_t{uniform(-1, 21)} * 86400 + uniform(0, 23) * 3600;
      case 5:
        return uniform(-1, 6);
      case 6:
        return uniform(-10, 110);
      default:
        return uniform(0, 1000000);
    }
  }

  std::mt19937_64& rng_;
  bool age_context_;
};

/// Random selection chain (in random order) and aggregation over random_schema().
inline plan::LogicalPlan random_plan(std::mt19937_64& rng, bool allow_unknown_action = true) {
  const auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  plan::LogicalPlan p;
  p.schema = random_schema();
  const auto& actions = random_actions();
  p.birth_action = allow_unknown_action && pick(0, 19) == 0
                       ? "never"
                       : actions[static_cast<std::size_t>(pick(0, static_cast<int>(actions.size()) - 1))];
  for (int i = pick(0, 3); i > 0; --i) {
    if (pick(0, 1) == 0) {
      p.selections.emplace_back(plan::BirthSelectOp{PredicateGen(rng, false).make()});
    } else {
      p.selections.emplace_back(plan::AgeSelectOp{PredicateGen(rng, true).make()});
    }
  }
  static const std::size_t cohort_choices[] = {3, 4, 5, 1};
  const int ncohort = pick(1, 2);
  for (int i = 0; i < ncohort; ++i) {
    const std::size_t c = cohort_choices[pick(0, 3)];
    if (std::find(p.aggregate.cohort_columns.begin(), p.aggregate.cohort_columns.end(), c) ==
        p.aggregate.cohort_columns.end()) {
      p.aggregate.cohort_columns.push_back(c);
    }
  }
  for (int i = pick(0, 3); i > 0; --i) {
    AggregateSpec a;
    a.func = static_cast<AggFunc>(pick(0, 5));
    if (a.func != AggFunc::UserCount && (a.func != AggFunc::Count || pick(0, 1) == 0)) {
      a.column = static_cast<std::size_t>(pick(6, 7));
    }
    p.aggregate.aggregates.push_back(a);
  }
  p.aggregate.unit = static_cast<TimeUnit>(pick(0, 2));
  return p;
}

}  // namespace fixtures
