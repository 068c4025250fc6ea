#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cohana/core/errors.hpp"
#include "cohana/ingest/generator.hpp"
#include "cohana/query/benchmark.hpp"
#include "cohana/query/bind.hpp"
#include "cohana/query/query.hpp"
#include "support/fixtures.hpp"

using namespace cohana;
using namespace cohana::query;

namespace {

const char* kQ1 =
    "SELECT country, COHORTSIZE, AGE, Sum(gold) as spent FROM D "
    "AGE ACTIVITIES IN action = \"shop\" "
    "BIRTH FROM action = \"launch\" AND role = \"dwarf\" "
    "COHORT BY country";

std::size_t parse_error_position(std::string_view text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.position();
  }
  FAIL("no ParseError for: " << text);
  return 0;
}

std::string validation_error(std::string_view text, const ActivitySchema& schema) {
  try {
    validate(parse(text), schema);
  } catch (const ValidationError& e) {
    return e.what();
  }
  FAIL("no ValidationError for: " << text);
  return {};
}

Expr cmp(const char* attr, CompareOp op, const char* lit) {
  return Expr::compare(Operand::attribute(attr), op, Operand::string_literal(lit));
}

// Random syntax trees for the round-trip property.
class AstGen {
 public:
  explicit AstGen(std::mt19937_64& rng) : rng_(rng) {}

  QuerySpec query() {
    QuerySpec q;
    for (int i = pick(1, 5); i > 0; --i) q.select.push_back(select_item());
    q.table = ident();
    q.birth_attribute = ident();
    q.birth_action = string_text();
    if (pick(0, 1)) q.birth_predicate = expr(3);
    if (pick(0, 1)) q.age_predicate = expr(3);
    q.age_clause_first = q.age_predicate && pick(0, 1) == 1;
    for (int i = pick(1, 3); i > 0; --i) q.cohort_by.push_back(ident());
    return q;
  }

  Expr expr(int depth) {
    const int roll = pick(0, depth > 0 ? 8 : 3);
    switch (roll) {
      case 0:
      case 1:
        return Expr::compare(operand(), static_cast<CompareOp>(pick(0, 5)), operand());
      case 2: {
        std::vector<Operand> list;
        for (int i = pick(1, 4); i > 0; --i) list.push_back(literal());
        return Expr::in(subject(), std::move(list));
      }
      case 3:
        return Expr::between(subject(), literal(), literal());
      case 4:
      case 5:
      case 6: {
        std::vector<Expr> terms;
        for (int i = pick(2, 3); i > 0; --i) terms.push_back(expr(depth - 1));
        return roll == 4 ? Expr::disjunction(std::move(terms)) : Expr::conjunction(std::move(terms));
      }
      default:
        return Expr::negation(expr(depth - 1));
    }
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::string ident() {
    static const char* names[] = {"role", "country", "gold", "time", "x_1", "Level", "d"};
    return names[pick(0, 6)];
  }

  std::string string_text() {
    static const char* texts[] = {"shop", "", "a \"quoted\" word", "back\\slash", "United States",
                                  "2013-05-19", "it's", "AND", "ünïcode"};
    return texts[pick(0, 8)];
  }

  Operand literal() {
    if (pick(0, 1)) return Operand::string_literal(string_text());
    static const std::int64_t nums[] = {0, 7, -3, 1368921600, INT64_MAX, INT64_MIN + 1};
    return Operand::int_literal(nums[pick(0, 5)]);
  }

  Operand subject() {
    switch (pick(0, 2)) {
      case 0:
        return Operand::attribute(ident());
      case 1:
        return Operand::birth(ident());
      default:
        return Operand::age();
    }
  }

  Operand operand() { return pick(0, 2) == 0 ? literal() : subject(); }

  SelectItem select_item() {
    SelectItem item;
    switch (pick(0, 3)) {
      case 0:
        item.kind = SelectItem::Kind::Attribute;
        item.name = ident();
        break;
      case 1:
        item.kind = SelectItem::Kind::CohortSize;
        break;
      case 2:
        item.kind = SelectItem::Kind::Age;
        break;
      default:
        item.kind = SelectItem::Kind::Aggregate;
        item.func = static_cast<AggFunc>(pick(0, 5));
        if (pick(0, 2) != 0) item.name = ident();
        break;
    }
    if (pick(0, 2) == 0) item.alias = "alias_" + std::to_string(pick(0, 9));
    return item;
  }

  std::mt19937_64& rng_;
};

}  // namespace

TEST_CASE("Q1 parses into its parts") {
  const auto q = parse(kQ1);
  CHECK_EQ(q.birth_attribute, "action");
  CHECK_EQ(q.birth_action, "launch");
  CHECK_EQ(q.table, "D");
  REQUIRE(q.birth_predicate);
  CHECK_EQ(*q.birth_predicate, cmp("role", CompareOp::Eq, "dwarf"));
  REQUIRE(q.age_predicate);
  CHECK_EQ(*q.age_predicate, cmp("action", CompareOp::Eq, "shop"));
  CHECK(q.age_clause_first);
  CHECK_EQ(q.cohort_by, std::vector<std::string>{"country"});
  REQUIRE_EQ(q.select.size(), 4);
  CHECK_EQ(q.select[0], SelectItem{SelectItem::Kind::Attribute, "country", AggFunc::Count, ""});
  CHECK_EQ(q.select[1].kind, SelectItem::Kind::CohortSize);
  CHECK_EQ(q.select[2].kind, SelectItem::Kind::Age);
  CHECK_EQ(q.select[3], SelectItem{SelectItem::Kind::Aggregate, "gold", AggFunc::Sum, "spent"});
}

TEST_CASE("clause order is irrelevant") {
  auto a = parse(kQ1);
  auto b = parse(
      "select country, cohortsize, age, SUM(gold) AS spent from D "
      "birth from action = 'launch' and role = \"dwarf\" "
      "age activities in action == \"shop\" cohort by country");
  CHECK(a.age_clause_first);
  CHECK_FALSE(b.age_clause_first);
  b.age_clause_first = true;
  CHECK_EQ(a, b);
}

TEST_CASE("predicate syntax") {
  const auto q = parse(
      "SELECT c, Count() FROM t BIRTH FROM action = \"e\" AND "
      "gold BETWEEN -5 AND 10 AND NOT (role <> \"a\" OR role IN (\"b\", \"c\")) AND country NOT IN [\"x\"] "
      "AGE ACTIVITIES IN AGE <= 3 AND country = Birth(country) AND time NOT BETWEEN \"2013-05-19\" AND \"2013-05-20\" "
      "COHORT BY c");
  REQUIRE(q.birth_predicate);
  const auto& bp = *q.birth_predicate;
  REQUIRE_EQ(bp.kind, Expr::Kind::And);
  REQUIRE_EQ(bp.children.size(), 3);
  CHECK_EQ(bp.children[0], Expr::between(Operand::attribute("gold"), Operand::int_literal(-5),
                                         Operand::int_literal(10)));
  CHECK_EQ(bp.children[1].kind, Expr::Kind::Not);
  CHECK_EQ(bp.children[1].children[0].kind, Expr::Kind::Or);
  CHECK_EQ(bp.children[1].children[0].children[0].op, CompareOp::Ne);
  CHECK_EQ(bp.children[2], Expr::negation(Expr::in(Operand::attribute("country"),
                                                   {Operand::string_literal("x")})));
  const auto& ap = *q.age_predicate;
  REQUIRE_EQ(ap.children.size(), 3);
  CHECK_EQ(ap.children[0], Expr::compare(Operand::age(), CompareOp::Le, Operand::int_literal(3)));
  CHECK_EQ(ap.children[1].rhs, Operand::birth("country"));
  CHECK_EQ(ap.children[2].kind, Expr::Kind::Not);
}

TEST_CASE("string escapes") {
  const auto q = parse(R"(SELECT c FROM t BIRTH FROM action = "say \"hi\" \\ ok" COHORT BY c)");
  CHECK_EQ(q.birth_action, "say \"hi\" \\ ok");
}

TEST_CASE("syntax errors carry positions") {
  CHECK_EQ(parse_error_position("SELECT x FROM"), 13);
  CHECK_EQ(parse_error_position("SELEKT x FROM t"), 0);
  const std::string trailing = "SELECT x FROM t BIRTH FROM action = \"e\" COHORT BY c extra";
  CHECK_EQ(parse_error_position(trailing), trailing.find("extra"));
  CHECK_NOTHROW(parse("SELECT x FROM t BIRTH FROM action = \"e\" COHORT BY c;"));
  CHECK_EQ(parse_error_position("SELECT x FROM t BIRTH FROM action = \"e COHORT BY c"), 36);
  CHECK_EQ(parse_error_position("SELECT x FROM t BIRTH FROM action = \"e\" AND a = # COHORT BY c"), 48);
  parse_error_position("SELECT x FROM t BIRTH FROM action = \"e\" AND a = 99999999999999999999 COHORT BY c");
}

TEST_CASE("missing birth and relational clauses are rejected") {
  try {
    parse("SELECT x FROM t COHORT BY c");
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("missing birth action") != std::string::npos);
  }
  for (const char* bad : {"SELECT x FROM t WHERE a = 1 BIRTH FROM action = \"e\" COHORT BY c",
                          "SELECT x FROM t BIRTH FROM action = \"e\" GROUP BY c",
                          "SELECT x FROM t JOIN u BIRTH FROM action = \"e\" COHORT BY c",
                          "SELECT x FROM t BIRTH FROM action = \"e\" COHORT BY c HAVING x = 1",
                          "SELECT x FROM t BIRTH FROM action = \"e\" COHORT BY c ORDER BY c",
                          "SELECT x FROM t BIRTH FROM action = \"e\" BIRTH FROM action = \"f\" COHORT BY c",
                          "SELECT x FROM t AGE ACTIVITIES IN a = 1 AGE ACTIVITIES IN a = 2 "
                          "BIRTH FROM action = \"e\" COHORT BY c",
                          "SELECT x FROM t BIRTH FROM action = \"e\""}) {
    CHECK_THROWS_AS(parse(bad), ParseError);
  }
}

TEST_CASE("benchmark queries parse and validate against the game schema") {
  const auto schema = ingest::game_schema();
  for (const auto& name : benchmark_query_names()) {
    const auto text = benchmark_query(name);
    REQUIRE(text);
    CAPTURE(*text);
    const auto q = validate(parse(*text), schema);
    CHECK_EQ(q.cohort_columns, std::vector<std::size_t>{*schema.find("country")});
  }
  CHECK_FALSE(benchmark_query("q9"));
  CHECK(benchmark_query("Q3"));

  const auto q4 = parse(*benchmark_query("q4"));
  REQUIRE(q4.birth_predicate);
  const auto& terms = q4.birth_predicate->children;
  CHECK(std::any_of(terms.begin(), terms.end(), [](const Expr& e) { return e.kind == Expr::Kind::Between; }));
  CHECK(std::any_of(terms.begin(), terms.end(), [](const Expr& e) { return e.kind == Expr::Kind::In; }));
  CHECK(print(*q4.age_predicate).find("Birth(country)") != std::string::npos);

  BenchParams p;
  p.g = 3;
  CHECK(benchmark_query("q7", p)->find("AGE < 3") != std::string::npos);
}

TEST_CASE("binding Q1 against the sample log") {
  const auto q = validate(parse(kQ1), fixtures::sample_schema());
  CHECK_EQ(q.birth_action, "launch");
  CHECK_EQ(q.cohort_columns, std::vector<std::size_t>{4});
  REQUIRE_EQ(q.aggregates.size(), 1);
  CHECK_EQ(q.aggregates[0], AggregateSpec{AggFunc::Sum, 5});
  REQUIRE_EQ(q.output.size(), 4);
  CHECK_EQ(q.output[0].label, "country");
  CHECK_EQ(q.output[1].label, "cohortsize");
  CHECK_EQ(q.output[2].label, "age");
  CHECK_EQ(q.output[3].label, "spent");
  CHECK_EQ(*q.birth_predicate,
           BoundExpr::compare(BoundOperand::make_column(3, ColumnKind::String), CompareOp::Eq,
                              BoundOperand::make_literal(std::string("dwarf"))));
}

TEST_CASE("binding types literals and lowers BETWEEN") {
  const auto schema = fixtures::sample_schema();
  const auto q = validate(parse("SELECT country, Count(), Avg(gold) FROM t BIRTH FROM action = \"launch\" "
                                "AND time BETWEEN \"2013-05-19\" AND \"2013-05-20\" AND 10 < gold "
                                "AGE ACTIVITIES IN AGE IN [1, 2] COHORT BY country"),
                          schema);
  const auto& terms = q.birth_predicate->children;
  REQUIRE_EQ(terms.size(), 2);
  REQUIRE_EQ(terms[0].kind, BoundExpr::Kind::And);
  CHECK_EQ(terms[0].children[0].rhs.literal, Value(fixtures::ts("2013-05-19")));
  CHECK_EQ(terms[0].children[0].op, CompareOp::Ge);
  CHECK_EQ(terms[0].children[1].rhs.literal, Value(fixtures::ts("2013-05-20 23:59:59")));
  CHECK_EQ(terms[0].children[1].op, CompareOp::Le);
  CHECK_EQ(terms[1].op, CompareOp::Gt);
  CHECK_EQ(terms[1].lhs.column, 5);
  CHECK_EQ(q.output[1].label, "Count()");
  CHECK_EQ(q.output[2].label, "Avg(gold)");
  CHECK_EQ(q.aggregates[0], AggregateSpec{AggFunc::Count, std::nullopt});
}

TEST_CASE("validation errors") {
  const auto s = fixtures::sample_schema();
  const auto q = [](const std::string& select, const std::string& birth, const std::string& age,
                    const std::string& by) {
    return "SELECT " + select + " FROM t BIRTH FROM action = \"launch\"" +
           (birth.empty() ? "" : " AND " + birth) + (age.empty() ? "" : " AGE ACTIVITIES IN " + age) +
           " COHORT BY " + by;
  };
  CHECK(validation_error(q("COHORTSIZE", "", "", "action"), s).find("action") != std::string::npos);
  validation_error(q("COHORTSIZE", "", "", "player"), s);
  validation_error(q("COHORTSIZE", "", "", "country, country"), s);
  validation_error(q("COHORTSIZE", "", "", "nope"), s);
  CHECK(validation_error(q("Sum(country)", "", "", "role"), s).find("not a measure") != std::string::npos);
  validation_error(q("Sum()", "", "", "role"), s);
  validation_error(q("UserCount(gold)", "", "", "role"), s);
  validation_error(q("role", "", "", "country"), s);
  validation_error(q("COHORTSIZE", "role = Birth(role)", "", "country"), s);
  validation_error(q("COHORTSIZE", "AGE < 3", "", "country"), s);
  validation_error(q("COHORTSIZE", "", "AGE < \"x\"", "country"), s);
  validation_error(q("COHORTSIZE", "", "AGE = gold", "country"), s);
  validation_error(q("COHORTSIZE", "gold = \"x\"", "", "country"), s);
  validation_error(q("COHORTSIZE", "role = 3", "", "country"), s);
  validation_error(q("COHORTSIZE", "role = gold", "", "country"), s);
  validation_error(q("COHORTSIZE", "time > \"not a date\"", "", "country"), s);
  validation_error(q("COHORTSIZE", "1 = 1", "", "country"), s);
  validation_error(q("COHORTSIZE", "nope = 1", "", "country"), s);
  validation_error("SELECT COHORTSIZE FROM t BIRTH FROM role = \"x\" COHORT BY country", s);

  // AGE in SELECT without an age clause is accepted.
  CHECK_NOTHROW(validate(parse(q("AGE, UserCount(), Count(gold), Min(gold), Max(gold)", "", "", "country, role")), s));
}

TEST_CASE("parse(print(ast)) reproduces random syntax trees") {
  std::mt19937_64 rng(41);
  AstGen gen(rng);
  for (int i = 0; i < 5000; ++i) {
    const auto q = gen.query();
    const auto text = print(q);
    CAPTURE(text);
    QuerySpec back;
    REQUIRE_NOTHROW(back = parse(text));
    REQUIRE_EQ(back, q);
    REQUIRE_EQ(print(back), text);
  }
}
