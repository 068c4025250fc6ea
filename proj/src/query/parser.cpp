#include <algorithm>
#include <cctype>
#include <charconv>

#include "cohana/core/errors.hpp"
#include "cohana/query/query.hpp"

namespace cohana::query {

namespace {

struct Token {
  enum class Kind : std::uint8_t { Ident, String, Number, Punct, End };

  Kind kind = Kind::End;
  std::string text;
  std::int64_t number = 0;
  std::size_t pos = 0;
};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::toupper(static_cast<unsigned char>(x)) ==
                  std::toupper(static_cast<unsigned char>(y));
         });
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.pos = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i + 1;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      std::size_t j = i + 1;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && (std::isalpha(static_cast<unsigned char>(s[j])) || s[j] == '_')) {
        throw ParseError("malformed number", i);
      }
      t.kind = Token::Kind::Number;
      t.text = std::string(s.substr(i, j - i));
      const auto [end, ec] = std::from_chars(s.data() + i, s.data() + j, t.number);
      if (ec != std::errc() || end != s.data() + j) throw ParseError("integer out of range", i);
      i = j;
    } else if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      std::string value;
      for (;;) {
        if (j >= s.size()) throw ParseError("unterminated string literal", i);
        if (s[j] == '\\' && j + 1 < s.size()) {
          value.push_back(s[j + 1]);
          j += 2;
        } else if (s[j] == c) {
          ++j;
          break;
        } else {
          value.push_back(s[j++]);
        }
      }
      t.kind = Token::Kind::String;
      t.text = std::move(value);
      i = j;
    } else {
      static constexpr std::string_view two[] = {"<=", ">=", "!=", "<>", "=="};
      t.kind = Token::Kind::Punct;
      const auto pair = s.substr(i, 2);
      if (std::find(std::begin(two), std::end(two), pair) != std::end(two)) {
        t.text = std::string(pair);
        i += 2;
      } else if (std::string_view(",()[]=<>;").find(c) != std::string_view::npos) {
        t.text = std::string(1, c);
        ++i;
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", i);
      }
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.pos = s.size();
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  QuerySpec query() {
    QuerySpec q;
    expect_keyword("SELECT");
    q.select.push_back(select_item());
    while (accept_punct(",")) q.select.push_back(select_item());
    expect_keyword("FROM");
    q.table = identifier("table name");
    reject_relational();

    bool seen_birth = false;
    bool seen_age = false;
    for (;;) {
      if (accept_keyword("BIRTH")) {
        if (seen_birth) fail("duplicate BIRTH FROM clause", toks_[i_ - 1].pos);
        seen_birth = true;
        expect_keyword("FROM");
        q.birth_attribute = identifier("action attribute");
        expect_punct("=");
        if (peek().kind != Token::Kind::String) fail("expected quoted birth action");
        q.birth_action = next().text;
        if (accept_keyword("AND")) q.birth_predicate = or_expr();
      } else if (peek_keyword("AGE") && peek_keyword("ACTIVITIES", 1)) {
        if (seen_age) fail("duplicate AGE ACTIVITIES clause");
        seen_age = true;
        i_ += 2;
        expect_keyword("IN");
        q.age_predicate = or_expr();
        q.age_clause_first = !seen_birth;
      } else {
        break;
      }
      reject_relational();
    }

    if (!peek_keyword("COHORT")) {
      if (!seen_birth) fail("missing birth action (BIRTH FROM clause)");
      fail("expected COHORT BY");
    }
    if (!seen_birth) fail("missing birth action (BIRTH FROM clause)");
    ++i_;
    expect_keyword("BY");
    q.cohort_by.push_back(identifier("cohort attribute"));
    while (accept_punct(",")) q.cohort_by.push_back(identifier("cohort attribute"));
    accept_punct(";");
    reject_relational();
    if (peek().kind != Token::Kind::End) fail("unexpected '" + peek().text + "'");
    return q;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(i_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[i_];
    if (i_ + 1 < toks_.size()) ++i_;
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const { fail(msg, peek().pos); }
  [[noreturn]] void fail(const std::string& msg, std::size_t pos) const {
    throw ParseError(msg, pos);
  }

  bool peek_keyword(std::string_view kw, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Kind::Ident && iequals(t.text, kw);
  }
  bool accept_keyword(std::string_view kw) {
    if (!peek_keyword(kw)) return false;
    ++i_;
    return true;
  }
  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) fail("expected " + std::string(kw));
  }
  bool accept_punct(std::string_view p) {
    if (peek().kind != Token::Kind::Punct || peek().text != p) return false;
    ++i_;
    return true;
  }
  void expect_punct(std::string_view p) {
    if (!accept_punct(p)) fail("expected '" + std::string(p) + "'");
  }

  std::string identifier(const char* what) {
    if (peek().kind != Token::Kind::Ident) fail(std::string("expected ") + what);
    return next().text;
  }

  void reject_relational() const {
    for (const char* kw : {"WHERE", "GROUP", "JOIN", "HAVING", "ORDER"}) {
      if (peek_keyword(kw)) {
        fail(std::string("relational ") + kw + " is not allowed in a cohort query");
      }
    }
  }

  SelectItem select_item() {
    SelectItem item;
    if (accept_keyword("COHORTSIZE")) {
      item.kind = SelectItem::Kind::CohortSize;
    } else if (peek_keyword("AGE") && !(peek(1).kind == Token::Kind::Punct && peek(1).text == "(")) {
      ++i_;
      item.kind = SelectItem::Kind::Age;
    } else if (peek().kind == Token::Kind::Ident && peek(1).kind == Token::Kind::Punct &&
               peek(1).text == "(") {
      const Token& name = next();
      const auto func = parse_agg_func(name.text);
      if (!func) fail("unknown aggregate function '" + name.text + "'", name.pos);
      item.kind = SelectItem::Kind::Aggregate;
      item.func = *func;
      expect_punct("(");
      if (peek().kind == Token::Kind::Ident) item.name = next().text;
      expect_punct(")");
    } else {
      item.kind = SelectItem::Kind::Attribute;
      item.name = identifier("select item");
    }
    if (accept_keyword("AS")) item.alias = identifier("alias");
    return item;
  }

  // or := and (OR and)* ; and := not (AND not)* ; not := NOT not | primary
  Expr or_expr() {
    std::vector<Expr> terms{and_expr()};
    while (accept_keyword("OR")) terms.push_back(and_expr());
    return Expr::disjunction(std::move(terms));
  }

  Expr and_expr() {
    std::vector<Expr> terms{not_expr()};
    while (accept_keyword("AND")) terms.push_back(not_expr());
    return Expr::conjunction(std::move(terms));
  }

  Expr not_expr() {
    if (accept_keyword("NOT")) return Expr::negation(not_expr());
    return primary();
  }

  Expr primary() {
    if (accept_punct("(")) {
      Expr e = or_expr();
      expect_punct(")");
      return e;
    }
    Operand lhs = operand();
    const bool negated = accept_keyword("NOT");
    if (accept_keyword("IN")) {
      Expr e = Expr::in(std::move(lhs), literal_list());
      return negated ? Expr::negation(std::move(e)) : e;
    }
    if (accept_keyword("BETWEEN")) {
      Operand low = operand();
      expect_keyword("AND");
      Operand high = operand();
      Expr e = Expr::between(std::move(lhs), std::move(low), std::move(high));
      return negated ? Expr::negation(std::move(e)) : e;
    }
    if (negated) fail("expected IN or BETWEEN after NOT");
    const CompareOp op = compare_op();
    return Expr::compare(std::move(lhs), op, operand());
  }

  CompareOp compare_op() {
    if (peek().kind == Token::Kind::Punct) {
      const std::string& p = peek().text;
      CompareOp op;
      if (p == "=" || p == "==") {
        op = CompareOp::Eq;
      } else if (p == "!=" || p == "<>") {
        op = CompareOp::Ne;
      } else if (p == "<") {
        op = CompareOp::Lt;
      } else if (p == "<=") {
        op = CompareOp::Le;
      } else if (p == ">") {
        op = CompareOp::Gt;
      } else if (p == ">=") {
        op = CompareOp::Ge;
      } else {
        fail("expected comparison operator");
      }
      ++i_;
      return op;
    }
    fail("expected comparison operator");
  }

  std::vector<Operand> literal_list() {
    std::string close;
    if (accept_punct("[")) {
      close = "]";
    } else if (accept_punct("(")) {
      close = ")";
    } else {
      fail("expected '[' after IN");
    }
    std::vector<Operand> values{literal()};
    while (accept_punct(",")) values.push_back(literal());
    expect_punct(close);
    return values;
  }

  Operand literal() {
    const Token& t = peek();
    if (t.kind == Token::Kind::String) return Operand::string_literal(next().text);
    if (t.kind == Token::Kind::Number) return Operand::int_literal(next().number);
    fail("expected literal");
  }

  Operand operand() {
    const Token& t = peek();
    if (t.kind == Token::Kind::String || t.kind == Token::Kind::Number) return literal();
    if (t.kind != Token::Kind::Ident) fail("expected operand");
    for (const char* kw : {"AND", "OR", "NOT", "IN", "BETWEEN", "COHORT", "BIRTH"}) {
      if (iequals(t.text, kw) &&
          !(iequals(t.text, "BIRTH") && peek(1).kind == Token::Kind::Punct && peek(1).text == "(")) {
        fail("expected operand, found keyword " + t.text);
      }
    }
    if (iequals(t.text, "AGE")) {
      ++i_;
      return Operand::age();
    }
    if (iequals(t.text, "BIRTH")) {
      ++i_;
      expect_punct("(");
      Operand b = Operand::birth(identifier("attribute"));
      expect_punct(")");
      return b;
    }
    return Operand::attribute(next().text);
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

// --- printing ----------------------------------------------------------------

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string print_operand(const Operand& o) {
  switch (o.kind) {
    case Operand::Kind::Attribute:
      return o.text;
    case Operand::Kind::Birth:
      return "Birth(" + o.text + ")";
    case Operand::Kind::Age:
      return "AGE";
    case Operand::Kind::StringLiteral:
      return quote(o.text);
    case Operand::Kind::IntLiteral:
      return std::to_string(o.number);
  }
  return {};
}

bool is_connective(const Expr& e) {
  return e.kind == Expr::Kind::And || e.kind == Expr::Kind::Or;
}

}  // namespace

QuerySpec parse(std::string_view text) { return Parser(text).query(); }

std::string print(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Compare:
      return print_operand(e.lhs) + " " + to_string(e.op) + " " + print_operand(e.rhs);
    case Expr::Kind::In: {
      std::string out = print_operand(e.lhs) + " IN [";
      for (std::size_t i = 0; i < e.list.size(); ++i) {
        if (i > 0) out += ", ";
        out += print_operand(e.list[i]);
      }
      return out + "]";
    }
    case Expr::Kind::Between:
      return print_operand(e.lhs) + " BETWEEN " + print_operand(e.rhs) + " AND " +
             print_operand(e.high);
    case Expr::Kind::And:
    case Expr::Kind::Or: {
      const char* sep = e.kind == Expr::Kind::And ? " AND " : " OR ";
      std::string out;
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i > 0) out += sep;
        const Expr& c = e.children[i];
        // Parenthesized: any OR, and a child of the same kind.
        const bool wrap = c.kind == Expr::Kind::Or || (c.kind == e.kind);
        out += wrap ? "(" + print(c) + ")" : print(c);
      }
      return out;
    }
    case Expr::Kind::Not: {
      const Expr& c = e.children.front();
      return is_connective(c) ? "NOT (" + print(c) + ")" : "NOT " + print(c);
    }
  }
  return {};
}

std::string print(const QuerySpec& q) {
  std::string out = "SELECT ";
  for (std::size_t i = 0; i < q.select.size(); ++i) {
    if (i > 0) out += ", ";
    const auto& item = q.select[i];
    switch (item.kind) {
      case SelectItem::Kind::Attribute:
        out += item.name;
        break;
      case SelectItem::Kind::CohortSize:
        out += "COHORTSIZE";
        break;
      case SelectItem::Kind::Age:
        out += "AGE";
        break;
      case SelectItem::Kind::Aggregate:
        out += std::string(to_string(item.func)) + "(" + item.name + ")";
        break;
    }
    if (!item.alias.empty()) out += " AS " + item.alias;
  }
  out += " FROM " + q.table;

  std::string birth = " BIRTH FROM " + q.birth_attribute + " = " + quote(q.birth_action);
  if (q.birth_predicate) birth += " AND " + print(*q.birth_predicate);
  const std::string age = q.age_predicate ? " AGE ACTIVITIES IN " + print(*q.age_predicate) : "";
  out += q.age_clause_first ? age + birth : birth + age;

  out += " COHORT BY ";
  for (std::size_t i = 0; i < q.cohort_by.size(); ++i) {
    if (i > 0) out += ", ";
    out += q.cohort_by[i];
  }
  return out;
}

}  // namespace cohana::query
