#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cohana/core/time.hpp"
#include "cohana/core/types.hpp"

namespace cohana {

enum class CompareOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

const char* to_string(CompareOp op) noexcept;

/// `a op b` rewritten as `b op' a`.
CompareOp mirror(CompareOp op) noexcept;

/// Result of comparing with three-way ordering `cmp` (<0, 0, >0).
constexpr bool compare_result(CompareOp op, int cmp) noexcept {
  switch (op) {
    case CompareOp::Eq:
      return cmp == 0;
    case CompareOp::Ne:
      return cmp != 0;
    case CompareOp::Lt:
      return cmp < 0;
    case CompareOp::Le:
      return cmp <= 0;
    case CompareOp::Gt:
      return cmp > 0;
    case CompareOp::Ge:
      return cmp >= 0;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Syntax tree, as produced by the query parser. Names are unresolved.
// ---------------------------------------------------------------------------

struct Operand {
  enum class Kind : std::uint8_t { Attribute, Birth, Age, StringLiteral, IntLiteral };

  Kind kind = Kind::Attribute;
  std::string text;  // attribute name or string literal
  std::int64_t number = 0;

  static Operand attribute(std::string name) { return {Kind::Attribute, std::move(name), 0}; }
  static Operand birth(std::string name) { return {Kind::Birth, std::move(name), 0}; }
  static Operand age() { return {Kind::Age, {}, 0}; }
  static Operand string_literal(std::string s) { return {Kind::StringLiteral, std::move(s), 0}; }
  static Operand int_literal(std::int64_t v) { return {Kind::IntLiteral, {}, v}; }

  bool is_literal() const noexcept {
    return kind == Kind::StringLiteral || kind == Kind::IntLiteral;
  }

  friend bool operator==(const Operand&, const Operand&) = default;
};

struct Expr {
  enum class Kind : std::uint8_t { Compare, In, Between, And, Or, Not };

  Kind kind = Kind::Compare;
  CompareOp op = CompareOp::Eq;
  Operand lhs;                  // Compare/In/Between subject
  Operand rhs;                  // Compare right side, Between lower bound
  Operand high;                 // Between upper bound
  std::vector<Operand> list;    // In
  std::vector<Expr> children;   // And/Or/Not

  static Expr compare(Operand l, CompareOp op, Operand r);
  static Expr in(Operand subject, std::vector<Operand> values);
  static Expr between(Operand subject, Operand low, Operand high);
  static Expr conjunction(std::vector<Expr> terms);
  static Expr disjunction(std::vector<Expr> terms);
  static Expr negation(Expr term);

  friend bool operator==(const Expr&, const Expr&) = default;
};

// ---------------------------------------------------------------------------
// Bound tree: attribute names resolved to column indexes, literals typed to
// the kind of the column they are compared with, BETWEEN lowered to a pair
// of comparisons.
// ---------------------------------------------------------------------------

struct BoundOperand {
  enum class Kind : std::uint8_t { Column, BirthColumn, Age, Literal };

  Kind kind = Kind::Literal;
  std::size_t column = 0;
  ColumnKind type = ColumnKind::Integer;
  Value literal;

  static BoundOperand make_column(std::size_t col, ColumnKind type) {
    return {Kind::Column, col, type, {}};
  }
  static BoundOperand make_birth(std::size_t col, ColumnKind type) {
    return {Kind::BirthColumn, col, type, {}};
  }
  static BoundOperand make_age() { return {Kind::Age, 0, ColumnKind::Integer, {}}; }
  static BoundOperand make_literal(Value v) {
    const auto type = std::holds_alternative<std::string>(v) ? ColumnKind::String
                                                             : ColumnKind::Integer;
    return {Kind::Literal, 0, type, std::move(v)};
  }

  friend bool operator==(const BoundOperand&, const BoundOperand&) = default;
};

struct BoundExpr {
  enum class Kind : std::uint8_t { Constant, Compare, In, And, Or, Not };

  Kind kind = Kind::Constant;
  bool constant = true;
  CompareOp op = CompareOp::Eq;
  BoundOperand lhs;
  BoundOperand rhs;
  std::vector<Value> set;  // In: sorted, unique
  std::vector<BoundExpr> children;

  static BoundExpr always(bool value);
  static BoundExpr compare(BoundOperand l, CompareOp op, BoundOperand r);
  static BoundExpr in(BoundOperand subject, std::vector<Value> values);
  static BoundExpr conjunction(std::vector<BoundExpr> terms);
  static BoundExpr disjunction(std::vector<BoundExpr> terms);
  static BoundExpr negation(BoundExpr term);

  bool is_true_constant() const noexcept { return kind == Kind::Constant && constant; }

  friend bool operator==(const BoundExpr&, const BoundExpr&) = default;
};

bool references_age(const BoundExpr& expr) noexcept;
bool references_birth(const BoundExpr& expr) noexcept;

/// Top-level AND terms of `expr` (the expression itself if it is not an AND).
std::vector<const BoundExpr*> conjuncts(const BoundExpr& expr);

/// Evaluates a bound predicate against a decoded tuple. `birth` supplies the
/// values for Birth(attr) and is required when the predicate references it;
/// `age` is required when the predicate references AGE. Throws Error when a
/// required input is missing or operand kinds disagree.
bool eval_predicate(const BoundExpr& expr,
                    const ActivityTuple& tuple,
                    const ActivityTuple* birth,
                    std::optional<Age> age);

}  // namespace cohana
