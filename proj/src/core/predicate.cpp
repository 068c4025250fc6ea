#include "cohana/core/predicate.hpp"

#include <algorithm>

#include "cohana/core/errors.hpp"

namespace cohana {

const char* to_string(CompareOp op) noexcept {
  switch (op) {
    case CompareOp::Eq:
      return "=";
    case CompareOp::Ne:
      return "!=";
    case CompareOp::Lt:
      return "<";
    case CompareOp::Le:
      return "<=";
    case CompareOp::Gt:
      return ">";
    case CompareOp::Ge:
      return ">=";
  }
  return "?";
}

CompareOp mirror(CompareOp op) noexcept {
  switch (op) {
    case CompareOp::Lt:
      return CompareOp::Gt;
    case CompareOp::Le:
      return CompareOp::Ge;
    case CompareOp::Gt:
      return CompareOp::Lt;
    case CompareOp::Ge:
      return CompareOp::Le;
    default:
      return op;
  }
}

Expr Expr::compare(Operand l, CompareOp op, Operand r) {
  Expr e;
  e.kind = Kind::Compare;
  e.op = op;
  e.lhs = std::move(l);
  e.rhs = std::move(r);
  return e;
}

Expr Expr::in(Operand subject, std::vector<Operand> values) {
  Expr e;
  e.kind = Kind::In;
  e.lhs = std::move(subject);
  e.list = std::move(values);
  return e;
}

Expr Expr::between(Operand subject, Operand low, Operand high) {
  Expr e;
  e.kind = Kind::Between;
  e.lhs = std::move(subject);
  e.rhs = std::move(low);
  e.high = std::move(high);
  return e;
}

Expr Expr::conjunction(std::vector<Expr> terms) {
  if (terms.size() == 1) return std::move(terms.front());
  Expr e;
  e.kind = Kind::And;
  e.children = std::move(terms);
  return e;
}

Expr Expr::disjunction(std::vector<Expr> terms) {
  if (terms.size() == 1) return std::move(terms.front());
  Expr e;
  e.kind = Kind::Or;
  e.children = std::move(terms);
  return e;
}

Expr Expr::negation(Expr term) {
  Expr e;
  e.kind = Kind::Not;
  e.children.push_back(std::move(term));
  return e;
}

BoundExpr BoundExpr::always(bool value) {
  BoundExpr e;
  e.kind = Kind::Constant;
  e.constant = value;
  return e;
}

BoundExpr BoundExpr::compare(BoundOperand l, CompareOp op, BoundOperand r) {
  BoundExpr e;
  e.kind = Kind::Compare;
  e.op = op;
  e.lhs = std::move(l);
  e.rhs = std::move(r);
  return e;
}

BoundExpr BoundExpr::in(BoundOperand subject, std::vector<Value> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  BoundExpr e;
  e.kind = Kind::In;
  e.lhs = std::move(subject);
  e.set = std::move(values);
  return e;
}

BoundExpr BoundExpr::conjunction(std::vector<BoundExpr> terms) {
  if (terms.empty()) return always(true);
  if (terms.size() == 1) return std::move(terms.front());
  BoundExpr e;
  e.kind = Kind::And;
  e.children = std::move(terms);
  return e;
}

BoundExpr BoundExpr::disjunction(std::vector<BoundExpr> terms) {
  if (terms.empty()) return always(false);
  if (terms.size() == 1) return std::move(terms.front());
  BoundExpr e;
  e.kind = Kind::Or;
  e.children = std::move(terms);
  return e;
}

BoundExpr BoundExpr::negation(BoundExpr term) {
  BoundExpr e;
  e.kind = Kind::Not;
  e.children.push_back(std::move(term));
  return e;
}

namespace {

template <typename Pred>
bool any_operand(const BoundExpr& expr, Pred pred) {
  switch (expr.kind) {
    case BoundExpr::Kind::Constant:
      return false;
    case BoundExpr::Kind::Compare:
      return pred(expr.lhs) || pred(expr.rhs);
    case BoundExpr::Kind::In:
      return pred(expr.lhs);
    case BoundExpr::Kind::And:
    case BoundExpr::Kind::Or:
    case BoundExpr::Kind::Not:
      return std::any_of(expr.children.begin(), expr.children.end(),
                         [&](const BoundExpr& c) { return any_operand(c, pred); });
  }
  return false;
}

CellRef resolve(const BoundOperand& op,
                const ActivityTuple& tuple,
                const ActivityTuple* birth,
                std::optional<Age> age) {
  switch (op.kind) {
    case BoundOperand::Kind::Column:
      return cell(tuple, op.column);
    case BoundOperand::Kind::BirthColumn:
      if (birth == nullptr) throw Error("Birth() referenced without a birth tuple");
      return cell(*birth, op.column);
    case BoundOperand::Kind::Age:
      if (!age) throw Error("AGE referenced outside an age context");
      return age->value;
    case BoundOperand::Kind::Literal:
      if (const auto* s = std::get_if<std::string>(&op.literal)) return std::string_view(*s);
      return std::get<std::int64_t>(op.literal);
  }
  throw Error("unreachable operand kind");
}

int three_way(const CellRef& a, const CellRef& b) {
  if (a.index() != b.index()) throw Error("predicate compares a string with an integer");
  if (const auto* ai = std::get_if<std::int64_t>(&a)) {
    const auto bi = std::get<std::int64_t>(b);
    return *ai < bi ? -1 : (*ai > bi ? 1 : 0);
  }
  const int c = std::get<std::string_view>(a).compare(std::get<std::string_view>(b));
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

bool in_set(const CellRef& v, const std::vector<Value>& set) {
  return std::any_of(set.begin(), set.end(), [&](const Value& item) {
    if (const auto* s = std::get_if<std::string>(&item)) {
      const auto* sv = std::get_if<std::string_view>(&v);
      return sv != nullptr && *sv == *s;
    }
    const auto* iv = std::get_if<std::int64_t>(&v);
    return iv != nullptr && *iv == std::get<std::int64_t>(item);
  });
}

}  // namespace

bool references_age(const BoundExpr& expr) noexcept {
  return any_operand(expr, [](const BoundOperand& o) { return o.kind == BoundOperand::Kind::Age; });
}

bool references_birth(const BoundExpr& expr) noexcept {
  return any_operand(expr,
                     [](const BoundOperand& o) { return o.kind == BoundOperand::Kind::BirthColumn; });
}

std::vector<const BoundExpr*> conjuncts(const BoundExpr& expr) {
  std::vector<const BoundExpr*> out;
  if (expr.kind == BoundExpr::Kind::And) {
    for (const auto& c : expr.children) {
      auto sub = conjuncts(c);
      out.insert(out.end(), sub.begin(), sub.end());
    }
  } else {
    out.push_back(&expr);
  }
  return out;
}

bool eval_predicate(const BoundExpr& expr,
                    const ActivityTuple& tuple,
                    const ActivityTuple* birth,
                    std::optional<Age> age) {
  switch (expr.kind) {
    case BoundExpr::Kind::Constant:
      return expr.constant;
    case BoundExpr::Kind::Compare:
      return compare_result(expr.op, three_way(resolve(expr.lhs, tuple, birth, age),
                                               resolve(expr.rhs, tuple, birth, age)));
    case BoundExpr::Kind::In:
      return in_set(resolve(expr.lhs, tuple, birth, age), expr.set);
    case BoundExpr::Kind::And:
      for (const auto& c : expr.children) {
        if (!eval_predicate(c, tuple, birth, age)) return false;
      }
      return true;
    case BoundExpr::Kind::Or:
      for (const auto& c : expr.children) {
        if (eval_predicate(c, tuple, birth, age)) return true;
      }
      return false;
    case BoundExpr::Kind::Not:
      return !eval_predicate(expr.children.at(0), tuple, birth, age);
  }
  return false;
}

}  // namespace cohana
