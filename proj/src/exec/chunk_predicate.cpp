#include "cohana/exec/chunk_predicate.hpp"

#include <algorithm>
#include <limits>

#include "cohana/core/errors.hpp"

namespace cohana::exec {

namespace {

constexpr std::uint64_t kNoUpper = std::numeric_limits<std::uint64_t>::max();

int three_way(std::int64_t a, std::int64_t b) noexcept { return a < b ? -1 : (a > b ? 1 : 0); }

bool is_reference(const BoundOperand& o) noexcept {
  return o.kind == BoundOperand::Kind::Column || o.kind == BoundOperand::Kind::BirthColumn;
}

}  // namespace

ChunkPredicate::ChunkPredicate(const BoundExpr& expr,
                               const storage::ChunkSet& set,
                               const storage::ChunkView& chunk)
    : set_(&set), chunk_(&chunk) {
  compile(expr);
}

std::uint32_t ChunkPredicate::compile(const BoundExpr& e) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Node n;

  switch (e.kind) {
    case BoundExpr::Kind::Constant:
      n.kind = Kind::Const;
      n.value = e.constant;
      break;

    case BoundExpr::Kind::And:
    case BoundExpr::Kind::Or:
    case BoundExpr::Kind::Not:
      n.kind = e.kind == BoundExpr::Kind::And ? Kind::And
               : e.kind == BoundExpr::Kind::Or ? Kind::Or
                                                : Kind::Not;
      for (const auto& c : e.children) n.children.push_back(compile(c));
      break;

    case BoundExpr::Kind::In: {
      if (e.lhs.kind == BoundOperand::Kind::Age) {
        n.kind = Kind::AgeSet;
        for (const auto& v : e.set) n.ints.push_back(std::get<std::int64_t>(v));
        break;
      }
      n.a = {e.lhs.column, e.lhs.kind == BoundOperand::Kind::BirthColumn};
      if (e.lhs.type == ColumnKind::Integer) {
        n.kind = Kind::IntSet;
        for (const auto& v : e.set) n.ints.push_back(std::get<std::int64_t>(v));
        std::sort(n.ints.begin(), n.ints.end());
        break;
      }
      n.kind = Kind::CodeSet;
      const auto& dict = set_->dictionary(e.lhs.column);
      const auto& col = chunk_->columns[e.lhs.column].str;
      for (const auto& v : e.set) {
        const auto gid = dict.find(std::get<std::string>(v));
        if (!gid) continue;
        const auto code = col.find_code(*gid);
        if (code >= 0) n.codes.push_back(static_cast<std::uint64_t>(code));
      }
      std::sort(n.codes.begin(), n.codes.end());
      break;
    }

    case BoundExpr::Kind::Compare: {
      n.op = e.op;
      if (e.lhs.kind == BoundOperand::Kind::Age) {
        n.kind = Kind::AgeLiteral;
        n.literal = std::get<std::int64_t>(e.rhs.literal);
        break;
      }
      if (!is_reference(e.lhs)) throw Error("predicate compare without a column on the left");
      n.a = {e.lhs.column, e.lhs.kind == BoundOperand::Kind::BirthColumn};

      if (is_reference(e.rhs)) {
        n.b = {e.rhs.column, e.rhs.kind == BoundOperand::Kind::BirthColumn};
        if (e.lhs.type == ColumnKind::Integer) {
          n.kind = Kind::IntCompare;
        } else {
          n.kind = n.a.column == n.b.column ? Kind::CodeCompare : Kind::StringCompare;
        }
        break;
      }

      if (e.lhs.type == ColumnKind::Integer) {
        n.kind = Kind::IntLiteral;
        n.literal = std::get<std::int64_t>(e.rhs.literal);
        break;
      }

      // String literal: p chunk entries sort before it; `exact` when the
      // chunk holds it at position p.
      const auto& literal = std::get<std::string>(e.rhs.literal);
      const auto& dict = set_->dictionary(e.lhs.column);
      const auto& chunk_dict = chunk_->columns[e.lhs.column].str.chunk_dict;
      const std::uint32_t g = dict.lower_bound(literal);
      const bool global_exact = g < dict.size() && dict.at(g) == literal;
      const auto p = static_cast<std::uint64_t>(
          std::lower_bound(chunk_dict.begin(), chunk_dict.end(), g) - chunk_dict.begin());
      const std::uint64_t exact =
          global_exact && p < chunk_dict.size() && chunk_dict[p] == g ? 1 : 0;
      n.kind = Kind::CodeRange;
      n.value = false;
      switch (e.op) {
        case CompareOp::Eq:
          n.lo = p;
          n.hi = p + exact;
          break;
        case CompareOp::Ne:
          n.lo = p;
          n.hi = p + exact;
          n.value = true;
          break;
        case CompareOp::Lt:
          n.lo = 0;
          n.hi = p;
          break;
        case CompareOp::Le:
          n.lo = 0;
          n.hi = p + exact;
          break;
        case CompareOp::Gt:
          n.lo = p + exact;
          n.hi = kNoUpper;
          break;
        case CompareOp::Ge:
          n.lo = p;
          n.hi = kNoUpper;
          break;
      }
      break;
    }
  }
  nodes_[index] = std::move(n);
  return index;
}

bool ChunkPredicate::eval_node(std::uint32_t i,
                               std::uint32_t row,
                               std::uint32_t birth_row,
                               std::int64_t age) const {
  const Node& n = nodes_[i];
  switch (n.kind) {
    case Kind::Const:
      return n.value;
    case Kind::CodeRange: {
      const auto c = code(n.a, row, birth_row);
      return (c >= n.lo && c < n.hi) != n.value;
    }
    case Kind::CodeSet:
      return std::binary_search(n.codes.begin(), n.codes.end(), code(n.a, row, birth_row));
    case Kind::CodeCompare: {
      const auto x = code(n.a, row, birth_row);
      const auto y = code(n.b, row, birth_row);
      return compare_result(n.op, x < y ? -1 : (x > y ? 1 : 0));
    }
    case Kind::StringCompare: {
      const auto& ca = chunk_->columns[n.a.column].str;
      const auto& cb = chunk_->columns[n.b.column].str;
      const auto x = set_->dictionary(n.a.column).at(ca.chunk_dict[code(n.a, row, birth_row)]);
      const auto y = set_->dictionary(n.b.column).at(cb.chunk_dict[code(n.b, row, birth_row)]);
      const int c = x.compare(y);
      return compare_result(n.op, c < 0 ? -1 : (c > 0 ? 1 : 0));
    }
    case Kind::IntLiteral:
      return compare_result(n.op, three_way(integer(n.a, row, birth_row), n.literal));
    case Kind::IntSet:
      return std::binary_search(n.ints.begin(), n.ints.end(), integer(n.a, row, birth_row));
    case Kind::IntCompare:
      return compare_result(n.op,
                            three_way(integer(n.a, row, birth_row), integer(n.b, row, birth_row)));
    case Kind::AgeLiteral:
      return compare_result(n.op, three_way(age, n.literal));
    case Kind::AgeSet:
      return std::binary_search(n.ints.begin(), n.ints.end(), age);
    case Kind::And:
      for (auto c : n.children) {
        if (!eval_node(c, row, birth_row, age)) return false;
      }
      return true;
    case Kind::Or:
      for (auto c : n.children) {
        if (eval_node(c, row, birth_row, age)) return true;
      }
      return false;
    case Kind::Not:
      return !eval_node(n.children.front(), row, birth_row, age);
  }
  return false;
}

}  // namespace cohana::exec
