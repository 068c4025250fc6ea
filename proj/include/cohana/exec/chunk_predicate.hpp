#pragma once

#include <cstdint>
#include <vector>

#include "cohana/core/predicate.hpp"
#include "cohana/storage/chunkset.hpp"

namespace cohana::exec {

/// A bound predicate specialised to one chunk. String comparisons against
/// literals become ranges or sets of chunk-ids, so rows are tested without
/// touching the dictionaries.
class ChunkPredicate {
 public:
  ChunkPredicate() = default;  // always true
  ChunkPredicate(const BoundExpr& expr,
                 const storage::ChunkSet& set,
                 const storage::ChunkView& chunk);

  /// `birth_row` resolves Birth(attr); `age` is the age of `row`.
  bool eval(std::uint32_t row, std::uint32_t birth_row, std::int64_t age) const {
    return nodes_.empty() || eval_node(0, row, birth_row, age);
  }

 private:
  enum class Kind : std::uint8_t {
    Const,
    CodeRange,  // lo <= code < hi, optionally negated
    CodeSet,
    CodeCompare,  // same string column on both sides
    StringCompare,
    IntLiteral,
    IntSet,
    IntCompare,
    AgeLiteral,
    AgeSet,
    And,
    Or,
    Not,
  };

  struct Side {
    std::size_t column = 0;
    bool birth = false;
  };

  struct Node {
    Kind kind = Kind::Const;
    bool value = true;  // Const; negation flag for CodeRange
    CompareOp op = CompareOp::Eq;
    Side a;
    Side b;
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    std::int64_t literal = 0;
    std::vector<std::uint64_t> codes;
    std::vector<std::int64_t> ints;
    std::vector<std::uint32_t> children;
  };

  std::uint32_t compile(const BoundExpr& e);
  bool eval_node(std::uint32_t i, std::uint32_t row, std::uint32_t birth_row, std::int64_t age) const;

  std::uint64_t code(const Side& s, std::uint32_t row, std::uint32_t birth_row) const noexcept {
    return chunk_->columns[s.column].str.codes[s.birth ? birth_row : row];
  }
  std::int64_t integer(const Side& s, std::uint32_t row, std::uint32_t birth_row) const noexcept {
    return chunk_->columns[s.column].num.value_at(s.birth ? birth_row : row);
  }

  const storage::ChunkSet* set_ = nullptr;
  const storage::ChunkView* chunk_ = nullptr;
  std::vector<Node> nodes_;
};

}  // namespace cohana::exec
