#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "cohana/core/time.hpp"
#include "cohana/exec/chunk_predicate.hpp"
#include "cohana/exec/scan.hpp"
#include "cohana/plan/plan.hpp"

namespace cohana::exec {

/// Pull-based physical operator over one chunk, one user at a time.
class Operator {
 public:
  virtual ~Operator() = default;

  /// Advances to the next user this operator admits.
  virtual bool next_user() = 0;
  /// Next admitted row of the current user.
  virtual std::optional<std::uint32_t> next() = 0;
  virtual void skip_cur_user() = 0;

  ScanCursor& cursor() noexcept { return *cursor_; }

 protected:
  explicit Operator(ScanCursor& cursor) : cursor_(&cursor) {}

 private:
  ScanCursor* cursor_;
};

class TableScan final : public Operator {
 public:
  /// With `start_at_birth`, born users are read from their birth row on.
  /// Only valid when the consumer ignores rows at age zero or before birth.
  TableScan(ScanCursor& cursor, bool start_at_birth)
      : Operator(cursor), start_at_birth_(start_at_birth) {}

  bool next_user() override;
  std::optional<std::uint32_t> next() override { return cursor().next(); }
  void skip_cur_user() override { cursor().skip_cur_user(); }

 private:
  bool start_at_birth_;
};

/// Passes all rows of users whose birth row satisfies the predicate.
class BirthSelect final : public Operator {
 public:
  BirthSelect(std::unique_ptr<Operator> child, ChunkPredicate predicate)
      : Operator(child->cursor()), child_(std::move(child)), predicate_(std::move(predicate)) {}

  bool next_user() override;
  std::optional<std::uint32_t> next() override { return child_->next(); }
  void skip_cur_user() override { child_->skip_cur_user(); }

 private:
  std::unique_ptr<Operator> child_;
  ChunkPredicate predicate_;
};

/// Passes rows at the birth instant, and later rows satisfying the
/// predicate. Users without a birth are dropped.
class AgeSelect final : public Operator {
 public:
  AgeSelect(std::unique_ptr<Operator> child,
            ChunkPredicate predicate,
            TimeUnit unit,
            std::optional<std::int64_t> max_age)
      : Operator(child->cursor()),
        child_(std::move(child)),
        predicate_(std::move(predicate)),
        unit_(unit),
        max_age_(max_age) {}

  bool next_user() override;
  std::optional<std::uint32_t> next() override;
  void skip_cur_user() override { child_->skip_cur_user(); }

 private:
  std::unique_ptr<Operator> child_;
  ChunkPredicate predicate_;
  TimeUnit unit_;
  std::optional<std::int64_t> max_age_;
  std::uint32_t birth_ = 0;
  Timestamp birth_time_ = 0;
};

/// TableScan followed by the plan's selections, bottom to top.
std::unique_ptr<Operator> build_pipeline(const plan::LogicalPlan& plan,
                                         const storage::ChunkSet& set,
                                         const storage::ChunkView& chunk,
                                         ScanCursor& cursor,
                                         bool start_at_birth);

/// Chunk-id of the plan's birth action in `chunk`, or -1.
std::int64_t birth_action_code(const plan::LogicalPlan& plan,
                               const storage::ChunkSet& set,
                               const storage::ChunkView& chunk);

/// Row positions (across the whole table, in chunk order) emitted by the
/// plan's selection chain. The aggregation is not run.
std::vector<std::size_t> select_rows(const plan::LogicalPlan& plan,
                                     const storage::ChunkSet& set,
                                     ScanStats* stats = nullptr);

}  // namespace cohana::exec
