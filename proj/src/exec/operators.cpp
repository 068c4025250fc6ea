#include "cohana/exec/operators.hpp"

namespace cohana::exec {

namespace {

Timestamp time_at(ScanCursor& cursor, std::uint32_t row) {
  return cursor.chunk().columns[ActivitySchema::kTimeColumn].num.value_at(row);
}

}  // namespace

bool TableScan::next_user() {
  if (!cursor().next_user()) return false;
  if (start_at_birth_) {
    if (const auto b = cursor().birth_row()) cursor().seek(*b);
  }
  return true;
}

bool BirthSelect::next_user() {
  while (child_->next_user()) {
    const auto b = cursor().birth_row();
    if (b && predicate_.eval(*b, *b, 0)) return true;
    child_->skip_cur_user();
    ++cursor().stats().users_skipped;
  }
  return false;
}

bool AgeSelect::next_user() {
  while (child_->next_user()) {
    if (const auto b = cursor().birth_row()) {
      birth_ = *b;
      birth_time_ = time_at(cursor(), *b);
      return true;
    }
    child_->skip_cur_user();
    ++cursor().stats().users_skipped;
  }
  return false;
}

std::optional<std::uint32_t> AgeSelect::next() {
  while (const auto r = child_->next()) {
    const Timestamp t = time_at(cursor(), *r);
    if (t < birth_time_) continue;
    if (t == birth_time_) return r;
    const std::int64_t age = normalize_age(t - birth_time_, unit_).value;
    if (max_age_ && age > *max_age_) {
      child_->skip_cur_user();
      return std::nullopt;
    }
    if (predicate_.eval(*r, birth_, age)) return r;
  }
  return std::nullopt;
}

std::int64_t birth_action_code(const plan::LogicalPlan& plan,
                               const storage::ChunkSet& set,
                               const storage::ChunkView& chunk) {
  const auto gid = set.dictionary(ActivitySchema::kActionColumn).find(plan.birth_action);
  if (!gid) return -1;
  return chunk.columns[ActivitySchema::kActionColumn].str.find_code(*gid);
}

std::unique_ptr<Operator> build_pipeline(const plan::LogicalPlan& plan,
                                         const storage::ChunkSet& set,
                                         const storage::ChunkView& chunk,
                                         ScanCursor& cursor,
                                         bool start_at_birth) {
  std::unique_ptr<Operator> op = std::make_unique<TableScan>(cursor, start_at_birth);
  for (const auto& sel : plan.selections) {
    if (const auto* b = std::get_if<plan::BirthSelectOp>(&sel)) {
      op = std::make_unique<BirthSelect>(std::move(op), ChunkPredicate(b->predicate, set, chunk));
    } else {
      const auto& a = std::get<plan::AgeSelectOp>(sel);
      op = std::make_unique<AgeSelect>(std::move(op), ChunkPredicate(a.predicate, set, chunk),
                                       plan.aggregate.unit, plan::max_admitted_age(a.predicate));
    }
  }
  return op;
}

std::vector<std::size_t> select_rows(const plan::LogicalPlan& plan,
                                     const storage::ChunkSet& set,
                                     ScanStats* stats) {
  std::vector<std::size_t> out;
  ScanStats local;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < set.chunk_count(); ++i) {
    const auto chunk = set.chunk(i);
    ++local.chunks_opened;
    ScanCursor cursor(chunk, birth_action_code(plan, set, chunk), local);
    auto root = build_pipeline(plan, set, chunk, cursor, false);
    while (root->next_user()) {
      while (const auto r = root->next()) out.push_back(offset + *r);
    }
    offset += chunk.rows;
  }
  if (stats != nullptr) *stats += local;
  return out;
}

}  // namespace cohana::exec
