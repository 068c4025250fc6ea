#include "cohana/plan/plan.hpp"

#include <algorithm>
#include <limits>

namespace cohana::plan {

LogicalPlan build_plan(const query::BoundQuery& q) {
  LogicalPlan p;
  p.schema = q.schema;
  p.birth_action = q.birth_action;
  if (q.birth_predicate) p.selections.emplace_back(BirthSelectOp{*q.birth_predicate});
  if (q.age_predicate) p.selections.emplace_back(AgeSelectOp{*q.age_predicate});
  p.aggregate.cohort_columns = q.cohort_columns;
  p.aggregate.aggregates = q.aggregates;
  p.aggregate.unit = q.age_unit;
  p.output = q.output;
  return p;
}

LogicalPlan push_down_birth(LogicalPlan plan) {
  std::stable_partition(plan.selections.begin(), plan.selections.end(), [](const SelectionOp& op) {
    return std::holds_alternative<BirthSelectOp>(op);
  });
  return plan;
}

bool in_push_down_normal_form(const LogicalPlan& plan) noexcept {
  return std::is_partitioned(plan.selections.begin(), plan.selections.end(),
                             [](const SelectionOp& op) {
                               return std::holds_alternative<BirthSelectOp>(op);
                             });
}

std::optional<std::pair<std::int64_t, std::int64_t>> column_range(const BoundExpr& predicate,
                                                                   std::size_t column) {
  constexpr auto kMin = std::numeric_limits<std::int64_t>::min();
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  std::int64_t lo = kMin;
  std::int64_t hi = kMax;
  bool constrained = false;
  const auto is_subject = [&](const BoundOperand& o) {
    return o.kind == BoundOperand::Kind::Column && o.column == column &&
           o.type == ColumnKind::Integer;
  };
  for (const BoundExpr* term : conjuncts(predicate)) {
    if (term->kind == BoundExpr::Kind::Compare && is_subject(term->lhs) &&
        term->rhs.kind == BoundOperand::Kind::Literal &&
        std::holds_alternative<std::int64_t>(term->rhs.literal)) {
      const std::int64_t v = std::get<std::int64_t>(term->rhs.literal);
      switch (term->op) {
        case CompareOp::Eq:
          lo = std::max(lo, v);
          hi = std::min(hi, v);
          break;
        case CompareOp::Lt:
          if (v == kMin) {
            lo = kMax;
            hi = kMin;
          } else {
            hi = std::min(hi, v - 1);
          }
          break;
        case CompareOp::Le:
          hi = std::min(hi, v);
          break;
        case CompareOp::Gt:
          if (v == kMax) {
            lo = kMax;
            hi = kMin;
          } else {
            lo = std::max(lo, v + 1);
          }
          break;
        case CompareOp::Ge:
          lo = std::max(lo, v);
          break;
        case CompareOp::Ne:
          continue;
      }
      constrained = true;
    } else if (term->kind == BoundExpr::Kind::In && is_subject(term->lhs)) {
      if (term->set.empty()) {
        lo = kMax;
        hi = kMin;
      } else {
        lo = std::max(lo, std::get<std::int64_t>(term->set.front()));
        hi = std::min(hi, std::get<std::int64_t>(term->set.back()));
      }
      constrained = true;
    }
  }
  if (!constrained) return std::nullopt;
  return std::make_pair(lo, hi);
}

std::optional<std::int64_t> max_admitted_age(const BoundExpr& predicate) {
  std::optional<std::int64_t> bound;
  for (const BoundExpr* term : conjuncts(predicate)) {
    if (term->kind != BoundExpr::Kind::Compare || term->lhs.kind != BoundOperand::Kind::Age ||
        term->rhs.kind != BoundOperand::Kind::Literal) {
      continue;
    }
    const std::int64_t v = std::get<std::int64_t>(term->rhs.literal);
    std::int64_t b;
    if (term->op == CompareOp::Lt) {
      if (v == std::numeric_limits<std::int64_t>::min()) continue;
      b = v - 1;
    } else if (term->op == CompareOp::Le) {
      b = v;
    } else {
      continue;
    }
    bound = bound ? std::min(*bound, b) : b;
  }
  return bound;
}

ChunkPlan all_chunks(const LogicalPlan& plan, const storage::ChunkSet& chunks) {
  ChunkPlan out;
  out.plan = plan;
  out.chunks.resize(chunks.chunk_count());
  for (std::size_t i = 0; i < out.chunks.size(); ++i) out.chunks[i] = static_cast<std::uint32_t>(i);
  return out;
}

ChunkPlan prune_chunks(const LogicalPlan& plan, const storage::ChunkSet& chunks) {
  ChunkPlan out;
  out.plan = plan;
  const auto gid = chunks.dictionary(ActivitySchema::kActionColumn).find(plan.birth_action);
  if (!gid) {
    out.action_unknown = true;
    out.pruned_by_action = chunks.chunk_count();
    return out;
  }

  // Integer columns a birth tuple is constrained on: time and integer
  // dimensions. Measures are left alone.
  std::vector<std::pair<std::size_t, std::pair<std::int64_t, std::int64_t>>> ranges;
  const auto& schema = chunks.schema();
  for (const auto& op : plan.selections) {
    const auto* birth = std::get_if<BirthSelectOp>(&op);
    if (birth == nullptr) continue;
    for (std::size_t c = ActivitySchema::kTimeColumn; c < schema.first_measure_column(); ++c) {
      if (schema.column(c).kind != ColumnKind::Integer) continue;
      if (auto r = column_range(birth->predicate, c)) ranges.emplace_back(c, *r);
    }
  }

  for (std::size_t i = 0; i < chunks.chunk_count(); ++i) {
    const auto& meta = chunks.chunk_meta(i);
    if (!storage::chunk_has_action(meta, *gid)) {
      ++out.pruned_by_action;
      continue;
    }
    const bool overlaps = std::all_of(ranges.begin(), ranges.end(), [&](const auto& r) {
      return r.second.first <= r.second.second &&
             storage::chunk_range_overlaps(meta, r.first, r.second.first, r.second.second);
    });
    if (!overlaps) {
      ++out.pruned_by_range;
      continue;
    }
    out.chunks.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

std::string operand_text(const BoundOperand& o, const ActivitySchema& schema, bool time_literal) {
  switch (o.kind) {
    case BoundOperand::Kind::Column:
      return schema.column(o.column).name;
    case BoundOperand::Kind::BirthColumn:
      return "Birth(" + schema.column(o.column).name + ")";
    case BoundOperand::Kind::Age:
      return "AGE";
    case BoundOperand::Kind::Literal:
      if (const auto* s = std::get_if<std::string>(&o.literal)) return quote(*s);
      if (time_literal) return quote(format_timestamp(std::get<std::int64_t>(o.literal)));
      return std::to_string(std::get<std::int64_t>(o.literal));
  }
  return "?";
}

bool is_time(const BoundOperand& o) {
  return (o.kind == BoundOperand::Kind::Column || o.kind == BoundOperand::Kind::BirthColumn) &&
         o.column == ActivitySchema::kTimeColumn;
}

}  // namespace

std::string describe(const BoundExpr& e, const ActivitySchema& schema) {
  switch (e.kind) {
    case BoundExpr::Kind::Constant:
      return e.constant ? "TRUE" : "FALSE";
    case BoundExpr::Kind::Compare:
      return operand_text(e.lhs, schema, false) + " " + to_string(e.op) + " " +
             operand_text(e.rhs, schema, is_time(e.lhs));
    case BoundExpr::Kind::In: {
      std::string out = operand_text(e.lhs, schema, false) + " IN [";
      for (std::size_t i = 0; i < e.set.size(); ++i) {
        if (i > 0) out += ", ";
        out += operand_text(BoundOperand::make_literal(e.set[i]), schema, is_time(e.lhs));
      }
      return out + "]";
    }
    case BoundExpr::Kind::And:
    case BoundExpr::Kind::Or: {
      std::string out;
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i > 0) out += e.kind == BoundExpr::Kind::And ? " AND " : " OR ";
        const auto& c = e.children[i];
        const bool wrap = c.kind == BoundExpr::Kind::And || c.kind == BoundExpr::Kind::Or;
        out += wrap ? "(" + describe(c, schema) + ")" : describe(c, schema);
      }
      return out;
    }
    case BoundExpr::Kind::Not:
      return "NOT (" + describe(e.children.front(), schema) + ")";
  }
  return "?";
}

std::string explain(const LogicalPlan& plan, const ChunkPlan* chunks) {
  std::vector<std::string> lines;
  {
    std::string cohort;
    for (std::size_t i = 0; i < plan.aggregate.cohort_columns.size(); ++i) {
      if (i > 0) cohort += ", ";
      cohort += plan.schema.column(plan.aggregate.cohort_columns[i]).name;
    }
    std::string aggs;
    for (std::size_t i = 0; i < plan.aggregate.aggregates.size(); ++i) {
      const auto& a = plan.aggregate.aggregates[i];
      if (i > 0) aggs += ", ";
      aggs += std::string(to_string(a.func)) + "(" +
              (a.column ? plan.schema.column(*a.column).name : std::string()) + ")";
    }
    lines.push_back("CohortAgg cohort=[" + cohort + "] birth=" + quote(plan.birth_action) +
                    " aggregates=[" + aggs + "] unit=" + to_string(plan.aggregate.unit));
  }
  for (auto it = plan.selections.rbegin(); it != plan.selections.rend(); ++it) {
    if (const auto* b = std::get_if<BirthSelectOp>(&*it)) {
      lines.push_back("BirthSelect " + describe(b->predicate, plan.schema));
    } else {
      lines.push_back("AgeSelect " + describe(std::get<AgeSelectOp>(*it).predicate, plan.schema));
    }
  }
  std::string scan = "TableScan";
  if (chunks != nullptr) {
    const std::size_t total =
        chunks->chunks.size() + chunks->pruned_by_action + chunks->pruned_by_range;
    scan += " chunks=" + std::to_string(chunks->chunks.size()) + "/" + std::to_string(total) +
            " pruned_by_action=" + std::to_string(chunks->pruned_by_action) +
            " pruned_by_range=" + std::to_string(chunks->pruned_by_range);
    if (chunks->action_unknown) scan += " (birth action not in table)";
  }
  lines.push_back(scan);

  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out += std::string(2 * i, ' ') + lines[i] + "\n";
  }
  return out;
}

}  // namespace cohana::plan
