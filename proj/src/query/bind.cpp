#include "cohana/query/bind.hpp"

#include <algorithm>

#include "cohana/core/errors.hpp"

namespace cohana::query {

namespace {

class Binder {
 public:
  Binder(const ActivitySchema& schema, bool age_context)
      : schema_(schema), age_context_(age_context) {}

  BoundExpr bind(const Expr& e) const {
    switch (e.kind) {
      case Expr::Kind::Compare:
        return compare(e.lhs, e.op, e.rhs, false);
      case Expr::Kind::In:
        return in(e);
      case Expr::Kind::Between: {
        if (e.lhs.is_literal()) throw ValidationError("BETWEEN needs an attribute or AGE");
        std::vector<BoundExpr> both;
        both.push_back(compare(e.lhs, CompareOp::Ge, e.rhs, false));
        both.push_back(compare(e.lhs, CompareOp::Le, e.high, true));
        return BoundExpr::conjunction(std::move(both));
      }
      case Expr::Kind::And:
      case Expr::Kind::Or: {
        std::vector<BoundExpr> terms;
        for (const auto& c : e.children) terms.push_back(bind(c));
        return e.kind == Expr::Kind::And ? BoundExpr::conjunction(std::move(terms))
                                         : BoundExpr::disjunction(std::move(terms));
      }
      case Expr::Kind::Not:
        return BoundExpr::negation(bind(e.children.front()));
    }
    throw ValidationError("unknown expression kind");
  }

 private:
  std::size_t column(const std::string& name) const {
    const auto c = schema_.find(name);
    if (!c) throw ValidationError("unknown attribute '" + name + "'");
    return *c;
  }

  // Non-literal operands only.
  BoundOperand reference(const Operand& o) const {
    switch (o.kind) {
      case Operand::Kind::Attribute: {
        const auto c = column(o.text);
        return BoundOperand::make_column(c, schema_.column(c).kind);
      }
      case Operand::Kind::Birth: {
        if (!age_context_) {
          throw ValidationError("Birth(" + o.text + ") is only allowed in AGE ACTIVITIES IN");
        }
        const auto c = column(o.text);
        return BoundOperand::make_birth(c, schema_.column(c).kind);
      }
      case Operand::Kind::Age:
        if (!age_context_) throw ValidationError("AGE is only allowed in AGE ACTIVITIES IN");
        return BoundOperand::make_age();
      default:
        break;
    }
    throw ValidationError("expected an attribute, Birth() or AGE");
  }

  /// Types `lit` to the kind of `ref`.
  Value literal(const Operand& lit, const BoundOperand& ref, bool upper_bound) const {
    const bool is_time = ref.kind != BoundOperand::Kind::Age &&
                         ref.column == ActivitySchema::kTimeColumn;
    if (ref.type == ColumnKind::String) {
      if (lit.kind != Operand::Kind::StringLiteral) {
        throw ValidationError("attribute '" + schema_.column(ref.column).name +
                              "' is a string; got integer " + std::to_string(lit.number));
      }
      return lit.text;
    }
    if (lit.kind == Operand::Kind::IntLiteral) return lit.number;
    if (is_time) {
      const auto ts = parse_timestamp(lit.text);
      if (!ts) throw ValidationError("'" + lit.text + "' is not a timestamp");
      if (upper_bound && is_date_only(lit.text)) return *ts + 86399;
      return *ts;
    }
    const std::string what =
        ref.kind == BoundOperand::Kind::Age ? "AGE" : "'" + schema_.column(ref.column).name + "'";
    throw ValidationError(what + " is an integer; got string \"" + lit.text + "\"");
  }

  BoundExpr compare(const Operand& l, CompareOp op, const Operand& r, bool upper_bound) const {
    if (l.is_literal() && r.is_literal()) {
      throw ValidationError("comparison between two literals");
    }
    if (l.is_literal()) {
      return compare(r, mirror(op), l, false);
    }
    BoundOperand lhs = reference(l);
    if (r.is_literal()) {
      Value v = literal(r, lhs, upper_bound);
      return BoundExpr::compare(std::move(lhs), op, BoundOperand::make_literal(std::move(v)));
    }
    BoundOperand rhs = reference(r);
    if (lhs.type != rhs.type) throw ValidationError("comparison between string and integer");
    if (lhs.kind == BoundOperand::Kind::Age || rhs.kind == BoundOperand::Kind::Age) {
      throw ValidationError("AGE can only be compared with an integer literal");
    }
    return BoundExpr::compare(std::move(lhs), op, std::move(rhs));
  }

  BoundExpr in(const Expr& e) const {
    if (e.lhs.is_literal()) throw ValidationError("IN needs an attribute, Birth() or AGE");
    BoundOperand subject = reference(e.lhs);
    std::vector<Value> values;
    for (const auto& lit : e.list) values.push_back(literal(lit, subject, false));
    return BoundExpr::in(std::move(subject), std::move(values));
  }

  const ActivitySchema& schema_;
  bool age_context_;
};

}  // namespace

BoundExpr bind_predicate(const Expr& expr, const ActivitySchema& schema, bool age_context) {
  return Binder(schema, age_context).bind(expr);
}

BoundQuery validate(const QuerySpec& spec, const ActivitySchema& schema) {
  BoundQuery q;
  q.schema = schema;
  q.age_unit = spec.age_unit;
  q.age_clause_first = spec.age_clause_first;

  if (spec.birth_attribute != schema.action_attr()) {
    throw ValidationError("BIRTH FROM must name the action attribute '" + schema.action_attr() +
                          "', not '" + spec.birth_attribute + "'");
  }
  q.birth_action = spec.birth_action;
  if (spec.birth_predicate) q.birth_predicate = bind_predicate(*spec.birth_predicate, schema, false);
  if (spec.age_predicate) q.age_predicate = bind_predicate(*spec.age_predicate, schema, true);

  if (spec.cohort_by.empty()) throw ValidationError("COHORT BY needs at least one attribute");
  for (const auto& name : spec.cohort_by) {
    const auto c = schema.find(name);
    if (!c) throw ValidationError("unknown cohort attribute '" + name + "'");
    if (*c == ActivitySchema::kUserColumn || *c == ActivitySchema::kActionColumn) {
      throw ValidationError("cannot cohort by the " +
                            std::string(*c == ActivitySchema::kUserColumn ? "user" : "action") +
                            " attribute '" + name + "'");
    }
    if (std::find(q.cohort_columns.begin(), q.cohort_columns.end(), *c) != q.cohort_columns.end()) {
      throw ValidationError("duplicate cohort attribute '" + name + "'");
    }
    q.cohort_columns.push_back(*c);
  }

  for (const auto& item : spec.select) {
    query::OutputColumn out;
    switch (item.kind) {
      case SelectItem::Kind::Attribute: {
        const auto it = std::find(spec.cohort_by.begin(), spec.cohort_by.end(), item.name);
        if (it == spec.cohort_by.end()) {
          if (!schema.find(item.name)) {
            throw ValidationError("unknown attribute '" + item.name + "' in SELECT");
          }
          throw ValidationError("'" + item.name + "' is selected but not in COHORT BY");
        }
        out.kind = OutputColumn::Kind::Cohort;
        out.index = static_cast<std::size_t>(it - spec.cohort_by.begin());
        out.label = item.name;
        break;
      }
      case SelectItem::Kind::CohortSize:
        out.kind = OutputColumn::Kind::CohortSize;
        out.label = "cohortsize";
        break;
      case SelectItem::Kind::Age:
        out.kind = OutputColumn::Kind::Age;
        out.label = "age";
        break;
      case SelectItem::Kind::Aggregate: {
        AggregateSpec agg;
        agg.func = item.func;
        const std::string fname = to_string(item.func);
        if (item.func == AggFunc::UserCount) {
          if (!item.name.empty()) throw ValidationError("UserCount() takes no argument");
        } else if (item.name.empty()) {
          if (item.func != AggFunc::Count) {
            throw ValidationError(fname + "() needs a measure argument");
          }
        } else {
          const auto c = schema.find(item.name);
          if (!c) throw ValidationError("unknown attribute '" + item.name + "' in " + fname + "()");
          if (schema.column(*c).role != ColumnRole::Measure) {
            throw ValidationError(fname + "(" + item.name + "): '" + item.name +
                                  "' is not a measure");
          }
          agg.column = *c;
        }
        out.kind = OutputColumn::Kind::Aggregate;
        out.index = q.aggregates.size();
        out.label = fname + "(" + item.name + ")";
        q.aggregates.push_back(agg);
        break;
      }
    }
    if (!item.alias.empty()) out.label = item.alias;
    q.output.push_back(std::move(out));
  }
  return q;
}

}  // namespace cohana::query
