#include "cohana/oracle/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

namespace cohana::oracle {

namespace {

std::vector<ActivityTuple> sorted(std::span<const ActivityTuple> table) {
  std::vector<ActivityTuple> out(table.begin(), table.end());
  std::sort(out.begin(), out.end(), primary_key_less);
  return out;
}

// Birth tuple per user, computed over the whole relation.
std::map<std::string, const ActivityTuple*> births(std::span<const ActivityTuple> table,
                                                   std::string_view action) {
  std::map<std::string, const ActivityTuple*> out;
  for (const auto& t : table) {
    if (t.action != action) continue;
    auto [it, inserted] = out.try_emplace(t.user, &t);
    if (!inserted && t.time < it->second->time) it->second = &t;
  }
  return out;
}

}  // namespace

BirthInfo oracle_birth(std::span<const ActivityTuple> table,
                       std::string_view user,
                       std::string_view action) {
  BirthInfo info;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& t = table[i];
    if (t.user != user || t.action != action) continue;
    if (!info.born() || t.time < info.birth_time) {
      info.birth_time = t.time;
      info.birth_tuple_index = i;
    }
  }
  return info;
}

std::vector<ActivityTuple> birth_select(std::span<const ActivityTuple> table,
                                        const BoundExpr& predicate,
                                        std::string_view action) {
  const auto b = births(table, action);
  std::set<std::string> admitted;
  for (const auto& [user, tuple] : b) {
    if (eval_predicate(predicate, *tuple, tuple, std::nullopt)) admitted.insert(user);
  }
  std::vector<ActivityTuple> out;
  for (const auto& t : table) {
    if (admitted.count(t.user) != 0) out.push_back(t);
  }
  return out;
}

std::vector<ActivityTuple> age_select(std::span<const ActivityTuple> table,
                                      const BoundExpr& predicate,
                                      std::string_view action,
                                      TimeUnit unit) {
  const auto b = births(table, action);
  std::vector<ActivityTuple> out;
  for (const auto& t : table) {
    const auto it = b.find(t.user);
    if (it == b.end()) continue;
    const ActivityTuple& birth = *it->second;
    if (t.time < birth.time) continue;
    if (t.time == birth.time) {
      out.push_back(t);
      continue;
    }
    if (eval_predicate(predicate, t, &birth, normalize_age(t.time - birth.time, unit))) {
      out.push_back(t);
    }
  }
  return out;
}

std::vector<ActivityTuple> apply_selections(const plan::LogicalPlan& plan,
                                            std::span<const ActivityTuple> table) {
  std::vector<ActivityTuple> rel = sorted(table);
  for (const auto& op : plan.selections) {
    if (const auto* b = std::get_if<plan::BirthSelectOp>(&op)) {
      rel = birth_select(rel, b->predicate, plan.birth_action);
    } else {
      rel = age_select(rel, std::get<plan::AgeSelectOp>(op).predicate, plan.birth_action,
                       plan.aggregate.unit);
    }
  }
  return rel;
}

std::vector<CohortResultRow> cohort_aggregate(std::span<const ActivityTuple> table,
                                              std::string_view action,
                                              const plan::CohortAggSpec& spec) {
  struct Bucket {
    std::vector<std::vector<std::int64_t>> values;  // per aggregate
    std::set<std::string> users;
  };
  struct Cohort {
    std::uint64_t size = 0;
    std::map<std::int64_t, Bucket> ages;
  };

  const auto b = births(table, action);
  std::map<std::vector<Value>, Cohort> cohorts;
  std::map<std::string, std::vector<Value>> user_cohort;
  for (const auto& [user, tuple] : b) {
    std::vector<Value> key;
    for (auto c : spec.cohort_columns) key.push_back(to_value(cell(*tuple, c)));
    ++cohorts[key].size;
    user_cohort.emplace(user, std::move(key));
  }

  for (const auto& t : table) {
    const auto it = b.find(t.user);
    if (it == b.end() || t.time <= it->second->time) continue;
    const std::int64_t age = normalize_age(t.time - it->second->time, spec.unit).value;
    Bucket& bucket = cohorts[user_cohort.at(t.user)].ages[age];
    bucket.values.resize(spec.aggregates.size());
    for (std::size_t k = 0; k < spec.aggregates.size(); ++k) {
      const auto& col = spec.aggregates[k].column;
      bucket.values[k].push_back(col ? std::get<std::int64_t>(to_value(cell(t, *col))) : 0);
    }
    bucket.users.insert(t.user);
  }

  std::vector<CohortResultRow> rows;
  for (const auto& [key, cohort] : cohorts) {
    for (const auto& [age, bucket] : cohort.ages) {
      CohortResultRow row{key, age, cohort.size, {}};
      for (std::size_t k = 0; k < spec.aggregates.size(); ++k) {
        const auto& v = bucket.values[k];
        std::int64_t sum = 0;
        for (auto x : v) sum += x;
        switch (spec.aggregates[k].func) {
          case AggFunc::Sum:
            row.measures.emplace_back(sum);
            break;
          case AggFunc::Avg:
            row.measures.emplace_back(static_cast<double>(sum) / static_cast<double>(v.size()));
            break;
          case AggFunc::Count:
            row.measures.emplace_back(static_cast<std::int64_t>(v.size()));
            break;
          case AggFunc::Min:
            row.measures.emplace_back(*std::min_element(v.begin(), v.end()));
            break;
          case AggFunc::Max:
            row.measures.emplace_back(*std::max_element(v.begin(), v.end()));
            break;
          case AggFunc::UserCount:
            row.measures.emplace_back(static_cast<std::int64_t>(bucket.users.size()));
            break;
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<CohortResultRow> evaluate(const plan::LogicalPlan& plan,
                                      std::span<const ActivityTuple> table) {
  return cohort_aggregate(apply_selections(plan, table), plan.birth_action, plan.aggregate);
}

std::vector<CohortResultRow> oracle_eval(const query::BoundQuery& q,
                                         std::span<const ActivityTuple> table) {
  return evaluate(plan::build_plan(q), table);
}

}  // namespace cohana::oracle
