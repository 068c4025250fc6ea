#include "cohana/exec/aggregate.hpp"

#include <unordered_map>

namespace cohana::exec {

namespace {

struct VectorHash {
  std::size_t operator()(const std::vector<std::uint64_t>& v) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto x : v) {
      h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

// Dense per-cohort table indexed by age.
struct CohortSlot {
  std::uint64_t size = 0;
  std::uint32_t sample_row = 0;  // any birth row of the cohort, for decoding its key
  std::vector<Accumulator> cells;  // age * aggregate count
  std::vector<std::uint64_t> rows;  // per age
  std::vector<std::uint32_t> last_user;  // per age, for UserCount
};

class ChunkAggregator {
 public:
  ChunkAggregator(const plan::CohortAggSpec& spec,
                  const storage::ChunkSet& set,
                  const storage::ChunkView& chunk)
      : spec_(spec), set_(set), chunk_(chunk), naggs_(spec.aggregates.size()) {
    const auto& time = chunk.columns[ActivitySchema::kTimeColumn].num;
    age_span_ = chunk.rows == 0
                    ? 1
                    : static_cast<std::size_t>(
                          normalize_age(time.chunk_max - time.chunk_min, spec.unit).value) +
                          1;
    for (const auto& a : spec.aggregates) {
      measures_.push_back(a.column ? &chunk.columns[*a.column].num : nullptr);
      if (a.func == AggFunc::UserCount) user_count_ = true;
    }
    dense_ = spec.cohort_columns.size() == 1 &&
             chunk.columns[spec.cohort_columns.front()].kind == ColumnKind::String;
    if (dense_) slots_.resize(chunk.columns[spec.cohort_columns.front()].str.chunk_dict.size());
  }

  void run(Operator& root) {
    const auto& time = chunk_.columns[ActivitySchema::kTimeColumn].num;
    std::uint32_t user_marker = 0;
    while (root.next_user()) {
      const auto b = root.cursor().birth_row();
      if (!b) {
        root.skip_cur_user();
        ++root.cursor().stats().users_skipped;
        continue;
      }
      ++user_marker;
      const Timestamp birth_time = time.value_at(*b);
      CohortSlot& slot = slot_for(*b);
      ++slot.size;
      while (const auto r = root.next()) {
        const Timestamp t = time.value_at(*r);
        if (t <= birth_time) continue;
        const auto age = static_cast<std::size_t>(normalize_age(t - birth_time, spec_.unit).value);
        if (age >= slot.rows.size()) grow(slot, age + 1);
        ++slot.rows[age];
        Accumulator* acc = slot.cells.data() + age * naggs_;
        const bool new_user = user_count_ && slot.last_user[age] != user_marker;
        for (std::size_t k = 0; k < naggs_; ++k) {
          const std::int64_t v = measures_[k] != nullptr ? measures_[k]->value_at(*r) : 0;
          acc[k].sum += v;
          ++acc[k].count;
          acc[k].min = std::min(acc[k].min, v);
          acc[k].max = std::max(acc[k].max, v);
          acc[k].users += new_user ? 1 : 0;
        }
        if (user_count_) slot.last_user[age] = user_marker;
      }
    }
  }

  PartialResult result() const {
    PartialResult out;
    for (const auto& slot : slots_) {
      if (slot.size == 0) continue;
      CohortPartial& cp = out[decode_key(slot.sample_row)];
      cp.size += slot.size;
      for (std::size_t age = 1; age < slot.rows.size(); ++age) {
        if (slot.rows[age] == 0) continue;
        auto& accs = cp.ages[static_cast<std::int64_t>(age)];
        accs.assign(slot.cells.begin() + static_cast<std::ptrdiff_t>(age * naggs_),
                    slot.cells.begin() + static_cast<std::ptrdiff_t>((age + 1) * naggs_));
      }
    }
    return out;
  }

 private:
  CohortSlot& slot_for(std::uint32_t birth_row) {
    std::size_t id;
    if (dense_) {
      id = chunk_.columns[spec_.cohort_columns.front()].str.code_at(birth_row);
    } else {
      key_.clear();
      for (auto c : spec_.cohort_columns) {
        const auto& col = chunk_.columns[c];
        key_.push_back(col.kind == ColumnKind::String
                           ? col.str.code_at(birth_row)
                           : static_cast<std::uint64_t>(col.num.value_at(birth_row)));
      }
      const auto [it, inserted] = ids_.try_emplace(key_, slots_.size());
      if (inserted) slots_.emplace_back();
      id = it->second;
    }
    CohortSlot& slot = slots_[id];
    if (slot.size == 0) {
      slot.sample_row = birth_row;
      grow(slot, age_span_);
    }
    return slot;
  }

  void grow(CohortSlot& slot, std::size_t ages) const {
    if (ages <= slot.rows.size()) return;
    slot.rows.resize(ages, 0);
    slot.cells.resize(ages * naggs_);
    if (user_count_) slot.last_user.resize(ages, 0);
  }

  std::vector<Value> decode_key(std::uint32_t row) const {
    std::vector<Value> key;
    for (auto c : spec_.cohort_columns) {
      const auto& col = chunk_.columns[c];
      if (col.kind == ColumnKind::String) {
        key.emplace_back(std::string(set_.dictionary(c).at(col.str.global_id_at(row))));
      } else {
        key.emplace_back(col.num.value_at(row));
      }
    }
    return key;
  }

  const plan::CohortAggSpec& spec_;
  const storage::ChunkSet& set_;
  const storage::ChunkView& chunk_;
  std::size_t naggs_;
  std::size_t age_span_ = 1;
  bool user_count_ = false;
  bool dense_ = false;
  std::vector<const storage::IntColumnView*> measures_;
  std::vector<CohortSlot> slots_;
  std::unordered_map<std::vector<std::uint64_t>, std::size_t, VectorHash> ids_;
  std::vector<std::uint64_t> key_;
};

}  // namespace

PartialResult aggregate_chunk(Operator& root,
                              const plan::CohortAggSpec& spec,
                              const storage::ChunkSet& set,
                              const storage::ChunkView& chunk) {
  ChunkAggregator agg(spec, set, chunk);
  agg.run(root);
  return agg.result();
}

void merge_into(PartialResult& into, const PartialResult& from) {
  for (const auto& [key, part] : from) {
    CohortPartial& dst = into[key];
    dst.size += part.size;
    for (const auto& [age, accs] : part.ages) {
      auto [it, inserted] = dst.ages.try_emplace(age, accs);
      if (inserted) continue;
      for (std::size_t k = 0; k < accs.size(); ++k) it->second[k].merge(accs[k]);
    }
  }
}

std::vector<CohortResultRow> finalize(const PartialResult& state, const plan::CohortAggSpec& spec) {
  std::vector<CohortResultRow> rows;
  for (const auto& [key, part] : state) {
    for (const auto& [age, accs] : part.ages) {
      CohortResultRow row;
      row.cohort = key;
      row.age = age;
      row.size = part.size;
      for (std::size_t k = 0; k < spec.aggregates.size(); ++k) {
        const Accumulator& a = accs[k];
        switch (spec.aggregates[k].func) {
          case AggFunc::Sum:
            row.measures.emplace_back(a.sum);
            break;
          case AggFunc::Avg:
            row.measures.emplace_back(static_cast<double>(a.sum) / static_cast<double>(a.count));
            break;
          case AggFunc::Count:
            row.measures.emplace_back(a.count);
            break;
          case AggFunc::Min:
            row.measures.emplace_back(a.min);
            break;
          case AggFunc::Max:
            row.measures.emplace_back(a.max);
            break;
          case AggFunc::UserCount:
            row.measures.emplace_back(static_cast<std::int64_t>(a.users));
            break;
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<CohortResultRow> merge_partials(std::span<const PartialResult> parts,
                                            const plan::CohortAggSpec& spec) {
  PartialResult all;
  for (const auto& p : parts) merge_into(all, p);
  return finalize(all, spec);
}

}  // namespace cohana::exec
