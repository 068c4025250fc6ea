#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cohana/core/types.hpp"

namespace cohana::ingest {

/// Synthetic mobile-game activity log.
struct GenSpec {
  std::size_t users = 1000;
  std::size_t min_actions = 20;  // per user, including the first launch
  std::size_t max_actions = 100;
  std::string first_day = "2013-05-19";
  std::string last_day = "2013-06-26";
  /// Births fall in the first `birth_window_days` days of the range.
  std::size_t birth_window_days = 30;
  std::uint64_t seed = 42;
  /// Only users with index below this bound perform "achievement"; each of
  /// them performs it at least once when the bound is set.
  std::size_t achievement_users = std::numeric_limits<std::size_t>::max();
  std::size_t scale = 1;
};

/// player, time, action, role, country, city | session_length, gold
ActivitySchema game_schema();

/// The 16 action names, sorted.
const std::vector<std::string>& game_actions();

/// Deterministic for a given spec. Every user's first tuple is "launch" and
/// times strictly increase within a user. Users are named u000001, u000002,
/// ... so name order is generation order.
std::vector<ActivityTuple> generate(const GenSpec& spec);

/// X copies of every user's tuples. Copy 0 keeps the original ids; copy k
/// appends "_r<k>".
std::vector<ActivityTuple> scale_dataset(std::span<const ActivityTuple> base, std::size_t x);

}  // namespace cohana::ingest
