#include "cohana/ingest/generator.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "cohana/core/time.hpp"

namespace cohana::ingest {

namespace {

struct WeightedAction {
  const char* name;
  double weight;
};

// Follow-up actions after the first launch; "achievement" is drawn separately.
constexpr WeightedAction kFollowUps[] = {
    {"launch", 10}, {"shop", 12},  {"fight", 14}, {"quest", 10},   {"chat", 8},
    {"explore", 8}, {"craft", 5},  {"trade", 4},  {"levelup", 4},  {"logout", 8},
    {"pvp", 4},     {"guild", 3},  {"social", 3}, {"reward", 4},   {"tutorial", 2},
};
constexpr double kAchievementWeight = 3;

struct Country {
  const char* name;
  std::vector<const char*> cities;
};

const std::vector<Country>& countries() {
  static const std::vector<Country> all = {
      {"Australia", {"Sydney", "Melbourne", "Perth"}},
      {"Brazil", {"Sao Paulo", "Rio de Janeiro"}},
      {"Canada", {"Toronto", "Vancouver", "Montreal"}},
      {"China", {"Beijing", "Shanghai", "Shenzhen"}},
      {"France", {"Paris", "Lyon"}},
      {"Germany", {"Berlin", "Munich", "Hamburg"}},
      {"India", {"Mumbai", "Delhi", "Bangalore"}},
      {"Japan", {"Tokyo", "Osaka"}},
      {"United Kingdom", {"London", "Manchester"}},
      {"United States", {"New York", "San Francisco", "Chicago"}},
  };
  return all;
}

constexpr const char* kRoles[] = {"assassin", "bandit", "dwarf", "knight", "wizard"};

Timestamp day_start(const std::string& text) {
  const auto ts = parse_timestamp(text);
  if (!ts) throw std::invalid_argument("bad generator date '" + text + "'");
  return *ts;
}

std::string user_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "u%06zu", index + 1);
  return buf;
}

}  // namespace

ActivitySchema game_schema() {
  return ActivitySchema("player", "time", "action",
                        {{"role", ColumnKind::String},
                         {"country", ColumnKind::String},
                         {"city", ColumnKind::String}},
                        {"session_length", "gold"});
}

const std::vector<std::string>& game_actions() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& a : kFollowUps) v.emplace_back(a.name);
    v.emplace_back("achievement");
    std::sort(v.begin(), v.end());
    return v;
  }();
  return names;
}

std::vector<ActivityTuple> generate(const GenSpec& spec) {
  if (spec.min_actions == 0 || spec.max_actions < spec.min_actions) {
    throw std::invalid_argument("actions per user must satisfy 0 < min <= max");
  }
  if (spec.scale == 0) throw std::invalid_argument("scale must be at least 1");
  const Timestamp first = day_start(spec.first_day);
  const Timestamp last = day_start(spec.last_day) + 86399;
  if (last <= first) throw std::invalid_argument("empty generator date range");
  const auto range_days = static_cast<std::size_t>((last - first + 1) / 86400);
  const std::size_t window = std::clamp<std::size_t>(spec.birth_window_days, 1, range_days);

  std::vector<double> weights;
  for (const auto& a : kFollowUps) weights.push_back(a.weight);
  std::discrete_distribution<std::size_t> without_achievement(weights.begin(), weights.end());
  weights.push_back(kAchievementWeight);
  std::discrete_distribution<std::size_t> with_achievement(weights.begin(), weights.end());
  const std::size_t achievement_index = weights.size() - 1;

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> count_dist(spec.min_actions, spec.max_actions);
  std::uniform_int_distribution<std::size_t> country_dist(0, countries().size() - 1);
  std::uniform_int_distribution<std::size_t> role_dist(0, std::size(kRoles) - 1);
  std::uniform_int_distribution<std::size_t> birth_day_dist(0, window - 1);
  std::uniform_int_distribution<Timestamp> second_of_day(0, 86399);
  std::uniform_int_distribution<Timestamp> gap_dist(60, 12 * 3600);
  std::uniform_int_distribution<std::int64_t> gold_dist(1, 200);
  std::uniform_int_distribution<std::int64_t> session_dist(60, 3600);
  std::bernoulli_distribution role_change(0.03);

  std::vector<ActivityTuple> out;
  out.reserve(spec.users * (spec.min_actions + spec.max_actions) / 2);
  for (std::size_t u = 0; u < spec.users; ++u) {
    const bool achiever = u < spec.achievement_users;
    const bool forced = achiever && spec.achievement_users != std::numeric_limits<std::size_t>::max();
    auto& actions = achiever ? with_achievement : without_achievement;

    const std::string name = user_name(u);
    const Country& country = countries()[country_dist(rng)];
    std::uniform_int_distribution<std::size_t> city_dist(0, country.cities.size() - 1);
    const std::string city = country.cities[city_dist(rng)];
    std::string role = kRoles[role_dist(rng)];

    std::size_t n = count_dist(rng);
    if (forced) n = std::max<std::size_t>(n, 2);
    Timestamp t = first + static_cast<Timestamp>(birth_day_dist(rng)) * 86400 + second_of_day(rng);
    const std::size_t begin = out.size();
    for (std::size_t k = 0; k < n && t <= last; ++k) {
      ActivityTuple tuple;
      tuple.user = name;
      tuple.time = t;
      if (k == 0) {
        tuple.action = "launch";
      } else {
        const std::size_t pick = actions(rng);
        tuple.action = pick == achievement_index ? "achievement" : kFollowUps[pick].name;
        if (role_change(rng)) role = kRoles[role_dist(rng)];
      }
      tuple.dims = {role, std::string(country.name), city};
      const std::int64_t session = tuple.action == "launch" ? session_dist(rng) : 0;
      const std::int64_t gold = tuple.action == "shop" ? gold_dist(rng) : 0;
      tuple.measures = {session, gold};
      out.push_back(std::move(tuple));
      t += gap_dist(rng);
    }
    if (forced) {
      const bool has = std::any_of(out.begin() + static_cast<std::ptrdiff_t>(begin), out.end(),
                                   [](const ActivityTuple& x) { return x.action == "achievement"; });
      if (!has) {
        // The launch stays first; a user cut short by the date range gets an
        // extra tuple one minute after the last.
        if (out.size() - begin < 2) {
          ActivityTuple extra = out.back();
          extra.time += 60;
          extra.measures = {0, 0};
          out.push_back(std::move(extra));
        }
        out.back().action = "achievement";
        out.back().measures = {0, 0};
      }
    }
  }
  if (spec.scale > 1) return scale_dataset(out, spec.scale);
  return out;
}

std::vector<ActivityTuple> scale_dataset(std::span<const ActivityTuple> base, std::size_t x) {
  if (x == 0) throw std::invalid_argument("scale factor must be at least 1");
  std::vector<ActivityTuple> out;
  out.reserve(base.size() * x);
  for (std::size_t k = 0; k < x; ++k) {
    const std::string suffix = k == 0 ? std::string() : "_r" + std::to_string(k);
    for (const auto& t : base) {
      out.push_back(t);
      out.back().user += suffix;
    }
  }
  return out;
}

}  // namespace cohana::ingest
