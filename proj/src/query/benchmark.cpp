#include "cohana/query/benchmark.hpp"

#include <algorithm>
#include <cctype>

namespace cohana::query {

namespace {

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

constexpr const char* kLaunchHead =
    "SELECT country, COHORTSIZE, AGE, UserCount() FROM GameActions "
    "BIRTH FROM action = \"launch\"";
constexpr const char* kShopHead =
    "SELECT country, COHORTSIZE, AGE, Avg(gold) FROM GameActions "
    "BIRTH FROM action = \"shop\"";

}  // namespace

std::vector<std::string> benchmark_query_names() {
  return {"q1", "q2", "q3", "q4", "q5", "q6", "q7", "q8"};
}

std::optional<std::string> benchmark_query(std::string_view name, const BenchParams& p) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const std::string range =
      "time BETWEEN " + quoted(p.range_from) + " AND " + quoted(p.range_to);
  const std::string window = "time BETWEEN " + quoted(p.d1) + " AND " + quoted(p.d2);
  const std::string g = std::to_string(p.g);
  const std::string tail = " COHORT BY country";
  const std::string shop_age = " AGE ACTIVITIES IN action = \"shop\"";

  if (key == "q1") return kLaunchHead + tail;
  if (key == "q2") return kLaunchHead + (" AND " + range) + tail;
  if (key == "q3") return kShopHead + shop_age + tail;
  if (key == "q4") {
    return kShopHead + (" AND " + range) +
           " AND role = \"dwarf\" AND country IN [\"China\", \"Australia\", \"United States\"]" +
           shop_age + " AND country = Birth(country)" + tail;
  }
  if (key == "q5") return kLaunchHead + (" AND " + window) + tail;
  if (key == "q6") return kShopHead + (" AND " + window) + shop_age + tail;
  if (key == "q7") return kLaunchHead + (" AGE ACTIVITIES IN AGE < " + g) + tail;
  if (key == "q8") return kShopHead + shop_age + " AND AGE < " + g + tail;
  return std::nullopt;
}

}  // namespace cohana::query
