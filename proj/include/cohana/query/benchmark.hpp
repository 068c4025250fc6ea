#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cohana::query {

/// Parameters of the benchmark query templates.
struct BenchParams {
  std::string range_from = "2013-05-21";  // Q2, Q4
  std::string range_to = "2013-05-27";
  std::string d1 = "2013-05-19";  // Q5, Q6
  std::string d2 = "2013-05-27";
  int g = 7;  // Q7, Q8
};

/// Text of benchmark query `name` ("q1" .. "q8", case-insensitive) against
/// the synthetic game schema, or nullopt for an unknown name.
std::optional<std::string> benchmark_query(std::string_view name, const BenchParams& params = {});

/// "q1" .. "q8".
std::vector<std::string> benchmark_query_names();

}  // namespace cohana::query
