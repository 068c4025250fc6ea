#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cohana/core/result.hpp"
#include "cohana/query/bind.hpp"

namespace cohana::cli {

enum ExitCode : int { kOk = 0, kDataError = 1, kUsageError = 2 };

/// Runs one command line. `args` excludes the program name.
int run(const std::vector<std::string>& args,
        std::istream& in,
        std::ostream& out,
        std::ostream& err);

/// Result rows projected onto the query's output columns, RFC 4180 quoted.
void write_result_csv(std::ostream& out,
                      const query::BoundQuery& q,
                      const std::vector<CohortResultRow>& rows);

/// Same projection as an aligned text table.
void write_result_table(std::ostream& out,
                        const query::BoundQuery& q,
                        const std::vector<CohortResultRow>& rows);

}  // namespace cohana::cli
