// Times the serial kernel, the OpenMP kernel and the oracle on the
// benchmark queries over generated data.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>

#include "cohana/exec/executor.hpp"
#include "cohana/ingest/generator.hpp"
#include "cohana/ingest/partition.hpp"
#include "cohana/oracle/oracle.hpp"
#include "cohana/query/benchmark.hpp"
#include "cohana/query/query.hpp"
#include "cohana/storage/chunkset.hpp"

namespace {

template <class F>
double median_ms(std::size_t repeat, F&& f) {
  std::vector<double> runs;
  for (std::size_t i = 0; i < repeat; ++i) {
    const auto start = std::chrono::steady_clock::now();
    f();
    runs.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                       .count());
  }
  std::sort(runs.begin(), runs.end());
  return runs[runs.size() / 2];
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cohana_bench: serial vs parallel vs oracle"};
  std::size_t users = 2000;
  std::size_t scale = 1;
  std::size_t chunk_size = 262144;
  std::size_t repeat = 5;
  int threads = 0;
  bool skip_oracle = false;
  std::string dir = (std::filesystem::temp_directory_path() / "cohana_bench_db").string();
  app.add_option("--users", users);
  app.add_option("--scale", scale);
  app.add_option("--chunk-size", chunk_size);
  app.add_option("--repeat", repeat)->check(CLI::PositiveNumber);
  app.add_option("--threads", threads);
  app.add_option("--dir", dir);
  app.add_flag("--skip-oracle", skip_oracle);
  CLI11_PARSE(app, argc, argv);

  using namespace cohana;
  ingest::GenSpec gen;
  gen.users = users;
  gen.scale = scale;
  auto tuples = ingest::generate(gen);
  const auto table = ingest::sort_and_partition(tuples, chunk_size);
  storage::write_chunkset(ingest::game_schema(), table, chunk_size, dir);
  const auto set = storage::open_chunkset(dir);
  std::cerr << tuples.size() << " tuples in " << set.chunk_count() << " chunks\n";

  std::cout << "query,serial_ms,parallel_ms,oracle_ms,rows,match\n";
  for (const auto& name : query::benchmark_query_names()) {
    const auto q = query::validate(query::parse(*query::benchmark_query(name)), set.schema());
    const auto plan = plan::push_down_birth(plan::build_plan(q));
    std::vector<CohortResultRow> serial, parallel, reference;
    const double ts = median_ms(repeat, [&] { serial = exec::execute_serial(plan, set).rows; });
    const double tp = median_ms(repeat, [&] {
      parallel = exec::execute_parallel(plan, set, {threads, true}).rows;
    });
    double to = 0;
    bool match = results_match(serial, parallel);
    if (!skip_oracle) {
      to = median_ms(1, [&] { reference = oracle::evaluate(plan, tuples); });
      match = match && results_match(serial, reference);
    }
    std::cout << name << ',' << ts << ',' << tp << ',' << to << ',' << serial.size() << ','
              << (match ? "yes" : "NO") << '\n';
  }
  std::filesystem::remove_all(dir);
  return 0;
}
