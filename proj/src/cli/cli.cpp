#include "cohana/cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cohana/core/errors.hpp"
#include "cohana/exec/executor.hpp"
#include "cohana/ingest/csv.hpp"
#include "cohana/ingest/generator.hpp"
#include "cohana/ingest/partition.hpp"
#include "cohana/oracle/oracle.hpp"
#include "cohana/plan/plan.hpp"
#include "cohana/query/benchmark.hpp"
#include "cohana/query/query.hpp"
#include "cohana/storage/chunkset.hpp"

namespace cohana::cli {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<std::string> project(const query::BoundQuery& q, const CohortResultRow& row) {
  std::vector<std::string> fields;
  for (const auto& col : q.output) {
    switch (col.kind) {
      case query::OutputColumn::Kind::Cohort:
        fields.push_back(format_value(row.cohort.at(col.index)));
        break;
      case query::OutputColumn::Kind::CohortSize:
        fields.push_back(std::to_string(row.size));
        break;
      case query::OutputColumn::Kind::Age:
        fields.push_back(std::to_string(row.age));
        break;
      case query::OutputColumn::Kind::Aggregate:
        fields.push_back(format_agg_value(row.measures.at(col.index)));
        break;
    }
  }
  return fields;
}

void write_csv_line(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << ingest::csv_escape(fields[i]);
  }
  out << '\n';
}

std::optional<int> thread_count(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("COHANA_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

struct QueryOptions {
  std::string db;
  std::string text;
  std::string file;
  std::string engine = "cohana";
  std::string format = "csv";
  std::string unit = "day";
  bool explain = false;
  int threads = 0;
};

struct IngestOptions {
  std::string input;
  std::string output;
  std::string schema;
  std::size_t chunk_size = 262144;
};

struct BenchOptions {
  std::string db;
  std::vector<std::string> queries;
  std::size_t repeat = 5;
  std::string engine = "cohana";
  int threads = 0;
  query::BenchParams params;
};

struct GenOptions {
  std::size_t users = 1000;
  std::size_t scale = 1;
  std::uint64_t seed = 42;
  std::string output;
  std::optional<std::size_t> achievement_users;
};

std::string read_all(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<CohortResultRow> run_query(const query::BoundQuery& q,
                                       const storage::ChunkSet& set,
                                       const std::string& engine,
                                       int threads) {
  if (engine == "oracle") return oracle::oracle_eval(q, set.decode_all());
  const auto plan = plan::push_down_birth(plan::build_plan(q));
  exec::ExecOptions opts;
  opts.threads = thread_count(threads).value_or(0);
  return exec::execute_parallel(plan, set, opts).rows;
}

int cmd_ingest(const IngestOptions& o, std::ostream& out) {
  const auto start = Clock::now();
  ingest::CsvSpec spec;
  if (!o.schema.empty()) {
    std::ifstream f(o.schema);
    if (!f) throw StorageError(StorageErrorKind::Io, "cannot read schema file " + o.schema);
    spec.schema = ingest::schema_from_json(read_all(f));
  }
  auto loaded = ingest::load_csv(o.input, spec);
  const auto table = ingest::sort_and_partition(std::move(loaded.tuples), o.chunk_size);
  const auto stats = storage::write_chunkset(loaded.schema, table, o.chunk_size, o.output);
  out << "tuples: " << stats.tuples << "\n"
      << "chunks: " << stats.chunks << "\n"
      << "bytes: " << stats.manifest_bytes + stats.data_bytes << "\n"
      << "elapsed_ms: " << format_double(ms_since(start)) << "\n";
  return kOk;
}

int cmd_query(const QueryOptions& o, std::istream& in, std::ostream& out) {
  const auto unit = parse_time_unit(o.unit);
  if (!unit) throw ValidationError("unknown age unit '" + o.unit + "'");
  std::string text = o.text;
  if (!o.file.empty()) {
    std::ifstream f(o.file);
    if (!f) throw StorageError(StorageErrorKind::Io, "cannot read query file " + o.file);
    text = read_all(f);
  } else if (text.empty()) {
    text = read_all(in);
  }
  auto spec = query::parse(text);
  spec.age_unit = *unit;

  const auto set = storage::open_chunkset(o.db);
  const auto q = query::validate(spec, set.schema());
  if (o.explain) {
    const auto plan = plan::push_down_birth(plan::build_plan(q));
    const auto chunks = plan::prune_chunks(plan, set);
    out << plan::explain(plan, &chunks);
    return kOk;
  }
  const auto rows = run_query(q, set, o.engine, o.threads);
  if (o.format == "table") {
    write_result_table(out, q, rows);
  } else {
    write_result_csv(out, q, rows);
  }
  return kOk;
}

int cmd_bench(const BenchOptions& o, std::ostream& out) {
  std::vector<std::pair<std::string, std::string>> texts;
  for (const auto& name : o.queries) {
    auto text = query::benchmark_query(name, o.params);
    if (!text) throw ValidationError("unknown benchmark query '" + name + "'");
    texts.emplace_back(name, *text);
  }
  const auto set = storage::open_chunkset(o.db);

  out << "query,repeat,mean_ms";
  for (std::size_t i = 1; i <= o.repeat; ++i) out << ",run_" << i;
  out << '\n';
  for (const auto& [name, text] : texts) {
    std::vector<double> runs;
    for (std::size_t i = 0; i < o.repeat; ++i) {
      const auto start = Clock::now();
      const auto q = query::validate(query::parse(text), set.schema());
      run_query(q, set, o.engine, o.threads);
      runs.push_back(ms_since(start));
    }
    double sum = 0;
    for (double r : runs) sum += r;
    out << name << ',' << o.repeat << ',' << format_double(sum / static_cast<double>(o.repeat));
    for (double r : runs) out << ',' << format_double(r);
    out << '\n';
  }
  return kOk;
}

int cmd_gen(const GenOptions& o, std::ostream& out) {
  ingest::GenSpec spec;
  spec.users = o.users;
  spec.scale = o.scale;
  spec.seed = o.seed;
  if (o.achievement_users) spec.achievement_users = *o.achievement_users;
  const auto tuples = ingest::generate(spec);
  if (o.output.empty() || o.output == "-") {
    ingest::write_csv(out, ingest::game_schema(), tuples);
    return kOk;
  }
  std::ofstream f(o.output, std::ios::binary);
  if (!f) throw StorageError(StorageErrorKind::Io, "cannot write " + o.output);
  ingest::write_csv(f, ingest::game_schema(), tuples);
  if (!f) throw StorageError(StorageErrorKind::Io, "write failed: " + o.output);
  return kOk;
}

}  // namespace

void write_result_csv(std::ostream& out,
                      const query::BoundQuery& q,
                      const std::vector<CohortResultRow>& rows) {
  std::vector<std::string> header;
  for (const auto& col : q.output) header.push_back(col.label);
  write_csv_line(out, header);
  for (const auto& row : rows) write_csv_line(out, project(q, row));
}

void write_result_table(std::ostream& out,
                        const query::BoundQuery& q,
                        const std::vector<CohortResultRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header;
  for (const auto& col : q.output) header.push_back(col.label);
  cells.push_back(header);
  for (const auto& row : rows) cells.push_back(project(q, row));

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  const auto rule = [&] {
    for (std::size_t i = 0; i < width.size(); ++i) {
      out << (i > 0 ? "-+-" : "") << std::string(width[i], '-');
    }
    out << '\n';
  };
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t i = 0; i < cells[r].size(); ++i) {
      const bool left = q.output[i].kind == query::OutputColumn::Kind::Cohort || r == 0;
      const std::string pad(width[i] - cells[r][i].size(), ' ');
      out << (i > 0 ? " | " : "") << (left ? cells[r][i] + pad : pad + cells[r][i]);
    }
    out << '\n';
    if (r == 0) rule();
  }
  out << "(" << rows.size() << " rows)\n";
}

int run(const std::vector<std::string>& args,
        std::istream& in,
        std::ostream& out,
        std::ostream& err) {
  CLI::App app{"cohana: columnar cohort query engine"};
  app.require_subcommand(1);

  IngestOptions ingest_opts;
  auto* ingest = app.add_subcommand("ingest", "Load an activity CSV into a chunk set");
  ingest->add_option("--input", ingest_opts.input, "Activity CSV")->required();
  ingest->add_option("--output", ingest_opts.output, "Output directory")->required();
  ingest->add_option("--chunk-size", ingest_opts.chunk_size, "Target rows per chunk")
      ->check(CLI::PositiveNumber);
  ingest->add_option("--schema", ingest_opts.schema, "Schema JSON");

  QueryOptions query_opts;
  auto* query = app.add_subcommand("query", "Run a cohort query");
  query->add_option("--db", query_opts.db, "Chunk set directory")->required();
  auto* text_opt = query->add_option("--query", query_opts.text, "Query text");
  query->add_option("--query-file", query_opts.file, "File holding the query")->excludes(text_opt);
  query->add_option("--engine", query_opts.engine)->check(CLI::IsMember({"cohana", "oracle"}));
  query->add_option("--format", query_opts.format)->check(CLI::IsMember({"csv", "table"}));
  query->add_option("--unit", query_opts.unit, "Age unit")->check(CLI::IsMember({"day", "week", "month"}, CLI::ignore_case));
  query->add_flag("--explain", query_opts.explain, "Print the optimized plan");
  query->add_option("--threads", query_opts.threads, "Worker threads")->check(CLI::NonNegativeNumber);

  BenchOptions bench_opts;
  bench_opts.queries = query::benchmark_query_names();
  auto* bench = app.add_subcommand("bench", "Time the benchmark queries");
  bench->add_option("--db", bench_opts.db)->required();
  bench->add_option("--queries", bench_opts.queries, "Comma-separated names")->delimiter(',');
  bench->add_option("--repeat", bench_opts.repeat)->check(CLI::PositiveNumber);
  bench->add_option("--engine", bench_opts.engine)->check(CLI::IsMember({"cohana", "oracle"}));
  bench->add_option("--threads", bench_opts.threads)->check(CLI::NonNegativeNumber);
  bench->add_option("--d1", bench_opts.params.d1);
  bench->add_option("--d2", bench_opts.params.d2);
  bench->add_option("--g", bench_opts.params.g);
  bench->add_option("--range-from", bench_opts.params.range_from);
  bench->add_option("--range-to", bench_opts.params.range_to);

  GenOptions gen_opts;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic game activity CSV");
  gen->add_option("--users", gen_opts.users)->check(CLI::PositiveNumber);
  gen->add_option("--scale", gen_opts.scale)->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_opts.seed);
  gen->add_option("--output", gen_opts.output, "CSV path, stdout if omitted");
  gen->add_option("--achievement-users", gen_opts.achievement_users,
                  "Only users below this index perform 'achievement'");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*ingest) return cmd_ingest(ingest_opts, out);
    if (*query) return cmd_query(query_opts, in, out);
    if (*bench) return cmd_bench(bench_opts, out);
    if (*gen) return cmd_gen(gen_opts, out);
  } catch (const ParseError& e) {
    err << "query error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ValidationError& e) {
    err << "query error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

}  // namespace cohana::cli
