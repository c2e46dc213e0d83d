// Command-line front end: entailment checking, instance generation,
// logic-program export, and the benchmark harness.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lcn/encoding.hpp"
#include "lcn/generators.hpp"
#include "lcn/kbio.hpp"
#include "lcn/oracle.hpp"
#include "lcn/solver.hpp"

namespace {

using nlohmann::json;

constexpr int kExitEntailed = 0;
constexpr int kExitNotEntailed = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
}

double default_timeout_sec() {
  if (const char* env = std::getenv("LCN_TIMEOUT")) {
    try {
      return std::stod(env);
    } catch (const std::exception&) {
    }
  }
  return 0.0;
}

lcn::SolverOptions make_options(double timeout_sec, const std::string& mode) {
  lcn::SolverOptions opts;
  opts.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_sec * 1000));
  opts.mode = mode == "parallel" ? lcn::ProbeMode::Parallel : lcn::ProbeMode::Descending;
  return opts;
}

json verdict_to_json(const lcn::Verdict& v, const std::string& engine, const std::string& mode,
                     double wall_ms) {
  json report;
  report["entailed"] = v.entailed;
  report["typical_degree"] = v.typical_degree ? json(v.typical_degree->to_string()) : json(nullptr);
  report["kb_satisfiable"] = v.kb_satisfiable;
  if (v.witness) {
    json w = json::object();
    for (const auto& [name, deg] : *v.witness) w[name] = deg.to_string();
    report["witness"] = w;
  }
  if (v.timed_out) report["timed_out"] = true;
  report["engine"] = engine;
  report["mode"] = mode;
  report["wall_time_ms"] = wall_ms;
  return report;
}

// Dimacs-like clause file: optional "p cnf ..." header, "c" comment lines,
// clauses as signed variable ids terminated by 0.
lcn::ClauseSet parse_clause_file(const std::string& text) {
  lcn::ClauseSet gamma;
  std::istringstream in(text);
  std::string line;
  lcn::Clause current;
  bool open = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (ls >> tok) {
      if (tok == "c" || tok == "p") continue;
      ls.clear();
      ls.seekg(0);
    } else {
      continue;
    }
    long lit;
    while (ls >> lit) {
      if (lit == 0) {
        gamma.clauses.push_back(current);
        current = {};
        open = false;
      } else {
        open = true;
        if (lit > 0)
          current.pos.insert(static_cast<int>(lit));
        else
          current.neg.insert(static_cast<int>(-lit));
      }
    }
  }
  if (open) gamma.clauses.push_back(current);
  gamma.validate();
  return gamma;
}

int run_entail(const std::string& kb_path, const std::string& query_override,
               const std::string& engine, const std::string& mode, double timeout_sec) {
  lcn::ParsedKb parsed = lcn::parse_kb(read_file(kb_path));
  std::optional<lcn::Query> query = parsed.query;
  if (!query_override.empty()) query = lcn::parse_query_fact(query_override, parsed.kb);
  if (!query) {
    std::cerr << "error: KB file has no query fact and no --query override given\n";
    return kExitUsage;
  }
  auto start = std::chrono::steady_clock::now();
  lcn::Verdict verdict;
  if (engine == "oracle") {
    verdict = lcn::oracle_entails(parsed.kb, *query);
  } else {
    verdict = lcn::entails(parsed.kb, *query, make_options(timeout_sec, mode));
  }
  double wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  std::cout << verdict_to_json(verdict, engine, mode, wall_ms).dump(2) << "\n";
  if (verdict.timed_out) return kExitUnknown;
  return verdict.entailed ? kExitEntailed : kExitNotEntailed;
}

struct BenchCell {
  std::vector<int> layers;
  int n = 4;
  std::vector<std::uint64_t> seeds;
  std::string engine = "solver";
  std::string mode = "sequential";
};

struct BenchRow {
  BenchCell cell;
  int solved = 0;
  double min_s = 0, avg_s = 0, max_s = 0;
};

BenchRow run_cell(const BenchCell& cell, double timeout_sec) {
  BenchRow row;
  row.cell = cell;
  std::vector<double> times;
  for (std::uint64_t seed : cell.seeds) {
    lcn::NetSpec spec;
    spec.layers = cell.layers;
    spec.seed = seed;
    spec.n = cell.n;
    auto [kb, query] = lcn::gen_mlp_kb(spec);
    auto start = std::chrono::steady_clock::now();
    lcn::Verdict v;
    bool ok = true;
    if (cell.engine == "oracle") {
      try {
        v = lcn::oracle_entails(kb, query);
      } catch (const lcn::oracle_budget_error&) {
        ok = false;
      }
    } else {
      v = lcn::entails(kb, query, make_options(timeout_sec, cell.mode));
      ok = !v.timed_out;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok) {
      ++row.solved;
      times.push_back(secs);
    }
  }
  if (!times.empty()) {
    row.min_s = *std::min_element(times.begin(), times.end());
    row.max_s = *std::max_element(times.begin(), times.end());
    row.avg_s = 0;
    for (double t : times) row.avg_s += t;
    row.avg_s /= static_cast<double>(times.size());
  }
  return row;
}

int run_bench(const std::string& spec_path, const std::string& out_path, int jobs) {
  json spec = json::parse(read_file(spec_path));
  double timeout_sec = spec.value("timeout_sec", 1800.0);
  std::vector<BenchCell> cells;
  for (const auto& c : spec.at("cells")) {
    BenchCell cell;
    cell.layers = c.at("layers").get<std::vector<int>>();
    cell.n = c.value("n", 4);
    if (c.contains("seeds")) {
      cell.seeds = c.at("seeds").get<std::vector<std::uint64_t>>();
    } else {
      int count = c.value("num_seeds", 10);
      for (int i = 1; i <= count; ++i) cell.seeds.push_back(static_cast<std::uint64_t>(i));
    }
    cell.engine = c.value("engine", std::string("solver"));
    cell.mode = c.value("mode", std::string("sequential"));
    cells.push_back(std::move(cell));
  }
  std::vector<BenchRow> rows(cells.size());
  if (jobs > 1) {
    std::vector<std::future<BenchRow>> futures;
    for (const auto& cell : cells)
      futures.push_back(std::async(std::launch::async, run_cell, cell, timeout_sec));
    for (std::size_t i = 0; i < futures.size(); ++i) rows[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < cells.size(); ++i) rows[i] = run_cell(cells[i], timeout_sec);
  }
  std::ostringstream csv;
  csv << "nodes,edges,n,engine,mode,solved_pct,min_s,avg_s,max_s\n";
  for (const BenchRow& row : rows) {
    int nodes = 0, edges = 0;
    for (std::size_t l = 0; l < row.cell.layers.size(); ++l) {
      nodes += row.cell.layers[l];
      if (l + 1 < row.cell.layers.size()) edges += row.cell.layers[l] * row.cell.layers[l + 1];
    }
    double pct = row.cell.seeds.empty()
                     ? 0.0
                     : 100.0 * row.solved / static_cast<double>(row.cell.seeds.size());
    csv << nodes << "," << edges << "," << row.cell.n << "," << row.cell.engine << ","
        << row.cell.mode << "," << pct << "," << row.min_s << "," << row.avg_s << ","
        << row.max_s << "\n";
  }
  write_output(out_path, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reasoner for weighted many-valued knowledge bases with typicality"};
  app.require_subcommand(1);

  // entail
  std::string kb_path, query_override, engine = "solver", mode = "sequential", out_path;
  double timeout_sec = default_timeout_sec();
  auto* entail = app.add_subcommand("entail", "Decide entailment of a typicality query");
  entail->add_option("kb", kb_path, "KB fact file (.kb)")->required();
  entail->add_option("--query", query_override, "override query fact, e.g. 'query(c,d,geq,2).'");
  entail->add_option("--engine", engine, "solver|oracle")->check(CLI::IsMember({"solver", "oracle"}));
  entail->add_option("--mode", mode, "sequential|parallel probe scheduling")
      ->check(CLI::IsMember({"sequential", "parallel"}));
  entail->add_option("--timeout", timeout_sec, "timeout in seconds (0 = none)");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate KB instances");
  gen->require_subcommand(1);
  std::string clause_path;
  auto* gen_maxsat = gen->add_subcommand("maxsat", "clause-set parity reduction");
  gen_maxsat->add_option("clauses", clause_path, "dimacs-like clause file")->required();
  gen_maxsat->add_option("--out", out_path, "output KB file (default stdout)");

  std::string layers_str = "2,2,1";
  std::uint64_t seed = 0;
  int net_n = 4;
  bool no_crisp = false;
  auto* gen_mlp = gen->add_subcommand("mlp", "fully-connected network KB");
  gen_mlp->add_option("--layers", layers_str, "comma-separated layer sizes");
  gen_mlp->add_option("--seed", seed, "weight seed");
  gen_mlp->add_option("--n", net_n, "truth space denominator");
  gen_mlp->add_flag("--no-crisp-inputs", no_crisp, "leave input concepts many-valued");
  gen_mlp->add_option("--out", out_path, "output KB file (default stdout)");

  lcn::RandomKbParams rnd;
  bool oracle_sized = false;
  auto* gen_random = gen->add_subcommand("random", "random valid KB");
  gen_random->add_option("--seed", rnd.seed, "rng seed");
  gen_random->add_option("--n", rnd.n, "truth space denominator");
  gen_random->add_option("--names", rnd.num_names, "number of concept names");
  gen_random->add_option("--inclusions", rnd.num_inclusions, "number of concept inclusions");
  gen_random->add_option("--wtis", rnd.num_wtis, "number of weighted typicality inclusions");
  gen_random->add_option("--assertions", rnd.num_assertions, "number of assertions");
  gen_random->add_flag("--oracle-sized", oracle_sized, "clamp sizes to the oracle budget");
  gen_random->add_option("--out", out_path, "output KB file (default stdout)");

  // export
  std::string variant_str = "order-wc";
  auto* exp = app.add_subcommand("export", "Export a logic-program encoding");
  exp->add_option("kb", kb_path, "KB fact file (.kb)")->required();
  exp->add_option("--variant", variant_str, "base|order|base-wc|order-wc")
      ->check(CLI::IsMember({"base", "order", "base-wc", "order-wc"}));
  exp->add_option("--out", out_path, "output program file (default stdout)");

  // bench
  std::string bench_spec;
  int jobs = 1;
  auto* bench = app.add_subcommand("bench", "Run a benchmark spec, emit CSV");
  bench->add_option("spec", bench_spec, "bench spec JSON file")->required();
  bench->add_option("--jobs", jobs, "concurrent cells");
  bench->add_option("--out", out_path, "output CSV file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (entail->parsed()) return run_entail(kb_path, query_override, engine, mode, timeout_sec);
    if (gen_maxsat->parsed()) {
      lcn::ClauseSet gamma = parse_clause_file(read_file(clause_path));
      auto [kb, query] = lcn::gen_maxsat_even(gamma);
      std::string header = "% gen maxsat clauses=" + std::to_string(gamma.clauses.size()) + "\n";
      write_output(out_path, header + lcn::serialize_kb(kb, query));
      return 0;
    }
    if (gen_mlp->parsed()) {
      lcn::NetSpec spec;
      spec.layers.clear();
      std::istringstream ls(layers_str);
      std::string tok;
      while (std::getline(ls, tok, ',')) spec.layers.push_back(std::stoi(tok));
      spec.seed = seed;
      spec.n = net_n;
      spec.crisp_inputs = !no_crisp;
      auto [kb, query] = lcn::gen_mlp_kb(spec);
      std::string header =
          "% gen mlp layers=" + layers_str + " seed=" + std::to_string(seed) +
          " n=" + std::to_string(net_n) + (no_crisp ? " no-crisp-inputs" : "") + "\n";
      write_output(out_path, header + lcn::serialize_kb(kb, query));
      return 0;
    }
    if (gen_random->parsed()) {
      if (oracle_sized) {
        rnd.num_names = std::min(rnd.num_names, 4);
        rnd.n = std::min(rnd.n, 4);
      }
      auto [kb, query] = lcn::gen_random_kb(rnd);
      std::string header = "% gen random seed=" + std::to_string(rnd.seed) +
                           " n=" + std::to_string(rnd.n) +
                           " names=" + std::to_string(rnd.num_names) + "\n";
      write_output(out_path, header + lcn::serialize_kb(kb, query));
      return 0;
    }
    if (exp->parsed()) {
      lcn::ParsedKb parsed = lcn::parse_kb(read_file(kb_path));
      auto variant = lcn::encoding_variant_from_string(variant_str);
      write_output(out_path, lcn::export_encoding(parsed.kb, parsed.query, *variant));
      return 0;
    }
    if (bench->parsed()) return run_bench(bench_spec, out_path, jobs);
  } catch (const lcn::parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
