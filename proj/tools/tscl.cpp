// tscl: command-line front end. Exit status 0 = non-empty result,
// 2 = empty equivalence class, 1 = error.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tscl/asp_export.hpp"
#include "tscl/bench.hpp"
#include "tscl/generate.hpp"
#include "tscl/graph_io.hpp"
#include "tscl/optimizer.hpp"
#include "tscl/oracle.hpp"
#include "tscl/solver.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace tscl;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitEmpty = 2;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
}

std::string edge_list(const DirectedGraph& g) {
  std::string s;
  for (auto [i, j] : g.edges()) {
    if (!s.empty()) s += ' ';
    s += std::to_string(i + 1) + "->" + std::to_string(j + 1);
  }
  return s.empty() ? "(none)" : s;
}

std::string rate_list(const std::vector<int>& rates) {
  std::string s;
  for (int u : rates) s += (s.empty() ? "" : " ") + std::to_string(u);
  return s;
}

json edges_json(const DirectedGraph& g) {
  json arr = json::array();
  for (auto [i, j] : g.edges()) arr.push_back({i + 1, j + 1});
  return arr;
}

json stats_json(const SearchStats& s, bool timing) {
  json j;
  j["branch_nodes"] = s.branch_nodes;
  j["prunes_p1"] = s.prunes_lower;
  j["prunes_p2"] = s.prunes_upper;
  j["forced_absent_p3"] = s.forced_absent;
  j["rates_skipped_p4"] = s.prunes_component;
  j["timed_out"] = s.timed_out;
  j["truncated"] = s.truncated;
  if (timing) j["elapsed_ms"] = s.elapsed_ms;
  j["warnings"] = s.warnings;
  return j;
}

json class_json(const EquivalenceClass& cls, bool timing) {
  json j;
  j["n"] = cls.n;
  j["maxu"] = cls.maxu;
  json entries = json::array();
  for (const auto& e : cls.entries) entries.push_back({{"edges", edges_json(e.graph)}, {"witnesses", e.witnesses}});
  j["entries"] = std::move(entries);
  j["stats"] = stats_json(cls.stats, timing);
  return j;
}

std::string class_text(const EquivalenceClass& cls, bool timing) {
  std::string out = "# n " + std::to_string(cls.n) + ", rates 1.." + std::to_string(cls.maxu) + ", " +
                    std::to_string(cls.size()) + (cls.size() == 1 ? " graph\n" : " graphs\n");
  for (const auto& e : cls.entries) out += "rates " + rate_list(e.witnesses) + " : " + edge_list(e.graph) + "\n";
  const auto& s = cls.stats;
  out += "# branch nodes " + std::to_string(s.branch_nodes) + ", P1 prunes " + std::to_string(s.prunes_lower) +
         ", P2 prunes " + std::to_string(s.prunes_upper) + ", P3 forced absent " + std::to_string(s.forced_absent) +
         ", P4 rates skipped " + std::to_string(s.prunes_component) + "\n";
  if (timing) out += "# elapsed " + detail::format_double(s.elapsed_ms) + " ms\n";
  for (const auto& w : s.warnings) out += "# warning: " + w + "\n";
  return out;
}

struct SolveFlags {
  int max_rate = 20;
  bool as_json = false;
  bool no_timing = false;
  unsigned threads = 1;
  std::optional<long long> time_limit_ms;
  std::optional<std::size_t> max_class_size;
  bool no_scc = false;
};

void add_common(CLI::App* cmd, SolveFlags& f) {
  cmd->add_option("--max-rate", f.max_rate, "Largest undersampling rate considered")->capture_default_str();
  cmd->add_option("--threads", f.threads, "Worker threads (per-rate searches)")->capture_default_str();
  cmd->add_option("--time-limit", f.time_limit_ms, "Wall-clock limit in milliseconds");
  cmd->add_option("--max-class-size", f.max_class_size, "Stop a rate's search after this many graphs");
}

void add_output(CLI::App* cmd, SolveFlags& f) {
  auto* j = cmd->add_flag("--json", f.as_json, "JSON output");
  cmd->add_flag("--text", "Plain-text output (default)")->excludes(j);
  cmd->add_flag("--no-timing", f.no_timing, "Omit wall-clock times so output is byte-stable");
}

SolveConfig make_config(const SolveFlags& f) {
  SolveConfig cfg;
  cfg.maxu = f.max_rate;
  cfg.threads = f.threads;
  cfg.use_scc_decomposition = !f.no_scc;
  if (f.time_limit_ms) cfg.time_limit = std::chrono::milliseconds(*f.time_limit_ms);
  cfg.max_class_size = f.max_class_size;
  cfg.validate();
  return cfg;
}

int print_class(const EquivalenceClass& cls, const SolveFlags& f) {
  if (f.as_json) {
    std::cout << class_json(cls, !f.no_timing).dump(2) << "\n";
  } else {
    std::cout << class_text(cls, !f.no_timing);
  }
  return cls.empty() ? kExitEmpty : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate-agnostic causal structure search over undersampled graphs"};
  app.require_subcommand(1);

  // undersample
  std::string us_in, us_out;
  int us_rate = 1;
  auto* us = app.add_subcommand("undersample", "Write G^u for a directed graph file");
  us->add_option("input", us_in, "Directed graph file")->required();
  us->add_option("--rate,-u", us_rate, "Undersampling rate")->required();
  us->add_option("--out,-o", us_out, "Output path (default stdout)");

  // solve
  std::string solve_in;
  SolveFlags solve_flags;
  auto* sv = app.add_subcommand("solve", "Equivalence class of G1 graphs that undersample to H");
  sv->add_option("input", solve_in, "H graph file")->required();
  add_common(sv, solve_flags);
  add_output(sv, solve_flags);
  sv->add_flag("--no-scc", solve_flags.no_scc, "Disable the condensation constraint");

  // optimize
  std::string opt_in, opt_truth;
  SolveFlags opt_flags;
  bool opt_refine = false, opt_all = false;
  auto* op = app.add_subcommand("optimize",
                                "Closest (G1, u) to a weighted H. Unlisted presence and absence weights are 1.");
  op->add_option("input", opt_in, "Weighted H graph file")->required();
  add_common(op, opt_flags);
  add_output(op, opt_flags);
  op->add_flag("--refine", opt_refine, "Also solve for the class of the optimum's undersampled graph");
  op->add_flag("--all-optima", opt_all, "List every (G1, u) at the optimal cost");
  op->add_option("--truth", opt_truth, "Directed graph file with the true G1 for error rates");

  // export-asp
  std::string asp_in, asp_out;
  int asp_rate = 20;
  bool asp_weighted = false;
  auto* asp = app.add_subcommand("export-asp", "Write the clingo program for H");
  asp->add_option("input", asp_in, "H graph file")->required();
  asp->add_option("--max-rate", asp_rate, "Largest undersampling rate")->capture_default_str();
  asp->add_flag("--weighted", asp_weighted, "Weak constraints from edge weights instead of integrity constraints");
  asp->add_option("--out,-o", asp_out, "Output path (default stdout)");

  // gen
  auto* gen = app.add_subcommand("gen", "Seeded random graphs");
  gen->require_subcommand(1);
  GenConfig gen_cfg;
  std::string gen_out;
  auto* gen_scc = gen->add_subcommand("scc", "Single strongly connected graph with period 1");
  gen_scc->add_option("--size,-n", gen_cfg.n, "Node count")->capture_default_str();
  auto* gen_st = gen->add_subcommand("structured", "Period-1 SCC blocks joined by a random DAG");
  gen_st->add_option("--scc-count,-k", gen_cfg.scc_count, "Number of SCCs")->capture_default_str();
  gen_st->add_option("--scc-size,-m", gen_cfg.scc_size, "Nodes per SCC")->capture_default_str();
  gen_st->add_option("--dag-degree", gen_cfg.dag_degree, "Expected out-degree of the SCC DAG")->capture_default_str();
  gen_st->add_option("--realizations-min", gen_cfg.realizations_min, "Fewest node edges per DAG edge")
      ->capture_default_str();
  gen_st->add_option("--realizations-max", gen_cfg.realizations_max, "Most node edges per DAG edge")
      ->capture_default_str();
  std::optional<double> gen_density;
  for (auto* c : {gen_scc, gen_st}) {
    c->add_option("--degree,-d", gen_cfg.avg_out_degree, "Average out-degree inside an SCC")->capture_default_str();
    c->add_option("--density", gen_density, "Edge probability inside an SCC (overrides --degree)");
    c->add_option("--seed,-s", gen_cfg.seed, "RNG seed")->capture_default_str();
    c->add_option("--max-attempts", gen_cfg.max_attempts, "Rejection-sampling budget per SCC")->capture_default_str();
    c->add_option("--out,-o", gen_out, "Output path (default stdout)");
  }
  std::string brk_in;
  std::size_t brk_count = 1;
  std::uint64_t brk_seed = 0;
  auto* gen_brk = gen->add_subcommand("break", "Remove random edges from an H file");
  gen_brk->add_option("input", brk_in, "H graph file")->required();
  gen_brk->add_option("--count,-c", brk_count, "Edges to remove")->capture_default_str();
  gen_brk->add_option("--seed,-s", brk_seed, "RNG seed")->capture_default_str();
  gen_brk->add_option("--out,-o", gen_out, "Output path (default stdout)");

  // bench
  std::string bench_suite = "fig4-desk", bench_csv = "bench.csv", bench_svg = "bench.svg";
  unsigned bench_threads = 1;
  std::optional<long long> bench_limit_ms;
  std::optional<int> bench_rate;
  auto* bench = app.add_subcommand("bench", "Run a predefined benchmark suite");
  bench->add_option("--suite", bench_suite, "fig2-desk, fig4-desk or fig5-desk")->capture_default_str();
  bench->add_option("--csv", bench_csv, "CSV output path")->capture_default_str();
  bench->add_option("--svg", bench_svg, "SVG output path")->capture_default_str();
  bench->add_option("--threads", bench_threads, "Concurrent runs (timings are cleaner with 1)")
      ->capture_default_str();
  bench->add_option("--time-limit", bench_limit_ms, "Per-run limit in milliseconds (default 10 minutes)");
  bench->add_option("--max-rate", bench_rate, "Largest undersampling rate searched (default 20)");

  // oracle
  std::string or_in;
  SolveFlags or_flags;
  bool or_long = false, or_sequence = false;
  int or_cap = 20;
  auto* orc = app.add_subcommand("oracle", "Brute-force class (n <= 5) or the undersampling sequence of a G1");
  orc->add_option("input", or_in, "H graph file, or a directed graph with --sequence")->required();
  orc->add_option("--max-rate", or_flags.max_rate, "Largest undersampling rate considered")->capture_default_str();
  add_output(orc, or_flags);
  orc->add_flag("--long-running", or_long, "Allow n = 5 (2^25 graphs)");
  orc->add_flag("--sequence", or_sequence, "Print G^1, G^2, ... up to the first repeat");
  orc->add_option("--cap", or_cap, "Longest sequence printed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*us) {
      const DirectedGraph g = parse_directed(read_file(us_in));
      emit(write_graph(undersample(g, us_rate)), us_out);
      return kExitOk;
    }

    if (*sv) {
      const MixedGraph h = parse_mixed(read_file(solve_in));
      return print_class(solve(h, make_config(solve_flags)), solve_flags);
    }

    if (*op) {
      const WeightedHypothesis w = parse_weighted(read_file(opt_in));
      const SolveConfig cfg = make_config(opt_flags);
      std::optional<DirectedGraph> truth;
      if (!opt_truth.empty()) {
        truth = parse_directed(read_file(opt_truth));
        if (truth->size() != w.size()) {
          throw InputError("truth graph has " + std::to_string(truth->size()) + " nodes, H has " +
                           std::to_string(w.size()));
        }
      }
      const Optimum opt = optimize(w, cfg, opt_all);
      std::optional<EquivalenceClass> cls;
      if (opt_refine) cls = solve(undersample(opt.graph, opt.rate), cfg);
      const bool timing = !opt_flags.no_timing;

      if (opt_flags.as_json) {
        json j;
        j["n"] = w.size();
        j["maxu"] = cfg.maxu;
        j["default_weight"] = 1;
        j["cost"] = opt.cost;
        j["rate"] = opt.rate;
        j["edges"] = edges_json(opt.graph);
        if (opt_all) {
          json all = json::array();
          for (const auto& [g, u] : opt.all_optima) all.push_back({{"edges", edges_json(g)}, {"rate", u}});
          j["all_optima"] = std::move(all);
        }
        j["stats"] = stats_json(opt.stats, timing);
        if (cls) j["refined"] = class_json(*cls, timing);
        if (truth) {
          const EdgeErrors pe = edge_errors(*truth, opt.graph);
          j["errors"]["definition"] = "omission = missed true edges / true edges; commission = extra edges / estimated edges";
          j["errors"]["plain"] = {{"omission", pe.omission}, {"commission", pe.commission}};
          if (cls) {
            const EdgeErrors re = best_errors(*truth, *cls);
            j["errors"]["refined_min"] = {{"omission", re.omission}, {"commission", re.commission}};
          }
        }
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "# unlisted presence and absence weights default to 1\n";
        std::cout << "cost " << detail::format_double(opt.cost) << "\n";
        std::cout << "rate " << opt.rate << "\n";
        std::cout << "edges " << edge_list(opt.graph) << "\n";
        if (opt_all) {
          std::cout << "# " << opt.all_optima.size() << " optima at this cost\n";
          for (const auto& [g, u] : opt.all_optima) std::cout << "optimum rate " << u << " : " << edge_list(g) << "\n";
        }
        std::cout << "# branch nodes " << opt.stats.branch_nodes << ", bound prunes " << opt.stats.prunes_lower << "\n";
        if (timing) std::cout << "# elapsed " << detail::format_double(opt.stats.elapsed_ms) << " ms\n";
        for (const auto& wmsg : opt.stats.warnings) std::cout << "# warning: " << wmsg << "\n";
        if (cls) {
          std::cout << "# refined class\n" << class_text(*cls, timing);
        }
        if (truth) {
          const EdgeErrors pe = edge_errors(*truth, opt.graph);
          std::cout << "plain omission " << detail::format_double(pe.omission) << " commission "
                    << detail::format_double(pe.commission) << "\n";
          if (cls) {
            const EdgeErrors re = best_errors(*truth, *cls);
            std::cout << "refined omission " << detail::format_double(re.omission) << " commission "
                      << detail::format_double(re.commission) << " (minimum over the class)\n";
          }
        }
      }
      return kExitOk;
    }

    if (*asp) {
      const std::string text = read_file(asp_in);
      emit(asp_weighted ? export_asp(parse_weighted(text), asp_rate) : export_asp(parse_mixed(text), asp_rate),
           asp_out);
      return kExitOk;
    }

    if (*gen) {
      if (*gen_brk) {
        const MixedGraph h = parse_mixed(read_file(brk_in));
        emit(write_graph(break_edges(h, brk_count, brk_seed)), gen_out);
        return kExitOk;
      }
      gen_cfg.kind = *gen_scc ? GraphKind::kSingleScc : GraphKind::kStructured;
      if (gen_density) gen_cfg.set_density(*gen_density);
      const DirectedGraph g = generate(gen_cfg);
      std::string header = "# " + std::string(kind_name(gen_cfg.kind)) + " seed " + std::to_string(gen_cfg.seed) +
                           ", degree " + detail::format_double(gen_cfg.avg_out_degree) + ", density " +
                           detail::format_double(gen_cfg.density()) + "\n";
      emit(header + write_graph(g), gen_out);
      return kExitOk;
    }

    if (*bench) {
      SuiteSpec spec = suite_by_name(bench_suite);
      if (bench_limit_ms) spec.time_limit = std::chrono::milliseconds(*bench_limit_ms);
      if (bench_rate) spec.maxu = *bench_rate;
      const auto records = run_benchmark(spec, bench_threads);
      write_file(bench_csv, to_csv(records));
      write_file(bench_svg, render_svg(records, spec.name));
      std::size_t timeouts = 0;
      for (const auto& r : records) timeouts += r.timeout ? 1 : 0;
      std::cout << "# " << records.size() << " runs, " << timeouts << " timeouts; wrote " << bench_csv << " and "
                << bench_svg << "\n";
      for (const auto& [u, by_size] : median_elapsed(records)) {
        for (const auto& [size, med] : by_size) {
          std::cout << "u " << u << " size " << size << " median_ms " << detail::format_double(med) << "\n";
        }
      }
      return kExitOk;
    }

    if (*orc) {
      const std::string text = read_file(or_in);
      if (or_sequence) {
        const auto seq = oracle::undersample_sequence(parse_directed(text), or_cap);
        for (const auto& [u, g] : seq.graphs) std::cout << "# u = " << u << "\n" << write_graph(g);
        std::cout << (seq.end == oracle::SequenceEnd::kRepeat
                          ? "# repeat of u = " + std::to_string(seq.repeat_of) + "\n"
                          : std::string("# stopped at the cap\n"));
        return kExitOk;
      }
      EquivalenceClass cls = oracle::brute_force_class(parse_mixed(text), or_flags.max_rate, or_long);
      return print_class(cls, or_flags);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
