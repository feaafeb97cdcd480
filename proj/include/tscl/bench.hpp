#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <future>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tscl/generate.hpp"
#include "tscl/optimizer.hpp"
#include "tscl/solver.hpp"

namespace tscl {

/// One benchmark run; exactly the CSV columns.
struct BenchRecord {
  std::string suite;
  std::uint64_t seed = 0;
  GraphKind kind = GraphKind::kSingleScc;
  std::size_t n = 0;
  std::size_t scc_size = 0;
  std::size_t scc_count = 0;
  double degree = 0.0;
  int u = 0;
  double elapsed_ms = 0.0;
  std::optional<std::size_t> class_size;
  bool timeout = false;
  std::optional<double> cost;
  std::optional<double> omission;
  std::optional<double> commission;

  bool operator==(const BenchRecord&) const = default;
};

inline constexpr std::string_view kCsvHeader =
    "suite,seed,kind,n,scc_size,scc_count,degree,u,elapsed_ms,class_size,timeout,cost,omission,commission";

inline const char* kind_name(GraphKind k) { return k == GraphKind::kSingleScc ? "single-scc" : "structured"; }

inline GraphKind parse_kind(std::string_view s) {
  if (s == "single-scc") return GraphKind::kSingleScc;
  if (s == "structured") return GraphKind::kStructured;
  throw InputError("unknown graph kind '" + std::string(s) + "'");
}

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

template <typename T>
T parse_number(std::string_view s, const char* column) {
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw InputError(std::string("bad value '") + std::string(s) + "' in column " + column);
  }
  return v;
}

}  // namespace detail

inline std::string to_csv_row(const BenchRecord& r) {
  if (r.suite.find_first_of(",\n\"") != std::string::npos) throw InputError("suite name must not contain , or quotes");
  using detail::format_double;
  std::string out = r.suite;
  out += ',' + std::to_string(r.seed);
  out += ',' + std::string(kind_name(r.kind));
  out += ',' + std::to_string(r.n);
  out += ',' + std::to_string(r.scc_size);
  out += ',' + std::to_string(r.scc_count);
  out += ',' + format_double(r.degree);
  out += ',' + std::to_string(r.u);
  out += ',' + format_double(r.elapsed_ms);
  out += ',' + (r.class_size ? std::to_string(*r.class_size) : std::string());
  out += r.timeout ? ",1" : ",0";
  out += ',' + (r.cost ? format_double(*r.cost) : std::string());
  out += ',' + (r.omission ? format_double(*r.omission) : std::string());
  out += ',' + (r.commission ? format_double(*r.commission) : std::string());
  return out;
}

inline std::string to_csv(const std::vector<BenchRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) out += to_csv_row(r) + '\n';
  return out;
}

inline BenchRecord parse_csv_row(std::string_view line) {
  std::vector<std::string_view> f;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= line.size(); ++k) {
    if (k == line.size() || line[k] == ',') {
      f.push_back(line.substr(start, k - start));
      start = k + 1;
    }
  }
  if (f.size() != 14) throw InputError("expected 14 CSV fields, got " + std::to_string(f.size()));
  using detail::parse_number;
  BenchRecord r;
  r.suite = std::string(f[0]);
  r.seed = parse_number<std::uint64_t>(f[1], "seed");
  r.kind = parse_kind(f[2]);
  r.n = parse_number<std::size_t>(f[3], "n");
  r.scc_size = parse_number<std::size_t>(f[4], "scc_size");
  r.scc_count = parse_number<std::size_t>(f[5], "scc_count");
  r.degree = parse_number<double>(f[6], "degree");
  r.u = parse_number<int>(f[7], "u");
  r.elapsed_ms = parse_number<double>(f[8], "elapsed_ms");
  if (!f[9].empty()) r.class_size = parse_number<std::size_t>(f[9], "class_size");
  if (f[10] != "0" && f[10] != "1") throw InputError("timeout must be 0 or 1");
  r.timeout = f[10] == "1";
  if (!f[11].empty()) r.cost = parse_number<double>(f[11], "cost");
  if (!f[12].empty()) r.omission = parse_number<double>(f[12], "omission");
  if (!f[13].empty()) r.commission = parse_number<double>(f[13], "commission");
  return r;
}

inline std::vector<BenchRecord> parse_csv(std::string_view text) {
  std::vector<BenchRecord> out;
  bool header = true;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != kCsvHeader) throw InputError("unexpected CSV header");
      header = false;
      continue;
    }
    out.push_back(parse_csv_row(line));
  }
  if (header) throw InputError("missing CSV header");
  return out;
}

enum class BenchMode {
  kSolve,
  /// Remove one edge of H, then record optimize and refine as two runs.
  kBreakOne,
};

struct SuiteSpec {
  std::string name;
  GraphKind kind = GraphKind::kSingleScc;
  /// Swept value: n for single-scc, SCC count for structured.
  std::vector<std::size_t> sizes;
  std::size_t scc_size = 4;
  double degree = 1.4;
  std::vector<int> rates;
  /// The same seeds are used at every size.
  std::vector<std::uint64_t> seeds;
  int maxu = 20;
  std::chrono::milliseconds time_limit{std::chrono::minutes(10)};
  /// Passes over the whole job list; each run keeps its fastest time.
  /// Passes are interleaved so a slow stretch of the machine hits every size.
  int repeats = 1;
  BenchMode mode = BenchMode::kSolve;

  std::size_t run_count() const {
    return sizes.size() * rates.size() * seeds.size() * (mode == BenchMode::kBreakOne ? 2 : 1);
  }
};

inline std::vector<std::uint64_t> seed_range(std::uint64_t count) {
  std::vector<std::uint64_t> s(count);
  for (std::uint64_t k = 0; k < count; ++k) s[k] = k;
  return s;
}

/// Predefined desk-scale suites.
inline SuiteSpec suite_by_name(const std::string& name) {
  SuiteSpec s;
  s.name = name;
  if (name == "fig4-desk") {
    // Fixed SCC size, growing SCC count.
    s.kind = GraphKind::kStructured;
    s.sizes = {1, 2, 3, 4, 5, 6};
    s.scc_size = 4;
    s.rates = {2};
    s.seeds = seed_range(10);
    s.repeats = 30;
  } else if (name == "fig2-desk") {
    // Single SCC of growing size.
    s.kind = GraphKind::kSingleScc;
    s.sizes = {3, 4, 5, 6};
    s.rates = {2, 3, 4};
    s.seeds = seed_range(5);
  } else if (name == "fig5-desk") {
    // One broken edge, plain vs refined optimization.
    s.kind = GraphKind::kSingleScc;
    s.sizes = {4, 5};
    s.rates = {2, 3};
    s.seeds = seed_range(5);
    s.mode = BenchMode::kBreakOne;
  } else {
    throw InputError("unknown suite '" + name + "' (known: fig2-desk, fig4-desk, fig5-desk)");
  }
  return s;
}

namespace detail {

struct BenchJob {
  std::size_t size;
  int u;
  std::uint64_t seed;
};

inline GenConfig bench_gen_config(const SuiteSpec& s, const BenchJob& job) {
  GenConfig gc;
  gc.kind = s.kind;
  gc.avg_out_degree = s.degree;
  gc.seed = job.seed;
  if (s.kind == GraphKind::kSingleScc) {
    gc.n = job.size;
  } else {
    gc.scc_count = job.size;
    gc.scc_size = s.scc_size;
  }
  return gc;
}

inline BenchRecord bench_base(const SuiteSpec& s, const GenConfig& gc, int u) {
  BenchRecord r;
  r.suite = s.name;
  r.seed = gc.seed;
  r.kind = gc.kind;
  r.n = gc.node_count();
  r.scc_size = gc.block_size();
  r.scc_count = gc.kind == GraphKind::kSingleScc ? 1 : gc.scc_count;
  r.degree = gc.avg_out_degree;
  r.u = u;
  return r;
}

inline std::vector<BenchRecord> run_job(const SuiteSpec& s, const BenchJob& job) {
  const GenConfig gc = bench_gen_config(s, job);
  const DirectedGraph g = generate(gc);
  const MixedGraph h = undersample(g, job.u);
  SolveConfig cfg;
  cfg.maxu = s.maxu;
  cfg.time_limit = s.time_limit;

  if (s.mode == BenchMode::kSolve) {
    BenchRecord r = bench_base(s, gc, job.u);
    const EquivalenceClass cls = solve(h, cfg);
    r.elapsed_ms = cls.stats.elapsed_ms;
    r.timeout = cls.stats.timed_out;
    if (!r.timeout) r.class_size = cls.size();
    return {r};
  }

  SplitMix64 rng(job.seed);
  const WeightedHypothesis w(break_edges(h, 1, rng.split(0xB2EA)()));
  const auto start = std::chrono::steady_clock::now();
  const Optimum opt = optimize(w, cfg);
  const double opt_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  const EquivalenceClass cls = solve(undersample(opt.graph, opt.rate), cfg);
  const double refine_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  BenchRecord plain = bench_base(s, gc, job.u);
  plain.suite += "/optimize";
  plain.elapsed_ms = opt_ms;
  plain.timeout = opt.stats.timed_out;
  plain.class_size = 1;
  plain.cost = opt.cost;
  const EdgeErrors pe = edge_errors(g, opt.graph);
  plain.omission = pe.omission;
  plain.commission = pe.commission;

  BenchRecord refined = bench_base(s, gc, job.u);
  refined.suite += "/refine";
  refined.elapsed_ms = refine_ms;
  refined.timeout = opt.stats.timed_out || cls.stats.timed_out;
  refined.cost = opt.cost;
  if (!refined.timeout) {
    refined.class_size = cls.size();
    const EdgeErrors re = best_errors(g, cls);
    refined.omission = re.omission;
    refined.commission = re.commission;
  }
  if (plain.timeout) plain.class_size.reset();
  return {plain, refined};
}

}  // namespace detail

/// Runs every (size, rate, seed) job of the suite, `threads` at a time.
/// Records come back in job order regardless of thread count.
inline std::vector<BenchRecord> run_benchmark(const SuiteSpec& s, unsigned threads = 1) {
  if (s.sizes.empty() || s.rates.empty() || s.seeds.empty()) throw InputError("suite has no runs");
  std::vector<detail::BenchJob> jobs;
  for (std::size_t size : s.sizes) {
    for (int u : s.rates) {
      for (std::uint64_t seed : s.seeds) jobs.push_back({size, u, seed});
    }
  }
  std::vector<std::vector<BenchRecord>> results(jobs.size());
  const int passes = s.mode == BenchMode::kSolve ? std::max(1, s.repeats) : 1;
  for (int pass = 0; pass < passes; ++pass) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next++; k < jobs.size(); k = next++) {
        if (pass == 0) {
          results[k] = detail::run_job(s, jobs[k]);
          continue;
        }
        // A run that timed out once is not retried.
        if (results[k].front().timeout) continue;
        const auto again = detail::run_job(s, jobs[k]);
        for (std::size_t i = 0; i < again.size(); ++i) {
          auto& r = results[k][i];
          if (again[i].timeout) continue;
          r.elapsed_ms = std::min(r.elapsed_ms, again[i].elapsed_ms);
        }
      }
    };
    if (threads <= 1) {
      worker();
    } else {
      std::vector<std::future<void>> pool;
      for (unsigned t = 0; t < threads; ++t) pool.push_back(std::async(std::launch::async, worker));
      for (auto& f : pool) f.get();
    }
  }
  std::vector<BenchRecord> out;
  for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
  return out;
}

/// The swept quantity of a record: SCC count for structured graphs, else n.
inline std::size_t sweep_value(const BenchRecord& r) {
  return r.kind == GraphKind::kStructured ? r.scc_count : r.n;
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw InputError("median of nothing");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

/// Median elapsed time per (u, sweep value).
inline std::map<int, std::map<std::size_t, double>> median_elapsed(const std::vector<BenchRecord>& records) {
  std::map<int, std::map<std::size_t, std::vector<double>>> groups;
  for (const auto& r : records) groups[r.u][sweep_value(r)].push_back(r.elapsed_ms);
  std::map<int, std::map<std::size_t, double>> out;
  for (auto& [u, by_size] : groups) {
    for (auto& [size, times] : by_size) out[u][size] = median(std::move(times));
  }
  return out;
}

/// Scatter of elapsed time against the sweep variable, one colour per rate,
/// with the per-rate medians joined by a line.
inline std::string render_svg(const std::vector<BenchRecord>& records, const std::string& title) {
  constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 120, kTop = 40, kBottom = 50;
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::size_t xmin = 0, xmax = 1;
  double ymax = 0;
  bool first = true;
  for (const auto& r : records) {
    const std::size_t x = sweep_value(r);
    xmin = first ? x : std::min(xmin, x);
    xmax = first ? x : std::max(xmax, x);
    ymax = std::max(ymax, r.elapsed_ms);
    first = false;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax <= 0) ymax = 1;
  const double plot_w = kW - kLeft - kRight;
  const double plot_h = kH - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - static_cast<double>(xmin)) / static_cast<double>(xmax - xmin) * plot_w; };
  auto py = [&](double y) { return kTop + plot_h - y / ymax * plot_h; };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return std::string(buf);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"black\"/>\n";
  for (std::size_t x = xmin; x <= xmax; ++x) {
    svg << "<text x=\"" << num(px(static_cast<double>(x))) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\">" << x << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double y = ymax * k / 4.0;
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\">" << num(y)
        << "</text>\n";
  }
  const bool structured = !records.empty() && records.front().kind == GraphKind::kStructured;
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\">"
      << (structured ? "number of SCCs" : "nodes") << "</text>\n";
  svg << "<text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kTop + plot_h / 2 << ")\">elapsed ms</text>\n";

  const auto medians = median_elapsed(records);
  std::size_t series = 0;
  for (const auto& [u, by_size] : medians) {
    const char* color = kColors[series % std::size(kColors)];
    for (const auto& r : records) {
      if (r.u != u) continue;
      svg << "<circle cx=\"" << num(px(static_cast<double>(sweep_value(r)))) << "\" cy=\"" << num(py(r.elapsed_ms))
          << "\" r=\"3\" fill=\"" << color << "\" fill-opacity=\"0.5\"" << (r.timeout ? " stroke=\"black\"" : "")
          << "/>\n";
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [size, med] : by_size) svg << num(px(static_cast<double>(size))) << ',' << num(py(med)) << ' ';
    svg << "\"/>\n";
    const double ly = kTop + 16.0 * static_cast<double>(series);
    svg << "<rect x=\"" << kW - kRight + 15 << "\" y=\"" << ly << "\" width=\"10\" height=\"10\" fill=\"" << color
        << "\"/>\n";
    svg << "<text x=\"" << kW - kRight + 30 << "\" y=\"" << ly + 9 << "\">u = " << u << "</text>\n";
    ++series;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace tscl
