#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <tuple>
#include <utility>
#include <vector>

#include "tscl/graph.hpp"
#include "tscl/optimizer.hpp"

// GraphFile text format, one item per line:
//
//   # comment
//   nodes 3
//   1 -> 2          directed edge (i -> i allowed)
//   1 <-> 3         bidirected edge (either order on read, i < j on write)
//   1 -> 2 @ 0.5    presence weight
//   2 -/> 1 @ 2     absence weight of a directed pair
//   2 </> 3 @ 2     absence weight of a bidirected pair
//
// Node ids run 1..n. Unlisted weights are 1.

namespace tscl {

class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

enum class EdgeForm { kDirected, kBidirected, kNoDirected, kNoBidirected };

struct EdgeLine {
  std::size_t line;
  EdgeForm form;
  std::size_t i, j;  // 0-based
  bool weighted;
  double weight;
};

struct GraphText {
  std::size_t n = 0;
  std::vector<EdgeLine> edges;
};

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t k = 0;
  while (k < s.size()) {
    while (k < s.size() && (s[k] == ' ' || s[k] == '\t')) ++k;
    const std::size_t start = k;
    while (k < s.size() && s[k] != ' ' && s[k] != '\t') ++k;
    if (k > start) out.push_back(s.substr(start, k - start));
  }
  return out;
}

inline std::size_t parse_count(std::string_view tok, std::size_t line, const char* what) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size()) {
    throw ParseError(line, std::string("expected ") + what + ", got '" + std::string(tok) + "'");
  }
  return v;
}

inline double parse_weight(std::string_view tok, std::size_t line) {
  double v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError(line, "expected a weight, got '" + std::string(tok) + "'");
  }
  if (v < 0) throw ParseError(line, "weight must be non-negative");
  return v;
}

inline GraphText lex(std::string_view text) {
  GraphText g;
  std::set<std::tuple<int, std::size_t, std::size_t>> seen;  // (directed?, i, j)
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;

    if (tok[0] == "nodes") {
      if (g.n != 0) throw ParseError(line_no, "second 'nodes' line");
      if (tok.size() != 2) throw ParseError(line_no, "expected 'nodes <n>'");
      g.n = parse_count(tok[1], line_no, "a node count");
      if (g.n == 0) throw ParseError(line_no, "node count must be >= 1");
      continue;
    }
    if (tok.size() != 3 && tok.size() != 5) throw ParseError(line_no, "expected '<i> <arrow> <j> [@ <w>]'");
    if (g.n == 0) throw ParseError(line_no, "edge before the 'nodes' line");

    EdgeLine e{line_no, EdgeForm::kDirected, 0, 0, false, 1.0};
    if (tok[1] == "->") {
      e.form = EdgeForm::kDirected;
    } else if (tok[1] == "<->") {
      e.form = EdgeForm::kBidirected;
    } else if (tok[1] == "-/>") {
      e.form = EdgeForm::kNoDirected;
    } else if (tok[1] == "</>") {
      e.form = EdgeForm::kNoBidirected;
    } else {
      throw ParseError(line_no, "unknown edge marker '" + std::string(tok[1]) + "'");
    }
    const std::size_t a = parse_count(tok[0], line_no, "a node id");
    const std::size_t b = parse_count(tok[2], line_no, "a node id");
    for (std::size_t v : {a, b}) {
      if (v < 1 || v > g.n) {
        throw ParseError(line_no, "node " + std::to_string(v) + " outside 1.." + std::to_string(g.n));
      }
    }
    e.i = a - 1;
    e.j = b - 1;
    if (tok.size() == 5) {
      if (tok[3] != "@") throw ParseError(line_no, "expected '@' before the weight");
      e.weighted = true;
      e.weight = parse_weight(tok[4], line_no);
    }
    const bool bidirected = e.form == EdgeForm::kBidirected || e.form == EdgeForm::kNoBidirected;
    if (bidirected) {
      if (e.i == e.j) throw ParseError(line_no, "bidirected self-pair");
      if (e.i > e.j) std::swap(e.i, e.j);
    }
    if ((e.form == EdgeForm::kNoDirected || e.form == EdgeForm::kNoBidirected) && !e.weighted) {
      throw ParseError(line_no, "absence lines need a weight");
    }
    if (!seen.emplace(bidirected ? 0 : 1, e.i, e.j).second) {
      throw ParseError(line_no, "pair " + std::to_string(e.i + 1) + (bidirected ? " <-> " : " -> ") +
                                    std::to_string(e.j + 1) + " listed twice");
    }
    g.edges.push_back(e);
  }
  if (g.n == 0) throw ParseError(line_no == 0 ? 1 : line_no, "missing 'nodes' line");
  return g;
}

inline void reject_weights(const GraphText& g, const char* what) {
  for (const auto& e : g.edges) {
    if (e.weighted || e.form == EdgeForm::kNoDirected || e.form == EdgeForm::kNoBidirected) {
      throw ParseError(e.line, std::string("weights are not accepted in ") + what);
    }
  }
}

inline void append_weight(std::string& out, double w) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, w);
  out.append(" @ ").append(buf, p);
}

inline void append_pair(std::string& out, std::size_t i, const char* arrow, std::size_t j) {
  out.append(std::to_string(i + 1)).append(" ").append(arrow).append(" ").append(std::to_string(j + 1));
}

}  // namespace detail

inline DirectedGraph parse_directed(std::string_view text) {
  const auto g = detail::lex(text);
  detail::reject_weights(g, "a directed graph file");
  DirectedGraph out(g.n);
  for (const auto& e : g.edges) {
    if (e.form != detail::EdgeForm::kDirected) throw ParseError(e.line, "bidirected edge in a directed graph file");
    out.add_edge(e.i, e.j);
  }
  return out;
}

inline MixedGraph parse_mixed(std::string_view text) {
  const auto g = detail::lex(text);
  detail::reject_weights(g, "a graph file (use the weighted form for optimize)");
  MixedGraph out(g.n);
  for (const auto& e : g.edges) {
    if (e.form == detail::EdgeForm::kDirected) {
      out.add_directed(e.i, e.j);
    } else {
      out.add_bidirected(e.i, e.j);
    }
  }
  return out;
}

inline WeightedHypothesis parse_weighted(std::string_view text) {
  const auto g = detail::lex(text);
  MixedGraph base(g.n);
  for (const auto& e : g.edges) {
    if (e.form == detail::EdgeForm::kDirected) base.add_directed(e.i, e.j);
    if (e.form == detail::EdgeForm::kBidirected) base.add_bidirected(e.i, e.j);
  }
  WeightedHypothesis w(std::move(base));
  for (const auto& e : g.edges) {
    if (!e.weighted) continue;
    if (e.form == detail::EdgeForm::kDirected || e.form == detail::EdgeForm::kNoDirected) {
      w.set_dir_weight(e.i, e.j, e.weight);
    } else {
      w.set_bi_weight(e.i, e.j, e.weight);
    }
  }
  return w;
}

inline std::string write_graph(const DirectedGraph& g) {
  std::string out = "nodes " + std::to_string(g.size()) + "\n";
  for (auto [i, j] : g.edges()) {
    detail::append_pair(out, i, "->", j);
    out += '\n';
  }
  return out;
}

inline std::string write_graph(const MixedGraph& h) {
  std::string out = "nodes " + std::to_string(h.size()) + "\n";
  for (auto [i, j] : h.directed_edges()) {
    detail::append_pair(out, i, "->", j);
    out += '\n';
  }
  for (auto [i, j] : h.bidirected_edges()) {
    detail::append_pair(out, i, "<->", j);
    out += '\n';
  }
  return out;
}

/// Canonical form: presence lines (directed, then bidirected), then absence
/// lines; weights equal to 1 are left implicit.
inline std::string write_graph(const WeightedHypothesis& w) {
  const MixedGraph& h = w.base();
  const std::size_t n = h.size();
  std::string out = "nodes " + std::to_string(n) + "\n";
  auto emit = [&](std::size_t i, const char* arrow, std::size_t j, double weight, bool always) {
    if (!always && weight == 1.0) return;
    detail::append_pair(out, i, arrow, j);
    if (weight != 1.0) detail::append_weight(out, weight);
    out += '\n';
  };
  for (auto [i, j] : h.directed_edges()) emit(i, "->", j, w.dir_weight(i, j), true);
  for (auto [i, j] : h.bidirected_edges()) emit(i, "<->", j, w.bi_weight(i, j), true);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!h.has_directed(i, j)) emit(i, "-/>", j, w.dir_weight(i, j), false);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!h.has_bidirected(i, j)) emit(i, "</>", j, w.bi_weight(i, j), false);
    }
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << content;
  if (!out) throw InputError("write to '" + path + "' failed");
}

}  // namespace tscl
