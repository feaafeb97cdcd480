#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tscl/bit_matrix.hpp"

namespace tscl {

/// Raised for contract violations on caller-supplied data (size mismatches,
/// malformed files, out-of-range parameters).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Edge = std::pair<std::size_t, std::size_t>;

// Nodes are 0-based in the API; file formats and printed output use 1..n.

/// Causal-timescale graph: one directed relation over n nodes, self-loops allowed.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  explicit DirectedGraph(std::size_t n) : adj_(n) {
    if (n == 0) throw InputError("graph must have at least one node");
  }

  explicit DirectedGraph(BitMatrix adj) : adj_(std::move(adj)) {
    if (adj_.size() == 0) throw InputError("graph must have at least one node");
  }

  DirectedGraph(std::size_t n, const std::vector<Edge>& edges) : DirectedGraph(n) {
    for (auto [i, j] : edges) add_edge(i, j);
  }

  std::size_t size() const noexcept { return adj_.size(); }
  const BitMatrix& adj() const noexcept { return adj_; }

  bool has_edge(std::size_t i, std::size_t j) const noexcept { return adj_.test(i, j); }

  void add_edge(std::size_t i, std::size_t j) {
    check_node(i);
    check_node(j);
    adj_.set(i, j);
  }

  void remove_edge(std::size_t i, std::size_t j) {
    check_node(i);
    check_node(j);
    adj_.reset(i, j);
  }

  std::size_t edge_count() const noexcept { return adj_.count(); }

  /// Row-major list of present edges.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    adj_.for_each([&](std::size_t i, std::size_t j) { out.emplace_back(i, j); });
    return out;
  }

  friend bool operator==(const DirectedGraph&, const DirectedGraph&) = default;

 private:
  void check_node(std::size_t v) const {
    if (v >= size()) throw InputError("node " + std::to_string(v + 1) + " out of range 1.." + std::to_string(size()));
  }

  BitMatrix adj_;
};

/// Measurement-timescale graph: directed part (self-loops allowed) plus a
/// symmetric, irreflexive bidirected part.
class MixedGraph {
 public:
  MixedGraph() = default;

  explicit MixedGraph(std::size_t n) : dir_(n), bi_(n) {
    if (n == 0) throw InputError("graph must have at least one node");
  }

  /// `bi` must already be symmetric with an empty diagonal.
  MixedGraph(BitMatrix dir, BitMatrix bi) : dir_(std::move(dir)), bi_(std::move(bi)) {
    if (dir_.size() == 0) throw InputError("graph must have at least one node");
    if (dir_.size() != bi_.size()) throw InputError("directed and bidirected parts differ in size");
    for (std::size_t i = 0; i < bi_.size(); ++i) {
      if (bi_.test(i, i)) throw InputError("bidirected self-loop on node " + std::to_string(i + 1));
      for (std::size_t j = i + 1; j < bi_.size(); ++j) {
        if (bi_.test(i, j) != bi_.test(j, i)) throw InputError("bidirected part is not symmetric");
      }
    }
  }

  MixedGraph(std::size_t n, const std::vector<Edge>& directed, const std::vector<Edge>& bidirected) : MixedGraph(n) {
    for (auto [i, j] : directed) add_directed(i, j);
    for (auto [i, j] : bidirected) add_bidirected(i, j);
  }

  /// H with only the directed edges of g.
  static MixedGraph from_directed(const DirectedGraph& g) { return MixedGraph(g.adj(), BitMatrix(g.size())); }

  std::size_t size() const noexcept { return dir_.size(); }
  const BitMatrix& dir() const noexcept { return dir_; }
  const BitMatrix& bi() const noexcept { return bi_; }

  bool has_directed(std::size_t i, std::size_t j) const noexcept { return dir_.test(i, j); }
  bool has_bidirected(std::size_t i, std::size_t j) const noexcept { return bi_.test(i, j); }

  void add_directed(std::size_t i, std::size_t j) {
    check_node(i);
    check_node(j);
    dir_.set(i, j);
  }

  void remove_directed(std::size_t i, std::size_t j) {
    check_node(i);
    check_node(j);
    dir_.reset(i, j);
  }

  void add_bidirected(std::size_t i, std::size_t j) {
    check_node(i);
    check_node(j);
    if (i == j) throw InputError("bidirected self-loop on node " + std::to_string(i + 1));
    bi_.set(i, j);
    bi_.set(j, i);
  }

  void remove_bidirected(std::size_t i, std::size_t j) {
    check_node(i);
    check_node(j);
    bi_.reset(i, j);
    bi_.reset(j, i);
  }

  std::vector<Edge> directed_edges() const {
    std::vector<Edge> out;
    dir_.for_each([&](std::size_t i, std::size_t j) { out.emplace_back(i, j); });
    return out;
  }

  /// Unordered pairs as (i, j) with i < j, lexicographic.
  std::vector<Edge> bidirected_edges() const {
    std::vector<Edge> out;
    bi_.for_each([&](std::size_t i, std::size_t j) {
      if (i < j) out.emplace_back(i, j);
    });
    return out;
  }

  std::size_t directed_count() const noexcept { return dir_.count(); }
  std::size_t bidirected_count() const noexcept { return bi_.count() / 2; }
  std::size_t edge_count() const noexcept { return directed_count() + bidirected_count(); }

  friend bool operator==(const MixedGraph&, const MixedGraph&) = default;

 private:
  void check_node(std::size_t v) const {
    if (v >= size()) throw InputError("node " + std::to_string(v + 1) + " out of range 1.." + std::to_string(size()));
  }

  BitMatrix dir_;
  BitMatrix bi_;
};

/// Adds to `bi` every pair (x, y) that shares a source row in `reach`:
/// bi(x, y) |= reach(z, x) && reach(z, y) for some z. Diagonal is left as is.
inline void accumulate_common_causes(const BitMatrix& reach, BitMatrix& bi) {
  for (std::size_t z = 0; z < reach.size(); ++z) {
    const auto src = reach.row(z);
    reach.for_each_in_row(z, [&](std::size_t x) { or_row(bi.row(x), src); });
  }
}

/// G^u of g: dir(i, j) iff a walk of length exactly u runs from i to j;
/// bi{x, y} iff x != y and some z reaches both x and y by walks of a common
/// length L with 1 <= L < u.
inline MixedGraph undersample(const DirectedGraph& g, int u) {
  if (u < 1) throw InputError("undersampling rate must be >= 1, got " + std::to_string(u));
  const std::size_t n = g.size();
  BitMatrix power = g.adj();
  BitMatrix bi(n);
  BitMatrix next(n);
  for (int level = 1; level < u; ++level) {
    accumulate_common_causes(power, bi);
    multiply(power, g.adj(), next);
    std::swap(power, next);
  }
  bi.clear_diagonal();
  return MixedGraph(std::move(power), std::move(bi));
}

/// a.dir ⊆ b.dir and a.bi ⊆ b.bi.
inline bool is_edge_subset(const MixedGraph& a, const MixedGraph& b) {
  if (a.size() != b.size()) {
    throw InputError("edge-subset test on graphs of different size (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  return a.dir().is_subset_of(b.dir()) && a.bi().is_subset_of(b.bi());
}

inline bool graphs_equal(const MixedGraph& a, const MixedGraph& b) noexcept { return a == b; }

/// Row-major packing of the adjacency bits, MSB first within each byte.
/// Byte-wise lexicographic order of keys is the order used for output.
inline std::string canonical_key(const DirectedGraph& g) {
  const std::size_t n = g.size();
  const std::size_t bits = n * n;
  std::string key((bits + 7) / 8, '\0');
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!g.has_edge(i, j)) continue;
      const std::size_t k = i * n + j;
      key[k / 8] = static_cast<char>(static_cast<unsigned char>(key[k / 8]) | (0x80U >> (k % 8)));
    }
  }
  return key;
}

inline DirectedGraph graph_from_key(std::size_t n, const std::string& key) {
  if (key.size() != (n * n + 7) / 8) throw InputError("canonical key length does not match node count");
  DirectedGraph g(n);
  for (std::size_t k = 0; k < n * n; ++k) {
    if (static_cast<unsigned char>(key[k / 8]) & (0x80U >> (k % 8))) g.add_edge(k / n, k % n);
  }
  return g;
}

}  // namespace tscl
