#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tscl/graph.hpp"
#include "tscl/solver.hpp"

// Brute-force ground truth. Nothing here calls undersample() or the bit-matrix
// product; reachability is rebuilt by extending explicit walk frontiers edge
// by edge so the two implementations can check each other.

namespace tscl::oracle {

inline constexpr std::size_t kMaxNodes = 5;
inline constexpr std::size_t kLongRunningNodes = 5;

/// Undersampled graphs of one G1 for rates 1, 2, ... computed by walk extension.
class WalkUndersampler {
 public:
  explicit WalkUndersampler(const DirectedGraph& g) : n_(g.size()), edges_(g.edges()) {
    // frontier_[z][v]: a walk of the current length runs z -> v.
    frontier_.assign(n_, std::vector<char>(n_, 0));
    for (auto [a, b] : edges_) frontier_[a][b] = 1;
    common_.assign(n_, std::vector<char>(n_, 0));
  }

  int rate() const noexcept { return rate_; }

  /// The mixed graph at the current rate.
  MixedGraph current() const {
    MixedGraph out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (frontier_[i][j]) out.add_directed(i, j);
        if (i < j && common_[i][j]) out.add_bidirected(i, j);
      }
    }
    return out;
  }

  /// Moves from rate u to u + 1: walks at length u become common-cause
  /// evidence, then every walk is extended by one edge.
  void advance() {
    for (std::size_t z = 0; z < n_; ++z) {
      for (std::size_t x = 0; x < n_; ++x) {
        if (!frontier_[z][x]) continue;
        for (std::size_t y = x + 1; y < n_; ++y) {
          if (frontier_[z][y]) common_[x][y] = 1;
        }
      }
    }
    std::vector<std::vector<char>> next(n_, std::vector<char>(n_, 0));
    for (std::size_t z = 0; z < n_; ++z) {
      for (auto [a, b] : edges_) {
        if (frontier_[z][a]) next[z][b] = 1;
      }
    }
    frontier_ = std::move(next);
    ++rate_;
  }

  bool matches(const MixedGraph& h) const {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (static_cast<bool>(frontier_[i][j]) != h.has_directed(i, j)) return false;
        if (i < j && static_cast<bool>(common_[i][j]) != h.has_bidirected(i, j)) return false;
      }
    }
    return true;
  }

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<char>> frontier_;
  std::vector<std::vector<char>> common_;  // upper triangle only
  int rate_ = 1;
};

inline MixedGraph undersample_by_walks(const DirectedGraph& g, int u) {
  if (u < 1) throw InputError("undersampling rate must be >= 1");
  WalkUndersampler w(g);
  while (w.rate() < u) w.advance();
  return w.current();
}

/// All G1 on h.size() nodes matching h at some rate in [1, maxu], found by
/// enumerating every one of the 2^(n*n) graphs. n = 5 (33.5M graphs) needs
/// allow_long_running.
inline EquivalenceClass brute_force_class(const MixedGraph& h, int maxu, bool allow_long_running = false) {
  const std::size_t n = h.size();
  if (n > kMaxNodes) {
    throw InputError("brute-force oracle refuses n = " + std::to_string(n) + "; the bound is n <= " +
                     std::to_string(kMaxNodes));
  }
  if (n >= kLongRunningNodes && !allow_long_running) {
    throw InputError("brute-force oracle at n = " + std::to_string(n) +
                     " enumerates 2^25 graphs; pass the long-running flag to proceed");
  }
  if (maxu < 1) throw InputError("maxu must be >= 1");

  EquivalenceClass cls;
  cls.n = n;
  cls.maxu = maxu;
  const std::uint64_t total = std::uint64_t{1} << (n * n);
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    DirectedGraph g(n);
    for (std::size_t k = 0; k < n * n; ++k) {
      if ((mask >> k) & 1U) g.add_edge(k / n, k % n);
    }
    WalkUndersampler walker(g);
    std::vector<int> rates;
    for (int u = 1; u <= maxu; ++u) {
      if (u > 1) walker.advance();
      if (walker.matches(h)) rates.push_back(u);
    }
    ++cls.stats.branch_nodes;
    if (!rates.empty()) cls.entries.push_back({std::move(g), std::move(rates)});
  }
  std::sort(cls.entries.begin(), cls.entries.end(), [](const ClassEntry& a, const ClassEntry& b) {
    return canonical_key(a.graph) < canonical_key(b.graph);
  });
  return cls;
}

enum class SequenceEnd { kRepeat, kCap };

struct UndersampleSequence {
  std::vector<std::pair<int, MixedGraph>> graphs;  // (u, G^u) for u = 1, 2, ...
  SequenceEnd end = SequenceEnd::kCap;
  /// When end == kRepeat: the rate whose graph was repeated by the last entry.
  int repeat_of = 0;
};

/// G^1, G^2, ... stopping at the first graph equal to an earlier one
/// (included in the output) or after `cap` graphs.
inline UndersampleSequence undersample_sequence(const DirectedGraph& g, int cap) {
  if (cap < 1) throw InputError("sequence cap must be >= 1");
  UndersampleSequence seq;
  WalkUndersampler walker(g);
  for (int u = 1; u <= cap; ++u) {
    if (u > 1) walker.advance();
    MixedGraph cur = walker.current();
    for (const auto& [prev_u, prev] : seq.graphs) {
      if (prev == cur) {
        seq.end = SequenceEnd::kRepeat;
        seq.repeat_of = prev_u;  // before emplace_back invalidates the binding
        seq.graphs.emplace_back(u, std::move(cur));
        return seq;
      }
    }
    seq.graphs.emplace_back(u, std::move(cur));
  }
  seq.end = SequenceEnd::kCap;
  return seq;
}

}  // namespace tscl::oracle
