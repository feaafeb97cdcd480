#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

#include "tscl/bit_matrix.hpp"
#include "tscl/graph.hpp"

namespace tscl {

struct SccDecomposition {
  /// membership[v] = index into `components`.
  std::vector<std::size_t> membership;
  /// Topologically ordered: every condensation edge (a, b) has a < b.
  std::vector<std::vector<std::size_t>> components;
  /// condensation(a, b) iff some node edge runs from component a to component b (a != b).
  BitMatrix condensation;
  /// gcd of cycle lengths inside each component; 0 for an acyclic singleton.
  std::vector<std::size_t> period;

  std::size_t component_count() const noexcept { return components.size(); }
  std::size_t component_size(std::size_t c) const noexcept { return components[c].size(); }
  bool is_cyclic(std::size_t c) const noexcept { return period[c] != 0; }
};

namespace detail {

// Iterative Tarjan. Emits components in reverse topological order.
inline std::vector<std::vector<std::size_t>> tarjan(const BitMatrix& adj) {
  const std::size_t n = adj.size();
  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> succ_cursor(n, 0);
  std::vector<std::vector<std::size_t>> succ(n);
  for (std::size_t v = 0; v < n; ++v) adj.for_each_in_row(v, [&](std::size_t w) { succ[v].push_back(w); });

  std::size_t counter = 0;
  std::vector<std::size_t> call;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back(root);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      const std::size_t v = call.back();
      if (succ_cursor[v] < succ[v].size()) {
        const std::size_t w = succ[v][succ_cursor[v]++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back(w);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      call.pop_back();
      if (!call.empty()) low[call.back()] = std::min(low[call.back()], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
    }
  }
  return out;
}

}  // namespace detail

/// Strongly connected components, condensation DAG and per-component period
/// of a directed relation. Linear in nodes + edges.
inline SccDecomposition scc_decompose(const BitMatrix& adj) {
  const std::size_t n = adj.size();
  SccDecomposition d;
  d.components = detail::tarjan(adj);
  std::reverse(d.components.begin(), d.components.end());
  d.membership.assign(n, 0);
  for (std::size_t c = 0; c < d.components.size(); ++c) {
    for (std::size_t v : d.components[c]) d.membership[v] = c;
  }
  const std::size_t k = d.components.size();
  d.condensation = BitMatrix(k);
  adj.for_each([&](std::size_t x, std::size_t y) {
    if (d.membership[x] != d.membership[y]) d.condensation.set(d.membership[x], d.membership[y]);
  });

  // Period: BFS levels from the first node, then gcd of level(x) + 1 - level(y)
  // over intra-component edges.
  d.period.assign(k, 0);
  std::vector<std::size_t> level(n, 0);
  std::vector<bool> seen(n, false);
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t root = d.components[c].front();
    std::queue<std::size_t> q;
    q.push(root);
    seen[root] = true;
    while (!q.empty()) {
      const std::size_t x = q.front();
      q.pop();
      adj.for_each_in_row(x, [&](std::size_t y) {
        if (d.membership[y] != c || seen[y]) return;
        seen[y] = true;
        level[y] = level[x] + 1;
        q.push(y);
      });
    }
    std::size_t g = 0;
    for (std::size_t x : d.components[c]) {
      adj.for_each_in_row(x, [&](std::size_t y) {
        if (d.membership[y] != c) return;
        const auto diff = static_cast<long long>(level[x]) + 1 - static_cast<long long>(level[y]);
        g = std::gcd(g, static_cast<std::size_t>(diff < 0 ? -diff : diff));
      });
    }
    d.period[c] = g;
  }
  return d;
}

inline SccDecomposition scc_decompose(const DirectedGraph& g) { return scc_decompose(g.adj()); }
inline SccDecomposition scc_decompose(const MixedGraph& h) { return scc_decompose(h.dir()); }

/// reach(a, b) iff component b is reachable from a in the condensation (a != b).
inline BitMatrix condensation_reachability(const SccDecomposition& d) {
  const std::size_t k = d.component_count();
  BitMatrix reach = d.condensation;
  // Components are topologically ordered; fold successors in reverse order.
  for (std::size_t a = k; a-- > 0;) {
    const auto row = reach.row(a);
    std::vector<BitMatrix::Word> acc(row.begin(), row.end());
    d.condensation.for_each_in_row(a, [&](std::size_t b) { or_row(acc, reach.row(b)); });
    std::copy(acc.begin(), acc.end(), reach.row(a).begin());
  }
  return reach;
}

}  // namespace tscl
