#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tscl/graph.hpp"
#include "tscl/random.hpp"
#include "tscl/scc.hpp"

namespace tscl {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GraphKind { kSingleScc, kStructured };

struct GenConfig {
  GraphKind kind = GraphKind::kSingleScc;
  std::size_t n = 8;            // single-scc
  std::size_t scc_count = 1;    // structured
  std::size_t scc_size = 4;     // structured
  double avg_out_degree = 1.4;  // within an SCC
  double dag_degree = 2.0;      // structured: expected out-degree of the block DAG
  int realizations_min = 1;     // structured: node edges per DAG edge, uniform in [min, max]
  int realizations_max = 3;
  std::uint64_t seed = 0;
  std::size_t max_attempts = 100000;

  std::size_t node_count() const noexcept { return kind == GraphKind::kSingleScc ? n : scc_count * scc_size; }
  std::size_t block_size() const noexcept { return kind == GraphKind::kSingleScc ? n : scc_size; }

  /// Edge probability per ordered pair inside a block.
  double density() const noexcept { return avg_out_degree / static_cast<double>(block_size()); }
  void set_density(double d) noexcept { avg_out_degree = d * static_cast<double>(block_size()); }

  void validate() const {
    if (block_size() == 0) throw InputError("block size must be >= 1");
    if (kind == GraphKind::kStructured && scc_count == 0) throw InputError("scc_count must be >= 1");
    if (!(avg_out_degree > 0)) throw InputError("average out-degree must be > 0");
    if (kind == GraphKind::kStructured && !(dag_degree > 0)) throw InputError("DAG degree must be > 0");
    if (realizations_min < 1 || realizations_max < realizations_min) {
      throw InputError("realizations range must satisfy 1 <= min <= max");
    }
    if (max_attempts == 0) throw InputError("max_attempts must be >= 1");
  }
};

/// Each ordered pair (self-loops included) independently with probability p.
inline DirectedGraph random_graph(std::size_t n, double p, SplitMix64& rng) {
  DirectedGraph g(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (rng.bernoulli(p)) g.add_edge(i, j);
    }
  }
  return g;
}

namespace detail {

inline DirectedGraph sample_scc_block(std::size_t n, double degree, std::size_t max_attempts, SplitMix64& rng) {
  const double p = degree / static_cast<double>(n);
  std::size_t not_connected = 0;
  std::size_t periodic = 0;
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    DirectedGraph g = random_graph(n, p, rng);
    const auto d = scc_decompose(g);
    if (d.component_count() != 1) {
      ++not_connected;
      continue;
    }
    if (d.period[0] != 1) {
      ++periodic;
      continue;
    }
    return g;
  }
  throw GenerationError("no single-SCC graph with period 1 after " + std::to_string(max_attempts) +
                        " attempts (n = " + std::to_string(n) + ", degree = " + std::to_string(degree) + "; " +
                        std::to_string(not_connected) + " not strongly connected, " + std::to_string(periodic) +
                        " with period > 1)");
}

}  // namespace detail

/// Rejection-sampled strongly connected graph with period 1.
inline DirectedGraph gen_single_scc(const GenConfig& cfg) {
  if (cfg.kind != GraphKind::kSingleScc) throw InputError("gen_single_scc needs kind = single-scc");
  cfg.validate();
  SplitMix64 rng(cfg.seed);
  return detail::sample_scc_block(cfg.n, cfg.avg_out_degree, cfg.max_attempts, rng);
}

/// scc_count period-1 blocks of scc_size nodes (block b on nodes
/// [b * scc_size, (b + 1) * scc_size)), joined along a random DAG whose edges
/// follow a random topological order of the blocks.
inline DirectedGraph gen_structured(const GenConfig& cfg) {
  if (cfg.kind != GraphKind::kStructured) throw InputError("gen_structured needs kind = structured");
  cfg.validate();
  const std::size_t k = cfg.scc_count;
  const std::size_t m = cfg.scc_size;
  SplitMix64 root(cfg.seed);
  DirectedGraph g(k * m);

  for (std::size_t b = 0; b < k; ++b) {
    SplitMix64 rng = root.split(b);
    const DirectedGraph block = detail::sample_scc_block(m, cfg.avg_out_degree, cfg.max_attempts, rng);
    for (auto [i, j] : block.edges()) g.add_edge(b * m + i, b * m + j);
  }

  SplitMix64 rng = root.split(k);
  std::vector<std::size_t> order(k);
  for (std::size_t b = 0; b < k; ++b) order[b] = b;
  shuffle(order.begin(), order.end(), rng);
  if (k < 2) return g;

  const double p = std::min(1.0, 2.0 * cfg.dag_degree / static_cast<double>(k - 1));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      if (!rng.bernoulli(p)) continue;
      const std::size_t src = order[a];
      const std::size_t dst = order[b];
      const auto r = rng.between(cfg.realizations_min, cfg.realizations_max);
      for (std::int64_t e = 0; e < r; ++e) {
        const std::size_t x = src * m + rng.below(m);
        const std::size_t y = dst * m + rng.below(m);
        g.add_edge(x, y);
      }
    }
  }
  return g;
}

inline DirectedGraph generate(const GenConfig& cfg) {
  return cfg.kind == GraphKind::kSingleScc ? gen_single_scc(cfg) : gen_structured(cfg);
}

/// Removes `count` edges chosen uniformly from the pooled directed and
/// bidirected edges of h.
inline MixedGraph break_edges(const MixedGraph& h, std::size_t count, std::uint64_t seed) {
  struct Slot {
    bool bidirected;
    Edge edge;
  };
  std::vector<Slot> pool;
  for (const auto& e : h.directed_edges()) pool.push_back({false, e});
  for (const auto& e : h.bidirected_edges()) pool.push_back({true, e});
  if (count > pool.size()) {
    throw InputError("cannot break " + std::to_string(count) + " edges; H has only " + std::to_string(pool.size()));
  }
  SplitMix64 rng(seed);
  shuffle(pool.begin(), pool.end(), rng);
  MixedGraph out = h;
  for (std::size_t k = 0; k < count; ++k) {
    const auto [i, j] = pool[k].edge;
    if (pool[k].bidirected) {
      out.remove_bidirected(i, j);
    } else {
      out.remove_directed(i, j);
    }
  }
  return out;
}

}  // namespace tscl
