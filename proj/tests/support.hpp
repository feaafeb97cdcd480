#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tscl/generate.hpp"
#include "tscl/graph.hpp"
#include "tscl/optimizer.hpp"
#include "tscl/random.hpp"

namespace tscl::fixtures {

// Seeded corpora shared by unit and acceptance tests.

struct Instance {
  DirectedGraph g;
  int u;
};

/// Small random G1 with a rate; n in 2..4, u in 1..3.
inline Instance oracle_instance(std::uint64_t s) {
  SplitMix64 rng(1000 + s);
  const std::size_t n = 2 + rng.below(3);
  const int u = 1 + static_cast<int>(rng.below(3));
  return {random_graph(n, 0.4, rng), u};
}

inline std::vector<Instance> oracle_corpus(std::size_t count = 200) {
  std::vector<Instance> out;
  for (std::size_t s = 0; s < count; ++s) out.push_back(oracle_instance(s));
  return out;
}

inline MixedGraph random_mixed(std::size_t n, double p, SplitMix64& rng) {
  MixedGraph h(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (rng.bernoulli(p)) h.add_directed(i, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.bernoulli(p)) h.add_bidirected(i, j);
    }
  }
  return h;
}

/// Random H with integer weights in 0..5 on every pair.
inline WeightedHypothesis random_weighted(std::size_t n, SplitMix64& rng) {
  WeightedHypothesis w(random_mixed(n, 0.35, rng));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      w.set_dir_weight(i, j, static_cast<double>(rng.below(6)));
      if (i < j) w.set_bi_weight(i, j, static_cast<double>(rng.below(6)));
    }
  }
  return w;
}

/// Exhaustive argmin of discrepancy_cost; ties to smallest key, then rate.
struct BruteOptimum {
  double cost;
  std::string key;
  int rate;
  std::size_t ties;
};

inline BruteOptimum brute_optimum(const WeightedHypothesis& w, int maxu) {
  const std::size_t n = w.size();
  BruteOptimum best{0, "", 0, 0};
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n * n)); ++mask) {
    DirectedGraph g(n);
    for (std::size_t k = 0; k < n * n; ++k) {
      if (mask >> k & 1) g.add_edge(k / n, k % n);
    }
    const std::string key = canonical_key(g);
    for (int u = 1; u <= maxu; ++u) {
      const double c = discrepancy_cost(g, u, w);
      if (best.rate == 0 || c < best.cost) {
        best = {c, key, u, 1};
      } else if (c == best.cost) {
        ++best.ties;
        if (key < best.key || (key == best.key && u < best.rate)) {
          best.key = key;
          best.rate = u;
        }
      }
    }
  }
  return best;
}

}  // namespace tscl::fixtures
