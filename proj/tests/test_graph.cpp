#include <gtest/gtest.h>

#include "support.hpp"
#include "tscl/bit_matrix.hpp"
#include "tscl/graph.hpp"
#include "tscl/oracle.hpp"
#include "tscl/scc.hpp"

using namespace tscl;

namespace {

DirectedGraph dg(std::size_t n, std::vector<Edge> e) { return DirectedGraph(n, e); }
MixedGraph mg(std::size_t n, std::vector<Edge> d, std::vector<Edge> b = {}) { return MixedGraph(n, d, b); }

}  // namespace

TEST(BitMatrix, SetTestCount) {
  BitMatrix m(70);
  m.set(0, 69);
  m.set(69, 0);
  m.set(33, 64);
  EXPECT_TRUE(m.test(0, 69));
  EXPECT_FALSE(m.test(69, 69));
  EXPECT_EQ(m.count(), 3u);
  m.reset(0, 69);
  EXPECT_EQ(m.count(), 2u);
}

TEST(BitMatrix, FillKeepsPaddingClear) {
  BitMatrix m(67);
  m.fill();
  EXPECT_EQ(m.count(), 67u * 67u);
}

TEST(BitMatrix, MultiplyMatchesNaive) {
  SplitMix64 rng(3);
  for (std::size_t n : {1u, 5u, 64u, 65u, 130u}) {
    BitMatrix a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        a.set(i, j, rng.bernoulli(0.1));
        b.set(i, j, rng.bernoulli(0.1));
      }
    }
    const BitMatrix c = multiply(a, b);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        bool v = false;
        for (std::size_t k = 0; k < n && !v; ++k) v = a.test(i, k) && b.test(k, j);
        ASSERT_EQ(c.test(i, j), v) << n << " " << i << " " << j;
      }
    }
  }
}

TEST(Undersample, RateOneIsIdentity) {
  const auto g = dg(2, {{0, 1}, {1, 0}});
  EXPECT_EQ(undersample(g, 1), mg(2, {{0, 1}, {1, 0}}));
}

TEST(Undersample, TwoCycleAtRateTwo) {
  EXPECT_EQ(undersample(dg(2, {{0, 1}, {1, 0}}), 2), mg(2, {{0, 0}, {1, 1}}));
}

TEST(Undersample, ForkWithSelfLoop) {
  const auto g = dg(3, {{0, 0}, {0, 1}, {0, 2}});
  EXPECT_EQ(undersample(g, 2), mg(3, {{0, 0}, {0, 1}, {0, 2}}, {{0, 1}, {0, 2}, {1, 2}}));
}

TEST(Undersample, RejectsBadRate) {
  EXPECT_THROW(undersample(DirectedGraph(2), 0), InputError);
}

TEST(Undersample, AgreesWithWalkEnumeration) {
  SplitMix64 rng(11);
  for (int k = 0; k < 300; ++k) {
    const std::size_t n = 1 + rng.below(7);
    const auto g = random_graph(n, 0.3, rng);
    const int u = 1 + static_cast<int>(rng.below(6));
    ASSERT_EQ(undersample(g, u), oracle::undersample_by_walks(g, u)) << k;
  }
}

TEST(Undersample, WideGraphs) {
  // Crosses the 64-bit word boundary: a directed cycle on 70 nodes.
  DirectedGraph g(70);
  for (std::size_t v = 0; v < 70; ++v) g.add_edge(v, (v + 1) % 70);
  const auto h = undersample(g, 3);
  EXPECT_EQ(h.directed_count(), 70u);
  for (std::size_t v = 0; v < 70; ++v) EXPECT_TRUE(h.has_directed(v, (v + 3) % 70));
  EXPECT_EQ(h.bidirected_count(), 0u);
}

TEST(EdgeSubset, Examples) {
  EXPECT_TRUE(is_edge_subset(mg(2, {{0, 1}}), mg(2, {{0, 1}, {1, 0}}, {{0, 1}})));
  const auto a = mg(2, {{0, 1}}, {{0, 1}});
  EXPECT_TRUE(is_edge_subset(a, a));
  EXPECT_FALSE(is_edge_subset(mg(2, {{0, 0}}), mg(2, {{0, 1}})));
  EXPECT_THROW(is_edge_subset(MixedGraph(2), MixedGraph(3)), InputError);
}

TEST(GraphsEqual, Examples) {
  const auto a = mg(3, {{0, 1}}, {{1, 2}});
  EXPECT_TRUE(graphs_equal(a, a));
  EXPECT_FALSE(graphs_equal(a, mg(3, {{0, 1}}, {{0, 2}})));
  EXPECT_FALSE(graphs_equal(MixedGraph(2), MixedGraph(3)));
}

TEST(MixedGraph, BidirectedIsSymmetricAndIrreflexive) {
  MixedGraph h(3);
  h.add_bidirected(2, 0);
  EXPECT_TRUE(h.has_bidirected(0, 2));
  EXPECT_TRUE(h.has_bidirected(2, 0));
  EXPECT_EQ(h.bidirected_count(), 1u);
  EXPECT_THROW(h.add_bidirected(1, 1), InputError);
  EXPECT_THROW(h.add_directed(0, 3), InputError);
}

TEST(CanonicalKey, Examples) {
  EXPECT_EQ(canonical_key(DirectedGraph(2)), std::string(1, '\0'));
  EXPECT_EQ(canonical_key(dg(1, {{0, 0}})), std::string(1, '\x80'));
  const auto g = dg(3, {{0, 2}, {2, 1}});
  EXPECT_EQ(canonical_key(g), canonical_key(g));
  EXPECT_EQ(graph_from_key(3, canonical_key(g)), g);
}

TEST(CanonicalKey, OrderIsRowMajor) {
  // 1->2 sets bit 1, 2->1 sets bit 2; the first set bit decides.
  EXPECT_GT(canonical_key(dg(2, {{0, 1}})), canonical_key(dg(2, {{1, 0}})));
}

TEST(Scc, Examples) {
  auto d = scc_decompose(dg(2, {{0, 1}, {1, 0}}));
  ASSERT_EQ(d.component_count(), 1u);
  EXPECT_EQ(d.period[0], 2u);

  d = scc_decompose(dg(2, {{0, 1}, {1, 0}, {0, 0}}));
  ASSERT_EQ(d.component_count(), 1u);
  EXPECT_EQ(d.period[0], 1u);

  d = scc_decompose(dg(3, {{0, 1}, {1, 2}, {2, 0}, {0, 2}}));
  ASSERT_EQ(d.component_count(), 1u);
  EXPECT_EQ(d.component_size(0), 3u);
  EXPECT_EQ(d.period[0], 1u);
}

TEST(Scc, AcyclicSingletonsAndTopologicalOrder) {
  const auto d = scc_decompose(dg(4, {{3, 2}, {2, 1}, {1, 0}}));
  ASSERT_EQ(d.component_count(), 4u);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_FALSE(d.is_cyclic(c));
  d.condensation.for_each([&](std::size_t a, std::size_t b) { EXPECT_LT(a, b); });
  EXPECT_LT(d.membership[3], d.membership[0]);
}

TEST(Scc, PeriodMatchesCycleGcd) {
  // Cycles 0-1-2-3 and 0-4-5-6-7-3: lengths 4 and 6, period 2.
  DirectedGraph g(8);
  for (std::size_t v : {0u, 1u, 2u}) g.add_edge(v, v + 1);
  g.add_edge(3, 0);
  g.add_edge(0, 4);
  for (std::size_t v : {4u, 5u, 6u}) g.add_edge(v, v + 1);
  g.add_edge(7, 3);
  const auto d = scc_decompose(g);
  ASSERT_EQ(d.component_count(), 1u);
  EXPECT_EQ(d.period[0], 2u);
}

TEST(Scc, ReachabilityIsTransitive) {
  const auto d = scc_decompose(dg(4, {{0, 1}, {1, 2}, {2, 3}}));
  const auto r = condensation_reachability(d);
  EXPECT_TRUE(r.test(d.membership[0], d.membership[3]));
  EXPECT_FALSE(r.test(d.membership[3], d.membership[0]));
}

TEST(Property, MonotoneUnderEdgeAddition) {
  SplitMix64 rng(21);
  for (int k = 0; k < 300; ++k) {
    const std::size_t n = 1 + rng.below(6);
    auto g = random_graph(n, 0.3, rng);
    const int u = 1 + static_cast<int>(rng.below(4));
    const auto before = undersample(g, u);
    g.add_edge(rng.below(n), rng.below(n));
    ASSERT_TRUE(is_edge_subset(before, undersample(g, u)));
  }
}
