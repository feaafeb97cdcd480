#include <gtest/gtest.h>

#include "support.hpp"
#include "tscl/oracle.hpp"
#include "tscl/solver.hpp"

using namespace tscl;

TEST(Oracle, SelfLoop) {
  const auto cls = oracle::brute_force_class(MixedGraph(1, {{0, 0}}, {}), 5);
  ASSERT_EQ(cls.size(), 1u);
  EXPECT_EQ(cls.entries[0].witnesses, (std::vector<int>{1, 2, 3, 4, 5}));
}

TEST(Oracle, TwoCycle) {
  const auto cls = oracle::brute_force_class(MixedGraph(2, {{0, 1}, {1, 0}}, {}), 6);
  ASSERT_EQ(cls.size(), 1u);
  EXPECT_EQ(cls.entries[0].graph, DirectedGraph(2, {{0, 1}, {1, 0}}));
  EXPECT_EQ(cls.entries[0].witnesses, (std::vector<int>{1, 3, 5}));
}

TEST(Oracle, SelfMembership) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto [g, u] = fixtures::oracle_instance(s);
    EXPECT_NE(oracle::brute_force_class(undersample(g, u), 3).find(g), nullptr);
  }
}

TEST(Oracle, SizeGuards) {
  EXPECT_THROW(oracle::brute_force_class(MixedGraph(6), 2), InputError);
  EXPECT_THROW(oracle::brute_force_class(MixedGraph(5), 2), InputError);
}

TEST(Sequence, EmptyGraphRepeatsAtTwo) {
  const auto seq = oracle::undersample_sequence(DirectedGraph(3), 10);
  EXPECT_EQ(seq.end, oracle::SequenceEnd::kRepeat);
  EXPECT_EQ(seq.graphs.size(), 2u);
  EXPECT_EQ(seq.repeat_of, 1);
}

TEST(Sequence, SelfLoopRepeatsAtTwo) {
  const auto seq = oracle::undersample_sequence(DirectedGraph(1, {{0, 0}}), 10);
  EXPECT_EQ(seq.graphs.size(), 2u);
  EXPECT_EQ(seq.repeat_of, 1);
}

TEST(Sequence, TwoCycleAlternates) {
  const auto seq = oracle::undersample_sequence(DirectedGraph(2, {{0, 1}, {1, 0}}), 10);
  ASSERT_EQ(seq.graphs.size(), 3u);
  EXPECT_EQ(seq.graphs[1].second, MixedGraph(2, {{0, 0}, {1, 1}}, {}));
  EXPECT_EQ(seq.graphs[2].first, 3);
  EXPECT_EQ(seq.repeat_of, 1);
}

TEST(Sequence, CapStops) {
  DirectedGraph g(5);
  for (std::size_t v = 0; v < 5; ++v) g.add_edge(v, (v + 1) % 5);
  const auto seq = oracle::undersample_sequence(g, 3);
  EXPECT_EQ(seq.end, oracle::SequenceEnd::kCap);
  EXPECT_EQ(seq.graphs.size(), 3u);
}
