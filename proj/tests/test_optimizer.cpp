#include <gtest/gtest.h>

#include "support.hpp"
#include "tscl/generate.hpp"
#include "tscl/optimizer.hpp"

using namespace tscl;

namespace {

SolveConfig with_maxu(int maxu) {
  SolveConfig c;
  c.maxu = maxu;
  return c;
}

}  // namespace

TEST(Cost, Examples) {
  const DirectedGraph g(3, {{0, 1}, {1, 2}, {2, 0}});
  WeightedHypothesis exact(undersample(g, 2));
  EXPECT_EQ(discrepancy_cost(g, 2, exact), 0.0);

  MixedGraph base = undersample(g, 2);
  const auto e = base.directed_edges().front();
  base.remove_directed(e.first, e.second);
  WeightedHypothesis broken(base);
  broken.set_dir_weight(e.first, e.second, 3);
  EXPECT_EQ(discrepancy_cost(g, 2, broken), 3.0);

  WeightedHypothesis loop(MixedGraph(1, {{0, 0}}, {}));
  EXPECT_EQ(discrepancy_cost(DirectedGraph(1), 1, loop), 1.0);
}

TEST(Weights, Validation) {
  WeightedHypothesis w(MixedGraph(2));
  EXPECT_THROW(w.set_dir_weight(0, 1, -1), InputError);
  EXPECT_THROW(w.set_dir_weight(0, 1, std::nan("")), InputError);
  EXPECT_THROW(w.set_bi_weight(1, 1, 2), InputError);
  EXPECT_THROW(w.set_dir_weight(0, 2, 2), InputError);
  w.set_bi_weight(1, 0, 4);
  EXPECT_EQ(w.bi_weight(0, 1), 4.0);
}

TEST(Optimize, ExactInstanceCostsZero) {
  const DirectedGraph g(3, {{0, 1}, {1, 2}, {2, 0}, {1, 1}});
  const MixedGraph h = undersample(g, 2);
  const auto opt = optimize(WeightedHypothesis(h), with_maxu(4));
  EXPECT_EQ(opt.cost, 0.0);
  EXPECT_NE(solve(h, with_maxu(4)).find(opt.graph), nullptr);
}

TEST(Optimize, EmptyBase) {
  const auto opt = optimize(WeightedHypothesis(MixedGraph(3)), with_maxu(4));
  EXPECT_EQ(opt.graph, DirectedGraph(3));
  EXPECT_EQ(opt.rate, 1);
  EXPECT_EQ(opt.cost, 0.0);
}

TEST(Optimize, MatchesExhaustiveSearch) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    SplitMix64 rng(300 + s);
    const std::size_t n = 1 + rng.below(3);
    const int maxu = 1 + static_cast<int>(rng.below(4));
    const auto w = fixtures::random_weighted(n, rng);
    const auto brute = fixtures::brute_optimum(w, maxu);
    const auto opt = optimize(w, with_maxu(maxu), true);
    ASSERT_EQ(opt.cost, brute.cost) << s;
    EXPECT_EQ(canonical_key(opt.graph), brute.key) << s;
    EXPECT_EQ(opt.rate, brute.rate) << s;
    EXPECT_EQ(opt.all_optima.size(), brute.ties) << s;
  }
}

TEST(Optimize, AllOptimaShareTheCost) {
  SplitMix64 rng(9);
  const auto w = fixtures::random_weighted(3, rng);
  const auto opt = optimize(w, with_maxu(3), true);
  ASSERT_FALSE(opt.all_optima.empty());
  for (const auto& [g, u] : opt.all_optima) EXPECT_EQ(discrepancy_cost(g, u, w), opt.cost);
}

TEST(Optimize, ScalingWeightsKeepsArgmin) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    SplitMix64 rng(500 + s);
    auto w = fixtures::random_weighted(3, rng);
    const auto a = optimize(w, with_maxu(3));
    w.scale(2.5);
    const auto b = optimize(w, with_maxu(3));
    EXPECT_EQ(a.graph, b.graph);
    EXPECT_EQ(a.rate, b.rate);
    EXPECT_DOUBLE_EQ(b.cost, 2.5 * a.cost);
  }
}

TEST(Optimize, ZeroCostOptimaAreTheClass) {
  // With an achievable H, the zero-cost optima are exactly solve's class.
  const DirectedGraph g(3, {{0, 1}, {1, 2}, {2, 0}});
  const MixedGraph h = undersample(g, 3);
  const auto opt = optimize(WeightedHypothesis(h), with_maxu(4), true);
  const auto cls = solve(h, with_maxu(4));
  std::size_t pairs = 0;
  for (const auto& e : cls.entries) pairs += e.witnesses.size();
  EXPECT_EQ(opt.cost, 0.0);
  EXPECT_EQ(opt.all_optima.size(), pairs);
  for (const auto& [gg, u] : opt.all_optima) EXPECT_NE(cls.find(gg), nullptr);
}

TEST(Refine, BrokenEdge) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    GenConfig gc;
    gc.n = 4;
    gc.seed = s;
    const auto g = generate(gc);
    const MixedGraph h = undersample(g, 2);
    const WeightedHypothesis w(break_edges(h, 1, s));
    const auto r = refine(w, with_maxu(6));
    EXPECT_LE(r.optimum.cost, 1.0);
    const auto* e = r.cls.find(r.optimum.graph);
    ASSERT_NE(e, nullptr);
    EXPECT_NE(std::find(e->witnesses.begin(), e->witnesses.end(), r.optimum.rate), e->witnesses.end());
    const auto plain = edge_errors(g, r.optimum.graph);
    const auto best = best_errors(g, r.cls);
    EXPECT_LE(best.omission, plain.omission);
    EXPECT_LE(best.commission, plain.commission);
  }
}

TEST(Refine, ExactInstanceReproducesClass) {
  const DirectedGraph g(3, {{0, 1}, {1, 2}, {2, 0}, {0, 0}});
  const MixedGraph h = undersample(g, 2);
  const auto r = refine(WeightedHypothesis(h), with_maxu(4));
  const auto cls = solve(h, with_maxu(4));
  ASSERT_EQ(r.cls.size(), cls.size());
  for (std::size_t k = 0; k < cls.size(); ++k) EXPECT_EQ(r.cls.entries[k].graph, cls.entries[k].graph);
}

TEST(EdgeErrors, Examples) {
  const DirectedGraph t(3, {{0, 1}, {1, 2}, {2, 0}, {1, 1}});
  auto e = edge_errors(t, t);
  EXPECT_EQ(e.omission, 0.0);
  EXPECT_EQ(e.commission, 0.0);
  e = edge_errors(t, DirectedGraph(3, {{0, 1}, {1, 2}, {2, 0}}));
  EXPECT_EQ(e.omission, 0.25);
  EXPECT_EQ(e.commission, 0.0);
  e = edge_errors(t, DirectedGraph(3, {{0, 1}, {1, 2}, {2, 0}, {1, 1}, {0, 0}}));
  EXPECT_EQ(e.omission, 0.0);
  EXPECT_EQ(e.commission, 0.2);
}
