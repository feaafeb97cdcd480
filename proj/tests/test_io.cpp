#include <gtest/gtest.h>

#include "support.hpp"
#include "tscl/asp_export.hpp"
#include "tscl/graph_io.hpp"

using namespace tscl;

namespace {

std::size_t error_line(std::string_view text) {
  try {
    parse_mixed(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(GraphFile, ParsesAllForms) {
  const auto h = parse_mixed("# header\nnodes 3\n1 -> 2   # inline\n3 <-> 1\r\n\n2 -> 2\n");
  EXPECT_EQ(h, MixedGraph(3, {{0, 1}, {1, 1}}, {{0, 2}}));
}

TEST(GraphFile, WriteIsCanonical) {
  MixedGraph h(3);
  h.add_bidirected(2, 0);
  h.add_directed(2, 1);
  h.add_directed(0, 2);
  EXPECT_EQ(write_graph(h), "nodes 3\n1 -> 3\n3 -> 2\n1 <-> 3\n");
}

TEST(GraphFile, ErrorLines) {
  EXPECT_EQ(error_line("nodes 2\n1 => 2\n"), 2u);
  EXPECT_EQ(error_line("1 -> 2\nnodes 2\n"), 1u);
  EXPECT_EQ(error_line("nodes 2\n\n1 -> 3\n"), 3u);
  EXPECT_EQ(error_line("nodes 2\n1 -> 2\n1 -> 2\n"), 3u);
  EXPECT_EQ(error_line("nodes 2\n1 <-> 2\n2 <-> 1\n"), 3u);
  EXPECT_EQ(error_line("nodes 2\n1 <-> 1\n"), 2u);
  EXPECT_EQ(error_line("nodes 2\nnodes 2\n"), 2u);
  EXPECT_EQ(error_line("nodes 0\n"), 1u);
  EXPECT_EQ(error_line("nodes 2\n1 -> 2 @ 3\n"), 2u);
  EXPECT_EQ(error_line("# only\n"), 1u);
  EXPECT_EQ(error_line("nodes x\n"), 1u);
}

TEST(GraphFile, DirectedRejectsBidirected) {
  EXPECT_THROW(parse_directed("nodes 2\n1 <-> 2\n"), ParseError);
  EXPECT_EQ(parse_directed("nodes 2\n2 -> 1\n"), DirectedGraph(2, {{1, 0}}));
}

TEST(GraphFile, WeightErrors) {
  EXPECT_THROW(parse_weighted("nodes 2\n1 -> 2 @ -1\n"), ParseError);
  EXPECT_THROW(parse_weighted("nodes 2\n1 -> 2 @ x\n"), ParseError);
  EXPECT_THROW(parse_weighted("nodes 2\n1 -> 2 # 3\n1 -/> 2 @ 2\n"), ParseError);
  EXPECT_THROW(parse_weighted("nodes 2\n1 -/> 2\n"), ParseError);
  EXPECT_THROW(parse_weighted("nodes 2\n1 -> 2 : 2\n"), ParseError);
}

TEST(GraphFile, WeightedForms) {
  const auto w = parse_weighted("nodes 3\n1 -> 2 @ 5\n2 <-> 3 @ 0.25\n3 -/> 1 @ 2\n1 </> 3 @ 0\n2 -> 3\n");
  EXPECT_EQ(w.base(), MixedGraph(3, {{0, 1}, {1, 2}}, {{1, 2}}));
  EXPECT_EQ(w.dir_weight(0, 1), 5.0);
  EXPECT_EQ(w.bi_weight(2, 1), 0.25);
  EXPECT_EQ(w.dir_weight(2, 0), 2.0);
  EXPECT_EQ(w.bi_weight(0, 2), 0.0);
  EXPECT_EQ(w.dir_weight(1, 2), 1.0);
  EXPECT_EQ(write_graph(w), "nodes 3\n1 -> 2 @ 5\n2 -> 3\n2 <-> 3 @ 0.25\n3 -/> 1 @ 2\n1 </> 3 @ 0\n");
}

TEST(GraphFile, RoundTripProperty) {
  SplitMix64 rng(12);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + rng.below(12);
    const auto g = random_graph(n, 0.3, rng);
    ASSERT_EQ(parse_directed(write_graph(g)), g);
    const auto h = fixtures::random_mixed(n, 0.3, rng);
    ASSERT_EQ(parse_mixed(write_graph(h)), h);
    auto w = fixtures::random_weighted(n, rng);
    w.set_dir_weight(0, 0, rng.uniform() * 100);
    ASSERT_EQ(parse_weighted(write_graph(w)), w);
  }
}

TEST(Asp, ListingLines) {
  MixedGraph h(10);
  h.add_directed(0, 9);
  const std::string p = export_asp(h, 20);
  EXPECT_NE(p.find("\n1 {u(1..20, 1)} 1.\n"), std::string::npos);
  EXPECT_NE(p.find("\nhdirected(1,10).\n"), std::string::npos);
  EXPECT_NE(p.find("directed(X, Y, L) :- directed(X, Z, L-1), edge1(Z, Y), L <= U, u(U, _).\n"), std::string::npos);
  EXPECT_NE(p.find(":- not bidirected(X, Y, L), hbidirected(X, Y, K), node(X;Y), u(L, K), X < Y.\n"),
            std::string::npos);
  EXPECT_EQ(p, export_asp(h, 20));
}

TEST(Asp, WeakConstraintTuple) {
  WeightedHypothesis w(MixedGraph(2, {{0, 1}}, {}));
  w.set_dir_weight(0, 1, 5);
  const std::string p = export_asp(w, 20);
  EXPECT_NE(p.find("hdirected(1,2,5,1).\n"), std::string::npos);
  EXPECT_NE(p.find(":~ not directed(1, 2, L), hdirected(1, 2, 5, K), node(1;2), u(L, K). [5@1,1,2]\n"),
            std::string::npos);
  EXPECT_EQ(p.find(":- directed(X, Y, L), not hdirected"), std::string::npos);
}

TEST(Asp, RejectsFractionalWeights) {
  WeightedHypothesis w(MixedGraph(2));
  w.set_dir_weight(0, 1, 0.5);
  EXPECT_THROW(export_asp(w, 5), InputError);
  EXPECT_THROW(export_asp(MixedGraph(2), 0), InputError);
}

TEST(Asp, PeriodicComponentCommentsOutConstraint) {
  const std::string p = export_asp(MixedGraph(3, {{0, 1}, {1, 0}, {2, 0}}, {}), 4);
  EXPECT_NE(p.find("\n% :- edge1(X,Y), scc(X, K)"), std::string::npos);
}
