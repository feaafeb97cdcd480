// Library walk-through: undersample a G1, recover its class, then optimize
// against a broken copy of H.

#include <iostream>

#include "tscl/generate.hpp"
#include "tscl/graph_io.hpp"
#include "tscl/optimizer.hpp"
#include "tscl/solver.hpp"

int main() {
  using namespace tscl;
  GenConfig gc;
  gc.n = 5;
  gc.seed = 3;
  const DirectedGraph g = generate(gc);
  const MixedGraph h = undersample(g, 2);
  std::cout << "G1:\n" << write_graph(g) << "H = G1 at u = 2:\n" << write_graph(h);

  SolveConfig cfg;
  cfg.maxu = 10;
  const EquivalenceClass cls = solve(h, cfg);
  std::cout << "class size " << cls.size() << ", contains G1: " << (cls.find(g) ? "yes" : "no") << "\n";

  const WeightedHypothesis broken(break_edges(h, 1, 7));
  const Refinement r = refine(broken, cfg);
  const EdgeErrors plain = edge_errors(g, r.optimum.graph);
  const EdgeErrors best = best_errors(g, r.cls);
  std::cout << "broken H: optimum cost " << r.optimum.cost << " at u = " << r.optimum.rate << "\n"
            << "omission " << plain.omission << " -> " << best.omission << ", commission " << plain.commission
            << " -> " << best.commission << " after refinement\n";
}
