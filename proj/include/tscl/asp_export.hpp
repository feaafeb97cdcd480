#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>

#include "tscl/graph.hpp"
#include "tscl/optimizer.hpp"
#include "tscl/solver.hpp"

// Clingo input for H: the rate-agnostic program (exact constraints) or its
// weighted optimization variant. Nodes and components are numbered from 1.

namespace tscl {

namespace detail {

inline std::string asp_pair(const char* pred, std::size_t i, std::size_t j) {
  return std::string(pred) + "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

inline std::string asp_weight(double w) {
  if (w != std::floor(w) || w > 1e15) {
    throw InputError("ASP weights must be integers, got " + std::to_string(w) + "; scale the weights first");
  }
  return std::to_string(static_cast<std::int64_t>(w));
}

inline void asp_preamble(std::string& out, const MixedGraph& h, int maxu) {
  if (maxu < 1) throw InputError("maxu must be >= 1");
  const std::string m = std::to_string(maxu);
  out += "#const n = " + std::to_string(h.size()) + ", maxu = " + m + ".\n";
  out += "node(1..n).\n";
  out += "1 {u(1.." + m + ", 1)} 1.\n";
}

// scc/2, sccsize/2 and dag/2 facts plus the condensation constraint.
inline void asp_structure(std::string& out, const MixedGraph& h) {
  const CondensationConstraint cc = condensation_constraint(h);
  const auto& d = cc.scc;
  out += "% components of H in topological order\n";
  for (std::size_t v = 0; v < h.size(); ++v) out += asp_pair("scc", v, d.membership[v]) + ".\n";
  for (std::size_t c = 0; c < d.component_count(); ++c) {
    out += "sccsize(" + std::to_string(c + 1) + "," + std::to_string(d.component_size(c)) + ").\n";
  }
  d.condensation.for_each([&](std::size_t a, std::size_t b) { out += asp_pair("dag", a, b) + ".\n"; });
  if (!cc.sibling_exemptions.empty()) {
    out += "% pairs kept open: the target has a cyclic sibling that may come from the same G1 component\n";
    for (auto [a, b] : cc.sibling_exemptions) out += asp_pair("dag", a, b) + ".\n";
  }
  if (cc.active) {
    out += ":- edge1(X,Y), scc(X, K), scc(Y, L), K != L, sccsize(L, Z), Z > 1, not dag(K, L).\n";
  } else {
    for (const auto& w : cc.warnings) out += "% " + w + "\n";
    out += "% :- edge1(X,Y), scc(X, K), scc(Y, L), K != L, sccsize(L, Z), Z > 1, not dag(K, L).\n";
  }
}

inline void asp_rules(std::string& out) {
  out += "{edge1(X,Y)} :- node(X), node(Y).\n";
  out += "directed(X, Y, 1) :- edge1(X, Y).\n";
  out += "directed(X, Y, L) :- directed(X, Z, L-1), edge1(Z, Y), L <= U, u(U, _).\n";
  out += "bidirected(X, Y, U) :- directed(Z, X, L), directed(Z, Y, L), node(X;Y;Z), X < Y, L < U, u(U, _).\n";
}

}  // namespace detail

/// Exact program: facts for H, the structural constraint, and the four
/// integrity constraints.
inline std::string export_asp(const MixedGraph& h, int maxu) {
  std::string out = "% rate-agnostic G1 search for H on " + std::to_string(h.size()) + " nodes\n";
  detail::asp_preamble(out, h, maxu);
  out += "% edges of H\n";
  for (auto [i, j] : h.directed_edges()) out += detail::asp_pair("hdirected", i, j) + ".\n";
  for (auto [i, j] : h.bidirected_edges()) out += detail::asp_pair("hbidirected", i, j) + ".\n";
  out += "hdirected(X, Y, 1) :- hdirected(X, Y).\n";
  out += "hbidirected(X, Y, 1) :- hbidirected(X, Y).\n";
  detail::asp_structure(out, h);
  detail::asp_rules(out);
  out += ":- directed(X, Y, L), not hdirected(X, Y, K), node(X;Y), u(L, K).\n";
  out += ":- bidirected(X, Y, L), not hbidirected(X, Y, K), node(X;Y), u(L, K), X < Y.\n";
  out += ":- not directed(X, Y, L), hdirected(X, Y, K), node(X;Y), u(L, K).\n";
  out += ":- not bidirected(X, Y, L), hbidirected(X, Y, K), node(X;Y), u(L, K), X < Y.\n";
  return out;
}

/// Optimization program: the integrity constraints become weak constraints,
/// one per pair with X, Y and W filled in.
inline std::string export_asp(const WeightedHypothesis& w, int maxu) {
  const MixedGraph& h = w.base();
  const std::size_t n = h.size();
  std::string out = "% weighted G1 search for H on " + std::to_string(n) + " nodes\n";
  detail::asp_preamble(out, h, maxu);

  std::string facts = "% edges of H and weighted non-edges: (X, Y, W, K)\n";
  std::string weak;
  auto add = [&](const char* pred, std::size_t i, std::size_t j, double weight, const char* head, bool bi) {
    const std::string x = std::to_string(i + 1);
    const std::string y = std::to_string(j + 1);
    const std::string ws = detail::asp_weight(weight);
    facts += std::string(pred) + "(" + x + "," + y + "," + ws + ",1).\n";
    weak += std::string(":~ ") + head + "(" + x + ", " + y + ", L), " + pred + "(" + x + ", " + y + ", " + ws +
            ", K), node(" + x + ";" + y + "), u(L, K)" + (bi ? ", " + x + " < " + y : std::string()) + ". [" + ws +
            "@1," + x + "," + y + "]\n";
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (h.has_directed(i, j)) add("hdirected", i, j, w.dir_weight(i, j), "not directed", false);
    }
  }
  for (auto [i, j] : h.bidirected_edges()) add("hbidirected", i, j, w.bi_weight(i, j), "not bidirected", true);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!h.has_directed(i, j)) add("no_hdirected", i, j, w.dir_weight(i, j), "directed", false);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!h.has_bidirected(i, j)) add("no_hbidirected", i, j, w.bi_weight(i, j), "bidirected", true);
    }
  }
  out += facts;
  detail::asp_structure(out, h);
  detail::asp_rules(out);
  out += weak;
  return out;
}

}  // namespace tscl
