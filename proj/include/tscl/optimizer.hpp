#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tscl/graph.hpp"
#include "tscl/solver.hpp"

namespace tscl {

/// H with a weight per pair. For a pair in H the weight is the cost of
/// missing it in G^u; for a pair not in H it is the cost of producing it.
class WeightedHypothesis {
 public:
  explicit WeightedHypothesis(MixedGraph base)
      : base_(std::move(base)), w_dir_(base_.size() * base_.size(), 1.0), w_bi_(base_.size() * base_.size(), 1.0) {}

  std::size_t size() const noexcept { return base_.size(); }
  const MixedGraph& base() const noexcept { return base_; }

  double dir_weight(std::size_t i, std::size_t j) const { return w_dir_[index(i, j)]; }
  double bi_weight(std::size_t i, std::size_t j) const { return w_bi_[index(i, j)]; }

  void set_dir_weight(std::size_t i, std::size_t j, double w) {
    check_weight(w);
    w_dir_[index(i, j)] = w;
  }

  void set_bi_weight(std::size_t i, std::size_t j, double w) {
    check_weight(w);
    if (i == j) throw InputError("bidirected weight on a self-pair");
    w_bi_[index(i, j)] = w;
    w_bi_[index(j, i)] = w;
  }

  /// Multiplies every weight by `factor` > 0.
  void scale(double factor) {
    check_weight(factor);
    for (double& w : w_dir_) w *= factor;
    for (double& w : w_bi_) w *= factor;
  }

  bool operator==(const WeightedHypothesis&) const = default;

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i >= size() || j >= size()) throw InputError("node index out of range");
    return i * size() + j;
  }

  static void check_weight(double w) {
    if (!std::isfinite(w) || w < 0) throw InputError("weights must be finite and non-negative");
  }

  MixedGraph base_;
  std::vector<double> w_dir_;
  std::vector<double> w_bi_;
};

namespace detail {

// Cost of discrepancies that every G^u between `lower` and `upper` shares:
// spurious edges of `lower`, H edges missing from `upper`. Pairs are summed
// in a fixed order, so a leaf (lower == upper) reproduces discrepancy_cost.
inline double bounded_cost(const MixedGraph& lower, const MixedGraph& upper, const WeightedHypothesis& w) {
  const MixedGraph& h = w.base();
  const std::size_t n = h.size();
  double cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool in_h = h.has_directed(i, j);
      if (in_h ? !upper.has_directed(i, j) : lower.has_directed(i, j)) cost += w.dir_weight(i, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool in_h = h.has_bidirected(i, j);
      if (in_h ? !upper.has_bidirected(i, j) : lower.has_bidirected(i, j)) cost += w.bi_weight(i, j);
    }
  }
  return cost;
}

}  // namespace detail

inline double discrepancy_cost(const DirectedGraph& g, int u, const WeightedHypothesis& w) {
  if (g.size() != w.size()) {
    throw InputError("discrepancy_cost: graph has " + std::to_string(g.size()) + " nodes, H has " +
                     std::to_string(w.size()));
  }
  const MixedGraph gu = undersample(g, u);
  return detail::bounded_cost(gu, gu, w);
}

struct Optimum {
  DirectedGraph graph{1};
  int rate = 1;
  double cost = 0.0;
  /// Filled when every optimum was requested: all (graph, rate) at the
  /// optimal cost, ordered by canonical key then rate.
  std::vector<std::pair<DirectedGraph, int>> all_optima;
  SearchStats stats;  // prunes_lower counts bound prunes
};

namespace detail {

/// Branch-and-bound over the n^2 pair decisions for one rate. The absent
/// branch is taken first, so leaves arrive in increasing canonical-key order
/// and the first leaf reaching a cost is the key-smallest one.
class OptimizeSearch {
 public:
  struct Best {
    double cost;
    std::string key;
    int rate;
    std::vector<std::pair<std::string, int>> ties;  // enumerate_all only
  };

  OptimizeSearch(const WeightedHypothesis& w, int u, bool enumerate_all, Best& best, const Deadline& deadline)
      : w_(w), u_(u), n_(w.size()), all_(enumerate_all), best_(best), deadline_(deadline), lower_(n_), upper_(n_) {
    upper_.fill();
  }

  void run() {
    const MixedGraph lo = undersample(DirectedGraph(lower_), u_);
    const MixedGraph hi = undersample(DirectedGraph(upper_), u_);
    descend(0, lo, hi);
  }
  const SearchStats& stats() const noexcept { return stats_; }

 private:
  // Relative slack for floating-point ties; weights are summed in one fixed
  // order, so integral or short-decimal weights compare exactly anyway.
  bool below(double a, double b) const { return a < b - tolerance(b); }
  bool tied(double a, double b) const { return std::abs(a - b) <= tolerance(b); }
  static double tolerance(double b) { return 1e-9 * std::max(1.0, std::abs(b)); }

  // lo, hi: undersampled lower_ and upper_.
  void descend(std::size_t pos, const MixedGraph& lo, const MixedGraph& hi) {
    if ((++stats_.branch_nodes & 0x3FF) == 0 && deadline_.passed()) stats_.timed_out = true;
    if (stats_.timed_out) return;

    const double bound = bounded_cost(lo, hi, w_);
    if (below(best_.cost, bound)) {
      ++stats_.prunes_lower;
      return;
    }
    if (tied(bound, best_.cost) && !all_) {
      // Every leaf below has a key >= key(lower_); the incumbent came from a
      // rate no larger than u_, so only a strictly smaller key could win.
      if (canonical_key(DirectedGraph(lower_)) >= best_.key) {
        ++stats_.prunes_lower;
        return;
      }
    }
    if (pos == n_ * n_) {
      offer(bound);
      return;
    }
    const std::size_t i = pos / n_;
    const std::size_t j = pos % n_;
    upper_.reset(i, j);
    descend(pos + 1, lo, undersample(DirectedGraph(upper_), u_));
    upper_.set(i, j);
    lower_.set(i, j);
    descend(pos + 1, undersample(DirectedGraph(lower_), u_), hi);
    lower_.reset(i, j);
  }

  void offer(double cost) {
    std::string key = canonical_key(DirectedGraph(lower_));
    if (below(cost, best_.cost)) {
      best_.cost = cost;
      best_.key = key;
      best_.rate = u_;
      best_.ties.clear();
      if (all_) best_.ties.emplace_back(std::move(key), u_);
      return;
    }
    if (!tied(cost, best_.cost)) return;
    if (all_) best_.ties.emplace_back(key, u_);
    if (key < best_.key) {
      best_.key = std::move(key);
      best_.rate = u_;
    }
  }

  const WeightedHypothesis& w_;
  int u_;
  std::size_t n_;
  bool all_;
  Best& best_;
  const Deadline& deadline_;
  BitMatrix lower_, upper_;
  SearchStats stats_;
};

}  // namespace detail

/// argmin over (g, u in [1, cfg.maxu]) of discrepancy_cost. Ties go to the
/// smallest canonical key, then the smallest rate. The incumbent starts at
/// the empty graph at rate 1.
inline Optimum optimize(const WeightedHypothesis& w, const SolveConfig& cfg = {}, bool enumerate_all = false) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = w.size();

  const DirectedGraph empty(n);
  detail::OptimizeSearch::Best best{discrepancy_cost(empty, 1, w), canonical_key(empty), 1, {}};

  std::atomic<bool> expired{false};
  detail::Deadline deadline{std::nullopt, &expired};
  if (cfg.time_limit) deadline.at = start + *cfg.time_limit;

  Optimum out;
  for (int u = 1; u <= cfg.maxu; ++u) {
    detail::OptimizeSearch search(w, u, enumerate_all, best, deadline);
    search.run();
    out.stats.merge(search.stats());
  }

  out.graph = graph_from_key(n, best.key);
  out.rate = best.rate;
  out.cost = discrepancy_cost(out.graph, out.rate, w);
  if (enumerate_all) {
    std::sort(best.ties.begin(), best.ties.end());
    best.ties.erase(std::unique(best.ties.begin(), best.ties.end()), best.ties.end());
    for (auto& [key, u] : best.ties) out.all_optima.emplace_back(graph_from_key(n, key), u);
  }
  if (out.stats.timed_out) out.stats.warnings.push_back("time limit reached; optimum may not be minimal");
  out.stats.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

struct Refinement {
  Optimum optimum;
  EquivalenceClass cls;
};

/// optimize, then the exact class of undersample(g_opt, u_opt).
inline Refinement refine(const WeightedHypothesis& w, const SolveConfig& cfg = {}) {
  Refinement r{optimize(w, cfg), {}};
  r.cls = solve(undersample(r.optimum.graph, r.optimum.rate), cfg);
  return r;
}

struct EdgeErrors {
  double omission = 0.0;    // share of true edges missing from the estimate
  double commission = 0.0;  // share of estimated edges absent from the truth
};

inline EdgeErrors edge_errors(const DirectedGraph& truth, const DirectedGraph& estimate) {
  if (truth.size() != estimate.size()) {
    throw InputError("edge_errors: graphs have " + std::to_string(truth.size()) + " and " +
                     std::to_string(estimate.size()) + " nodes");
  }
  BitMatrix missed = truth.adj();
  missed.subtract(estimate.adj());
  BitMatrix extra = estimate.adj();
  extra.subtract(truth.adj());
  EdgeErrors e;
  if (const auto t = truth.edge_count(); t != 0) e.omission = static_cast<double>(missed.count()) / t;
  if (const auto s = estimate.edge_count(); s != 0) e.commission = static_cast<double>(extra.count()) / s;
  return e;
}

/// Minimum omission and minimum commission over a class, taken separately.
inline EdgeErrors best_errors(const DirectedGraph& truth, const EquivalenceClass& cls) {
  if (cls.empty()) throw InputError("best_errors: empty class");
  EdgeErrors best{1.0, 1.0};
  for (const auto& e : cls.entries) {
    const EdgeErrors x = edge_errors(truth, e.graph);
    best.omission = std::min(best.omission, x.omission);
    best.commission = std::min(best.commission, x.commission);
  }
  return best;
}

}  // namespace tscl
