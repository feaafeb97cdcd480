#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <future>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "tscl/bit_matrix.hpp"
#include "tscl/graph.hpp"
#include "tscl/scc.hpp"

namespace tscl {

enum class SearchOrder {
  /// Ordered pairs (i, j) ascending; rows first.
  kLexicographic,
  /// Pairs whose endpoints share an SCC of H first, then the rest; each group lexicographic.
  kWithinSccFirst,
};

struct SolveConfig {
  int maxu = 20;
  bool use_scc_decomposition = true;
  SearchOrder search_order = SearchOrder::kLexicographic;
  /// P1: undersampled lower bound must be an edge-subset of H.
  bool prune_lower_bound = true;
  /// P2: H must be an edge-subset of the undersampled upper bound.
  bool prune_upper_bound = true;
  /// P4: skip a rate when some self-contained component of H has no
  /// solution on its own (see component_feasible).
  bool prune_components = true;
  /// Per-rate searches run on up to this many worker threads.
  unsigned threads = 1;
  std::optional<std::chrono::milliseconds> time_limit;
  /// Stop a rate's search after this many members; the class is then
  /// marked truncated. Guards memory on near-complete H.
  std::optional<std::size_t> max_class_size;

  void validate() const {
    if (maxu < 1) throw InputError("maxu must be >= 1, got " + std::to_string(maxu));
    if (threads < 1) throw InputError("thread count must be >= 1");
    if (max_class_size && *max_class_size == 0) throw InputError("max class size must be >= 1");
  }
};

struct SearchStats {
  std::uint64_t branch_nodes = 0;
  std::uint64_t prunes_lower = 0;     // P1
  std::uint64_t prunes_upper = 0;     // P2
  std::uint64_t forced_absent = 0;    // P3, candidate pairs removed before search
  std::uint64_t prunes_component = 0; // P4, rates skipped
  double elapsed_ms = 0.0;
  bool timed_out = false;
  bool truncated = false;  // max_class_size reached
  std::vector<std::string> warnings;

  void merge(const SearchStats& other) {
    branch_nodes += other.branch_nodes;
    prunes_lower += other.prunes_lower;
    prunes_upper += other.prunes_upper;
    prunes_component += other.prunes_component;
    timed_out = timed_out || other.timed_out;
    truncated = truncated || other.truncated;
  }
};

struct ClassEntry {
  DirectedGraph graph;
  std::vector<int> witnesses;  // ascending, non-empty
};

struct EquivalenceClass {
  std::size_t n = 0;
  int maxu = 0;
  /// Sorted by canonical_key, one entry per graph.
  std::vector<ClassEntry> entries;
  SearchStats stats;

  bool empty() const noexcept { return entries.empty(); }
  std::size_t size() const noexcept { return entries.size(); }

  const ClassEntry* find(const DirectedGraph& g) const {
    for (const auto& e : entries) {
      if (e.graph == g) return &e;
    }
    return nullptr;
  }
};

/// Cross-component edge permissions derived from H's SCC structure.
///
/// A candidate edge x -> y whose endpoints lie in different components K, L of
/// H is forbidden when L has more than one node and the condensation of H has
/// no edge K -> L. Two situations switch the rule off:
///  - some non-singleton component of H has period > 1 (whole rule disabled);
///  - L has a cyclic sibling L' (mutually unreachable from L in H) such that
///    K == L' or H has K -> L'. A G1 component whose period divides u splits
///    into such siblings under undersampling, and edges into one sibling show
///    up in H as edges into another, so the pair (K, L) stays open.
struct CondensationConstraint {
  bool active = false;
  SccDecomposition scc;
  /// allowed(x, y) over node pairs.
  BitMatrix allowed;
  /// Component pairs (K, L) exempted by the sibling rule, K != L, |L| > 1, no K -> L in H.
  std::vector<std::pair<std::size_t, std::size_t>> sibling_exemptions;
  std::vector<std::string> warnings;

  std::size_t forbidden_count() const noexcept { return allowed.size() * allowed.size() - allowed.count(); }
};

inline CondensationConstraint condensation_constraint(const MixedGraph& h, bool enabled = true) {
  const std::size_t n = h.size();
  CondensationConstraint cc;
  cc.scc = scc_decompose(h);
  cc.allowed = BitMatrix(n);
  cc.allowed.fill();
  if (!enabled) return cc;

  const auto& d = cc.scc;
  for (std::size_t c = 0; c < d.component_count(); ++c) {
    if (d.component_size(c) > 1 && d.period[c] > 1) {
      cc.warnings.push_back("component containing node " + std::to_string(d.components[c].front() + 1) +
                            " has period " + std::to_string(d.period[c]) +
                            "; condensation constraint disabled");
      return cc;
    }
  }
  cc.active = true;

  const std::size_t k = d.component_count();
  const BitMatrix reach = condensation_reachability(d);
  auto incomparable = [&](std::size_t a, std::size_t b) { return a != b && !reach.test(a, b) && !reach.test(b, a); };

  BitMatrix comp_allowed(k);
  for (std::size_t src = 0; src < k; ++src) {
    for (std::size_t dst = 0; dst < k; ++dst) {
      if (src == dst || d.component_size(dst) == 1 || d.condensation.test(src, dst)) {
        comp_allowed.set(src, dst);
        continue;
      }
      bool sibling = false;
      for (std::size_t other = 0; other < k && !sibling; ++other) {
        if (!d.is_cyclic(other) || !incomparable(dst, other)) continue;
        sibling = (other == src) || d.condensation.test(src, other);
      }
      if (sibling) {
        comp_allowed.set(src, dst);
        cc.sibling_exemptions.emplace_back(src, dst);
      }
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (!comp_allowed.test(d.membership[x], d.membership[y])) cc.allowed.reset(x, y);
    }
  }
  return cc;
}

namespace detail {

namespace tiny {

// Graphs with n <= 8 packed into one word: entry (i, j) is bit 8 * i + j.
using Packed = std::uint64_t;
inline constexpr Packed kLowBits = 0x0101010101010101ULL;

inline Packed pack(const BitMatrix& m) {
  Packed out = 0;
  for (std::size_t i = 0; i < m.size(); ++i) out |= (m.row(i)[0] & 0xFFU) << (8 * i);
  return out;
}

inline Packed transpose(Packed x) {
  Packed t = (x ^ (x >> 7)) & 0x00AA00AA00AA00AAULL;
  x = x ^ t ^ (t << 7);
  t = (x ^ (x >> 14)) & 0x0000CCCC0000CCCCULL;
  x = x ^ t ^ (t << 14);
  t = (x ^ (x >> 28)) & 0x00000000F0F0F0F0ULL;
  return x ^ t ^ (t << 28);
}

/// Boolean product: row i of the result is the OR of rhs rows k with lhs(i, k).
inline Packed multiply(Packed lhs, Packed rhs) {
  Packed out = 0;
  for (unsigned k = 0; k < 8; ++k) {
    const Packed column = ((lhs >> k) & kLowBits) * 0xFFU;
    const Packed row = ((rhs >> (8 * k)) & 0xFFU) * kLowBits;
    out |= column & row;
  }
  return out;
}

inline constexpr Packed kDiagonal = 0x8040201008040201ULL;

}  // namespace tiny

/// Undersampling bound tests for one rate against H.
///
/// Graphs with n <= 64 keep each row in a single word and run on fixed-size
/// scratch arrays; larger graphs use BitMatrix rows.
class BoundChecker {
 public:
  BoundChecker(const MixedGraph& h, int u)
      : h_(h), u_(u), n_(h.size()), small_(h.size() <= BitMatrix::kWordBits), tiny_(h.size() <= 8),
        power_(h.size()), next_(h.size()), bi_(h.size()) {
    if (tiny_) {
      h_dir_tiny_ = tiny::pack(h.dir());
      h_bi_tiny_ = tiny::pack(h.bi());
    }
    if (small_) {
      for (std::size_t i = 0; i < n_; ++i) {
        h_dir_[i] = h.dir().row(i)[0];
        h_bi_[i] = h.bi().row(i)[0];
      }
    }
  }

  /// P1: every edge of undersample(adj, u) is in H. Stops at the first level
  /// that produces a spurious bidirected edge.
  bool within(const BitMatrix& adj) {
    if (tiny_) return within_tiny(tiny::pack(adj));
    return small_ ? within_small(adj) : within_wide(adj);
  }

  /// P2: every edge of H is in undersample(adj, u).
  bool covers(const BitMatrix& adj) {
    if (tiny_) return covers_tiny(tiny::pack(adj));
    return small_ ? covers_small(adj) : covers_wide(adj);
  }

  bool matches(const BitMatrix& adj) {
    compute_wide(adj);
    return power_ == h_.dir() && bi_ == h_.bi();
  }

 private:
  using Word = BitMatrix::Word;
  using Rows = std::array<Word, BitMatrix::kWordBits>;

  bool within_tiny(tiny::Packed adj) const {
    tiny::Packed power = adj;
    for (int level = 1; level < u_; ++level) {
      const tiny::Packed bi = tiny::multiply(tiny::transpose(power), power) & ~tiny::kDiagonal;
      if ((bi & ~h_bi_tiny_) != 0) return false;
      power = tiny::multiply(power, adj);
    }
    return (power & ~h_dir_tiny_) == 0;
  }

  bool covers_tiny(tiny::Packed adj) const {
    tiny::Packed power = adj;
    tiny::Packed bi = 0;
    for (int level = 1; level < u_; ++level) {
      bi |= tiny::multiply(tiny::transpose(power), power);
      power = tiny::multiply(power, adj);
    }
    return (h_dir_tiny_ & ~power) == 0 && (h_bi_tiny_ & ~bi) == 0;
  }

  void load(const BitMatrix& adj) {
    for (std::size_t i = 0; i < n_; ++i) adj_w_[i] = adj.row(i)[0];
  }

  void step_small() {
    for (std::size_t i = 0; i < n_; ++i) {
      Word acc = 0;
      for (Word w = pow_w_[i]; w != 0; w &= w - 1) acc |= adj_w_[static_cast<std::size_t>(std::countr_zero(w))];
      next_w_[i] = acc;
    }
    pow_w_ = next_w_;
  }

  void common_causes_small() {
    for (std::size_t z = 0; z < n_; ++z) {
      const Word row = pow_w_[z];
      if ((row & (row - 1)) == 0) continue;  // fewer than two targets
      for (Word w = row; w != 0; w &= w - 1) bi_w_[static_cast<std::size_t>(std::countr_zero(w))] |= row;
    }
  }

  bool within_small(const BitMatrix& adj) {
    load(adj);
    pow_w_ = adj_w_;
    bi_w_.fill(0);
    for (int level = 1; level < u_; ++level) {
      common_causes_small();
      for (std::size_t i = 0; i < n_; ++i) {
        if ((bi_w_[i] & ~h_bi_[i] & ~(Word{1} << i)) != 0) return false;
      }
      step_small();
    }
    for (std::size_t i = 0; i < n_; ++i) {
      if ((pow_w_[i] & ~h_dir_[i]) != 0) return false;
    }
    return true;
  }

  bool covers_small(const BitMatrix& adj) {
    load(adj);
    pow_w_ = adj_w_;
    bi_w_.fill(0);
    for (int level = 1; level < u_; ++level) {
      common_causes_small();
      step_small();
    }
    for (std::size_t i = 0; i < n_; ++i) {
      if ((h_dir_[i] & ~pow_w_[i]) != 0 || (h_bi_[i] & ~bi_w_[i]) != 0) return false;
    }
    return true;
  }

  bool within_wide(const BitMatrix& adj) {
    power_ = adj;
    bi_.clear();
    for (int level = 1; level < u_; ++level) {
      accumulate_common_causes(power_, bi_);
      bi_.clear_diagonal();
      if (!bi_.is_subset_of(h_.bi())) return false;
      multiply(power_, adj, next_);
      std::swap(power_, next_);
    }
    return power_.is_subset_of(h_.dir());
  }

  bool covers_wide(const BitMatrix& adj) {
    compute_wide(adj);
    return h_.dir().is_subset_of(power_) && h_.bi().is_subset_of(bi_);
  }

  void compute_wide(const BitMatrix& adj) {
    power_ = adj;
    bi_.clear();
    for (int level = 1; level < u_; ++level) {
      accumulate_common_causes(power_, bi_);
      multiply(power_, adj, next_);
      std::swap(power_, next_);
    }
    bi_.clear_diagonal();
  }

  const MixedGraph& h_;
  int u_;
  std::size_t n_;
  bool small_;
  bool tiny_;
  tiny::Packed h_dir_tiny_ = 0, h_bi_tiny_ = 0;
  BitMatrix power_, next_, bi_;
  Rows h_dir_{}, h_bi_{}, adj_w_{}, pow_w_{}, next_w_{}, bi_w_{};
};

/// Edges of an upper-bound graph that every witness of some H edge needs.
///
/// For each source z a layered pass computes, per level k and node v, the set
/// of edges shared by all length-k walks z -> v. A directed requirement s -> t
/// is witnessed by the length-u walks s -> t; a bidirected requirement {x, y}
/// by pairs of equal-length (< u) walks from a common source, whose shared
/// edges are common(x) | common(y) for that source and length. The union over
/// requirements of their shared edges is exactly the set of edges whose
/// single removal would leave some H edge unwitnessed.
class SupportAnalyzer {
 public:
  using Word = BitMatrix::Word;

  SupportAnalyzer(const MixedGraph& h, int u)
      : h_(h),
        u_(static_cast<std::size_t>(u)),
        n_(h.size()),
        set_words_((n_ * n_ + BitMatrix::kWordBits - 1) / BitMatrix::kWordBits),
        row_words_(h.dir().words_per_row()),
        bi_pairs_(h.bidirected_edges()),
        targets_(n_),
        reach_((u_ + 1) * n_ * row_words_),
        common_((u_ + 1) * n_ * set_words_),
        bi_acc_(bi_pairs_.size() * set_words_),
        bi_seen_(bi_pairs_.size()),
        essential_(set_words_) {
    h.dir().for_each([&](std::size_t s, std::size_t t) { targets_[s].push_back(t); });
    if (n_ <= 8) {
      tiny_reach_.assign(u_ + 1, 0);
      tiny_common_.assign((u_ + 1) * 8, 0);
    }
  }

  /// False when some H edge has no witness in `upper`; otherwise essential()
  /// holds the shared edges.
  bool analyze(const BitMatrix& upper) {
    if (n_ <= 8) return analyze_tiny(tiny::pack(upper));
    std::fill(essential_.begin(), essential_.end(), Word{0});
    std::fill(bi_acc_.begin(), bi_acc_.end(), ~Word{0});
    std::fill(bi_seen_.begin(), bi_seen_.end(), 0);

    for (std::size_t z = 0; z < n_; ++z) {
      walk_from(z, upper);
      for (std::size_t t : targets_[z]) {
        if (!reached(u_, t)) return false;
        or_into(essential_, common(u_, t));
      }
      for (std::size_t level = 1; level < u_; ++level) {
        for (std::size_t p = 0; p < bi_pairs_.size(); ++p) {
          const auto [x, y] = bi_pairs_[p];
          if (!reached(level, x) || !reached(level, y)) continue;
          Word* acc = &bi_acc_[p * set_words_];
          if (bi_seen_[p] && std::all_of(acc, acc + set_words_, [](Word w) { return w == 0; })) continue;
          bi_seen_[p] = 1;
          const Word* cx = common(level, x);
          const Word* cy = common(level, y);
          for (std::size_t w = 0; w < set_words_; ++w) acc[w] &= cx[w] | cy[w];
        }
      }
    }
    for (std::size_t p = 0; p < bi_pairs_.size(); ++p) {
      if (!bi_seen_[p]) return false;
      or_into(essential_, &bi_acc_[p * set_words_]);
    }
    return true;
  }

  bool essential(std::size_t a, std::size_t b) const noexcept {
    const std::size_t bit = a * n_ + b;
    return (essential_[bit / BitMatrix::kWordBits] >> (bit % BitMatrix::kWordBits)) & 1U;
  }

 private:
  // Same analysis with every edge set in one word (n <= 8).
  bool analyze_tiny(tiny::Packed upper) {
    Word essential = 0;
    std::array<Word, 28> acc;
    std::array<bool, 28> seen{};
    acc.fill(~Word{0});
    std::vector<std::uint8_t>& reach = tiny_reach_;
    std::vector<Word>& common = tiny_common_;

    for (std::size_t z = 0; z < n_; ++z) {
      reach[0] = static_cast<std::uint8_t>(1U << z);
      common[z] = 0;
      for (std::size_t level = 1; level <= u_; ++level) {
        std::uint8_t cur = 0;
        Word* to_level = &common[level * 8];
        const Word* from_level = &common[(level - 1) * 8];
        for (unsigned pw = reach[level - 1]; pw != 0; pw &= pw - 1) {
          const auto a = static_cast<unsigned>(std::countr_zero(pw));
          const Word from = from_level[a];
          for (unsigned row = static_cast<unsigned>((upper >> (8 * a)) & 0xFFU); row != 0; row &= row - 1) {
            const auto v = static_cast<unsigned>(std::countr_zero(row));
            const Word with_edge = from | (Word{1} << (a * n_ + v));
            if ((cur >> v) & 1U) {
              to_level[v] &= with_edge;
            } else {
              cur = static_cast<std::uint8_t>(cur | (1U << v));
              to_level[v] = with_edge;
            }
          }
        }
        reach[level] = cur;
      }
      for (std::size_t t : targets_[z]) {
        if (!((reach[u_] >> t) & 1U)) return false;
        essential |= common[u_ * 8 + t];
      }
      for (std::size_t level = 1; level < u_; ++level) {
        const unsigned r = reach[level];
        if ((r & (r - 1)) == 0) continue;
        for (std::size_t p = 0; p < bi_pairs_.size(); ++p) {
          if (seen[p] && acc[p] == 0) continue;
          const auto [x, y] = bi_pairs_[p];
          if (!((r >> x) & 1U) || !((r >> y) & 1U)) continue;
          seen[p] = true;
          acc[p] &= common[level * 8 + x] | common[level * 8 + y];
        }
      }
    }
    for (std::size_t p = 0; p < bi_pairs_.size(); ++p) {
      if (!seen[p]) return false;
      essential |= acc[p];
    }
    essential_[0] = essential;
    return true;
  }

  Word* reach_row(std::size_t level, std::size_t v) { return &reach_[(level * n_ + v) * row_words_]; }
  bool reached(std::size_t level, std::size_t v) const {
    return (reach_[(level * n_) * row_words_ + v / BitMatrix::kWordBits] >> (v % BitMatrix::kWordBits)) & 1U;
  }
  Word* common(std::size_t level, std::size_t v) { return &common_[(level * n_ + v) * set_words_]; }

  void or_into(std::vector<Word>& dst, const Word* src) const {
    for (std::size_t w = 0; w < set_words_; ++w) dst[w] |= src[w];
  }

  // reach_ row `level * n_` (first row of each level block) is the set of
  // nodes reached from z by walks of that length.
  void walk_from(std::size_t z, const BitMatrix& upper) {
    Word* level0 = reach_row(0, 0);
    std::fill(level0, level0 + row_words_, Word{0});
    level0[z / BitMatrix::kWordBits] |= Word{1} << (z % BitMatrix::kWordBits);
    std::fill(common(0, z), common(0, z) + set_words_, Word{0});

    for (std::size_t level = 1; level <= u_; ++level) {
      Word* prev = reach_row(level - 1, 0);
      Word* cur = reach_row(level, 0);
      std::fill(cur, cur + row_words_, Word{0});
      for (std::size_t k = 0; k < row_words_; ++k) {
        for (Word pw = prev[k]; pw != 0; pw &= pw - 1) {
          const std::size_t a = k * BitMatrix::kWordBits + static_cast<std::size_t>(std::countr_zero(pw));
          const Word* from = common(level - 1, a);
          upper.for_each_in_row(a, [&](std::size_t v) {
            Word* to = common(level, v);
            const std::size_t bit = a * n_ + v;
            const std::size_t bw = bit / BitMatrix::kWordBits;
            const Word bm = Word{1} << (bit % BitMatrix::kWordBits);
            const Word vm = Word{1} << (v % BitMatrix::kWordBits);
            if ((cur[v / BitMatrix::kWordBits] & vm) == 0) {
              cur[v / BitMatrix::kWordBits] |= vm;
              std::copy(from, from + set_words_, to);
              to[bw] |= bm;
            } else {
              for (std::size_t w = 0; w < set_words_; ++w) to[w] &= from[w] | (w == bw ? bm : Word{0});
            }
          });
        }
      }
    }
  }

  const MixedGraph& h_;
  std::size_t u_;
  std::size_t n_;
  std::size_t set_words_;
  std::size_t row_words_;
  std::vector<Edge> bi_pairs_;
  std::vector<std::vector<std::size_t>> targets_;  // H's directed successors
  std::vector<Word> reach_;   // (u + 1) level blocks; only the first row of each block is used
  std::vector<Word> common_;  // (u + 1) x n edge sets
  std::vector<Word> bi_acc_;
  std::vector<char> bi_seen_;
  std::vector<Word> essential_;
  std::vector<std::uint8_t> tiny_reach_;
  std::vector<Word> tiny_common_;
};

struct Deadline {
  std::optional<std::chrono::steady_clock::time_point> at;
  std::atomic<bool>* expired = nullptr;

  bool passed() const {
    if (expired->load(std::memory_order_relaxed)) return true;
    if (at && std::chrono::steady_clock::now() >= *at) {
      expired->store(true, std::memory_order_relaxed);
      return true;
    }
    return false;
  }
};

inline std::vector<Edge> branch_order(const MixedGraph& h, const CondensationConstraint& cc, SearchOrder order) {
  std::vector<Edge> free;
  const std::size_t n = h.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (cc.allowed.test(i, j)) free.emplace_back(i, j);
    }
  }
  if (order == SearchOrder::kWithinSccFirst) {
    std::stable_partition(free.begin(), free.end(),
                          [&](const Edge& e) { return cc.scc.membership[e.first] == cc.scc.membership[e.second]; });
  }
  return free;
}

/// Depth-first search over presence/absence of each free pair for one rate.
///
/// Before each branch the bounds are tightened to a fixpoint: a pair whose
/// addition alone breaks P1 is fixed absent, a pair whose removal alone
/// breaks P2 is fixed present. Both follow from monotonicity of undersampling,
/// so they only remove subtrees P1/P2 would reject anyway.
class RateSearch {
 public:
  RateSearch(const MixedGraph& h, int u, const std::vector<Edge>& free, const SolveConfig& cfg, const Deadline& deadline)
      : RateSearch(h, h, u, free, cfg, deadline) {}

  /// Relaxed form: results satisfy undersample(g, u) within h and covering
  /// `required` (an edge-subset of h) instead of equalling h.
  RateSearch(const MixedGraph& h, const MixedGraph& required, int u, const std::vector<Edge>& free,
             const SolveConfig& cfg, const Deadline& deadline, bool first_only = false)
      : free_(free), cfg_(cfg), deadline_(deadline), exact_(h == required), first_only_(first_only), checker_(h, u),
        cover_(required, u), support_(required, u), lower_(h.size()), upper_(h.size()), state_(free.size(), kOpen) {
    for (auto [i, j] : free_) upper_.set(i, j);
  }

  std::vector<std::string> run() {
    if (cfg_.prune_lower_bound && !checker_.within(lower_)) {
      ++stats_.prunes_lower;
      return {};
    }
    descend(0, true, true);
    return std::move(found_);
  }

  const SearchStats& stats() const noexcept { return stats_; }

 private:
  enum State : unsigned char { kOpen, kPresent, kAbsent };

  // lower_grew / upper_shrank: which bound moved since the last fixpoint.
  void descend(std::size_t pos, bool lower_grew, bool upper_shrank) {
    if ((++stats_.branch_nodes & 0x3FF) == 0 && deadline_.passed()) stats_.timed_out = true;
    if (stats_.timed_out || stats_.truncated || (first_only_ && !found_.empty())) return;

    const std::size_t mark = trail_.size();
    if (tighten(pos, lower_grew, upper_shrank)) {
      while (pos < free_.size() && state_[pos] != kOpen) ++pos;
      if (pos == free_.size()) {
        if (exact_ ? checker_.matches(lower_) : checker_.within(lower_) && cover_.covers(lower_)) {
          found_.push_back(canonical_key(DirectedGraph(lower_)));
          if (cfg_.max_class_size && found_.size() >= *cfg_.max_class_size) stats_.truncated = true;
        }
      } else {
        branch(pos);
      }
    }
    undo(mark);
  }

  void branch(std::size_t pos) {
    const auto [i, j] = free_[pos];
    state_[pos] = kPresent;
    lower_.set(i, j);
    if (cfg_.prune_lower_bound && !checker_.within(lower_)) {
      ++stats_.prunes_lower;
    } else {
      descend(pos + 1, true, false);
    }
    lower_.reset(i, j);

    state_[pos] = kAbsent;
    upper_.reset(i, j);
    descend(pos + 1, false, true);
    upper_.set(i, j);
    state_[pos] = kOpen;
  }

  // Single-pair consequences of P1/P2 are monotone in the bound they read,
  // so each family is recomputed only after that bound moved. Returns false
  // when the bounds admit no completion.
  bool tighten(std::size_t pos, bool lower_grew, bool upper_shrank) {
    bool sweep_lower = lower_grew && cfg_.prune_lower_bound;
    bool sweep_upper = upper_shrank && cfg_.prune_upper_bound;
    while (sweep_lower || sweep_upper) {
      if (sweep_upper) {
        sweep_upper = false;
        if (!support_.analyze(upper_)) {
          ++stats_.prunes_upper;
          return false;
        }
        bool grew = false;
        for (std::size_t k = pos; k < free_.size(); ++k) {
          if (state_[k] != kOpen || !support_.essential(free_[k].first, free_[k].second)) continue;
          fix(k, kPresent);
          grew = true;
        }
        if (grew && cfg_.prune_lower_bound) {
          if (!checker_.within(lower_)) {
            ++stats_.prunes_lower;
            return false;
          }
          sweep_lower = true;
        }
      }
      if (sweep_lower) {
        sweep_lower = false;
        for (std::size_t k = pos; k < free_.size(); ++k) {
          if (state_[k] != kOpen) continue;
          const auto [i, j] = free_[k];
          lower_.set(i, j);
          const bool fits = checker_.within(lower_);
          lower_.reset(i, j);
          if (!fits) {
            fix(k, kAbsent);
            sweep_upper = cfg_.prune_upper_bound;
          }
        }
      }
    }
    return true;
  }

  void fix(std::size_t k, State s) {
    const auto [i, j] = free_[k];
    state_[k] = s;
    if (s == kPresent) {
      lower_.set(i, j);
    } else {
      upper_.reset(i, j);
    }
    trail_.push_back(k);
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      const std::size_t k = trail_.back();
      trail_.pop_back();
      const auto [i, j] = free_[k];
      if (state_[k] == kPresent) {
        lower_.reset(i, j);
      } else {
        upper_.set(i, j);
      }
      state_[k] = kOpen;
    }
  }

  const std::vector<Edge>& free_;
  const SolveConfig& cfg_;
  const Deadline& deadline_;
  bool exact_;
  bool first_only_;
  BoundChecker checker_;
  BoundChecker cover_;
  SupportAnalyzer support_;
  BitMatrix lower_, upper_;
  std::vector<State> state_;
  std::vector<std::size_t> trail_;
  std::vector<std::string> found_;
  SearchStats stats_;
};

/// An H component C with two or more nodes and no cyclic component of H
/// incomparable to it is a whole SCC of any solution G1: the H component
/// containing C's G1 SCC would otherwise split into gcd(period, u) mutually
/// unreachable cyclic parts. Walks of G1 between nodes of C then stay in C,
/// so G1 restricted to C undersamples to exactly H's directed edges on C and
/// to a subset of H's bidirected edges on C. If that subproblem has no
/// solution at rate u, neither does the whole graph.
///
/// When C has period 1 in H, its G1 SCC is primitive (the G1 period p has
/// gcd(p, u) = 1 and carries over to H), so by Wielandt's bound every rate
/// u >= (|C| - 1)^2 + 1 makes C complete. Those rates are rejected without
/// search unless H is complete on C.
struct ComponentProblem {
  MixedGraph h;         // H induced on the component
  MixedGraph required;  // same directed part, no bidirected requirement
  std::vector<Edge> free;
  /// First rate from which only a complete H on C is reachable; 0 if none.
  int saturation_rate = 0;
  /// False when C is all of H: the main search already is the subproblem.
  bool search = true;
};

inline std::vector<ComponentProblem> self_contained_components(const MixedGraph& h, const SccDecomposition& d) {
  std::vector<ComponentProblem> out;
  const BitMatrix reach = condensation_reachability(d);
  for (std::size_t c = 0; c < d.component_count(); ++c) {
    const auto& nodes = d.components[c];
    if (nodes.size() < 2) continue;
    bool has_sibling = false;
    for (std::size_t o = 0; o < d.component_count() && !has_sibling; ++o) {
      has_sibling = o != c && d.is_cyclic(o) && !reach.test(c, o) && !reach.test(o, c);
    }
    if (has_sibling) continue;
    const std::size_t m = nodes.size();
    ComponentProblem p{MixedGraph(m), MixedGraph(m), {}, 0, m < h.size()};
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        p.free.emplace_back(a, b);
        if (h.has_directed(nodes[a], nodes[b])) {
          p.h.add_directed(a, b);
          p.required.add_directed(a, b);
        }
        if (a < b && h.has_bidirected(nodes[a], nodes[b])) p.h.add_bidirected(a, b);
      }
    }
    if (d.period[c] == 1 && p.h.directed_count() != m * m) {
      p.saturation_rate = static_cast<int>((m - 1) * (m - 1) + 1);
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline bool components_feasible(const std::vector<ComponentProblem>& parts, int u, const SolveConfig& cfg,
                                const Deadline& deadline, SearchStats& stats) {
  for (const auto& p : parts) {
    if (p.saturation_rate != 0 && u >= p.saturation_rate) return false;
    if (!p.search) continue;
    RateSearch search(p.h, p.required, u, p.free, cfg, deadline, true);
    const bool found = !search.run().empty();
    stats.merge(search.stats());
    if (!found && !search.stats().timed_out) return false;
  }
  return true;
}

inline void verify_class(const EquivalenceClass& cls, const MixedGraph& h) {
  for (const auto& e : cls.entries) {
    if (e.witnesses.empty()) throw std::logic_error("class entry without witness rate");
    for (int u : e.witnesses) {
      if (!graphs_equal(undersample(e.graph, u), h)) {
        throw std::logic_error("verification failed: entry does not undersample to H at claimed rate " +
                               std::to_string(u));
      }
    }
  }
}

}  // namespace detail

/// Every G1 on h.size() nodes with undersample(G1, u) == h for some
/// u in [1, cfg.maxu], with all such u. An empty result means no exact
/// solution exists within the rate bound.
inline EquivalenceClass solve(const MixedGraph& h, const SolveConfig& cfg = {}) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  EquivalenceClass cls;
  cls.n = h.size();
  cls.maxu = cfg.maxu;

  const CondensationConstraint cc = condensation_constraint(h, cfg.use_scc_decomposition);
  cls.stats.warnings = cc.warnings;
  cls.stats.forced_absent = cc.forbidden_count();
  const std::vector<Edge> free = detail::branch_order(h, cc, cfg.search_order);

  std::atomic<bool> expired{false};
  detail::Deadline deadline{std::nullopt, &expired};
  if (cfg.time_limit) deadline.at = start + *cfg.time_limit;

  struct RateResult {
    std::vector<std::string> keys;
    SearchStats stats;
  };
  std::vector<RateResult> per_rate(static_cast<std::size_t>(cfg.maxu));
  const auto parts = cfg.prune_components ? detail::self_contained_components(h, cc.scc)
                                          : std::vector<detail::ComponentProblem>{};
  auto run_rate = [&](int u) {
    SearchStats pre;
    if (!detail::components_feasible(parts, u, cfg, deadline, pre)) {
      pre.prunes_component = 1;
      per_rate[static_cast<std::size_t>(u - 1)] = {{}, pre};
      return;
    }
    detail::RateSearch search(h, u, free, cfg, deadline);
    auto keys = search.run();
    pre.merge(search.stats());
    per_rate[static_cast<std::size_t>(u - 1)] = {std::move(keys), pre};
  };

  if (cfg.threads <= 1) {
    for (int u = 1; u <= cfg.maxu; ++u) run_rate(u);
  } else {
    std::atomic<int> next_rate{1};
    std::vector<std::future<void>> workers;
    const unsigned count = std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.maxu));
    for (unsigned t = 0; t < count; ++t) {
      workers.push_back(std::async(std::launch::async, [&] {
        for (int u = next_rate++; u <= cfg.maxu; u = next_rate++) run_rate(u);
      }));
    }
    for (auto& w : workers) w.get();
  }

  // Merge in rate order; the map doubles as the seen-set across rates.
  std::map<std::string, std::vector<int>> witnesses;
  for (int u = 1; u <= cfg.maxu; ++u) {
    auto& r = per_rate[static_cast<std::size_t>(u - 1)];
    cls.stats.merge(r.stats);
    for (auto& key : r.keys) witnesses[key].push_back(u);
  }
  cls.entries.reserve(witnesses.size());
  for (auto& [key, rates] : witnesses) cls.entries.push_back({graph_from_key(h.size(), key), std::move(rates)});

  detail::verify_class(cls, h);
  if (cls.stats.timed_out) cls.stats.warnings.push_back("time limit reached; class may be incomplete");
  if (cls.stats.truncated) cls.stats.warnings.push_back("class size limit reached; class is incomplete");
  cls.stats.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return cls;
}

/// {u in [1, maxu] : undersample(g, u) == h}.
inline std::vector<int> witness_rates(const DirectedGraph& g, const MixedGraph& h, int maxu) {
  if (g.size() != h.size()) {
    throw InputError("witness_rates: graph has " + std::to_string(g.size()) + " nodes, H has " +
                     std::to_string(h.size()));
  }
  if (maxu < 1) throw InputError("maxu must be >= 1");
  std::vector<int> out;
  for (int u = 1; u <= maxu; ++u) {
    if (graphs_equal(undersample(g, u), h)) out.push_back(u);
  }
  return out;
}

}  // namespace tscl
