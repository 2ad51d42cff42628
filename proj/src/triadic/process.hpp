#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "triadic/bitset.hpp"
#include "triadic/common.hpp"
#include "triadic/flatmap.hpp"

namespace triadic {

using Vertex = std::uint32_t;

// Unordered pair in canonical (sorted) order.
struct Edge {
  Vertex a, b;  // a < b
  static Edge of(Vertex u, Vertex v) { return u < v ? Edge{u, v} : Edge{v, u}; }
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Unordered vertex 3-set in canonical sorted order.  Vertex ids must fit in
// 21 bits so a triple packs into one 64-bit key.
struct Triple {
  std::array<Vertex, 3> v;  // strictly increasing

  static Triple of(Vertex a, Vertex b, Vertex c) {
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    return Triple{{a, b, c}};
  }

  std::uint64_t key() const {
    return static_cast<std::uint64_t>(v[0]) |
           (static_cast<std::uint64_t>(v[1]) << 21) |
           (static_cast<std::uint64_t>(v[2]) << 42);
  }

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

// Simple graph with bitset adjacency rows.  Edges are only ever added.
class GraphState {
 public:
  GraphState(std::uint32_t n, Vertex v0);

  std::uint32_t n() const { return n_; }
  Vertex v0() const { return v0_; }
  bool has_edge(Vertex u, Vertex v) const { return rows_[u].test(v); }
  void add_edge(Vertex u, Vertex v);
  std::uint32_t degree(Vertex v) const { return degree_[v]; }
  std::uint64_t edge_count() const { return edge_count_; }
  bool complete() const {
    return edge_count_ == static_cast<std::uint64_t>(n_) * (n_ - 1) / 2;
  }
  const Bitset& neighbors(Vertex v) const { return rows_[v]; }

 private:
  std::uint32_t n_;
  Vertex v0_;
  std::vector<Bitset> rows_;
  std::vector<std::uint32_t> degree_;
  std::uint64_t edge_count_ = 0;
};

// An open triple: apex adjacent to both endpoints of the absent edge.
struct OpenTriple {
  Vertex apex;
  Vertex u, v;  // missing edge, u < v

  Triple triple() const { return Triple::of(apex, u, v); }
};

// Append-only store of every triple that ever became open, with lazy
// deletion: an item is live iff its sampled bit is clear and its missing
// edge is still absent (a triple enters the two-edge state exactly once,
// so no duplicates exist).  Uniform sampling is rejection over the dense
// array with periodic compaction.  Closing an edge uv retires all its
// open triples in O(1): their number is codegree(u, v) minus the count of
// already-sampled two-edge triples over uv, which `sampled_` tracks per
// pair.  Also maintains F_v, the number of open triples whose missing
// edge touches v.
class Registry {
 public:
  explicit Registry(std::uint32_t n) : n_(n), f_count_(n, 0) {
    // Dense per-pair sampled counts stay within the last-level cache for
    // moderate n; larger instances fall back to the hash map.
    if (n <= 4096) sampled_dense_.assign(std::size_t(n) * (n - 1) / 2, 0);
  }

  std::size_t size() const { return live_; }
  bool empty() const { return live_ == 0; }
  std::uint64_t open_at(Vertex v) const { return f_count_[v]; }

  std::size_t raw_size() const { return items_.size(); }
  OpenTriple at(std::size_t i) const { return unpack(items_[i]); }
  bool is_live(std::size_t i, const GraphState& g) const {
    std::uint64_t w = items_[i];
    return !(w & kDeadBit) &&
           !g.has_edge(static_cast<Vertex>(w & kMask21),
                       static_cast<Vertex>((w >> 21) & kMask21));
  }

  // Number of open triples whose missing edge is exactly {u, v}.
  std::uint64_t open_between(const GraphState& g, Vertex u, Vertex v) const {
    if (g.has_edge(u, v)) return 0;
    std::uint64_t cod = g.neighbors(u).intersection_count(g.neighbors(v));
    return cod - sampled_count(u, v);
  }

  bool contains(const GraphState& g, const OpenTriple& t) const {
    const std::uint64_t w = pack(t);
    for (std::size_t i = 0; i < items_.size(); ++i)
      if (items_[i] == w && is_live(i, g)) return true;
    return false;
  }

  std::vector<OpenTriple> live_items(const GraphState& g) const {
    std::vector<OpenTriple> out;
    out.reserve(live_);
    for (std::size_t i = 0; i < items_.size(); ++i)
      if (is_live(i, g)) out.push_back(at(i));
    return out;
  }

  template <typename Fn>
  void for_each_live(const GraphState& g, Fn&& fn) const {
    for (std::size_t i = 0; i < items_.size(); ++i)
      if (is_live(i, g)) fn(at(i));
  }

  void insert(const OpenTriple& t) {
    items_.push_back(pack(t));
    advise_storage();
    ++live_;
    ++f_count_[t.u];
    ++f_count_[t.v];
  }

  // Uniform over live items; the caller must ensure live_ > 0.
  std::size_t sample(const GraphState& g, Rng& rng) {
    if (items_.size() >= 1024 && live_ * 2 < items_.size()) compact(g);
    for (;;) {
      std::size_t i = rng.below(items_.size());
      if (is_live(i, g)) return i;
    }
  }

  void mark_sampled(std::size_t pos);
  // Used when rebuilding after rounds to account for triples sampled then.
  void note_sampled(Vertex u, Vertex v, std::uint64_t count) {
    if (!sampled_dense_.empty())
      sampled_dense_[tri_index(u, v)] = static_cast<std::uint16_t>(count);
    else
      sampled_.insert(pair_key(u, v), static_cast<std::uint32_t>(count));
  }
  // Retires all open triples with missing edge {u, v}; `codegree` is the
  // common-neighbor count of u and v.  Returns how many were open.
  std::uint64_t close_pair(Vertex u, Vertex v, std::uint64_t codegree);

  void reserve(std::size_t cap) {
    items_.reserve(cap);
    advise_storage();
  }
  void clear();

  // Shifted so the reserved FlatMap keys cannot occur.
  static std::uint64_t pair_key(Vertex u, Vertex v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u + 1) << 32) | (v + 1);
  }

 private:
  static constexpr std::uint64_t kDeadBit = 1ull << 63;
  static constexpr std::uint64_t kMask21 = (1ull << 21) - 1;

  static std::uint64_t pack(const OpenTriple& t) {
    return static_cast<std::uint64_t>(t.u) |
           (static_cast<std::uint64_t>(t.v) << 21) |
           (static_cast<std::uint64_t>(t.apex) << 42);
  }
  static OpenTriple unpack(std::uint64_t w) {
    return OpenTriple{static_cast<Vertex>((w >> 42) & kMask21),
                      static_cast<Vertex>(w & kMask21),
                      static_cast<Vertex>((w >> 21) & kMask21)};
  }

  void compact(const GraphState& g);
  // The item array is sampled at random and grows to hundreds of MB; ask
  // the kernel for huge pages whenever the buffer moves.
  void advise_storage();

  std::size_t tri_index(Vertex u, Vertex v) const {
    if (u > v) std::swap(u, v);
    return std::size_t(u) * (2 * n_ - u - 1) / 2 + (v - u - 1);
  }
  std::uint64_t sampled_count(Vertex u, Vertex v) const {
    if (!sampled_dense_.empty()) return sampled_dense_[tri_index(u, v)];
    const std::uint32_t* s = sampled_.find(pair_key(u, v));
    return s ? *s : 0;
  }

  std::uint32_t n_;
  std::vector<std::uint64_t> items_;  // packed triples, bit 63 = sampled
  std::uint64_t live_ = 0;
  const void* advised_ = nullptr;
  // Sampled triples whose missing edge is still absent, counted per pair.
  std::vector<std::uint16_t> sampled_dense_;
  FlatMap sampled_;
  std::vector<std::uint64_t> f_count_;
};

// Lazily realized H(n,p): the outcome of a triple is a pure function of
// (seed, canonical triple), so the hypergraph is well defined independent
// of query order.  The queried set is kept only when tracking is on.
class OutcomeOracle {
 public:
  OutcomeOracle(std::uint64_t seed, double p, bool track)
      : seed_(seed), p_(p), track_(track) {}

  static bool decide(std::uint64_t seed, const Triple& t, double p) {
    std::uint64_t h = splitmix64(seed ^ splitmix64(t.key()));
    return static_cast<double>(h >> 11) * 0x1.0p-53 < p;
  }

  bool query(const Triple& t) {
    note_query(t);
    return decide(seed_, t, p_);
  }

  // Bookkeeping for a query whose outcome was decided by the caller.
  // Tracking appends to a flat log; the deduplicated set is built lazily.
  void note_query(const Triple& t) {
    ++query_count_;
    if (track_) query_log_.push_back(t.key());
  }

  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t query_count() const { return query_count_; }
  bool tracking() const { return track_; }
  bool was_queried(const Triple& t) const {
    return queried().contains(t.key());
  }
  const std::unordered_set<std::uint64_t>& queried() const {
    for (; consumed_ < query_log_.size(); ++consumed_)
      queried_.insert(query_log_[consumed_]);
    return queried_;
  }

 private:
  std::uint64_t seed_;
  double p_;
  bool track_;
  std::uint64_t query_count_ = 0;
  std::vector<std::uint64_t> query_log_;
  mutable std::size_t consumed_ = 0;
  mutable std::unordered_set<std::uint64_t> queried_;
};

struct StepOutcome {
  Triple sampled;
  bool success = false;
  std::optional<Edge> added_edge;
  std::uint64_t triples_closed = 0;
  std::uint64_t triples_opened = 0;
};

struct RoundOutcome {
  std::uint64_t q_before = 0;
  std::uint64_t sampled_count = 0;
  std::uint64_t success_count = 0;
  std::uint64_t new_edges = 0;
  std::uint64_t q_after = 0;
};

enum class StallReason { Complete, RegistryEmpty, Truncated };

struct FinalReport {
  bool propagated = false;
  StallReason stall_reason = StallReason::RegistryEmpty;
  std::uint64_t final_edges = 0;
  std::uint64_t phase1_steps = 0;
  std::uint64_t phase2_rounds = 0;
};

struct Phase1Summary {
  std::uint64_t steps_taken = 0;
  bool stalled = false;  // registry emptied before completion
};

enum class Phase2Mode { Standard, Sprinkling };

// One record per sampled triple.  `added_edge` is set for the sample that
// actually added the edge (first witness wins for phase-2 duplicates).
struct HistoryRecord {
  std::uint64_t index;
  Triple triple;
  bool success;
  std::optional<Edge> added_edge;
};

class Process {
 public:
  // Star at v0; registry seeded with all triples {v0, u, w}.  Throws
  // Error(INVALID_INSTANCE) for n < 3 or v0 >= n, INVALID_PROBABILITY for
  // p outside [0, 1].
  Process(std::uint32_t n, double p, std::uint64_t seed, Vertex v0,
          bool track_history = false);
  Process(std::uint32_t n, double p, std::uint64_t seed,
          std::uint64_t order_seed, Vertex v0, bool track_history = false);

  // Samples one uniform open triple; throws Error(STALLED) on an empty
  // registry.
  StepOutcome step();

  // Adds edge uv: closes every open triple with missing edge uv, opens the
  // triples that now span exactly two edges.  Returns (closed, opened).
  std::pair<std::uint64_t, std::uint64_t> apply_edge(Vertex u, Vertex v);

  Phase1Summary run_phase1(std::uint64_t max_steps);

  // Samples every currently open triple, then applies the distinct missing
  // edges of the successes in canonical order.
  RoundOutcome round(std::optional<double> override_p = std::nullopt);

  FinalReport run_phase2(Phase2Mode mode, std::uint64_t max_rounds);

  const GraphState& graph() const { return graph_; }
  // Materializes the open set if a round left it implicit.
  const Registry& registry() const {
    ensure_registry();
    return registry_;
  }
  std::uint64_t open_count() const {
    return registry_stale_ ? cached_open_count_ : registry_.size();
  }
  const OutcomeOracle& oracle() const { return oracle_; }
  std::uint64_t step_index() const { return step_index_; }
  std::uint64_t round_index() const { return round_index_; }
  const std::vector<HistoryRecord>& history() const { return history_; }
  bool tracks_history() const { return track_history_; }

  static double sprinkle_probability(std::uint32_t n);
  static std::uint64_t default_max_rounds(std::uint32_t n);

  void write_history(std::ostream& os) const;

 private:
  static void validate(std::uint32_t n, double p, Vertex v0);
  void record(const Triple& t, bool success, std::optional<Edge> added);
  void ensure_registry() const;

  static std::uint64_t edge_key(const Edge& e) {
    return (static_cast<std::uint64_t>(e.a) << 32) | e.b;
  }

  // After a round the open set is exactly the set of triples spanning two
  // edges at least one of which is in the round's frontier: every triple
  // open before the round was sampled during it, and a sampled triple
  // keeps its two old edges, so it can never satisfy the frontier
  // condition.  Each triple is emitted once, from its canonically smallest
  // frontier edge; `new_rows_` marks adjacencies the latest round added.
  template <typename Fn>
  void for_each_frontier_open(Fn&& fn) const {
    for (const Edge& e : frontier_) {
      graph_.neighbors(e.a).for_each_xor(
          graph_.neighbors(e.b), [&](std::size_t xi) {
            auto x = static_cast<Vertex>(xi);
            if (x == e.a || x == e.b) return;
            Vertex apex = graph_.has_edge(e.a, x) ? e.a : e.b;
            Vertex other = apex == e.a ? e.b : e.a;
            if (new_rows_[apex].test(x) && Edge::of(apex, x) < e) return;
            fn(OpenTriple{apex, std::min(x, other), std::max(x, other)});
          });
    }
  }

  // Visits the current open set without forcing materialization.
  template <typename Fn>
  void for_each_open(Fn&& fn) const {
    if (registry_stale_) {
      for_each_frontier_open(fn);
    } else {
      registry_.for_each_live(graph_, fn);
    }
  }

  GraphState graph_;
  mutable Registry registry_;
  mutable bool registry_stale_ = false;
  std::vector<Edge> frontier_;      // edges added by the latest round, sorted
  std::vector<Bitset> new_rows_;    // adjacency delta of the latest round
  std::uint64_t cached_open_count_ = 0;
  OutcomeOracle oracle_;
  Rng order_rng_;
  std::uint64_t step_index_ = 0;
  std::uint64_t round_index_ = 0;
  std::uint64_t sample_counter_ = 0;
  bool track_history_;
  std::vector<HistoryRecord> history_;
};

// Test oracle: enumerates all C(n,3) triples and returns those spanning
// exactly two edges and not in `sampled`.  Refuses n above the cap.
std::vector<OpenTriple> brute_force_open_set(
    const GraphState& graph, const std::unordered_set<std::uint64_t>& sampled,
    std::uint32_t cap = 64);

}  // namespace triadic
