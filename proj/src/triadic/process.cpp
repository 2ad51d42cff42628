#include "triadic/process.hpp"

#include <algorithm>
#include <cmath>

#if defined(__linux__)
#include <sys/mman.h>
#endif

namespace triadic {

GraphState::GraphState(std::uint32_t n, Vertex v0)
    : n_(n), v0_(v0), rows_(n, Bitset(n)), degree_(n, 0) {}

void GraphState::add_edge(Vertex u, Vertex v) {
  rows_[u].set(v);
  rows_[v].set(u);
  ++degree_[u];
  ++degree_[v];
  ++edge_count_;
}

void Registry::mark_sampled(std::size_t pos) {
  const OpenTriple t = unpack(items_[pos]);
  --f_count_[t.u];
  --f_count_[t.v];
  --live_;
  if (!sampled_dense_.empty()) {
    ++sampled_dense_[tri_index(t.u, t.v)];
  } else {
    std::uint64_t pk = pair_key(t.u, t.v);
    if (std::uint32_t* s = sampled_.find(pk))
      ++*s;
    else
      sampled_.insert(pk, 1);
  }
  items_[pos] |= kDeadBit;
}

std::uint64_t Registry::close_pair(Vertex u, Vertex v,
                                   std::uint64_t codegree) {
  // Every two-edge triple over uv is either still open or was sampled.
  std::uint64_t closed = codegree - sampled_count(u, v);
  // The pair is complete; no further events.
  if (!sampled_dense_.empty())
    sampled_dense_[tri_index(u, v)] = 0;
  else
    sampled_.erase(pair_key(u, v));
  live_ -= closed;
  f_count_[u] -= closed;
  f_count_[v] -= closed;
  return closed;
}

void Registry::compact(const GraphState& g) {
  std::size_t w = 0;
  for (std::size_t r = 0; r < items_.size(); ++r)
    if (is_live(r, g)) items_[w++] = items_[r];
  items_.resize(w);
}

void Registry::clear() {
  items_.clear();
  items_.shrink_to_fit();
  live_ = 0;
  advised_ = nullptr;
  std::fill(sampled_dense_.begin(), sampled_dense_.end(), 0);
  sampled_.clear();
  std::fill(f_count_.begin(), f_count_.end(), 0);
}

void Registry::advise_storage() {
#if defined(__linux__)
  if (items_.data() == advised_ || items_.capacity() < (1u << 20)) return;
  advised_ = items_.data();
  auto addr = reinterpret_cast<std::uintptr_t>(items_.data());
  std::uintptr_t lo = addr & ~std::uintptr_t(4095);
  std::size_t len = items_.capacity() * sizeof(std::uint64_t) + (addr - lo);
  madvise(reinterpret_cast<void*>(lo), len, MADV_HUGEPAGE);
#endif
}

namespace {
std::uint64_t derive_order_seed(std::uint64_t seed) {
  return splitmix64(seed ^ 0x6f72646572ULL);  // distinct stream per seed
}
}  // namespace

Process::Process(std::uint32_t n, double p, std::uint64_t seed, Vertex v0,
                 bool track_history)
    : Process(n, p, seed, derive_order_seed(seed), v0, track_history) {}

Process::Process(std::uint32_t n, double p, std::uint64_t seed,
                 std::uint64_t order_seed, Vertex v0, bool track_history)
    : graph_((validate(n, p, v0), n), v0),
      registry_(n),
      oracle_(seed, p, track_history),
      order_rng_(order_seed),
      track_history_(track_history) {
  for (Vertex u = 0; u < n; ++u)
    if (u != v0) graph_.add_edge(v0, u);
  // All triples {v0, u, w} start open with apex v0.
  registry_.reserve(static_cast<std::size_t>(n - 1) * (n - 2) / 2);
  for (Vertex u = 0; u < n; ++u) {
    if (u == v0) continue;
    for (Vertex w = u + 1; w < n; ++w) {
      if (w == v0) continue;
      registry_.insert(OpenTriple{v0, u, w});
    }
  }
}

void Process::validate(std::uint32_t n, double p, Vertex v0) {
  if (n < 3 || v0 >= n || n > (1u << 20))
    throw Error(TRIADIC_ERR_INVALID_INSTANCE,
                "need 3 <= n <= 2^20 and v0 < n");
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(TRIADIC_ERR_INVALID_PROBABILITY, "p must lie in [0, 1]");
}

void Process::record(const Triple& t, bool success, std::optional<Edge> added) {
  if (track_history_)
    history_.push_back(HistoryRecord{sample_counter_, t, success, added});
  ++sample_counter_;
}

void Process::ensure_registry() const {
  if (!registry_stale_) return;
  // Rebuild from the frontier, then restate the sampled-count map: for an
  // absent pair, every two-edge triple not open now was sampled in some
  // earlier round.
  FlatMap open_per_pair;
  for_each_frontier_open([&](const OpenTriple& ot) {
    registry_.insert(ot);
    open_per_pair.bump(Registry::pair_key(ot.u, ot.v));
  });
  const std::uint32_t n = graph_.n();
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) {
      if (graph_.has_edge(u, v)) continue;
      std::uint64_t cod =
          graph_.neighbors(u).intersection_count(graph_.neighbors(v));
      if (cod == 0) continue;
      const std::uint32_t* open =
          open_per_pair.find(Registry::pair_key(u, v));
      std::uint64_t gone = cod - (open ? *open : 0);
      if (gone) registry_.note_sampled(u, v, gone);
    }
  registry_stale_ = false;
}

std::pair<std::uint64_t, std::uint64_t> Process::apply_edge(Vertex u,
                                                            Vertex v) {
  ensure_registry();
  if (u == v || graph_.has_edge(u, v))
    throw Error(TRIADIC_ERR_ILLEGAL_EDGE, "edge already present or u == v");
  // Every open triple with missing edge uv now spans three edges.
  std::uint64_t cod =
      graph_.neighbors(u).intersection_count(graph_.neighbors(v));
  std::uint64_t closed = registry_.close_pair(u, v, cod);
  graph_.add_edge(u, v);
  // Newly opened triples span the fresh edge plus one older edge.  A triple
  // gaining its second edge here was never open before (edge counts only
  // grow), so it cannot have been sampled and no duplicate insert can occur.
  std::uint64_t opened = 0;
  graph_.neighbors(u).for_each([&](std::size_t xi) {
    auto x = static_cast<Vertex>(xi);
    if (x == v || graph_.has_edge(x, v)) return;
    registry_.insert(OpenTriple{u, std::min(x, v), std::max(x, v)});
    ++opened;
  });
  graph_.neighbors(v).for_each([&](std::size_t xi) {
    auto x = static_cast<Vertex>(xi);
    if (x == u || graph_.has_edge(x, u)) return;
    registry_.insert(OpenTriple{v, std::min(x, u), std::max(x, u)});
    ++opened;
  });
  return {closed, opened};
}

StepOutcome Process::step() {
  ensure_registry();
  if (registry_.empty())
    throw Error(TRIADIC_ERR_STALLED, "no open triple to sample");
  const std::size_t pos = registry_.sample(graph_, order_rng_);
  const OpenTriple ot = registry_.at(pos);
  const Triple t = ot.triple();
  StepOutcome out;
  out.sampled = t;
  out.success = oracle_.query(t);
  registry_.mark_sampled(pos);
  ++step_index_;
  if (out.success) {
    out.added_edge = Edge{ot.u, ot.v};
    auto [closed, opened] = apply_edge(ot.u, ot.v);
    out.triples_closed = closed + 1;  // + the sampled triple itself
    out.triples_opened = opened;
  } else {
    out.triples_closed = 1;
    out.triples_opened = 0;
  }
  record(t, out.success, out.added_edge);
  return out;
}

Phase1Summary Process::run_phase1(std::uint64_t max_steps) {
  Phase1Summary s;
  ensure_registry();
  while (s.steps_taken < max_steps && !graph_.complete()) {
    if (registry_.empty()) {
      s.stalled = true;
      break;
    }
    step();
    ++s.steps_taken;
  }
  return s;
}

RoundOutcome Process::round(std::optional<double> override_p) {
  RoundOutcome out;
  out.q_before = open_count();
  // The round is simultaneous: every decision is a pure function of
  // (seed, triple), fixed before any edge lands.  Sprinkling uses a fresh
  // Bernoulli keyed by (seed, round, triple).
  const std::uint64_t decide_seed =
      override_p ? splitmix64(oracle_.seed() ^ (0x5350524bULL + round_index_))
                 : oracle_.seed();
  const double decide_p = override_p ? *override_p : oracle_.p();

  // Stream the open set; only successes are materialized.  All sampled
  // triples leave the open set permanently.  History records are written
  // in stream order; the first witness of each edge carries it.
  std::vector<OpenTriple> wins;
  std::unordered_set<std::uint64_t> first_witness;
  if (track_history_) history_.reserve(history_.size() + out.q_before);
  for_each_open([&](const OpenTriple& ot) {
    const Triple t = ot.triple();
    bool success = OutcomeOracle::decide(decide_seed, t, decide_p);
    oracle_.note_query(t);
    ++out.sampled_count;
    std::optional<Edge> added;
    if (success) {
      ++out.success_count;
      wins.push_back(ot);
      if (track_history_) {
        std::uint64_t ek = (static_cast<std::uint64_t>(ot.u) << 32) | ot.v;
        if (first_witness.insert(ek).second) added = Edge{ot.u, ot.v};
      }
    }
    if (track_history_) record(t, success, added);
  });

  // Distinct missing edges, applied in canonical order.
  std::vector<Edge> distinct;
  distinct.reserve(wins.size());
  for (const OpenTriple& ot : wins) distinct.push_back(Edge{ot.u, ot.v});
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  out.new_edges = distinct.size();
  for (const Edge& e : distinct) graph_.add_edge(e.a, e.b);
  if (new_rows_.empty()) new_rows_.assign(graph_.n(), Bitset(graph_.n()));
  for (const Edge& e : frontier_) {
    new_rows_[e.a].reset(e.b);
    new_rows_[e.b].reset(e.a);
  }
  for (const Edge& e : distinct) {
    new_rows_[e.a].set(e.b);
    new_rows_[e.b].set(e.a);
  }

  // The next open set is implied by the frontier; it is materialized only
  // if someone needs the registry (see ensure_registry).
  registry_.clear();
  frontier_ = std::move(distinct);
  registry_stale_ = true;
  cached_open_count_ = 0;
  for_each_frontier_open([&](const OpenTriple&) { ++cached_open_count_; });
  out.q_after = cached_open_count_;

  if (!track_history_) sample_counter_ += out.sampled_count;
  ++round_index_;
  return out;
}

double Process::sprinkle_probability(std::uint32_t n) {
  return 4.0 / std::sqrt(static_cast<double>(n) * std::log(n));
}

std::uint64_t Process::default_max_rounds(std::uint32_t n) {
  return 10 * static_cast<std::uint64_t>(std::ceil(std::log2(n)));
}

FinalReport Process::run_phase2(Phase2Mode mode, std::uint64_t max_rounds) {
  FinalReport r;
  r.phase1_steps = step_index_;
  std::uint64_t rounds = 0;
  while (!graph_.complete() && open_count() > 0 && rounds < max_rounds) {
    std::optional<double> override_p;
    // Sprinkling starts from the second phase-2 round.
    if (mode == Phase2Mode::Sprinkling && rounds >= 1)
      override_p = sprinkle_probability(graph_.n());
    round(override_p);
    ++rounds;
  }
  r.phase2_rounds = rounds;
  r.final_edges = graph_.edge_count();
  r.propagated = graph_.complete();
  if (r.propagated)
    r.stall_reason = StallReason::Complete;
  else if (open_count() == 0)
    r.stall_reason = StallReason::RegistryEmpty;
  else
    r.stall_reason = StallReason::Truncated;
  return r;
}

void Process::write_history(std::ostream& os) const {
  for (const HistoryRecord& h : history_) {
    os << h.index << ' ' << h.triple.v[0] << ' ' << h.triple.v[1] << ' '
       << h.triple.v[2] << ' ' << (h.success ? 1 : 0) << ' ';
    if (h.added_edge)
      os << h.added_edge->a << ' ' << h.added_edge->b;
    else
      os << '-';
    os << '\n';
  }
}

std::vector<OpenTriple> brute_force_open_set(
    const GraphState& graph, const std::unordered_set<std::uint64_t>& sampled,
    std::uint32_t cap) {
  const std::uint32_t n = graph.n();
  if (n > cap)
    throw Error(TRIADIC_ERR_REFUSED_SCALE, "brute force refused above cap");
  std::vector<OpenTriple> out;
  for (Vertex a = 0; a < n; ++a)
    for (Vertex b = a + 1; b < n; ++b)
      for (Vertex c = b + 1; c < n; ++c) {
        if (sampled.contains(Triple{{a, b, c}}.key())) continue;
        bool ab = graph.has_edge(a, b), ac = graph.has_edge(a, c),
             bc = graph.has_edge(b, c);
        int span = int(ab) + int(ac) + int(bc);
        if (span != 2) continue;
        if (!ab) out.push_back(OpenTriple{c, a, b});
        else if (!ac) out.push_back(OpenTriple{b, a, c});
        else out.push_back(OpenTriple{a, b, c});
      }
  return out;
}

}  // namespace triadic
