#include "triadic/topology.hpp"

#include <algorithm>
#include <unordered_map>
#include <sstream>

namespace triadic::topo {

CollapseCertificate extract_certificate(const std::vector<HistoryRecord>& hist,
                                        std::uint32_t n, Vertex v0) {
  CollapseCertificate cert;
  cert.v0 = v0;
  cert.n = n;
  for (const HistoryRecord& h : hist)
    if (h.added_edge)
      cert.steps.push_back(CertStep{h.triple.v, *h.added_edge});
  std::uint64_t complete = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if ((n - 1) + cert.steps.size() != complete)
    throw Error(TRIADIC_ERR_NOT_PROPAGATED,
                "history does not reach the complete graph");
  return cert;
}

VerifyResult verify_certificate(const CollapseCertificate& cert) {
  const std::uint32_t n = cert.n;
  if (n < 3 || cert.v0 >= n) return {false, 0};
  GraphState g(n, cert.v0);
  for (Vertex u = 0; u < n; ++u)
    if (u != cert.v0) g.add_edge(cert.v0, u);
  for (std::size_t i = 0; i < cert.steps.size(); ++i) {
    const CertStep& s = cert.steps[i];
    const Face& f = s.face;
    Edge e = s.added_edge;
    // The face must consist of the added edge's endpoints plus an apex.
    Vertex apex = n;
    bool e_in_face = false;
    for (Vertex x : f)
      if (x != e.a && x != e.b) apex = x;
    e_in_face = (f[0] == e.a || f[1] == e.a || f[2] == e.a) &&
                (f[0] == e.b || f[1] == e.b || f[2] == e.b);
    if (!e_in_face || apex >= n) return {false, i};
    if (!g.has_edge(apex, e.a) || !g.has_edge(apex, e.b) ||
        g.has_edge(e.a, e.b))
      return {false, i};
    g.add_edge(e.a, e.b);
  }
  if (!g.complete()) return {false, cert.steps.size()};
  return {true, 0};
}

CollapseResult greedy_collapse(const TwoComplex& complex) {
  CollapseResult out;
  std::vector<Face> faces(complex.faces.begin(), complex.faces.end());
  std::vector<bool> alive(faces.size(), true);
  // Per-edge list of incident face indices plus a live count.
  auto key = [](const Edge& e) {
    return (static_cast<std::uint64_t>(e.a) << 32) | e.b;
  };
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> incident;
  std::unordered_map<std::uint64_t, std::size_t> live_count;
  incident.reserve(3 * faces.size());
  live_count.reserve(3 * faces.size());
  std::unordered_map<std::uint64_t, Edge> edge_of;
  for (const Edge& e : complex.edges) {
    live_count[key(e)] = 0;
    edge_of.emplace(key(e), e);
  }
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const Face& f = faces[i];
    for (Edge e : {Edge::of(f[0], f[1]), Edge::of(f[0], f[2]),
                   Edge::of(f[1], f[2])}) {
      incident[key(e)].push_back(i);
      ++live_count[key(e)];
      edge_of.emplace(key(e), e);
    }
  }
  std::set<Edge> present(complex.edges);
  for (const auto& [k, cnt] : live_count)
    if (!present.contains(edge_of.at(k)))
      present.insert(edge_of.at(k));  // tolerate implicit edges

  std::set<Edge> candidates;
  for (const auto& [k, cnt] : live_count)
    if (cnt == 1) candidates.insert(edge_of.at(k));

  while (!candidates.empty()) {
    Edge e = *candidates.begin();
    candidates.erase(candidates.begin());
    if (!present.contains(e) || live_count[key(e)] != 1) continue;
    std::size_t fi = 0;
    for (std::size_t i : incident[key(e)])
      if (alive[i]) fi = i;
    const Face f = faces[fi];
    alive[fi] = false;
    present.erase(e);
    out.sequence.emplace_back(e, f);
    for (Edge fe : {Edge::of(f[0], f[1]), Edge::of(f[0], f[2]),
                    Edge::of(f[1], f[2])}) {
      std::size_t& cnt = live_count[key(fe)];
      --cnt;
      if (cnt == 1 && present.contains(fe)) candidates.insert(fe);
    }
  }

  out.residual_faces = static_cast<std::size_t>(
      std::count(alive.begin(), alive.end(), true));
  out.residual_edges = present;

  // Hypertree check: no faces survive and the residual edges form a tree
  // on their support (isolated vertices allowed).
  if (out.residual_faces == 0) {
    std::vector<Vertex> parent(complex.n);
    for (Vertex v = 0; v < complex.n; ++v) parent[v] = v;
    auto find = [&](Vertex v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    bool acyclic = true;
    std::set<Vertex> support;
    for (const Edge& e : present) {
      support.insert(e.a);
      support.insert(e.b);
      Vertex ra = find(e.a), rb = find(e.b);
      if (ra == rb) {
        acyclic = false;
        break;
      }
      parent[ra] = rb;
    }
    // A tree on k supported vertices has exactly k - 1 edges and one
    // component; with union-find, acyclic + edge count pins it down.
    out.is_hypertree = acyclic && !support.empty() &&
                       present.size() == support.size() - 1;
    if (support.empty()) out.is_hypertree = present.empty();
  }
  return out;
}

TwoComplex sample_Y2(std::uint32_t n, double p, std::uint64_t seed) {
  if (n < 3) throw Error(TRIADIC_ERR_INVALID_INSTANCE, "need n >= 3");
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(TRIADIC_ERR_INVALID_PROBABILITY, "p must lie in [0, 1]");
  TwoComplex y;
  y.n = n;
  for (Vertex a = 0; a < n; ++a)
    for (Vertex b = a + 1; b < n; ++b) y.edges.insert(Edge{a, b});
  for (Vertex a = 0; a < n; ++a)
    for (Vertex b = a + 1; b < n; ++b)
      for (Vertex c = b + 1; c < n; ++c) {
        Triple t{{a, b, c}};
        if (OutcomeOracle::decide(seed, t, p)) y.faces.insert(t.v);
      }
  return y;
}

TwoComplex certificate_complex(const CollapseCertificate& cert) {
  TwoComplex cx;
  cx.n = cert.n;
  for (Vertex u = 0; u < cert.n; ++u)
    if (u != cert.v0) cx.edges.insert(Edge::of(cert.v0, u));
  for (const CertStep& s : cert.steps) {
    cx.edges.insert(s.added_edge);
    cx.faces.insert(s.face);
  }
  return cx;
}

void write_certificate(const CollapseCertificate& cert, std::ostream& os) {
  os << cert.v0 << ' ' << cert.n << '\n';
  for (const CertStep& s : cert.steps)
    os << s.face[0] << ' ' << s.face[1] << ' ' << s.face[2] << ' '
       << s.added_edge.a << ' ' << s.added_edge.b << '\n';
}

CollapseCertificate read_certificate(std::istream& is) {
  CollapseCertificate cert;
  if (!(is >> cert.v0 >> cert.n))
    throw Error(TRIADIC_ERR_IO, "malformed certificate header");
  CertStep s;
  while (is >> s.face[0] >> s.face[1] >> s.face[2] >> s.added_edge.a >>
         s.added_edge.b)
    cert.steps.push_back(s);
  return cert;
}

}  // namespace triadic::topo
