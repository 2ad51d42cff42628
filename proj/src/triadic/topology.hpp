#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <vector>

#include "triadic/process.hpp"

namespace triadic::topo {

using Face = std::array<Vertex, 3>;  // sorted

struct TwoComplex {
  std::uint32_t n = 0;
  std::set<Edge> edges;
  std::set<Face> faces;
};

struct CertStep {
  Face face;
  Edge added_edge;
};

// Witness that the faces form a collapsible hypertree: replayed forward
// from the star, every step's two supporting edges precede its added edge.
struct CollapseCertificate {
  Vertex v0 = 0;
  std::uint32_t n = 0;
  std::vector<CertStep> steps;
};

struct VerifyResult {
  bool ok = false;
  std::size_t failing_step = 0;  // meaningful only when !ok
};

struct CollapseResult {
  std::vector<std::pair<Edge, Face>> sequence;  // (free edge, face) removals
  std::set<Edge> residual_edges;
  std::size_t residual_faces = 0;
  bool is_hypertree = false;
};

// One step per history record that added a new edge, in chronological
// order.  Throws Error(NOT_PROPAGATED) unless the run reached the
// complete graph.
CollapseCertificate extract_certificate(const std::vector<HistoryRecord>& hist,
                                        std::uint32_t n, Vertex v0);

// Forward replay from the star; true iff every step is legal and the final
// graph is complete.
VerifyResult verify_certificate(const CollapseCertificate& cert);

// Repeatedly removes the lexicographically smallest edge contained in
// exactly one face, together with that face.  Greedy order is a
// diagnostic: failure to collapse does not disprove collapsibility.
CollapseResult greedy_collapse(const TwoComplex& complex);

// Linial-Meshulam random 2-complex: complete 1-skeleton, each face present
// independently with probability p, decided by the same keyed function as
// the process oracle.
TwoComplex sample_Y2(std::uint32_t n, double p, std::uint64_t seed);

// 1-skeleton spanned by the certificate (star plus added edges) together
// with the certificate faces.
TwoComplex certificate_complex(const CollapseCertificate& cert);

// Text format: header "v0 n", then one line "f1 f2 f3 e1 e2" per step.
void write_certificate(const CollapseCertificate& cert, std::ostream& os);
CollapseCertificate read_certificate(std::istream& is);

}  // namespace triadic::topo
