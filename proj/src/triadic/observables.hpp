#pragma once

#include <cstdint>
#include <vector>

#include "triadic/process.hpp"
#include "triadic/trajectory.hpp"

namespace triadic::obs {

// Codegree X_{u,v}: common neighbors of u and v (v0 counts).
std::uint64_t codegree(const GraphState& graph, Vertex u, Vertex v);

// X~_{u,v}: open triples with missing edge uv.  Zero when uv is an edge.
std::uint64_t tilde_codegree(const Process& p, Vertex u, Vertex v);

// Y_{u,v}: open 3-walks u-w-w'-v with uww' open (w = v allowed).  Not
// symmetric in u and v.
std::uint64_t open_three_walks(const Process& p, Vertex u, Vertex v);

// Z_{u,v}: open 4-walks u-w-w'-w''-v with both triples open.
std::uint64_t open_four_walks(const Process& p, Vertex u, Vertex v);

struct PairStats {
  Vertex u = 0, v = 0;
  std::uint64_t x = 0;
  std::uint64_t x_tilde = 0;
  std::uint64_t y_uv = 0, y_vu = 0;
  std::uint64_t z = 0;
};

struct Checkpoint {
  std::uint64_t step_index = 0;
  std::uint32_t n = 0;  // instance size, stamped for compare()
  double c = 0;
  double t = 0;
  double d_min = 0, d_mean = 0, d_max = 0;  // D_v / sqrt(n) over v != v0
  double f_min = 0, f_mean = 0, f_max = 0;  // F_v / n over v != v0
  double x_max = 0;                         // max codegree, monitored pairs
  double y_mean_scaled = 0;                 // mean Y / sqrt(n)
  double z_mean_scaled = 0;                 // mean Z / n
  std::vector<PairStats> pairs;
  bool flag_a = true, flag_b = true, flag_c = true, flag_d = true,
       flag_e = true;
};

// Default 20 monitored pairs drawn without replacement from pairs
// excluding v0, fixed by the seed.
std::vector<std::pair<Vertex, Vertex>> pick_monitored_pairs(
    std::uint32_t n, Vertex v0, std::uint32_t count, std::uint64_t seed);

// Snapshot of all scaled observables with the five envelope flags
// evaluated at t = step_index / n^2.
Checkpoint take_checkpoint(
    const Process& p, const std::vector<std::pair<Vertex, Vertex>>& monitored,
    const traj::OdeParams& params);

void write_checkpoint_csv_header(std::ostream& os);
void write_checkpoint_csv_row(std::ostream& os, const Checkpoint& cp);

}  // namespace triadic::obs
