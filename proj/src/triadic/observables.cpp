#include "triadic/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace triadic::obs {

namespace {
void check_pair(std::uint32_t n, Vertex u, Vertex v) {
  if (u == v || u >= n || v >= n)
    throw Error(TRIADIC_ERR_INVALID_PAIR, "u and v must be distinct vertices");
}
}  // namespace

std::uint64_t codegree(const GraphState& graph, Vertex u, Vertex v) {
  check_pair(graph.n(), u, v);
  return graph.neighbors(u).intersection_count(graph.neighbors(v));
}

std::uint64_t tilde_codegree(const Process& p, Vertex u, Vertex v) {
  const GraphState& g = p.graph();
  check_pair(g.n(), u, v);
  if (g.has_edge(u, v)) return 0;
  // A triple {u, w, v} with edges wu, wv and uv absent is open iff it sits
  // in the registry: an unsampled two-edge triple is open by definition.
  // The registry keeps the per-missing-edge count directly.
  return p.registry().open_between(p.graph(), u, v);
}

std::uint64_t open_three_walks(const Process& p, Vertex u, Vertex v) {
  const GraphState& g = p.graph();
  check_pair(g.n(), u, v);
  std::uint64_t total = 0;
  g.neighbors(v).for_each([&](std::size_t wp) {
    auto w = static_cast<Vertex>(wp);
    if (w != u) total += tilde_codegree(p, u, w);
  });
  return total;
}

std::uint64_t open_four_walks(const Process& p, Vertex u, Vertex v) {
  const GraphState& g = p.graph();
  check_pair(g.n(), u, v);
  std::uint64_t total = 0;
  for (Vertex w = 0; w < g.n(); ++w) {
    if (w == u || w == v) continue;
    std::uint64_t xu = tilde_codegree(p, u, w);
    if (xu == 0) continue;
    total += xu * tilde_codegree(p, v, w);
  }
  return total;
}

std::vector<std::pair<Vertex, Vertex>> pick_monitored_pairs(
    std::uint32_t n, Vertex v0, std::uint32_t count, std::uint64_t seed) {
  std::vector<Vertex> verts;
  verts.reserve(n - 1);
  for (Vertex v = 0; v < n; ++v)
    if (v != v0) verts.push_back(v);
  std::uint64_t all =
      static_cast<std::uint64_t>(verts.size()) * (verts.size() - 1) / 2;
  count = static_cast<std::uint32_t>(std::min<std::uint64_t>(count, all));
  Rng rng(splitmix64(seed ^ 0x70616972ULL));
  std::vector<std::pair<Vertex, Vertex>> out;
  std::unordered_set<std::uint64_t> seen;
  while (out.size() < count) {
    Vertex a = verts[rng.below(verts.size())];
    Vertex b = verts[rng.below(verts.size())];
    if (a == b) continue;
    Edge e = Edge::of(a, b);
    std::uint64_t key = (static_cast<std::uint64_t>(e.a) << 32) | e.b;
    if (seen.insert(key).second) out.emplace_back(e.a, e.b);
  }
  return out;
}

Checkpoint take_checkpoint(
    const Process& p, const std::vector<std::pair<Vertex, Vertex>>& monitored,
    const traj::OdeParams& params) {
  const GraphState& g = p.graph();
  const double n = g.n();
  const double sqrt_n = std::sqrt(n);
  Checkpoint cp;
  cp.step_index = p.step_index();
  cp.n = g.n();
  cp.c = params.c;
  cp.t = static_cast<double>(p.step_index()) / (n * n);

  traj::ClosedForm ref = traj::closed_form(params.c, cp.t);
  traj::Envelopes env = traj::envelopes(params, cp.t);

  double d_lo = std::numeric_limits<double>::infinity(), d_hi = 0, d_sum = 0;
  double f_lo = std::numeric_limits<double>::infinity(), f_hi = 0, f_sum = 0;
  for (Vertex v = 0; v < g.n(); ++v) {
    if (v == g.v0()) continue;
    double d = g.degree(v) / sqrt_n;
    double f = static_cast<double>(p.registry().open_at(v)) / n;
    d_lo = std::min(d_lo, d), d_hi = std::max(d_hi, d), d_sum += d;
    f_lo = std::min(f_lo, f), f_hi = std::max(f_hi, f), f_sum += f;
  }
  cp.d_min = d_lo, cp.d_max = d_hi, cp.d_mean = d_sum / (n - 1);
  cp.f_min = f_lo, cp.f_max = f_hi, cp.f_mean = f_sum / (n - 1);
  cp.flag_a = d_lo >= ref.d - env.g1 && d_hi <= ref.d + env.g1;
  cp.flag_b = f_lo >= ref.f - env.g1 && f_hi <= ref.f + env.g1;

  double y_sum = 0, z_sum = 0, x_max = 0;
  cp.flag_d = cp.flag_e = true;
  for (auto [u, v] : monitored) {
    PairStats ps;
    ps.u = u, ps.v = v;
    ps.x = codegree(g, u, v);
    ps.x_tilde = tilde_codegree(p, u, v);
    ps.y_uv = open_three_walks(p, u, v);
    ps.y_vu = open_three_walks(p, v, u);
    ps.z = open_four_walks(p, u, v);
    x_max = std::max(x_max, static_cast<double>(ps.x));
    double y_scaled = static_cast<double>(ps.y_uv) / sqrt_n;
    double y_scaled_rev = static_cast<double>(ps.y_vu) / sqrt_n;
    double z_scaled = static_cast<double>(ps.z) / n;
    y_sum += y_scaled;
    z_sum += z_scaled;
    if (y_scaled < ref.y - env.g2 || y_scaled > ref.y + env.g2 ||
        y_scaled_rev < ref.y - env.g2 || y_scaled_rev > ref.y + env.g2)
      cp.flag_d = false;
    if (z_scaled < ref.z - env.g2 || z_scaled > ref.z + env.g2)
      cp.flag_e = false;
    cp.pairs.push_back(ps);
  }
  cp.x_max = x_max;
  cp.flag_c = x_max <= 50 * std::log(n);
  if (!monitored.empty()) {
    cp.y_mean_scaled = y_sum / static_cast<double>(monitored.size());
    cp.z_mean_scaled = z_sum / static_cast<double>(monitored.size());
  }
  return cp;
}

void write_checkpoint_csv_header(std::ostream& os) {
  os << "i,t,d_min,d_mean,d_max,f_min,f_mean,f_max,x_max,"
        "y_mean_scaled,z_mean_scaled,flag_a,flag_b,flag_c,flag_d,flag_e\n";
}

void write_checkpoint_csv_row(std::ostream& os, const Checkpoint& cp) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%llu,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,"
                "%.10g,%d,%d,%d,%d,%d\n",
                static_cast<unsigned long long>(cp.step_index), cp.t, cp.d_min,
                cp.d_mean, cp.d_max, cp.f_min, cp.f_mean, cp.f_max, cp.x_max,
                cp.y_mean_scaled, cp.z_mean_scaled, int(cp.flag_a),
                int(cp.flag_b), int(cp.flag_c), int(cp.flag_d), int(cp.flag_e));
  os << buf;
}

}  // namespace triadic::obs
