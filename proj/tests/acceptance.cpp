// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.  Tolerances are pinned here, not configurable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "triadic/harness.hpp"
#include "triadic/observables.hpp"
#include "triadic/process.hpp"
#include "triadic/topology.hpp"
#include "triadic/trajectory.hpp"

using namespace triadic;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void fail(Outcome& o, const std::string& why) {
  o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += why;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::set<std::array<Vertex, 3>> registry_set(const Process& p) {
  std::set<std::array<Vertex, 3>> out;
  for (const OpenTriple& ot : p.registry().live_items(p.graph())) {
    Triple t = ot.triple();
    out.insert({t.v[0], t.v[1], t.v[2]});
  }
  return out;
}

std::set<std::array<Vertex, 3>> brute_set(const Process& p) {
  std::set<std::array<Vertex, 3>> out;
  for (const OpenTriple& ot :
       brute_force_open_set(p.graph(), p.oracle().queried())) {
    Triple t = ot.triple();
    out.insert({t.v[0], t.v[1], t.v[2]});
  }
  return out;
}

bool registry_consistent(const Process& p, Outcome& o) {
  auto reg = registry_set(p);
  auto ref = brute_set(p);
  if (reg != ref) {
    fail(o, "registry != brute force open set");
    return false;
  }
  std::uint64_t f_sum = 0;
  for (Vertex v = 0; v < p.graph().n(); ++v) f_sum += p.registry().open_at(v);
  if (f_sum != 2 * p.registry().size()) {
    fail(o, "sum F_v != 2 |registry|");
    return false;
  }
  return true;
}

// 1. Registry exactness: 1000 random (seed, length) replays over
// n in {4..8}; the live registry equals the brute-force open set and
// sum_v F_v = 2 |registry| after every mutation.
Outcome criterion1() {
  Outcome o;
  std::uint32_t replay = 0;
  for (std::uint32_t n = 4; n <= 8 && o.pass; ++n) {
    for (std::uint32_t rep = 0; rep < 200 && o.pass; ++rep, ++replay) {
      Rng drive(splitmix64(0xACC1 + replay));
      double p_edge = 0.15 + 0.7 * (rep % 7) / 6.0;
      Process proc(n, p_edge, 1000 + replay, 77 + rep, 0, true);
      std::uint64_t length = 1 + drive.below(60);
      if (!registry_consistent(proc, o)) break;
      for (std::uint64_t i = 0; i < length; ++i) {
        std::uint32_t op = drive.below(10);
        if (op == 0) {
          proc.round();
        } else if (op == 1) {
          std::vector<Edge> absent;
          for (Vertex u = 0; u < n; ++u)
            for (Vertex v = u + 1; v < n; ++v)
              if (!proc.graph().has_edge(u, v)) absent.push_back(Edge{u, v});
          if (!absent.empty()) {
            Edge e = absent[drive.below(absent.size())];
            proc.apply_edge(e.a, e.b);
          }
        } else {
          if (proc.open_count() == 0 || proc.graph().complete()) break;
          proc.step();
        }
        if (!registry_consistent(proc, o)) {
          fail(o, "n=" + std::to_string(n) + " replay=" + std::to_string(rep));
          break;
        }
      }
    }
  }
  if (o.pass) o.detail = std::to_string(replay) + " replays clean";
  return o;
}

// 2. Initial conditions: every pair excluding v0 starts at
// (D, F, X, Y, Z) = (1, n-2, 1, 0, n-3).  Exact.
Outcome criterion2() {
  Outcome o;
  for (auto [n, v0] : {std::pair<std::uint32_t, Vertex>{9, 4}, {40, 0}}) {
    Process proc(n, 0.5, 7, v0, false);
    for (Vertex v = 0; v < n; ++v) {
      if (v == v0) continue;
      if (proc.graph().degree(v) != 1) fail(o, "D != 1");
      if (proc.registry().open_at(v) != n - 2) fail(o, "F != n-2");
    }
    for (Vertex u = 0; u < n && o.pass; ++u) {
      for (Vertex v = u + 1; v < n && o.pass; ++v) {
        if (u == v0 || v == v0) continue;
        if (obs::codegree(proc.graph(), u, v) != 1) fail(o, "X != 1");
        if (obs::open_three_walks(proc, u, v) != 0) fail(o, "Y != 0");
        if (obs::open_four_walks(proc, u, v) != n - 3) fail(o, "Z != n-3");
      }
    }
  }
  if (o.pass) o.detail = "exact at n=9 and n=40";
  return o;
}

// 3. Order-independence: fixed oracle seed, 100 order seeds, n in {5, 6}:
// identical final edge sets.
Outcome criterion3() {
  Outcome o;
  for (std::uint32_t n : {5u, 6u}) {
    for (std::uint64_t oracle_seed : {11ull, 12ull, 13ull}) {
      std::set<Edge> reference;
      for (std::uint32_t os = 0; os < 100; ++os) {
        Process proc(n, 0.55, oracle_seed, 5000 + os, 0, false);
        proc.run_phase1(std::uint64_t{1} << 40);
        std::set<Edge> edges;
        for (Vertex u = 0; u < n; ++u)
          for (Vertex v = u + 1; v < n; ++v)
            if (proc.graph().has_edge(u, v)) edges.insert(Edge{u, v});
        if (os == 0)
          reference = std::move(edges);
        else if (edges != reference) {
          fail(o, "n=" + std::to_string(n) + " order seed " +
                      std::to_string(5000 + os) + " diverged");
          return o;
        }
      }
    }
  }
  o.detail = "100 order seeds agree at n=5 and n=6";
  return o;
}

// 4. Exact-oracle agreement: n in {4, 5}, p in {0.2, 0.5, 0.8}: propagation
// frequency over 1e5 trials within 3 binomial sigma of the exact value.
Outcome criterion4() {
  Outcome o;
  const std::uint32_t trials = 100000;
  for (std::uint32_t n : {4u, 5u}) {
    for (double p : {0.2, 0.5, 0.8}) {
      double exact = harness::exact_propagation_probability(n, p);
      std::uint32_t hits = 0;
      for (std::uint32_t i = 0; i < trials; ++i) {
        Process proc(n, p, harness::trial_seed(0xE0, n, p, i), 0, false);
        proc.run_phase1(std::uint64_t{1} << 40);
        hits += proc.graph().complete();
      }
      double freq = static_cast<double>(hits) / trials;
      double sigma = std::sqrt(exact * (1 - exact) / trials);
      if (std::abs(freq - exact) > 3 * sigma)
        fail(o, "n=" + std::to_string(n) + " p=" + fmt("%.1f", p) + " freq " +
                    fmt("%.5f", freq) + " vs exact " + fmt("%.5f", exact));
    }
  }
  if (o.pass) o.detail = "6 cells within 3 sigma of exact";
  return o;
}

// 5. ODE correctness: residuals < 1e-8 on grids avoiding f <= 0.05 for
// c in {0.3, 0.5, 0.8, 1.0}; RK4 (h = 1e-4) within 1e-6 componentwise;
// y = d f and z = f^2 to 1e-12.
Outcome criterion5() {
  Outcome o;
  for (double c : {0.3, 0.5, 0.8, 1.0}) {
    double t_cap = 1.0;
    for (double t = 0; t <= 1.0; t += 1e-3) {
      if (traj::closed_form(c, t).f <= 0.055) {
        t_cap = t - 1e-3;
        break;
      }
    }
    std::vector<double> grid;
    for (double t = 0; t <= t_cap; t += 1e-3) grid.push_back(t);
    double res = traj::verify_ode(c, grid);
    if (res >= 1e-8) fail(o, "c=" + fmt("%.1f", c) + " residual " + fmt("%.2e", res));

    double gap = 0;
    for (const traj::TrajectorySample& s : traj::rk4_integrate(c, t_cap, 1e-4)) {
      traj::ClosedForm ref = traj::closed_form(c, s.t);
      gap = std::max({gap, std::abs(s.value.d - ref.d),
                      std::abs(s.value.f - ref.f), std::abs(s.value.y - ref.y),
                      std::abs(s.value.z - ref.z)});
    }
    if (gap >= 1e-6) fail(o, "c=" + fmt("%.1f", c) + " rk4 gap " + fmt("%.2e", gap));

    for (double t : grid) {
      traj::ClosedForm v = traj::closed_form(c, t);
      if (std::abs(v.y - v.d * v.f) >= 1e-12 || std::abs(v.z - v.f * v.f) >= 1e-12)
        fail(o, "identity violated at c=" + fmt("%.1f", c));
    }
  }
  if (o.pass) o.detail = "residuals < 1e-8, rk4 < 1e-6, identities < 1e-12";
  return o;
}

// 6. Named constants: f_root_T0(0.4) = 5/8 (rational cross-check),
// compute_K(1, 0.25) = 300 +- 0.5, g1(0) = n^{-1/6}.
Outcome criterion6() {
  Outcome o;
  // c = 2/5, t = 5/8: f * (8^2 5^2) = 1600 - 2*5*8*25 + 4*4*25 integrally.
  std::int64_t num = 8 * 8 * 5 * 5 - 2 * 5 * 8 * 5 * 5 + 4 * 2 * 2 * 5 * 5;
  if (num != 0) fail(o, "rational root check failed");
  if (std::abs(traj::f_root_T0(0.4) - 0.625) > 1e-15)
    fail(o, "f_root_T0(0.4) != 0.625");
  double k = traj::compute_K(1.0, 0.25);
  if (std::abs(k - 300.0) > 0.5) fail(o, "compute_K(1, 0.25) = " + fmt("%.3f", k));
  traj::OdeParams params{0.8, 4096, 1.0, k, traj::Regime::Supercritical};
  if (traj::envelopes(params, 0).g1 != 0.25) fail(o, "g1(0) != 4096^{-1/6}");
  if (o.pass) o.detail = "T0(0.4)=0.625, K(1,0.25)=" + fmt("%.2f", k) + ", g1(0)=n^{-1/6}";
  return o;
}

// 7. Trajectory concentration: one run, c = 0.8, n = 4000, phase 1 to t = 1
// (16e6 steps); at t in {0.2,...,1.0} the scaled means track the closed
// forms (5% for d and f, 15% for y and z) and max codegree <= 50 ln n.
Outcome criterion7() {
  Outcome o;
  const std::uint32_t n = 4000;
  const double c = 0.8;
  Process proc(n, c / std::sqrt(static_cast<double>(n)), 2026, 0, false);
  traj::OdeParams params = traj::select_phase1_horizon(c, n);
  auto monitored = obs::pick_monitored_pairs(n, 0, 20, 2026);
  const std::uint64_t chunk = static_cast<std::uint64_t>(n) * n / 5;
  for (int ck = 1; ck <= 5; ++ck) {
    Phase1Summary s = proc.run_phase1(chunk);
    if (s.steps_taken != chunk || s.stalled) {
      fail(o, "phase 1 stalled before t=1");
      break;
    }
    double t = 0.2 * ck;
    obs::Checkpoint cp = obs::take_checkpoint(proc, monitored, params);
    traj::ClosedForm ref = traj::closed_form(c, t);
    auto rel = [](double got, double want) {
      return std::abs(got - want) / want;
    };
    // The closed form starts from d(0) = 0 while the process starts from
    // the star (D_v(0) = 1); compare the increment above that offset.
    double d_inc = cp.d_mean - 1.0 / std::sqrt(static_cast<double>(n));
    if (rel(d_inc, ref.d) > 0.05)
      fail(o, "t=" + fmt("%.1f", t) + " d_mean " + fmt("%.4f", d_inc) +
                  " vs " + fmt("%.4f", ref.d));
    if (rel(cp.f_mean, ref.f) > 0.05)
      fail(o, "t=" + fmt("%.1f", t) + " f_mean " + fmt("%.4f", cp.f_mean) +
                  " vs " + fmt("%.4f", ref.f));
    if (rel(cp.y_mean_scaled, ref.y) > 0.15)
      fail(o, "t=" + fmt("%.1f", t) + " y " + fmt("%.4f", cp.y_mean_scaled) +
                  " vs " + fmt("%.4f", ref.y));
    if (rel(cp.z_mean_scaled, ref.z) > 0.15)
      fail(o, "t=" + fmt("%.1f", t) + " z " + fmt("%.4f", cp.z_mean_scaled) +
                  " vs " + fmt("%.4f", ref.z));
    std::uint64_t x_max = 0;
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = u + 1; v < n; ++v)
        x_max = std::max(x_max, obs::codegree(proc.graph(), u, v));
    if (static_cast<double>(x_max) > 50 * std::log(static_cast<double>(n)))
      fail(o, "t=" + fmt("%.1f", t) + " max codegree " + std::to_string(x_max));
  }
  if (o.pass) o.detail = "5 checkpoints within tolerance, codegrees bounded";
  return o;
}

// 8. Subcritical: c = 0.35, n = 2000, 30 trials: >= 27 do not propagate;
// non-propagating trials end with <= floor(n^{3/2}/2) edges; every trial
// uses at most ceil(4 log_{1/0.7} n) phase-2 rounds.
Outcome criterion8() {
  Outcome o;
  const std::uint32_t n = 2000;
  const double c = 0.35;
  const std::uint64_t edge_cap =
      static_cast<std::uint64_t>(std::pow(static_cast<double>(n), 1.5) / 2);
  const std::uint64_t round_cap = static_cast<std::uint64_t>(
      std::ceil(4 * std::log(static_cast<double>(n)) / std::log(1 / (2 * c))));
  std::uint32_t non_prop = 0;
  std::uint64_t worst_edges = 0, worst_rounds = 0;
  for (std::uint32_t i = 0; i < 30; ++i) {
    FinalReport r =
        harness::run_trial(n, c, harness::trial_seed(0x5B, n, c, i));
    if (!r.propagated) {
      ++non_prop;
      worst_edges = std::max(worst_edges, r.final_edges);
      if (r.final_edges > edge_cap)
        fail(o, "trial " + std::to_string(i) + " has " +
                    std::to_string(r.final_edges) + " edges");
    }
    worst_rounds = std::max(worst_rounds, r.phase2_rounds);
    if (r.phase2_rounds > round_cap)
      fail(o, "trial " + std::to_string(i) + " used " +
                  std::to_string(r.phase2_rounds) + " rounds");
  }
  if (non_prop < 27)
    fail(o, "only " + std::to_string(non_prop) + "/30 non-propagating");
  if (o.pass)
    o.detail = std::to_string(non_prop) + "/30 non-propagating, max edges " +
               std::to_string(worst_edges) + " <= " + std::to_string(edge_cap) +
               ", max rounds " + std::to_string(worst_rounds) +
               " <= " + std::to_string(round_cap);
  return o;
}

// 9. Supercritical: c = 0.8, n = 2000, 30 trials: standard mode propagates
// in >= 27/30; sprinkling mode completes within ceil(3 log2 log2 n) + 3
// rounds in >= 27/30.
Outcome criterion9() {
  Outcome o;
  const std::uint32_t n = 2000;
  const double c = 0.8;
  const std::uint64_t round_cap = static_cast<std::uint64_t>(std::ceil(
                                      3 * std::log2(std::log2(double(n))))) +
                                  3;
  std::uint32_t prop = 0, fast = 0;
  for (std::uint32_t i = 0; i < 30; ++i) {
    FinalReport r =
        harness::run_trial(n, c, harness::trial_seed(0x9A, n, c, i));
    prop += r.propagated;
  }
  for (std::uint32_t i = 0; i < 30; ++i) {
    FinalReport r = harness::run_trial(
        n, c, harness::trial_seed(0x9B, n, c, i), harness::RunMode::Sprinkle);
    fast += r.propagated && r.phase2_rounds <= round_cap;
  }
  if (prop < 27) fail(o, "standard mode propagated " + std::to_string(prop) + "/30");
  if (fast < 27)
    fail(o, "sprinkling finished within " + std::to_string(round_cap) +
                " rounds in " + std::to_string(fast) + "/30");
  if (o.pass)
    o.detail = "standard " + std::to_string(prop) + "/30, sprinkling within " +
               std::to_string(round_cap) + " rounds " + std::to_string(fast) +
               "/30";
  return o;
}

// 10. Threshold bracket: bisection at n in {500, 2000}, 50 trials/probe,
// tolerance 0.05: both estimates land in (0.3, 0.7).  The limiting
// threshold constant is exactly 1/2.
Outcome criterion10() {
  Outcome o;
  for (std::uint32_t n : {500u, 2000u}) {
    harness::ThresholdConfig cfg;
    cfg.n = n;
    cfg.c_lo = 0.3, cfg.c_hi = 0.7;
    cfg.tolerance = 0.05;
    cfg.trials = 50;
    cfg.workers = 1;
    cfg.master_seed = 0x7E57;
    harness::ThresholdEstimate est = harness::cmd_threshold(cfg);
    std::printf("  threshold estimate: c_hat(%u) = %.4f (limit is exactly 0.5)\n",
                n, est.c_hat);
    if (!(est.c_hat > 0.3 && est.c_hat < 0.7))
      fail(o, "c_hat(" + std::to_string(n) + ") = " + fmt("%.4f", est.c_hat));
    else
      o.detail += (o.detail.empty() ? "" : ", ") + std::string("c_hat(") +
                  std::to_string(n) + ")=" + fmt("%.4f", est.c_hat);
  }
  if (o.pass) o.detail += "; limit is exactly 1/2";
  return o;
}

// 11. Certificates: 100 propagating runs at n = 500, c = 0.8: every
// certificate verifies, every certificate complex greedily collapses to a
// spanning tree, and each collapse step removes exactly one edge and one
// face (Euler characteristic invariant).
Outcome criterion11() {
  Outcome o;
  const std::uint32_t n = 500;
  const double c = 0.8;
  const double p = c / std::sqrt(static_cast<double>(n));
  traj::OdeParams params = traj::select_phase1_horizon(c, n);
  const auto horizon_steps = static_cast<std::uint64_t>(
      std::floor(params.horizon * static_cast<double>(n) * n));
  std::uint32_t done = 0, attempts = 0;
  for (; done < 100 && attempts < 130 && o.pass; ++attempts) {
    Process proc(n, p, harness::trial_seed(0xCE, n, c, attempts), 0, true);
    proc.run_phase1(horizon_steps);
    FinalReport r =
        proc.run_phase2(Phase2Mode::Standard, Process::default_max_rounds(n));
    if (!r.propagated) continue;
    ++done;
    topo::CollapseCertificate cert =
        topo::extract_certificate(proc.history(), n, 0);
    if (!topo::verify_certificate(cert).ok) {
      fail(o, "certificate " + std::to_string(attempts) + " failed to verify");
      break;
    }
    topo::TwoComplex complex = topo::certificate_complex(cert);
    const std::size_t e0 = complex.edges.size(), f0 = complex.faces.size();
    topo::CollapseResult col = topo::greedy_collapse(complex);
    bool euler = col.residual_edges.size() == e0 - col.sequence.size() &&
                 col.residual_faces == f0 - col.sequence.size();
    if (!euler) fail(o, "collapse changed the Euler characteristic");
    if (!col.is_hypertree || col.residual_edges.size() != n - 1)
      fail(o, "residual complex is not a spanning tree");
  }
  if (done < 100) fail(o, "only " + std::to_string(done) + " propagating runs");
  if (o.pass)
    o.detail = "100/100 verified, collapsed to spanning trees (" +
               std::to_string(attempts) + " attempts)";
  return o;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Outcome (*fn)();
  };
  const Entry entries[] = {
      {"registry exactness", criterion1},
      {"initial conditions", criterion2},
      {"order independence", criterion3},
      {"exact oracle agreement", criterion4},
      {"ode correctness", criterion5},
      {"named constants", criterion6},
      {"trajectory concentration", criterion7},
      {"subcritical behavior", criterion8},
      {"supercritical behavior", criterion9},
      {"threshold bracket", criterion10},
      {"certificates and collapse", criterion11},
  };
  int failures = 0;
  int idx = 0;
  for (const Entry& e : entries) {
    ++idx;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = e.fn();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail = std::string("exception: ") + ex.what();
    }
    auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2d %-26s (%.1fs) %s\n", o.pass ? "PASS" : "FAIL", idx,
                e.name, secs, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures ? 1 : 0;
}
