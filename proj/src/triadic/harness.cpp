#include "triadic/harness.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace triadic::harness {

namespace {

// Deterministic parallel map: every index is an independent task writing
// only its own slot, so the outcome does not depend on the worker count.
template <typename Fn>
void parallel_for(std::uint32_t count, std::uint32_t workers, Fn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || count <= 1) {
    for (std::uint32_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint32_t> next{0};
  auto work = [&] {
    for (;;) {
      std::uint32_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  for (std::uint32_t w = 0; w < std::min(workers, count); ++w)
    pool.emplace_back(work);
  for (auto& t : pool) t.join();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os)
    throw Error(TRIADIC_ERR_IO, "cannot open for writing: " + path.string());
  return os;
}

const char* mode_name(RunMode m) {
  switch (m) {
    case RunMode::Full: return "full";
    case RunMode::Sprinkle: return "sprinkle";
    default: return "phase2-only";
  }
}

const char* stall_name(StallReason s) {
  switch (s) {
    case StallReason::Complete: return "complete";
    case StallReason::RegistryEmpty: return "registry_empty";
    default: return "truncated";
  }
}

}  // namespace

std::pair<double, double> resolve_probability(std::uint32_t n,
                                              std::optional<double> c,
                                              std::optional<double> p) {
  if (c.has_value() == p.has_value())
    throw Error(TRIADIC_ERR_INVALID_ARGUMENT,
                "exactly one of c and p must be given");
  double sqrt_n = std::sqrt(static_cast<double>(n));
  double pp = p ? *p : *c / sqrt_n;
  double cc = c ? *c : *p * sqrt_n;
  if (!(pp >= 0.0 && pp <= 1.0))
    throw Error(TRIADIC_ERR_INVALID_PROBABILITY, "derived p outside [0, 1]");
  return {cc, pp};
}

std::uint64_t trial_seed(std::uint64_t master, std::uint32_t n, double c,
                         std::uint32_t trial) {
  std::uint64_t h = splitmix64(master ^ splitmix64(n));
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(c));
  return splitmix64(h ^ trial);
}

RunResult cmd_run(const RunConfig& cfg) {
  auto [c, p] = resolve_probability(cfg.n, cfg.c, cfg.p);
  RunResult res;
  res.params = traj::select_phase1_horizon(c, cfg.n);
  if (cfg.horizon) {
    res.params.horizon = *cfg.horizon;
    res.params.k = traj::compute_K(c, *cfg.horizon);
  }
  const auto n2 = static_cast<std::uint64_t>(cfg.n) * cfg.n;
  std::uint64_t interval =
      cfg.checkpoint_interval ? cfg.checkpoint_interval : (n2 + 99) / 100;
  std::uint64_t max_rounds =
      cfg.max_rounds ? cfg.max_rounds : Process::default_max_rounds(cfg.n);
  auto monitored = obs::pick_monitored_pairs(cfg.n, 0, cfg.monitored_pairs,
                                             cfg.seed);

  Process proc(cfg.n, p, cfg.seed, 0, cfg.track_history);

  if (cfg.mode != RunMode::Phase2Only) {
    auto max_steps =
        static_cast<std::uint64_t>(std::floor(res.params.horizon * n2));
    res.checkpoints.push_back(obs::take_checkpoint(proc, monitored,
                                                   res.params));
    std::uint64_t remaining = max_steps;
    while (remaining > 0) {
      std::uint64_t chunk = std::min(interval, remaining);
      Phase1Summary s = proc.run_phase1(chunk);
      remaining -= s.steps_taken;
      if (s.steps_taken == interval)
        res.checkpoints.push_back(
            obs::take_checkpoint(proc, monitored, res.params));
      if (s.stalled || proc.graph().complete()) break;
    }
    res.comparison = traj::compare(res.checkpoints, res.params);
  }

  std::uint64_t rounds = 0;
  while (!proc.graph().complete() && proc.open_count() > 0 &&
         rounds < max_rounds) {
    std::optional<double> override_p;
    if (cfg.mode == RunMode::Sprinkle && rounds >= 1)
      override_p = Process::sprinkle_probability(cfg.n);
    res.rounds.push_back(proc.round(override_p));
    ++rounds;
  }

  res.report.phase1_steps = proc.step_index();
  res.report.phase2_rounds = rounds;
  res.report.final_edges = proc.graph().edge_count();
  res.report.propagated = proc.graph().complete();
  if (res.report.propagated)
    res.report.stall_reason = StallReason::Complete;
  else if (proc.open_count() == 0)
    res.report.stall_reason = StallReason::RegistryEmpty;
  else
    res.report.stall_reason = StallReason::Truncated;

  if (!cfg.out_dir.empty()) {
    std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    {
      auto os = open_out(dir / "checkpoints.csv");
      obs::write_checkpoint_csv_header(os);
      for (const auto& cp : res.checkpoints)
        obs::write_checkpoint_csv_row(os, cp);
    }
    {
      auto os = open_out(dir / "rounds.csv");
      os << "round,q_before,sampled,successes,new_edges,q_after\n";
      for (std::size_t i = 0; i < res.rounds.size(); ++i) {
        const RoundOutcome& r = res.rounds[i];
        os << (i + 1) << ',' << r.q_before << ',' << r.sampled_count << ','
           << r.success_count << ',' << r.new_edges << ',' << r.q_after
           << '\n';
      }
    }
    if (cfg.mode != RunMode::Phase2Only) {
      auto os = open_out(dir / "comparison.json");
      os << traj::comparison_to_json(res.comparison, res.params) << '\n';
    }
    {
      auto os = open_out(dir / "report.json");
      nlohmann::ordered_json j{
          {"n", cfg.n},
          {"c", c},
          {"p", p},
          {"seed", cfg.seed},
          {"mode", mode_name(cfg.mode)},
          {"propagated", res.report.propagated},
          {"stall_reason", stall_name(res.report.stall_reason)},
          {"final_edges", res.report.final_edges},
          {"phase1_steps", res.report.phase1_steps},
          {"phase2_rounds", res.report.phase2_rounds}};
      os << j.dump(2) << '\n';
    }
    if (cfg.track_history) {
      auto os = open_out(dir / "history.log");
      proc.write_history(os);
    }
  }
  return res;
}

FinalReport run_trial(std::uint32_t n, double c, std::uint64_t seed,
                      RunMode mode) {
  double p = c / std::sqrt(static_cast<double>(n));
  Process proc(n, p, seed, 0, false);
  if (mode != RunMode::Phase2Only) {
    traj::OdeParams params = traj::select_phase1_horizon(c, n);
    auto n2 = static_cast<std::uint64_t>(n) * n;
    proc.run_phase1(
        static_cast<std::uint64_t>(std::floor(params.horizon * n2)));
  }
  return proc.run_phase2(
      mode == RunMode::Sprinkle ? Phase2Mode::Sprinkling : Phase2Mode::Standard,
      Process::default_max_rounds(n));
}

TrialAggregate run_trials(std::uint32_t n, double c, std::uint32_t trials,
                          std::uint32_t workers, std::uint64_t master_seed,
                          RunMode mode) {
  std::vector<FinalReport> reports(trials);
  parallel_for(trials, workers, [&](std::uint32_t i) {
    reports[i] = run_trial(n, c, trial_seed(master_seed, n, c, i), mode);
  });
  TrialAggregate agg;
  agg.trials = trials;
  double edges = 0, rounds = 0;
  for (const FinalReport& r : reports) {
    agg.propagated += r.propagated;
    edges += static_cast<double>(r.final_edges);
    rounds += static_cast<double>(r.phase2_rounds);
  }
  if (trials) {
    agg.freq = static_cast<double>(agg.propagated) / trials;
    agg.mean_edges = edges / trials;
    agg.mean_rounds = rounds / trials;
  }
  return agg;
}

std::vector<ScanCell> cmd_scan(const ScanConfig& cfg) {
  if (cfg.trials < 1)
    throw Error(TRIADIC_ERR_INVALID_ARGUMENT, "trials must be >= 1");
  std::vector<ScanCell> cells;
  for (std::uint32_t n : cfg.n_values)
    for (double c : cfg.c_values)
      cells.push_back(ScanCell{
          n, c,
          run_trials(n, c, cfg.trials, cfg.workers, cfg.master_seed)});
  if (!cfg.out_csv.empty()) {
    auto os = open_out(cfg.out_csv);
    os << "n,c,trials,propagated,freq,mean_edges,mean_rounds\n";
    char buf[256];
    for (const ScanCell& cell : cells) {
      std::snprintf(buf, sizeof(buf), "%u,%.10g,%u,%u,%.10g,%.10g,%.10g\n",
                    cell.n, cell.c, cell.agg.trials, cell.agg.propagated,
                    cell.agg.freq, cell.agg.mean_edges, cell.agg.mean_rounds);
      os << buf;
    }
  }
  return cells;
}

ThresholdEstimate cmd_threshold(const ThresholdConfig& cfg) {
  if (!(cfg.c_lo < cfg.c_hi) || cfg.trials < 1)
    throw Error(TRIADIC_ERR_INVALID_ARGUMENT, "need c_lo < c_hi, trials >= 1");
  ThresholdEstimate est;
  est.n = cfg.n;
  est.trials_per_probe = cfg.trials;
  auto probe = [&](double c) {
    double freq = run_trials(cfg.n, c, cfg.trials, cfg.workers,
                             cfg.master_seed)
                      .freq;
    est.probes.emplace_back(c, freq);
    return freq;
  };
  double lo = cfg.c_lo, hi = cfg.c_hi;
  double freq_lo = probe(lo), freq_hi = probe(hi);
  if (!(freq_lo <= 0.5 && 0.5 <= freq_hi)) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "bracket does not straddle frequency 1/2: f(%.4g)=%.4g, "
                  "f(%.4g)=%.4g",
                  lo, freq_lo, hi, freq_hi);
    throw Error(TRIADIC_ERR_BRACKET_FAILURE, buf);
  }
  while (hi - lo > cfg.tolerance) {
    double mid = (lo + hi) / 2;
    double freq = probe(mid);
    if (freq < 0.5)
      lo = mid, freq_lo = freq;
    else
      hi = mid, freq_hi = freq;
  }
  est.bracket_lo = lo;
  est.bracket_hi = hi;
  est.freq_lo = freq_lo;
  est.freq_hi = freq_hi;
  est.c_hat = (lo + hi) / 2;
  if (!cfg.out_json.empty()) {
    auto os = open_out(cfg.out_json);
    nlohmann::ordered_json probes = nlohmann::ordered_json::array();
    for (auto [c, f] : est.probes) probes.push_back({{"c", c}, {"freq", f}});
    nlohmann::ordered_json j{{"n", est.n},
                             {"c_hat", est.c_hat},
                             {"bracket_lo", est.bracket_lo},
                             {"bracket_hi", est.bracket_hi},
                             {"freq_lo", est.freq_lo},
                             {"freq_hi", est.freq_hi},
                             {"trials_per_probe", est.trials_per_probe},
                             {"probes", probes}};
    os << j.dump(2) << '\n';
  }
  return est;
}

double exact_propagation_probability(std::uint32_t n, double p) {
  if (n < 3 || n > 6)
    throw Error(TRIADIC_ERR_REFUSED_SCALE,
                "exact enumeration supports 3 <= n <= 6");
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(TRIADIC_ERR_INVALID_PROBABILITY, "p must lie in [0, 1]");
  // All C(n,3) triples, indexed; edges as per-vertex bitmasks.
  std::vector<std::array<Vertex, 3>> triples;
  for (Vertex a = 0; a < n; ++a)
    for (Vertex b = a + 1; b < n; ++b)
      for (Vertex c = b + 1; c < n; ++c) triples.push_back({a, b, c});
  const auto t_count = static_cast<std::uint32_t>(triples.size());

  // propagation count per hyperedge cardinality; the closure is
  // order-independent so a simple saturation loop decides each hypergraph.
  std::vector<std::uint64_t> prop_by_size(t_count + 1, 0);
  const std::uint32_t full = (1u << n) - 1;
  for (std::uint64_t mask = 0; mask < (1ull << t_count); ++mask) {
    std::array<std::uint32_t, 6> adj{};
    for (Vertex v = 1; v < n; ++v) {
      adj[0] |= 1u << v;
      adj[v] |= 1u;
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::uint32_t i = 0; i < t_count; ++i) {
        if (!(mask >> i & 1)) continue;
        auto [a, b, c] = triples[i];
        bool ab = adj[a] >> b & 1, ac = adj[a] >> c & 1, bc = adj[b] >> c & 1;
        int span = int(ab) + int(ac) + int(bc);
        if (span != 2) continue;
        Vertex u, v;
        if (!ab) u = a, v = b;
        else if (!ac) u = a, v = c;
        else u = b, v = c;
        adj[u] |= 1u << v;
        adj[v] |= 1u << u;
        changed = true;
      }
    }
    bool complete = true;
    for (Vertex v = 0; v < n; ++v)
      if (adj[v] != (full & ~(1u << v))) {
        complete = false;
        break;
      }
    if (complete) ++prop_by_size[std::popcount(mask)];
  }
  double total = 0;
  for (std::uint32_t k = 0; k <= t_count; ++k) {
    if (!prop_by_size[k]) continue;
    total += static_cast<double>(prop_by_size[k]) * std::pow(p, k) *
             std::pow(1 - p, t_count - k);
  }
  return total;
}

CollapseReport cmd_collapse(const CollapseConfig& cfg) {
  auto [c, p] = resolve_probability(cfg.n, cfg.c, cfg.p);
  traj::OdeParams params = traj::select_phase1_horizon(c, cfg.n);
  Process proc(cfg.n, p, cfg.seed, 0, true);
  auto n2 = static_cast<std::uint64_t>(cfg.n) * cfg.n;
  proc.run_phase1(static_cast<std::uint64_t>(std::floor(params.horizon * n2)));
  FinalReport rep =
      proc.run_phase2(Phase2Mode::Standard, Process::default_max_rounds(cfg.n));

  CollapseReport out;
  out.propagated = rep.propagated;

  std::optional<std::filesystem::path> dir;
  if (!cfg.out_dir.empty()) {
    dir = std::filesystem::path(cfg.out_dir);
    std::filesystem::create_directories(*dir);
    auto os = open_out(*dir / "history.log");
    proc.write_history(os);
  }

  if (rep.propagated) {
    topo::CollapseCertificate cert =
        topo::extract_certificate(proc.history(), cfg.n, 0);
    out.certificate_steps = cert.steps.size();
    out.certificate_verified = topo::verify_certificate(cert).ok;
    topo::CollapseResult col =
        topo::greedy_collapse(topo::certificate_complex(cert));
    out.residual_edges = col.residual_edges.size();
    out.residual_faces = col.residual_faces;
    // Certificate complexes must leave a spanning tree behind.
    out.is_hypertree =
        col.is_hypertree && col.residual_edges.size() == cfg.n - 1;
    if (dir) {
      auto os = open_out(*dir / "certificate.txt");
      topo::write_certificate(cert, os);
    }
  }
  if (dir) {
    auto os = open_out(*dir / "collapse.json");
    nlohmann::ordered_json j{{"n", cfg.n},
                             {"c", c},
                             {"p", p},
                             {"seed", cfg.seed},
                             {"propagated", out.propagated},
                             {"certificate_verified", out.certificate_verified},
                             {"certificate_steps", out.certificate_steps},
                             {"is_hypertree", out.is_hypertree},
                             {"residual_edges", out.residual_edges},
                             {"residual_faces", out.residual_faces}};
    os << j.dump(2) << '\n';
  }
  return out;
}

}  // namespace triadic::harness
