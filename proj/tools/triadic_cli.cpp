// Command-line front end.  Talks to the library exclusively through the
// C API in triadic.h.

#include <cinttypes>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "triadic.h"

namespace {

int fail(triadic_status s, const char* what) {
  std::fprintf(stderr, "error: %s: %s\n", what, triadic_status_name(s));
  return 1;
}

struct CommonOpts {
  uint32_t n = 0;
  double c = 0;
  double p = 0;
  uint64_t seed = 0;
};

void add_common(CLI::App* app, CommonOpts* o, bool need_n = true) {
  auto* n_opt = app->add_option("--n", o->n, "number of vertices");
  if (need_n) n_opt->required();
  app->add_option("--c", o->c, "scaled probability, p = c/sqrt(n)");
  app->add_option("--p", o->p, "explicit per-triple probability");
  app->add_option("--seed", o->seed, "master seed");
}

int do_run(const CommonOpts& common, const std::string& mode_name,
           double horizon, uint64_t interval, uint32_t pairs,
           uint64_t max_rounds, const std::string& out_dir) {
  triadic_run_config cfg{};
  cfg.n = common.n;
  cfg.c = common.c;
  cfg.p = common.p;
  cfg.seed = common.seed;
  cfg.mode = mode_name == "sprinkle"      ? TRIADIC_MODE_SPRINKLE
             : mode_name == "phase2-only" ? TRIADIC_MODE_PHASE2_ONLY
                                          : TRIADIC_MODE_FULL;
  cfg.horizon = horizon;
  cfg.checkpoint_interval = interval;
  cfg.monitored_pairs = pairs;
  cfg.max_rounds = max_rounds;
  cfg.out_dir = out_dir.empty() ? nullptr : out_dir.c_str();

  triadic_final_report rep{};
  if (triadic_status s = triadic_run(&cfg, &rep); s != TRIADIC_OK)
    return fail(s, "run");
  std::printf(
      "propagated=%d stall=%d edges=%" PRIu64 " phase1_steps=%" PRIu64
      " phase2_rounds=%" PRIu64 "\n",
      rep.propagated, rep.stall_reason, rep.final_edges, rep.phase1_steps,
      rep.phase2_rounds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"triadic process simulator"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "single full run with checkpoints");
  CommonOpts run_common;
  add_common(run, &run_common);
  std::string mode = "full";
  double horizon = 0;
  uint64_t interval = 0;
  uint32_t pairs = 20;
  uint64_t max_rounds = 0;
  std::string out_dir;
  run->add_option("--mode", mode, "full | sprinkle | phase2-only")
      ->check(CLI::IsMember({"full", "sprinkle", "phase2-only"}));
  run->add_option("--horizon", horizon, "phase-1 horizon override");
  run->add_option("--checkpoint-interval", interval,
                  "steps between checkpoints (0 = automatic)");
  run->add_option("--monitored-pairs", pairs, "tracked vertex pairs");
  run->add_option("--max-rounds", max_rounds, "phase-2 round cap");
  run->add_option("--out-dir", out_dir, "artifact directory");

  // scan
  auto* scan = app.add_subcommand("scan", "propagation frequency grid");
  std::vector<uint32_t> scan_n;
  std::vector<double> scan_c;
  uint32_t trials = 50, workers = 1;
  uint64_t scan_seed = 0;
  std::string scan_csv;
  scan->add_option("--n", scan_n, "vertex counts")->required();
  scan->add_option("--c", scan_c, "scaled probabilities")->required();
  scan->add_option("--trials", trials, "trials per (n, c) cell");
  scan->add_option("--workers", workers, "worker threads");
  scan->add_option("--seed", scan_seed, "master seed");
  scan->add_option("--out-csv", scan_csv, "result CSV path");

  // threshold
  auto* thr = app.add_subcommand("threshold", "bisect the critical c");
  uint32_t thr_n = 0;
  double c_lo = 0.1, c_hi = 1.0, tol = 0.05;
  uint32_t thr_trials = 50, thr_workers = 1;
  uint64_t thr_seed = 0;
  std::string thr_json;
  thr->add_option("--n", thr_n, "number of vertices")->required();
  thr->add_option("--c-lo", c_lo, "lower bracket");
  thr->add_option("--c-hi", c_hi, "upper bracket");
  thr->add_option("--tolerance", tol, "bracket width target");
  thr->add_option("--trials", thr_trials, "trials per probe");
  thr->add_option("--workers", thr_workers, "worker threads");
  thr->add_option("--seed", thr_seed, "master seed");
  thr->add_option("--out-json", thr_json, "result JSON path");

  // oracle
  auto* oracle =
      app.add_subcommand("oracle", "exact propagation probability (n <= 6)");
  uint32_t oracle_n = 0;
  double oracle_p = 0;
  oracle->add_option("--n", oracle_n, "number of vertices")->required();
  oracle->add_option("--p", oracle_p, "per-triple probability")->required();

  // collapse
  auto* col =
      app.add_subcommand("collapse", "certificate extraction and collapse");
  CommonOpts col_common;
  add_common(col, &col_common);
  std::string col_dir;
  col->add_option("--out-dir", col_dir, "artifact directory");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed())
    return do_run(run_common, mode, horizon, interval, pairs, max_rounds,
                  out_dir);

  if (scan->parsed()) {
    triadic_scan_config cfg{};
    cfg.n_values = scan_n.data();
    cfg.n_count = scan_n.size();
    cfg.c_values = scan_c.data();
    cfg.c_count = scan_c.size();
    cfg.trials = trials;
    cfg.workers = workers;
    cfg.master_seed = scan_seed;
    cfg.out_csv = scan_csv.empty() ? nullptr : scan_csv.c_str();
    if (triadic_status s = triadic_scan(&cfg); s != TRIADIC_OK)
      return fail(s, "scan");
    return 0;
  }

  if (thr->parsed()) {
    triadic_threshold_config cfg{};
    cfg.n = thr_n;
    cfg.c_lo = c_lo;
    cfg.c_hi = c_hi;
    cfg.tolerance = tol;
    cfg.trials = thr_trials;
    cfg.workers = thr_workers;
    cfg.master_seed = thr_seed;
    cfg.out_json = thr_json.empty() ? nullptr : thr_json.c_str();
    triadic_threshold_estimate est{};
    if (triadic_status s = triadic_threshold(&cfg, &est); s != TRIADIC_OK)
      return fail(s, "threshold");
    std::printf("c_hat=%.6f bracket=[%.6f, %.6f] freq=[%.3f, %.3f]\n",
                est.c_hat, est.bracket_lo, est.bracket_hi, est.freq_lo,
                est.freq_hi);
    return 0;
  }

  if (oracle->parsed()) {
    double prob = 0;
    if (triadic_status s =
            triadic_exact_propagation_probability(oracle_n, oracle_p, &prob);
        s != TRIADIC_OK)
      return fail(s, "oracle");
    std::printf("%.12f\n", prob);
    return 0;
  }

  if (col->parsed()) {
    triadic_collapse_config cfg{};
    cfg.n = col_common.n;
    cfg.c = col_common.c;
    cfg.p = col_common.p;
    cfg.seed = col_common.seed;
    cfg.out_dir = col_dir.empty() ? nullptr : col_dir.c_str();
    triadic_collapse_report rep{};
    if (triadic_status s = triadic_collapse(&cfg, &rep); s != TRIADIC_OK)
      return fail(s, "collapse");
    std::printf(
        "propagated=%d verified=%d hypertree=%d steps=%" PRIu64
        " residual_edges=%" PRIu64 " residual_faces=%" PRIu64 "\n",
        rep.propagated, rep.certificate_verified, rep.is_hypertree,
        rep.certificate_steps, rep.residual_edges, rep.residual_faces);
    return 0;
  }

  return 0;
}
