#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "triadic/harness.hpp"

using namespace triadic;
using namespace triadic::harness;

namespace {

std::filesystem::path fresh_dir(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("resolve_probability accepts exactly one of c and p") {
  auto [c, p] = resolve_probability(100, 0.8, std::nullopt);
  CHECK(c == doctest::Approx(0.8));
  CHECK(p == doctest::Approx(0.08));
  auto [c2, p2] = resolve_probability(100, std::nullopt, 0.05);
  CHECK(c2 == doctest::Approx(0.5));
  CHECK(p2 == doctest::Approx(0.05));
  CHECK_THROWS_AS(resolve_probability(100, 0.8, 0.05), Error);
  CHECK_THROWS_AS(resolve_probability(100, std::nullopt, std::nullopt), Error);
  CHECK_THROWS_AS(resolve_probability(100, 20.0, std::nullopt), Error);
}

TEST_CASE("trial seeds are pure and collision-averse") {
  CHECK(trial_seed(1, 100, 0.8, 0) == trial_seed(1, 100, 0.8, 0));
  CHECK(trial_seed(1, 100, 0.8, 0) != trial_seed(1, 100, 0.8, 1));
  CHECK(trial_seed(1, 100, 0.8, 0) != trial_seed(1, 200, 0.8, 0));
  CHECK(trial_seed(1, 100, 0.8, 0) != trial_seed(1, 100, 0.9, 0));
  CHECK(trial_seed(1, 100, 0.8, 0) != trial_seed(2, 100, 0.8, 0));
}

TEST_CASE("exact propagation probability at the extremes and by enumeration") {
  CHECK(exact_propagation_probability(4, 0.0) == doctest::Approx(0.0));
  CHECK(exact_propagation_probability(4, 1.0) == doctest::Approx(1.0));
  // n = 4, p = 1/2: each of the 4 triples is a fair coin, so the answer is
  // (number of propagating hypergraphs) / 16, a multiple of 1/16.
  double q = exact_propagation_probability(4, 0.5);
  CHECK(q * 16 == doctest::Approx(std::round(q * 16)));
  CHECK(q > 0.0);
  CHECK(q < 1.0);
  CHECK_THROWS_AS(exact_propagation_probability(7, 0.5), Error);
  try {
    exact_propagation_probability(7, 0.5);
  } catch (const Error& e) {
    CHECK(e.code() == TRIADIC_ERR_REFUSED_SCALE);
  }
}

TEST_CASE("simulation frequency matches the exact value") {
  const std::uint32_t n = 4;
  const double p = 0.5, c = p * 2;  // sqrt(4) = 2
  double exact = exact_propagation_probability(n, p);
  const std::uint32_t trials = 4000;
  auto agg = run_trials(n, c, trials, 1, 99);
  double sigma = std::sqrt(exact * (1 - exact) / trials);
  CHECK(std::abs(agg.freq - exact) < 4 * sigma);
}

TEST_CASE("run_trial covers the probability extremes") {
  auto one = run_trial(16, 4.0, 1);  // p = 1 exactly
  CHECK(one.propagated);
  CHECK(one.final_edges == 16 * 15 / 2);
  // The horizon recipe needs c > 0; a tiny c behaves like the empty oracle.
  auto tiny = run_trial(16, 0.004, 1);
  CHECK(!tiny.propagated);
  CHECK(tiny.final_edges == 15);
  CHECK(tiny.stall_reason == StallReason::RegistryEmpty);
}

TEST_CASE("trial aggregates are identical across worker counts") {
  auto a = run_trials(24, 0.9, 8, 1, 7);
  auto b = run_trials(24, 0.9, 8, 3, 7);
  CHECK(a.trials == b.trials);
  CHECK(a.propagated == b.propagated);
  CHECK(a.freq == b.freq);
  CHECK(a.mean_edges == b.mean_edges);
  CHECK(a.mean_rounds == b.mean_rounds);
}

TEST_CASE("scan rejects zero trials") {
  ScanConfig cfg;
  cfg.n_values = {16};
  cfg.c_values = {0.5};
  cfg.trials = 0;
  CHECK_THROWS_AS(cmd_scan(cfg), Error);
}

TEST_CASE("sprinkling mode runs to a verdict") {
  auto r = run_trial(32, 0.9, 3, RunMode::Sprinkle);
  CHECK((r.propagated || r.stall_reason != StallReason::Complete));
}

TEST_CASE("scan writes one row per cell") {
  auto csv = fresh_dir("triadic_scan_test").string() + ".csv";
  ScanConfig cfg;
  cfg.n_values = {16, 24};
  cfg.c_values = {0.3, 1.2};
  cfg.trials = 3;
  cfg.workers = 1;
  cfg.master_seed = 5;
  cfg.out_csv = csv;
  auto cells = cmd_scan(cfg);
  REQUIRE(cells.size() == 4);
  std::ifstream in(csv);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 5);  // header + 4 cells
  std::filesystem::remove(csv);
}

TEST_CASE("threshold bisection brackets the transition") {
  ThresholdConfig cfg;
  cfg.n = 48;
  cfg.c_lo = 0.05;
  cfg.c_hi = 2.5;
  cfg.tolerance = 0.3;
  cfg.trials = 12;
  cfg.workers = 1;
  cfg.master_seed = 11;
  auto est = cmd_threshold(cfg);
  CHECK(est.n == 48);
  CHECK(est.c_hat > cfg.c_lo);
  CHECK(est.c_hat < cfg.c_hi);
  CHECK(est.bracket_hi - est.bracket_lo <= cfg.tolerance);
  CHECK(est.freq_lo < 0.5);
  CHECK(est.freq_hi >= 0.5);
  CHECK(est.probes.size() >= 2);
}

TEST_CASE("threshold rejects a bracket that does not straddle one half") {
  ThresholdConfig cfg;
  cfg.n = 32;
  cfg.c_lo = 0.01;
  cfg.c_hi = 0.02;
  cfg.trials = 6;
  cfg.master_seed = 1;
  CHECK_THROWS_AS(cmd_threshold(cfg), Error);
  try {
    cmd_threshold(cfg);
  } catch (const Error& e) {
    CHECK(e.code() == TRIADIC_ERR_BRACKET_FAILURE);
  }
}

TEST_CASE("cmd_run writes all artifacts and a coherent report") {
  auto dir = fresh_dir("triadic_run_test");
  RunConfig cfg;
  cfg.n = 64;
  cfg.c = 1.2;
  cfg.seed = 3;
  cfg.out_dir = dir.string();
  cfg.track_history = true;
  auto res = cmd_run(cfg);
  CHECK(res.params.regime == traj::Regime::Supercritical);
  CHECK(!res.checkpoints.empty());
  CHECK(res.report.phase1_steps > 0);
  CHECK(res.report.final_edges >= 63);
  for (const char* f : {"checkpoints.csv", "rounds.csv", "comparison.json",
                        "report.json", "history.log"})
    CHECK(std::filesystem::exists(dir / f));
  std::filesystem::remove_all(dir);
}

TEST_CASE("phase2-only mode skips phase 1") {
  RunConfig cfg;
  cfg.n = 32;
  cfg.c = 1.0;
  cfg.seed = 4;
  cfg.mode = RunMode::Phase2Only;
  auto res = cmd_run(cfg);
  CHECK(res.report.phase1_steps == 0);
  CHECK(res.checkpoints.empty());
  CHECK(res.report.phase2_rounds > 0);
}

TEST_CASE("cmd_collapse verifies and collapses a propagating run") {
  auto dir = fresh_dir("triadic_collapse_test");
  CollapseConfig cfg;
  cfg.n = 24;
  cfg.p = 1.0;
  cfg.seed = 2;
  cfg.out_dir = dir.string();
  auto rep = cmd_collapse(cfg);
  CHECK(rep.propagated);
  CHECK(rep.certificate_verified);
  CHECK(rep.is_hypertree);
  CHECK(rep.certificate_steps == 24 * 23 / 2 - 23);
  for (const char* f : {"certificate.txt", "collapse.json", "history.log"})
    CHECK(std::filesystem::exists(dir / f));
  std::filesystem::remove_all(dir);

  CollapseConfig dud;
  dud.n = 24;
  dud.p = 0.002;
  dud.seed = 2;
  auto rep2 = cmd_collapse(dud);
  CHECK(!rep2.propagated);
  CHECK(!rep2.certificate_verified);
}
