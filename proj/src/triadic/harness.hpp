#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "triadic/observables.hpp"
#include "triadic/process.hpp"
#include "triadic/topology.hpp"
#include "triadic/trajectory.hpp"

namespace triadic::harness {

enum class RunMode { Full, Sprinkle, Phase2Only };

struct RunConfig {
  std::uint32_t n = 0;
  std::optional<double> c;  // p = c / sqrt(n); exactly one of c, p
  std::optional<double> p;
  std::uint64_t seed = 0;
  RunMode mode = RunMode::Full;
  std::optional<double> horizon;          // phase-1 horizon override
  std::uint64_t checkpoint_interval = 0;  // 0 -> ceil(n^2 / 100)
  std::uint32_t monitored_pairs = 20;
  std::uint64_t max_rounds = 0;  // 0 -> 10 * ceil(log2 n)
  std::string out_dir;           // empty -> no files written
  bool track_history = false;
};

struct RunResult {
  FinalReport report;
  traj::OdeParams params;
  std::vector<obs::Checkpoint> checkpoints;  // phase-1 cadence
  std::vector<RoundOutcome> rounds;          // one per phase-2 round
  traj::ComparisonReport comparison;         // phase-1 checkpoints vs theory
};

// Full experiment: phase 1 to the selected horizon with periodic
// checkpoints, then phase 2 in the configured mode.  Artifacts written to
// out_dir: checkpoints.csv, rounds.csv, comparison.json, report.json and
// (with track_history) history.log.
RunResult cmd_run(const RunConfig& cfg);

// Fast path used by scan/threshold trials: no checkpoints, no history.
FinalReport run_trial(std::uint32_t n, double c, std::uint64_t seed,
                      RunMode mode = RunMode::Full);

// Pure per-trial seed derivation; no cross-trial state.
std::uint64_t trial_seed(std::uint64_t master, std::uint32_t n, double c,
                         std::uint32_t trial);

struct TrialAggregate {
  std::uint32_t trials = 0;
  std::uint32_t propagated = 0;
  double freq = 0;
  double mean_edges = 0;
  double mean_rounds = 0;
};

// Runs `trials` independent full runs at (n, c); trial-level parallelism,
// results aggregated in trial-index order.
TrialAggregate run_trials(std::uint32_t n, double c, std::uint32_t trials,
                          std::uint32_t workers, std::uint64_t master_seed,
                          RunMode mode = RunMode::Full);

struct ScanConfig {
  std::vector<std::uint32_t> n_values;
  std::vector<double> c_values;
  std::uint32_t trials = 1;
  std::uint32_t workers = 1;
  std::uint64_t master_seed = 0;
  std::string out_csv;
};

struct ScanCell {
  std::uint32_t n;
  double c;
  TrialAggregate agg;
};

std::vector<ScanCell> cmd_scan(const ScanConfig& cfg);

struct ThresholdConfig {
  std::uint32_t n = 0;
  double c_lo = 0, c_hi = 0;
  double tolerance = 0.05;
  std::uint32_t trials = 50;
  std::uint32_t workers = 1;
  std::uint64_t master_seed = 0;
  std::string out_json;
};

struct ThresholdEstimate {
  std::uint32_t n = 0;
  double c_hat = 0;
  double bracket_lo = 0, bracket_hi = 0;
  double freq_lo = 0, freq_hi = 0;
  std::uint32_t trials_per_probe = 0;
  std::vector<std::pair<double, double>> probes;  // (c, frequency)
};

// Bisection on c until the bracket width drops below the tolerance.
// Throws Error(BRACKET_FAILURE) when the initial bracket does not straddle
// frequency 1/2.
ThresholdEstimate cmd_threshold(const ThresholdConfig& cfg);

// Exact propagation probability by enumerating all 3-uniform hypergraphs
// on [n]; refuses n > 6.
double exact_propagation_probability(std::uint32_t n, double p);

struct CollapseConfig {
  std::uint32_t n = 0;
  std::optional<double> c;
  std::optional<double> p;
  std::uint64_t seed = 0;
  std::string out_dir;
};

struct CollapseReport {
  bool propagated = false;
  bool certificate_verified = false;
  bool is_hypertree = false;
  std::size_t certificate_steps = 0;
  std::size_t residual_edges = 0;
  std::size_t residual_faces = 0;
};

// Runs the process (oracle-coherent with sample_Y2), extracts and verifies
// the certificate on propagation, then greedily collapses the certificate
// complex.  Artifacts: certificate.txt, collapse.json, history.log.
CollapseReport cmd_collapse(const CollapseConfig& cfg);

// Resolves the (c, p) pair: exactly one must be set.
std::pair<double, double> resolve_probability(std::uint32_t n,
                                              std::optional<double> c,
                                              std::optional<double> p);

}  // namespace triadic::harness
