// extern-C surface over the C++ core.  Every entry point catches library
// errors and maps them to status codes; handles are owning pointers to the
// internal Process.

#include <cstring>
#include <fstream>
#include <new>
#include <span>

#include "triadic.h"
#include "triadic/harness.hpp"
#include "triadic/observables.hpp"
#include "triadic/process.hpp"
#include "triadic/trajectory.hpp"

using triadic::Error;
using triadic::Process;

struct triadic_process {
  Process impl;
};

namespace {

template <typename Fn>
triadic_status guarded(Fn&& fn) {
  try {
    fn();
    return TRIADIC_OK;
  } catch (const Error& e) {
    return e.code();
  } catch (const std::bad_alloc&) {
    return TRIADIC_ERR_INTERNAL;
  } catch (const std::exception&) {
    return TRIADIC_ERR_INTERNAL;
  }
}

void fill_report(const triadic::FinalReport& in, triadic_final_report* out) {
  out->propagated = in.propagated;
  out->final_edges = in.final_edges;
  out->phase1_steps = in.phase1_steps;
  out->phase2_rounds = in.phase2_rounds;
  switch (in.stall_reason) {
    case triadic::StallReason::Complete:
      out->stall_reason = TRIADIC_STALL_COMPLETE;
      break;
    case triadic::StallReason::RegistryEmpty:
      out->stall_reason = TRIADIC_STALL_REGISTRY_EMPTY;
      break;
    default:
      out->stall_reason = TRIADIC_STALL_TRUNCATED;
  }
}

}  // namespace

extern "C" {

const char* triadic_status_name(triadic_status s) {
  switch (s) {
    case TRIADIC_OK: return "ok";
    case TRIADIC_ERR_INVALID_INSTANCE: return "invalid_instance";
    case TRIADIC_ERR_INVALID_PROBABILITY: return "invalid_probability";
    case TRIADIC_ERR_INVALID_PAIR: return "invalid_pair";
    case TRIADIC_ERR_STALLED: return "stalled";
    case TRIADIC_ERR_ILLEGAL_EDGE: return "illegal_edge";
    case TRIADIC_ERR_REFUSED_SCALE: return "refused_scale";
    case TRIADIC_ERR_NO_ROOT: return "no_root";
    case TRIADIC_ERR_HORIZON_TOO_LATE: return "horizon_too_late";
    case TRIADIC_ERR_NEAR_SINGULARITY: return "near_singularity";
    case TRIADIC_ERR_NOT_PROPAGATED: return "not_propagated";
    case TRIADIC_ERR_CONFIG_MISMATCH: return "config_mismatch";
    case TRIADIC_ERR_BRACKET_FAILURE: return "bracket_failure";
    case TRIADIC_ERR_IO: return "io_error";
    case TRIADIC_ERR_INVALID_ARGUMENT: return "invalid_argument";
    default: return "internal_error";
  }
}

triadic_status triadic_process_create(uint32_t n, double p, uint64_t seed,
                                      uint32_t v0, int32_t track_history,
                                      triadic_process** out) {
  if (!out) return TRIADIC_ERR_INVALID_ARGUMENT;
  *out = nullptr;
  return guarded([&] {
    *out = new triadic_process{Process(n, p, seed, v0, track_history != 0)};
  });
}

triadic_status triadic_process_create_ex(uint32_t n, double p, uint64_t seed,
                                         uint64_t order_seed, uint32_t v0,
                                         int32_t track_history,
                                         triadic_process** out) {
  if (!out) return TRIADIC_ERR_INVALID_ARGUMENT;
  *out = nullptr;
  return guarded([&] {
    *out = new triadic_process{
        Process(n, p, seed, order_seed, v0, track_history != 0)};
  });
}

void triadic_process_destroy(triadic_process* p) { delete p; }

triadic_status triadic_process_step(triadic_process* p,
                                    triadic_step_outcome* out) {
  if (!p) return TRIADIC_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    triadic::StepOutcome s = p->impl.step();
    if (out) {
      out->triple[0] = s.sampled.v[0];
      out->triple[1] = s.sampled.v[1];
      out->triple[2] = s.sampled.v[2];
      out->success = s.success;
      out->edge[0] = s.added_edge ? s.added_edge->a : 0;
      out->edge[1] = s.added_edge ? s.added_edge->b : 0;
      out->triples_closed = s.triples_closed;
      out->triples_opened = s.triples_opened;
    }
  });
}

triadic_status triadic_process_round(triadic_process* p, int32_t use_override,
                                     double override_p,
                                     triadic_round_outcome* out) {
  if (!p) return TRIADIC_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    std::optional<double> op;
    if (use_override) {
      if (!(override_p >= 0.0 && override_p <= 1.0))
        throw Error(TRIADIC_ERR_INVALID_PROBABILITY,
                    "override_p must lie in [0, 1]");
      op = override_p;
    }
    triadic::RoundOutcome r = p->impl.round(op);
    if (out) {
      out->q_before = r.q_before;
      out->sampled_count = r.sampled_count;
      out->success_count = r.success_count;
      out->new_edges = r.new_edges;
      out->q_after = r.q_after;
    }
  });
}

triadic_status triadic_process_run_phase1(triadic_process* p,
                                          uint64_t max_steps,
                                          uint64_t* steps_taken,
                                          int32_t* stalled) {
  if (!p) return TRIADIC_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    triadic::Phase1Summary s = p->impl.run_phase1(max_steps);
    if (steps_taken) *steps_taken = s.steps_taken;
    if (stalled) *stalled = s.stalled;
  });
}

triadic_status triadic_process_run_phase2(triadic_process* p, int32_t mode,
                                          uint64_t max_rounds,
                                          triadic_final_report* out) {
  if (!p) return TRIADIC_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    triadic::FinalReport r = p->impl.run_phase2(
        mode == 1 ? triadic::Phase2Mode::Sprinkling
                  : triadic::Phase2Mode::Standard,
        max_rounds ? max_rounds : Process::default_max_rounds(p->impl.graph().n()));
    if (out) fill_report(r, out);
  });
}

uint32_t triadic_process_n(const triadic_process* p) {
  return p ? p->impl.graph().n() : 0;
}

uint64_t triadic_process_edge_count(const triadic_process* p) {
  return p ? p->impl.graph().edge_count() : 0;
}

uint64_t triadic_process_open_count(const triadic_process* p) {
  return p ? p->impl.open_count() : 0;
}

uint64_t triadic_process_step_index(const triadic_process* p) {
  return p ? p->impl.step_index() : 0;
}

uint64_t triadic_process_round_index(const triadic_process* p) {
  return p ? p->impl.round_index() : 0;
}

uint32_t triadic_process_degree(const triadic_process* p, uint32_t v) {
  return (p && v < p->impl.graph().n()) ? p->impl.graph().degree(v) : 0;
}

uint64_t triadic_process_open_at(const triadic_process* p, uint32_t v) {
  return (p && v < p->impl.graph().n()) ? p->impl.registry().open_at(v) : 0;
}

int32_t triadic_process_complete(const triadic_process* p) {
  return p ? p->impl.graph().complete() : 0;
}

triadic_status triadic_process_write_history(const triadic_process* p,
                                             const char* path) {
  if (!p || !path) return TRIADIC_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    if (!p->impl.tracks_history())
      throw Error(TRIADIC_ERR_INVALID_ARGUMENT, "history tracking is off");
    std::ofstream os(path);
    if (!os) throw Error(TRIADIC_ERR_IO, "cannot open history file");
    p->impl.write_history(os);
  });
}

triadic_status triadic_codegree(const triadic_process* p, uint32_t u,
                                uint32_t v, uint64_t* out) {
  if (!p || !out) return TRIADIC_ERR_INVALID_ARGUMENT;
  return guarded([&] { *out = triadic::obs::codegree(p->impl.graph(), u, v); });
}

triadic_status triadic_tilde_codegree(const triadic_process* p, uint32_t u,
                                      uint32_t v, uint64_t* out) {
  if (!p || !out) return TRIADIC_ERR_INVALID_ARGUMENT;
  return guarded([&] { *out = triadic::obs::tilde_codegree(p->impl, u, v); });
}

triadic_status triadic_open_three_walks(const triadic_process* p, uint32_t u,
                                        uint32_t v, uint64_t* out) {
  if (!p || !out) return TRIADIC_ERR_INVALID_ARGUMENT;
  return guarded([&] { *out = triadic::obs::open_three_walks(p->impl, u, v); });
}

triadic_status triadic_open_four_walks(const triadic_process* p, uint32_t u,
                                       uint32_t v, uint64_t* out) {
  if (!p || !out) return TRIADIC_ERR_INVALID_ARGUMENT;
  return guarded([&] { *out = triadic::obs::open_four_walks(p->impl, u, v); });
}

triadic_status triadic_closed_form(double c, double t, double* d, double* f,
                                   double* y, double* z) {
  if (t < 0) return TRIADIC_ERR_INVALID_ARGUMENT;
  triadic::traj::ClosedForm v = triadic::traj::closed_form(c, t);
  if (d) *d = v.d;
  if (f) *f = v.f;
  if (y) *y = v.y;
  if (z) *z = v.z;
  return TRIADIC_OK;
}

triadic_status triadic_f_root(double c, double* t0) {
  if (!t0) return TRIADIC_ERR_INVALID_ARGUMENT;
  return guarded([&] { *t0 = triadic::traj::f_root_T0(c); });
}

triadic_status triadic_compute_k(double c, double horizon, double* k) {
  if (!k) return TRIADIC_ERR_INVALID_ARGUMENT;
  return guarded([&] { *k = triadic::traj::compute_K(c, horizon); });
}

triadic_status triadic_envelopes(double c, double k, uint32_t n, double t,
                                 double* g1, double* g2) {
  if (!g1 || !g2 || n == 0) return TRIADIC_ERR_INVALID_ARGUMENT;
  triadic::traj::OdeParams params;
  params.c = c;
  params.n = n;
  params.k = k;
  triadic::traj::Envelopes e = triadic::traj::envelopes(params, t);
  *g1 = e.g1;
  *g2 = e.g2;
  return TRIADIC_OK;
}

triadic_status triadic_select_horizon(double c, uint32_t n, double* horizon,
                                      double* k, int32_t* regime) {
  return guarded([&] {
    triadic::traj::OdeParams p = triadic::traj::select_phase1_horizon(c, n);
    if (horizon) *horizon = p.horizon;
    if (k) *k = p.k;
    if (regime)
      *regime = p.regime == triadic::traj::Regime::Supercritical ? 2
                : p.regime == triadic::traj::Regime::Critical    ? 1
                                                                 : 0;
  });
}

triadic_status triadic_verify_ode(double c, double t_lo, double t_hi,
                                  double pitch, double* max_residual) {
  if (!max_residual || !(pitch > 0) || t_hi < t_lo)
    return TRIADIC_ERR_INVALID_ARGUMENT;
  return guarded(
      [&] { *max_residual = triadic::traj::verify_ode(c, t_lo, t_hi, pitch); });
}

triadic_status triadic_rk4_max_gap(double c, double t_end, double h,
                                   double* max_gap) {
  if (!max_gap) return TRIADIC_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    auto samples = triadic::traj::rk4_integrate(c, t_end, h);
    double worst = 0;
    for (const auto& s : samples) {
      triadic::traj::ClosedForm ref = triadic::traj::closed_form(c, s.t);
      worst = std::max({worst, std::abs(s.value.d - ref.d),
                        std::abs(s.value.f - ref.f),
                        std::abs(s.value.y - ref.y),
                        std::abs(s.value.z - ref.z)});
    }
    *max_gap = worst;
  });
}

namespace {

triadic_status fill_run_config(const triadic_run_config* cfg,
                               triadic::harness::RunConfig* out) {
  if (!cfg) return TRIADIC_ERR_INVALID_ARGUMENT;
  out->n = cfg->n;
  if (cfg->c > 0)
    out->c = cfg->c;
  else
    out->p = cfg->p;
  out->seed = cfg->seed;
  switch (cfg->mode) {
    case TRIADIC_MODE_FULL:
      out->mode = triadic::harness::RunMode::Full;
      break;
    case TRIADIC_MODE_SPRINKLE:
      out->mode = triadic::harness::RunMode::Sprinkle;
      break;
    case TRIADIC_MODE_PHASE2_ONLY:
      out->mode = triadic::harness::RunMode::Phase2Only;
      break;
    default:
      return TRIADIC_ERR_INVALID_ARGUMENT;
  }
  if (cfg->horizon > 0) out->horizon = cfg->horizon;
  out->checkpoint_interval = cfg->checkpoint_interval;
  out->monitored_pairs = cfg->monitored_pairs ? cfg->monitored_pairs : 20;
  out->max_rounds = cfg->max_rounds;
  if (cfg->out_dir) out->out_dir = cfg->out_dir;
  return TRIADIC_OK;
}

}  // namespace

triadic_status triadic_run(const triadic_run_config* cfg,
                           triadic_final_report* out) {
  triadic::harness::RunConfig rc;
  if (triadic_status s = fill_run_config(cfg, &rc); s != TRIADIC_OK) return s;
  return guarded([&] {
    triadic::harness::RunResult r = triadic::harness::cmd_run(rc);
    if (out) fill_report(r.report, out);
  });
}

triadic_status triadic_scan(const triadic_scan_config* cfg) {
  if (!cfg || !cfg->n_values || !cfg->c_values)
    return TRIADIC_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    triadic::harness::ScanConfig sc;
    sc.n_values.assign(cfg->n_values, cfg->n_values + cfg->n_count);
    sc.c_values.assign(cfg->c_values, cfg->c_values + cfg->c_count);
    sc.trials = cfg->trials;
    sc.workers = cfg->workers ? cfg->workers : 1;
    sc.master_seed = cfg->master_seed;
    if (cfg->out_csv) sc.out_csv = cfg->out_csv;
    triadic::harness::cmd_scan(sc);
  });
}

triadic_status triadic_threshold(const triadic_threshold_config* cfg,
                                 triadic_threshold_estimate* out) {
  if (!cfg) return TRIADIC_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    triadic::harness::ThresholdConfig tc;
    tc.n = cfg->n;
    tc.c_lo = cfg->c_lo;
    tc.c_hi = cfg->c_hi;
    tc.tolerance = cfg->tolerance;
    tc.trials = cfg->trials;
    tc.workers = cfg->workers ? cfg->workers : 1;
    tc.master_seed = cfg->master_seed;
    if (cfg->out_json) tc.out_json = cfg->out_json;
    triadic::harness::ThresholdEstimate est =
        triadic::harness::cmd_threshold(tc);
    if (out) {
      out->c_hat = est.c_hat;
      out->bracket_lo = est.bracket_lo;
      out->bracket_hi = est.bracket_hi;
      out->freq_lo = est.freq_lo;
      out->freq_hi = est.freq_hi;
      out->trials_per_probe = est.trials_per_probe;
    }
  });
}

triadic_status triadic_exact_propagation_probability(uint32_t n, double p,
                                                     double* out) {
  if (!out) return TRIADIC_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    *out = triadic::harness::exact_propagation_probability(n, p);
  });
}

triadic_status triadic_collapse(const triadic_collapse_config* cfg,
                                triadic_collapse_report* out) {
  if (!cfg) return TRIADIC_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    triadic::harness::CollapseConfig cc;
    cc.n = cfg->n;
    if (cfg->c > 0)
      cc.c = cfg->c;
    else
      cc.p = cfg->p;
    cc.seed = cfg->seed;
    if (cfg->out_dir) cc.out_dir = cfg->out_dir;
    triadic::harness::CollapseReport r = triadic::harness::cmd_collapse(cc);
    if (out) {
      out->propagated = r.propagated;
      out->certificate_verified = r.certificate_verified;
      out->is_hypertree = r.is_hypertree;
      out->certificate_steps = r.certificate_steps;
      out->residual_edges = r.residual_edges;
      out->residual_faces = r.residual_faces;
    }
  });
}

}  // extern "C"
