#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace triadic::obs {
struct Checkpoint;
}

namespace triadic::traj {

enum class Regime { Subcritical, Critical, Supercritical };

struct OdeParams {
  double c = 0;
  std::uint32_t n = 0;
  double horizon = 0;  // T, in rescaled time units
  double k = 0;        // envelope rate constant
  Regime regime = Regime::Subcritical;
};

struct ClosedForm {
  double d, f, y, z;
};

// d(t) = 2ct, f(t) = 1 - 2t + 4c^2 t^2, y = d f, z = f^2.
ClosedForm closed_form(double c, double t);

// First positive root of f, defined for 0 < c <= 1/2.
double f_root_T0(double c);

// 100 * max over [0, T] of 1 + d/f + 1/f, grid pitch 1e-3 with a
// cross-check at the analytic argmin of f.
double compute_K(double c, double horizon);

struct Envelopes {
  double g1, g2;  // g1 = e^{Kt} n^{-1/6}, g2 = (1 + d(t)) g1
};
Envelopes envelopes(const OdeParams& params, double t);

// Supercritical: T = sqrt(ln n).  Subcritical: the smaller solution of
// f(T) = eps/2 below T0, with delta = (1 - d(T0))/2 and
// eps = min(delta (1-2c)/c, 1)/2.  c = 1/2 runs the subcritical recipe and
// is labeled critical.
OdeParams select_phase1_horizon(double c, std::uint32_t n);

// Max absolute residual of the four ODEs over the grid, using exact
// polynomial derivatives of the closed forms.
double verify_ode(double c, std::span<const double> t_grid);
double verify_ode(double c, double t_lo, double t_hi, double pitch);

struct TrajectorySample {
  double t;
  ClosedForm value;
};

// Classical fixed-step RK4 on (d, f, y, z) from the initial conditions;
// independent numerical check of the closed forms.
std::vector<TrajectorySample> rk4_integrate(double c, double t_end, double h);

struct ComparisonReport {
  double max_abs_dev_d = 0, max_abs_dev_f = 0, max_abs_dev_y = 0,
         max_abs_dev_z = 0;
  double max_rel_dev_d = 0, max_rel_dev_f = 0, max_rel_dev_y = 0,
         max_rel_dev_z = 0;
  double pass_rate_a = 1, pass_rate_b = 1, pass_rate_c = 1, pass_rate_d = 1,
         pass_rate_e = 1;
  double first_failure_t = -1;  // -1 when every flag passed
  std::size_t checkpoints = 0;
};

// Deviations of the empirical means from the closed forms plus envelope
// pass rates.  Throws Error(CONFIG_MISMATCH) when params disagree with the
// checkpoints' instance size.
ComparisonReport compare(const std::vector<obs::Checkpoint>& checkpoints,
                         const OdeParams& params);

std::string comparison_to_json(const ComparisonReport& r,
                               const OdeParams& params);

}  // namespace triadic::traj
