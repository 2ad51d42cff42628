#include "triadic/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "triadic/common.hpp"
#include "triadic/observables.hpp"

namespace triadic::traj {

ClosedForm closed_form(double c, double t) {
  double d = 2 * c * t;
  double f = 1 - 2 * t + 4 * c * c * t * t;
  return ClosedForm{d, f, d * f, f * f};
}

double f_root_T0(double c) {
  if (!(c > 0 && c <= 0.5))
    throw Error(TRIADIC_ERR_NO_ROOT, "f has no positive root for c > 1/2");
  double disc = 1 - 4 * c * c;
  return (1 - std::sqrt(disc)) / (4 * c * c);
}

namespace {
double k_expression(double c, double t) {
  ClosedForm v = closed_form(c, t);
  if (v.f <= 0)
    throw Error(TRIADIC_ERR_HORIZON_TOO_LATE, "f <= 0 inside [0, T]");
  return 1 + v.d / v.f + 1 / v.f;
}
}  // namespace

double compute_K(double c, double horizon) {
  if (horizon < 0)
    throw Error(TRIADIC_ERR_HORIZON_TOO_LATE, "negative horizon");
  constexpr double pitch = 1e-3;
  double best = 0;
  auto steps = static_cast<std::uint64_t>(std::floor(horizon / pitch));
  for (std::uint64_t i = 0; i <= steps; ++i)
    best = std::max(best, k_expression(c, static_cast<double>(i) * pitch));
  best = std::max(best, k_expression(c, horizon));
  // The maximand is largest where f is smallest: check the argmin of f too.
  double t_min_f = std::clamp(1 / (4 * c * c), 0.0, horizon);
  best = std::max(best, k_expression(c, t_min_f));
  return 100 * best;
}

Envelopes envelopes(const OdeParams& params, double t) {
  double g1 = std::exp(params.k * t) *
              std::pow(static_cast<double>(params.n), -1.0 / 6.0);
  double d = 2 * params.c * t;
  return Envelopes{g1, (1 + d) * g1};
}

OdeParams select_phase1_horizon(double c, std::uint32_t n) {
  if (!(c > 0)) throw Error(TRIADIC_ERR_INVALID_ARGUMENT, "c must be positive");
  OdeParams params;
  params.c = c;
  params.n = n;
  if (c > 0.5) {
    params.regime = Regime::Supercritical;
    params.horizon = std::sqrt(std::log(static_cast<double>(n)));
  } else {
    params.regime = c == 0.5 ? Regime::Critical : Regime::Subcritical;
    double t0 = f_root_T0(c);
    double delta = (1 - 2 * c * t0) / 2;
    double eps = std::min(delta * (1 - 2 * c) / c, 1.0) / 2;
    // At c = 1/2 the recipe degenerates (delta = 0); keep a fixed slack so
    // the horizon stays strictly below T0.
    if (eps <= 0) eps = 0.05;
    // Smaller root of 4c^2 T^2 - 2T + (1 - eps/2) = 0.
    double a = 4 * c * c;
    double disc = 1 - a * (1 - eps / 2);
    params.horizon = (1 - std::sqrt(disc)) / a;
  }
  params.k = compute_K(c, params.horizon);
  return params;
}

namespace {
// Residuals of the four ODEs with exact polynomial derivatives.
double max_residual_at(double c, double t) {
  ClosedForm v = closed_form(c, t);
  if (v.f <= 0)
    throw Error(TRIADIC_ERR_HORIZON_TOO_LATE, "f <= 0 on residual grid");
  double dd = 2 * c;
  double df = 8 * c * c * t - 2;
  double dy = dd * v.f + v.d * df;
  double dz = 2 * v.f * df;
  double r1 = dd - 2 * c;
  double r2 = df - (4 * c * v.d - 2);
  double r3 = dy - 2 / v.f * ((2 * c * v.d - 1) * v.y + c * v.z);
  double r4 = dz - 4 / v.f * (2 * c * v.y * v.f - v.z);
  return std::max({std::abs(r1), std::abs(r2), std::abs(r3), std::abs(r4)});
}
}  // namespace

double verify_ode(double c, std::span<const double> t_grid) {
  double worst = 0;
  for (double t : t_grid) worst = std::max(worst, max_residual_at(c, t));
  return worst;
}

double verify_ode(double c, double t_lo, double t_hi, double pitch) {
  std::vector<double> grid;
  for (double t = t_lo; t <= t_hi + pitch / 2; t += pitch)
    grid.push_back(std::min(t, t_hi));
  return verify_ode(c, grid);
}

namespace {
struct State4 {
  double d, f, y, z;
};

State4 derivative(double c, const State4& s) {
  return State4{2 * c, 4 * c * s.d - 2,
                2 / s.f * ((2 * c * s.d - 1) * s.y + c * s.z),
                4 / s.f * (2 * c * s.y * s.f - s.z)};
}

State4 axpy(const State4& s, double h, const State4& k) {
  return State4{s.d + h * k.d, s.f + h * k.f, s.y + h * k.y, s.z + h * k.z};
}
}  // namespace

std::vector<TrajectorySample> rk4_integrate(double c, double t_end, double h) {
  if (!(h > 0)) throw Error(TRIADIC_ERR_INVALID_ARGUMENT, "h must be positive");
  std::vector<TrajectorySample> out;
  State4 s{0, 1, 0, 1};
  double t = 0;
  out.push_back({t, ClosedForm{s.d, s.f, s.y, s.z}});
  while (t < t_end - h / 2) {
    if (s.f <= 10 * h)
      throw Error(TRIADIC_ERR_NEAR_SINGULARITY, "f too close to 0 for RK4");
    State4 k1 = derivative(c, s);
    State4 k2 = derivative(c, axpy(s, h / 2, k1));
    State4 k3 = derivative(c, axpy(s, h / 2, k2));
    State4 k4 = derivative(c, axpy(s, h, k3));
    s = State4{s.d + h / 6 * (k1.d + 2 * k2.d + 2 * k3.d + k4.d),
               s.f + h / 6 * (k1.f + 2 * k2.f + 2 * k3.f + k4.f),
               s.y + h / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y),
               s.z + h / 6 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z)};
    t += h;
    out.push_back({t, ClosedForm{s.d, s.f, s.y, s.z}});
  }
  return out;
}

ComparisonReport compare(const std::vector<obs::Checkpoint>& checkpoints,
                         const OdeParams& params) {
  ComparisonReport r;
  r.checkpoints = checkpoints.size();
  std::size_t pass_a = 0, pass_b = 0, pass_c = 0, pass_d = 0, pass_e = 0;
  for (const obs::Checkpoint& cp : checkpoints) {
    if (cp.n != params.n || cp.c != params.c)
      throw Error(TRIADIC_ERR_CONFIG_MISMATCH,
                  "checkpoints come from a different (c, n)");
    ClosedForm v = closed_form(params.c, cp.t);
    auto track = [](double emp, double ref, double& max_abs, double& max_rel) {
      double abs = std::abs(emp - ref);
      max_abs = std::max(max_abs, abs);
      if (std::abs(ref) > 1e-12)
        max_rel = std::max(max_rel, abs / std::abs(ref));
    };
    track(cp.d_mean, v.d, r.max_abs_dev_d, r.max_rel_dev_d);
    track(cp.f_mean, v.f, r.max_abs_dev_f, r.max_rel_dev_f);
    track(cp.y_mean_scaled, v.y, r.max_abs_dev_y, r.max_rel_dev_y);
    track(cp.z_mean_scaled, v.z, r.max_abs_dev_z, r.max_rel_dev_z);
    pass_a += cp.flag_a;
    pass_b += cp.flag_b;
    pass_c += cp.flag_c;
    pass_d += cp.flag_d;
    pass_e += cp.flag_e;
    bool all = cp.flag_a && cp.flag_b && cp.flag_c && cp.flag_d && cp.flag_e;
    if (!all && r.first_failure_t < 0) r.first_failure_t = cp.t;
  }
  if (!checkpoints.empty()) {
    auto n = static_cast<double>(checkpoints.size());
    r.pass_rate_a = pass_a / n;
    r.pass_rate_b = pass_b / n;
    r.pass_rate_c = pass_c / n;
    r.pass_rate_d = pass_d / n;
    r.pass_rate_e = pass_e / n;
  }
  return r;
}

std::string comparison_to_json(const ComparisonReport& r,
                               const OdeParams& params) {
  const char* regime = params.regime == Regime::Supercritical ? "supercritical"
                       : params.regime == Regime::Critical    ? "critical"
                                                              : "subcritical";
  nlohmann::ordered_json j{
      {"c", params.c},
      {"n", params.n},
      {"horizon", params.horizon},
      {"k", params.k},
      {"regime", regime},
      {"checkpoints", r.checkpoints},
      {"max_abs_dev", {{"d", r.max_abs_dev_d}, {"f", r.max_abs_dev_f},
                       {"y", r.max_abs_dev_y}, {"z", r.max_abs_dev_z}}},
      {"max_rel_dev", {{"d", r.max_rel_dev_d}, {"f", r.max_rel_dev_f},
                       {"y", r.max_rel_dev_y}, {"z", r.max_rel_dev_z}}},
      {"envelope_pass_rate", {{"a", r.pass_rate_a}, {"b", r.pass_rate_b},
                              {"c", r.pass_rate_c}, {"d", r.pass_rate_d},
                              {"e", r.pass_rate_e}}},
      {"first_failure_t", r.first_failure_t}};
  return j.dump(2);
}

}  // namespace triadic::traj
