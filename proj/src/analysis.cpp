#include "swapcool/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace swapcool {

namespace {

SweepSchedule single_sweep(const SweepSchedule& schedule, RampSign sign) {
  if (!schedule.is_ramped()) throw std::invalid_argument("impulse diagnostics need a ramp");
  return SweepSchedule(Sawtooth{schedule.delta_s(), schedule.period(), 1, sign});
}

RampSign sign_of(const SweepSchedule& s) {
  return s.sign() > 0.0 ? RampSign::Positive : RampSign::Negative;
}

std::uint64_t point_seed(std::uint64_t seed, int p_i, int tag) {
  return derive_seed(seed, static_cast<std::uint64_t>(static_cast<std::int64_t>(p_i) * 4 + tag));
}

}  // namespace

CoherentImpulse delta_p_rms(InternalLevel level, int p_i, const SweepSchedule& schedule,
                            const DriveParams& params, const IntegratorConfig& config) {
  if (params.gamma != 0.0) throw ContractViolation("delta_p_rms is defined for gamma = 0");
  const SweepSchedule one = single_sweep(schedule, sign_of(schedule));
  const MomentumGrid grid = MomentumGrid::for_sweep(p_i, one.delta_s());
  const auto r = evolve_trajectory(make_basis_state(level, p_i, grid), one, params, 0.0,
                                   one.period(), 0, config);
  return {r.records.back().p_rms - r.records.front().p_rms, r.records.back().P_e};
}

SteadyImpulse combine_steady(double a, double b, double dp_g, double dp_e, double xi_g,
                             double xi_e, double se_dp_g, double se_dp_e, double se_xi_g,
                             double se_xi_e) {
  const double den = 1.0 - b + a;
  if (!(std::abs(den) > 1e-12))
    throw std::runtime_error("steady-state populations do not converge (1 - b + a = 0)");
  const double x = a / den;
  SteadyImpulse s;
  s.a = a;
  s.b = b;
  s.P_e_ss = x;
  s.delta_p_avg = (1.0 - x) * dp_g + x * dp_e;
  s.xi = (1.0 - x) * xi_g + x * xi_e;
  s.se_delta_p_avg = std::hypot((1.0 - x) * se_dp_g, x * se_dp_e);
  s.se_xi = std::hypot((1.0 - x) * se_xi_g, x * se_xi_e);
  return s;
}

namespace {

SteadyImpulse steady_for_sign(int p_i, const SweepSchedule& schedule, RampSign sign,
                              const DriveParams& params, int n_traj, std::uint64_t seed,
                              const IntegratorConfig& config) {
  if (!(params.gamma > 0.0)) throw ContractViolation("delta_p_avg_steady requires gamma > 0");
  const SweepSchedule one = single_sweep(schedule, sign);
  const MomentumGrid grid = MomentumGrid::for_sweep(p_i, one.delta_s());
  IntegratorConfig cfg = config;
  cfg.records_per_period = 1;
  const int tag = sign == RampSign::Positive ? 0 : 2;
  const auto g = run_ensemble(make_basis_state(InternalLevel::Ground, p_i, grid), one, params,
                              n_traj, point_seed(seed, p_i, tag), cfg);
  const auto e = run_ensemble(make_basis_state(InternalLevel::Excited, p_i, grid), one, params,
                              n_traj, point_seed(seed, p_i, tag + 1), cfg);
  const auto& gm = g.mean.back();
  const auto& em = e.mean.back();
  return combine_steady(gm.P_e, em.P_e, gm.mean_p - p_i, em.mean_p - p_i, gm.xi_cum, em.xi_cum,
                        g.se.back().mean_p, e.se.back().mean_p, g.se.back().xi_cum,
                        e.se.back().xi_cum);
}

}  // namespace

SteadyImpulse delta_p_avg_steady(int p_i, const SweepSchedule& schedule, const DriveParams& params,
                                 int n_traj, std::uint64_t seed, const IntegratorConfig& config) {
  return steady_for_sign(p_i, schedule, sign_of(schedule), params, n_traj, seed, config);
}

SweepDirectionImpulse delta_p_pm(int p_i, const SweepSchedule& schedule,
                                 const DriveParams& params, int n_traj, std::uint64_t seed,
                                 const IntegratorConfig& config) {
  SweepDirectionImpulse out;
  out.positive = steady_for_sign(p_i, schedule, RampSign::Positive, params, n_traj, seed, config);
  out.negative = steady_for_sign(p_i, schedule, RampSign::Negative, params, n_traj, seed, config);
  out.delta_p_plus = 0.5 * (out.positive.delta_p_avg + out.negative.delta_p_avg);
  out.delta_p_minus = 0.5 * (out.positive.delta_p_avg - out.negative.delta_p_avg);
  out.se = 0.5 * std::hypot(out.positive.se_delta_p_avg, out.negative.se_delta_p_avg);
  return out;
}

double temperature(double mean_p2) { return mean_p2 / units::mass; }

int region_classify(int p_i, const DriveParams& params, const SweepSchedule& schedule) {
  const double kv = std::abs(units::doppler_shift(p_i));
  if (kv >= 0.5 * schedule.delta_s()) return 0;
  if (kv >= std::abs(params.omega0)) return 1;
  return 2;
}

bool capture_range_ok(double p, double delta_s) {
  return delta_s > 4.0 * std::abs(units::doppler_shift(p));
}

std::vector<int> scan_momenta(int p_max, int dense_max) {
  std::vector<int> out;
  for (int p = 0; p <= p_max; p += 10) {
    out.push_back(p);
    out.push_back(-p);
  }
  for (int p = 0; p <= std::min(dense_max, p_max); ++p) {
    out.push_back(p);
    out.push_back(-p);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<ImpulseScanPoint> impulse_scan(const std::vector<int>& momenta,
                                           InternalLevel level, const SweepSchedule& schedule,
                                           const DriveParams& params, int n_traj,
                                           std::uint64_t seed, const IntegratorConfig& config) {
  std::vector<ImpulseScanPoint> out;
  out.reserve(momenta.size());
  for (int p : momenta) {
    ImpulseScanPoint pt;
    pt.p_i = p;
    pt.region = region_classify(p, params, schedule);
    if (params.gamma == 0.0) {
      const auto c = delta_p_rms(level, p, schedule, params, config);
      pt.delta_p_rms = c.delta_p_rms;
      pt.P_e_end = c.P_e_end;
    } else {
      const auto s = delta_p_avg_steady(p, schedule, params, n_traj, seed, config);
      pt.delta_p_avg = s.delta_p_avg;
      pt.se_delta_p_avg = s.se_delta_p_avg;
      pt.P_e_end = s.a;
      pt.P_e_ss = s.P_e_ss;
      pt.xi = s.xi;
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace swapcool
