#pragma once

// Per-sweep impulse diagnostics, temperature, and momentum-region
// classification.

#include "swapcool/integrators.hpp"

#include <vector>

namespace swapcool {

/// Coherent single-sweep impulse from |level, p_i> (requires gamma = 0).
struct CoherentImpulse {
  double delta_p_rms = 0.0;  ///< p_rms after the sweep minus |p_i|
  double P_e_end = 0.0;
};
CoherentImpulse delta_p_rms(InternalLevel level, int p_i, const SweepSchedule& schedule,
                            const DriveParams& params, const IntegratorConfig& config = {});

/// Average impulse with steady-state internal populations (gamma > 0).
struct SteadyImpulse {
  double delta_p_avg = 0.0;
  double P_e_ss = 0.0;
  double xi = 0.0;
  double se_delta_p_avg = 0.0;
  double se_xi = 0.0;
  /// End-of-sweep excited population from a ground (a) and excited (b) start.
  double a = 0.0;
  double b = 0.0;
};

/// One sweep from |g,p_i> and one from |e,p_i>; the map x -> a (1 - x) + b x
/// on the excited fraction has the fixed point x* = a / (1 - b + a), and the
/// impulse and photon count are mixed with the same weights.
/// std::runtime_error when 1 - b + a vanishes.
SteadyImpulse delta_p_avg_steady(int p_i, const SweepSchedule& schedule, const DriveParams& params,
                                 int n_traj, std::uint64_t seed,
                                 const IntegratorConfig& config = {});

/// Combines the two impulses of a steady-state run from the raw
/// end-of-sweep data (exposed for testing).
SteadyImpulse combine_steady(double a, double b, double dp_g, double dp_e, double xi_g,
                             double xi_e, double se_dp_g = 0.0, double se_dp_e = 0.0,
                             double se_xi_g = 0.0, double se_xi_e = 0.0);

struct SweepDirectionImpulse {
  double delta_p_plus = 0.0;
  double delta_p_minus = 0.0;
  double se = 0.0;
  SteadyImpulse positive;
  SteadyImpulse negative;
};
/// Delta p^(+-) = [(Delta p_avg)_pos +- (Delta p_avg)_neg] / 2.
SweepDirectionImpulse delta_p_pm(int p_i, const SweepSchedule& schedule,
                                 const DriveParams& params, int n_traj, std::uint64_t seed,
                                 const IntegratorConfig& config = {});

/// k_B T = <p^2>/m = 2 <p^2> (T in hbar omega_r / k_B, p in hbar k).
double temperature(double mean_p2);

/// 0: |kv| >= Delta_s/2; 1: Omega_0 <= |kv| < Delta_s/2; 2: |kv| < Omega_0.
/// Ties go to the lower-numbered region.
int region_classify(int p_i, const DriveParams& params, const SweepSchedule& schedule);

/// Delta_s > 4 |kv| for momentum p (hbar k).
bool capture_range_ok(double p, double delta_s);

struct ImpulseScanPoint {
  int p_i = 0;
  double delta_p_rms = 0.0;
  double delta_p_avg = 0.0;
  double se_delta_p_avg = 0.0;
  double P_e_end = 0.0;
  double P_e_ss = 0.0;
  double xi = 0.0;
  int region = 0;
};

/// Scan momenta: every 10 hbar k up to p_max, plus every 1 hbar k for
/// |p| <= dense_max, both signs, sorted and unique.
std::vector<int> scan_momenta(int p_max, int dense_max = 40);

/// Runs delta_p_rms (gamma = 0) or delta_p_avg_steady (gamma > 0) at each
/// momentum. Scan points are independent; seeds derive from `seed` and p_i.
std::vector<ImpulseScanPoint> impulse_scan(const std::vector<int>& momenta,
                                           InternalLevel level, const SweepSchedule& schedule,
                                           const DriveParams& params, int n_traj,
                                           std::uint64_t seed,
                                           const IntegratorConfig& config = {});

}  // namespace swapcool
