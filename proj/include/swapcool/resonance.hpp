#pragma once

// Closed-form predictions: Landau-Zener transfer, resonance timing within a
// sweep, regime predicates, Doppleron gaps and Bragg oscillation counts.
// Natural units (omega_r = 1); kv = 2p for momentum p in hbar k.

#include "swapcool/drive.hpp"

#include <string>

namespace swapcool {

/// P_a = 1 - exp(-(pi/2) Omega_0^2 / alpha).
double lz_probability(double omega0, double alpha);

struct Adiabaticity {
  double kappa;
  bool adiabatic;  ///< kappa >= 1
};
Adiabaticity adiabaticity(double omega0, double alpha);

/// Times (relative to delta = 0) at which a particle in |level, beta hbar k>
/// is resonant with the co- (right) and counter-propagating (left) beam.
/// Ground: alpha t = +-2 beta + 1. Excited: alpha t = +-2 beta - 1.
struct ResonanceTimes {
  double t_right;
  double t_left;
};
ResonanceTimes resonance_times(InternalLevel level, int beta, double alpha);

/// Time between absorption and stimulated emission: 2 (kv - 2) / alpha.
double tau_res(double kv, double alpha);
/// Duration of one adiabatic transfer: 2 Omega_0 / alpha.
double tau_jump(double omega0, double alpha);

struct RegimeFlags {
  bool high_velocity;  ///< |Omega_0| < |kv - 2|
  bool doppleron;      ///< |Omega_0| > |kv - 3|
};
RegimeFlags regime_flags(double omega0, double kv);

/// Lower bound on |p| (hbar k) reachable by coherent transfer: 1 + 2 kappa gamma.
double min_momentum_bound(double kappa, double gamma);

/// alpha t_n = -(2n+1) kv + (2n+1)^2 for the n-th order Doppleron.
double doppleron_time(int n, double kv, double alpha);

/// First-order Doppleron splitting Omega_0^3 / (16 (kv - 3)^2).
/// std::domain_error at kv = 3.
double doppleron_gap(double omega0, double kv);
/// 1 - exp(-(pi/512) Omega_0^6 / (alpha (kv - 3)^4)).
double doppleron_prob(double omega0, double alpha, double kv);

/// beta-th order Bragg rate
/// |Omega_0|^(2 beta) / (4^beta 8^(beta-1) ((beta-1)!)^2 |delta|^beta).
double bragg_rate(int beta, double omega0, double delta);

struct BraggCount {
  double count = 0.0;
  bool valid = true;    ///< |delta| > |Omega_0| > gamma over the whole interval
  std::string warning;
};
/// Number of Bragg oscillations |int Omega_B dt| / 2 pi between t_i and t_f
/// (times relative to delta = 0, delta(t) = alpha t).
BraggCount bragg_count(int beta, double t_i, double t_f, const SweepSchedule& schedule,
                       const DriveParams& params);

struct ResonancePrediction {
  ResonanceTimes times;
  double tau_res;
  double tau_jump;
  RegimeFlags flags;
  Adiabaticity adiabaticity;
};
ResonancePrediction predict(InternalLevel level, int beta, const DriveParams& params,
                            double alpha);

}  // namespace swapcool
