#include "swapcool/resonance.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace swapcool {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("sweep rate alpha must be positive");
}

}  // namespace

double lz_probability(double omega0, double alpha) {
  check_alpha(alpha);
  return -std::expm1(-0.5 * std::numbers::pi * omega0 * omega0 / alpha);
}

Adiabaticity adiabaticity(double omega0, double alpha) {
  check_alpha(alpha);
  const double k = omega0 * omega0 / alpha;
  return {k, k >= 1.0};
}

ResonanceTimes resonance_times(InternalLevel level, int beta, double alpha) {
  check_alpha(alpha);
  const double kv = units::doppler_shift(beta);
  const double recoil = level == InternalLevel::Ground ? units::omega_r : -units::omega_r;
  return {(kv + recoil) / alpha, (-kv + recoil) / alpha};
}

double tau_res(double kv, double alpha) {
  check_alpha(alpha);
  return 2.0 * (kv - 2.0 * units::omega_r) / alpha;
}

double tau_jump(double omega0, double alpha) {
  check_alpha(alpha);
  return 2.0 * omega0 / alpha;
}

RegimeFlags regime_flags(double omega0, double kv) {
  const double a = std::abs(omega0);
  return {a < std::abs(kv - 2.0 * units::omega_r), a > std::abs(kv - 3.0 * units::omega_r)};
}

double min_momentum_bound(double kappa, double gamma) {
  if (kappa < 0.0 || gamma < 0.0) throw std::invalid_argument("kappa and gamma must be >= 0");
  return 1.0 + 2.0 * kappa * gamma / units::omega_r;
}

double doppleron_time(int n, double kv, double alpha) {
  check_alpha(alpha);
  if (n < 0) throw std::invalid_argument("Doppleron order must be non-negative");
  const double m = 2.0 * n + 1.0;
  return (-m * kv + m * m * units::omega_r) / alpha;
}

double doppleron_gap(double omega0, double kv) {
  const double d = kv - 3.0 * units::omega_r;
  if (d == 0.0) throw std::domain_error("first-order Doppleron gap is singular at kv = 3");
  return std::abs(omega0 * omega0 * omega0) / (16.0 * d * d);
}

double doppleron_prob(double omega0, double alpha, double kv) {
  check_alpha(alpha);
  const double d = kv - 3.0 * units::omega_r;
  if (d == 0.0) throw std::domain_error("first-order Doppleron probability is singular at kv = 3");
  const double o6 = std::pow(omega0, 6);
  return -std::expm1(-(std::numbers::pi / 512.0) * o6 / (alpha * d * d * d * d));
}

namespace {

double bragg_prefactor(int beta, double omega0) {
  if (beta < 1) throw std::invalid_argument("Bragg order must be >= 1");
  double fact = 1.0;
  for (int i = 2; i < beta; ++i) fact *= i;
  return std::pow(std::abs(omega0), 2 * beta) /
         (std::pow(4.0, beta) * std::pow(8.0 * units::omega_r, beta - 1) * fact * fact);
}

}  // namespace

double bragg_rate(int beta, double omega0, double delta) {
  if (delta == 0.0) throw std::domain_error("Bragg rate is singular at delta = 0");
  return bragg_prefactor(beta, omega0) / std::pow(std::abs(delta), beta);
}

BraggCount bragg_count(int beta, double t_i, double t_f, const SweepSchedule& schedule,
                       const DriveParams& params) {
  const double alpha = schedule.alpha();
  check_alpha(alpha);
  BraggCount out;
  const double a = std::abs(t_i), b = std::abs(t_f);
  const bool crosses = (t_i < 0.0) != (t_f < 0.0) || t_i == 0.0 || t_f == 0.0;
  if (crosses) throw std::domain_error("Bragg integral interval contains the resonance delta = 0");
  const double A = bragg_prefactor(beta, params.omega0);
  double integral = 0.0;
  if (beta == 1)
    integral = A / alpha * std::abs(std::log(b / a));
  else
    integral = A / std::pow(alpha, beta) *
               std::abs((std::pow(b, 1 - beta) - std::pow(a, 1 - beta)) / (1.0 - beta));
  out.count = integral / (2.0 * std::numbers::pi);
  const double min_delta = alpha * std::min(a, b);
  if (!(min_delta > std::abs(params.omega0) && std::abs(params.omega0) > params.gamma)) {
    out.valid = false;
    out.warning = "outside the perturbative window |delta| > |Omega_0| > gamma";
  }
  return out;
}

ResonancePrediction predict(InternalLevel level, int beta, const DriveParams& params,
                            double alpha) {
  const double kv = units::doppler_shift(beta);
  return {resonance_times(level, beta, alpha), tau_res(kv, alpha), tau_jump(params.omega0, alpha),
          regime_flags(params.omega0, kv), adiabaticity(params.omega0, alpha)};
}

}  // namespace swapcool
