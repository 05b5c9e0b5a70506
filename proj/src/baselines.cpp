#include "swapcool/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace swapcool {

EnsembleResult doppler_cool(const SpinMomentumState& psi0, const DopplerParams& doppler,
                            double gamma, double t_end, int n_traj, std::uint64_t seed,
                            const IntegratorConfig& config) {
  const SweepSchedule schedule(ConstantDetuning{doppler.delta, t_end});
  return run_ensemble(psi0, schedule, DriveParams{doppler.omega, gamma}, n_traj, seed, config);
}

std::vector<double> removal_efficiency(const EnsembleResult& r, double min_xi) {
  std::vector<double> out(r.mean.size(), 0.0);
  if (r.mean.empty()) return out;
  const double p0 = r.mean.front().mean_abs_p;
  for (std::size_t k = 0; k < r.mean.size(); ++k)
    if (r.mean[k].xi_cum >= min_xi) out[k] = (p0 - r.mean[k].mean_abs_p) / r.mean[k].xi_cum;
  return out;
}

double energy_at_xi(const EnsembleResult& r, double xi) {
  for (std::size_t k = 1; k < r.mean.size(); ++k) {
    const double x0 = r.mean[k - 1].xi_cum, x1 = r.mean[k].xi_cum;
    if (xi >= x0 && xi <= x1) {
      const double e0 = units::kinetic_energy(1.0) * r.mean[k - 1].mean_p2;
      const double e1 = units::kinetic_energy(1.0) * r.mean[k].mean_p2;
      if (x1 == x0) return e1;
      return e0 + (e1 - e0) * (xi - x0) / (x1 - x0);
    }
  }
  throw std::out_of_range("photon number outside the sampled range");
}

double energy_per_photon(const EnsembleResult& r, double xi_max) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& m : r.mean) {
    if (m.xi_cum > xi_max) break;
    const double y = units::kinetic_energy(1.0) * m.mean_p2;
    n += 1;
    sx += m.xi_cum;
    sy += y;
    sxx += m.xi_cum * m.xi_cum;
    sxy += m.xi_cum * y;
  }
  const double den = n * sxx - sx * sx;
  if (n < 2 || den == 0.0) throw std::runtime_error("not enough points for a slope");
  return (n * sxy - sx * sy) / den;
}

}  // namespace swapcool
