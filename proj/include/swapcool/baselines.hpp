#pragma once

// Doppler-cooling reference: the same standing-wave Hamiltonian and
// dissipation at a fixed detuning, plus photon-efficiency measures used to
// compare cooling schemes.

#include "swapcool/integrators.hpp"

#include <vector>

namespace swapcool {

struct DopplerParams {
  double omega = 0.0;  ///< per-beam Rabi frequency
  double delta = 0.0;  ///< fixed detuning
};

EnsembleResult doppler_cool(const SpinMomentumState& psi0, const DopplerParams& doppler,
                            double gamma, double t_end, int n_traj, std::uint64_t seed,
                            const IntegratorConfig& config = {});

/// Momentum removed per scattered photon, (<|p|>_0 - <|p|>_k) / xi_k, at
/// every record with xi_k >= min_xi (0 elsewhere).
std::vector<double> removal_efficiency(const EnsembleResult& r, double min_xi = 1.0);

/// <p^2>/2m as a function of mean photon number, linearly interpolated at
/// xi (std::out_of_range outside the sampled range).
double energy_at_xi(const EnsembleResult& r, double xi);

/// Least-squares slope of <p^2>/2m against mean xi over records with
/// xi <= xi_max.
double energy_per_photon(const EnsembleResult& r, double xi_max);

}  // namespace swapcool
