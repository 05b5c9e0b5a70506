#pragma once

// Time evolution: Lindblad master equation (dense, RK4), quantum-jump
// trajectories (split stepper + waiting-time jumps), ensembles, and the
// sweep-wait projection that replaces the long wait between ramps.

#include "swapcool/dissipation.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace swapcool {

struct IntegratorConfig {
  /// Upper bound on the step; 0 selects it from the fastest rate in the problem.
  double dt_max = 0.0;
  /// Fraction of the inverse fastest rate used for the automatic step.
  double safety = 0.1;
  /// Records per ramp period (constant detuning: per unit time).
  int records_per_period = 1;
  /// Jump times are located to jump_time_tol * period.
  double jump_time_tol = 1e-6;
  /// Trajectories per reduction block in ensembles.
  int block_size = 32;
  /// Worker threads (0: hardware concurrency).
  int workers = 1;
};

/// Fixed step grid shared by all runs of a schedule: an integer number of
/// steps per period, records every `stride` steps.
struct TimeGrid {
  double period = 1.0;
  double dt = 0.0;
  int steps_per_period = 0;
  int stride = 0;
  int n_periods = 0;
  long long total_steps() const { return static_cast<long long>(steps_per_period) * n_periods; }
  int n_records() const { return n_periods * (steps_per_period / stride) + 1; }
  double record_time(int i) const { return i * stride * dt; }
};

enum class Engine { Trajectory, Master };

/// Step bound for each engine. The master equation uses
/// 0.1 / max(Omega_s, max|delta|, n_max^2, gamma); the trajectory stepper
/// integrates the diagonal part exactly and only needs to resolve the
/// coupling against the local detuning, safety / max(Omega_s, max|delta| +
/// 2 n_max + 1, gamma).
double default_dt(Engine engine, const MomentumGrid& grid, const DriveParams& params,
                  const SweepSchedule& schedule, const IntegratorConfig& config);

TimeGrid make_time_grid(Engine engine, const MomentumGrid& grid, const DriveParams& params,
                        const SweepSchedule& schedule, const IntegratorConfig& config);

struct JumpEvent {
  double t;
  int channel;  ///< index into kJumpChannels
};

struct TrajectoryResult {
  SpinMomentumState psi;
  std::vector<ObservableRecord> records;
  std::vector<JumpEvent> jumps;
};

struct MasterResult {
  DensityOperator rho;
  std::vector<ObservableRecord> records;
};

/// Master-equation evolution from t0 to t1 (both on the record grid).
MasterResult evolve_master(const DensityOperator& rho0, const SweepSchedule& schedule,
                           const DriveParams& params, double t0, double t1,
                           const IntegratorConfig& config = {});

/// One quantum-jump trajectory from t0 to t1 (both on the record grid).
/// Deterministic given the seed.
TrajectoryResult evolve_trajectory(const SpinMomentumState& psi0, const SweepSchedule& schedule,
                                   const DriveParams& params, double t0, double t1,
                                   std::uint64_t seed, const IntegratorConfig& config = {});

struct EnsembleResult {
  std::vector<ObservableRecord> mean;
  std::vector<ObservableRecord> se;
  int n_traj = 0;
  std::uint64_t base_seed = 0;
  std::vector<std::uint64_t> seeds;
};

/// Trajectory average over the whole schedule. Trajectory i uses
/// derive_seed(base_seed, i); the result does not depend on the number of
/// workers. Errors are rethrown with the trajectory index.
EnsembleResult run_ensemble(const SpinMomentumState& psi0, const SweepSchedule& schedule,
                            const DriveParams& params, int n_traj, std::uint64_t base_seed,
                            const IntegratorConfig& config = {});

/// Mixed initial state: each trajectory starts from a pure state drawn from
/// the eigen-decomposition of rho0 (with its own seed stream).
EnsembleResult run_ensemble(const DensityOperator& rho0, const SweepSchedule& schedule,
                            const DriveParams& params, int n_traj, std::uint64_t base_seed,
                            const IntegratorConfig& config = {});

/// End-of-ramp projection that stands in for an infinitely long wait.
/// Trajectory flavor: with probability P_e one emission (channel drawn with
/// the recoil weights), otherwise projection onto the ground subspace.
/// Returns the channel index of the emission, if any.
std::optional<int> project_wait(SpinMomentumState& psi, Rng& rng);
/// Master flavor: rho -> P_g rho P_g + sum_c w_c A_c rho A_c^+.
DensityOperator project_wait(const DensityOperator& rho);

/// Transfer probability of a two-level system swept linearly through
/// resonance at rate alpha from -half_range to +half_range (coupling
/// Omega_0/2), starting in the lower diabatic state. Used as the numerical
/// oracle for the Landau-Zener formula.
double two_level_sweep(double omega0, double alpha, double half_range, double dt = 0.0);

}  // namespace swapcool
