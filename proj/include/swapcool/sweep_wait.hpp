#pragma once

// Sweep-wait ensembles with gamma = 0. Every ramp is the same unitary, so it
// is computed once per sector (at each record offset) and applied as a dense
// matrix; the wait reduces to project_wait at the end of each ramp.

#include "swapcool/integrators.hpp"

namespace swapcool {

class RampPropagator {
 public:
  RampPropagator(const MomentumGrid& grid, const DriveParams& params,
                 const SweepSchedule& schedule, const TimeGrid& tg);

  const MomentumGrid& grid() const { return grid_; }
  /// Number of record offsets within one ramp (the last one is the full ramp).
  int n_offsets() const { return static_cast<int>(u_.size()); }
  /// psi evolved from the ramp start to record offset `o` (1-based).
  VectorXc apply(int o, const VectorXc& psi0) const;

 private:
  MomentumGrid grid_;
  // u_[o-1][r]: sector-r propagator to offset o.
  std::vector<std::array<MatrixXc, 2>> u_;
};

/// Trajectory ensemble over sweep-wait cycles, advanced one ramp at a time.
class SweepWaitEnsemble {
 public:
  SweepWaitEnsemble(const SpinMomentumState& psi0, const SweepSchedule& schedule,
                    const DriveParams& params, int n_traj, std::uint64_t base_seed,
                    const IntegratorConfig& config = {});

  int cycles_done() const { return cycles_; }
  int n_traj() const { return static_cast<int>(states_.size()); }
  const TimeGrid& time_grid() const { return tg_; }

  /// Runs one ramp plus projection for every trajectory and returns the
  /// ensemble statistics at each record offset of the ramp.
  void advance_cycle(std::vector<ObservableRecord>& mean, std::vector<ObservableRecord>& se);

  /// Statistics of the current (end-of-cycle) states.
  void current(ObservableRecord& mean, ObservableRecord& se) const;

  /// Ensemble-averaged P(n) of the current states (offset 0) or of the
  /// states propagated to record offset `offset` of the next ramp.
  Eigen::VectorXd momentum_distribution(int offset = 0) const;

  const std::vector<std::uint64_t>& seeds() const { return seeds_; }

 private:
  MomentumGrid grid_;
  TimeGrid tg_;
  RampPropagator prop_;
  IntegratorConfig config_;
  std::vector<SpinMomentumState> states_;
  std::vector<Rng> rngs_;
  std::vector<std::array<double, 4>> counts_;  // xi and per-channel emissions
  std::vector<std::uint64_t> seeds_;
  int cycles_ = 0;
};

/// run_ensemble specialized to sweep-wait schedules with gamma = 0.
EnsembleResult run_sweep_wait_ensemble(const SpinMomentumState& psi0,
                                       const SweepSchedule& schedule, const DriveParams& params,
                                       int n_traj, std::uint64_t base_seed,
                                       const IntegratorConfig& config = {});

}  // namespace swapcool
