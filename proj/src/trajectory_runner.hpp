#pragma once

// Shared quantum-jump loop used by evolve_trajectory and run_ensemble.

#include "swapcool/integrators.hpp"
#include "swapcool/split_stepper.hpp"

#include <vector>

namespace swapcool::detail {

struct TrajectoryState {
  VectorXc amps;
  Windows w;
  double r = 0.0;                     // waiting-time threshold on norm^2
  std::array<double, 4> counts{};     // xi, then emissions per channel
};

ObservableRecord observe(const MomentumGrid& grid, const VectorXc& amps, const Windows& w,
                         double t, const std::array<double, 4>& counts);

class TrajectoryRunner {
 public:
  TrajectoryRunner(const MomentumGrid& grid, const DriveParams& params,
                   const SweepSchedule& schedule, const TimeGrid& tg,
                   const IntegratorConfig& config);

  const TimeGrid& time_grid() const { return tg_; }
  SplitStepper& stepper() { return stepper_; }

  /// Advances steps [k_begin, k_end). When `records` is non-null, a record is
  /// written at every step index that is a multiple of the stride, at slot
  /// (k / stride - record_base). `norms`, when non-null, receives norm^2
  /// after each step at slot k + 1 - k_begin.
  void run(TrajectoryState& s, Rng& rng, long long k_begin, long long k_end,
           std::vector<ObservableRecord>* records, long long record_base,
           std::vector<JumpEvent>* jumps, std::vector<double>* norms = nullptr);

  ObservableRecord observe(const TrajectoryState& s, double t) const {
    return detail::observe(grid_, s.amps, s.w, t, s.counts);
  }

 private:
  void advance(TrajectoryState& s, Rng& rng, long long k, std::vector<JumpEvent>* jumps);
  void jump(TrajectoryState& s, int channel, double t, std::vector<JumpEvent>* jumps);
  void end_of_ramp(TrajectoryState& s, Rng& rng, double t, std::vector<JumpEvent>* jumps);

  MomentumGrid grid_;
  DriveParams params_;
  SweepSchedule schedule_;
  TimeGrid tg_;
  IntegratorConfig config_;
  SplitStepper stepper_;
  VectorXc save_, probe_, best_;
  Windows save_w_, probe_w_, best_w_;
};

}  // namespace swapcool::detail
