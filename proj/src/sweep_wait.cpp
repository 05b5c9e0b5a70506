#include "swapcool/sweep_wait.hpp"

#include "ensemble_stats.hpp"
#include "swapcool/split_stepper.hpp"
#include "trajectory_runner.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace swapcool {

RampPropagator::RampPropagator(const MomentumGrid& grid, const DriveParams& params,
                               const SweepSchedule& schedule, const TimeGrid& tg)
    : grid_(grid) {
  if (params.gamma != 0.0)
    throw std::invalid_argument("a cached ramp propagator requires gamma = 0");
  const int N = grid.size();
  const int n_off = tg.steps_per_period / tg.stride;
  u_.resize(static_cast<std::size_t>(n_off));
  for (auto& pair : u_)
    for (auto& m : pair) m.resize(N, N);
  SplitStepper stepper(grid, params, schedule, tg.dt);
  stepper.set_edge_checks(false);
  VectorXc amps(grid.dim());
  for (int r = 0; r < 2; ++r) {
    const Eigen::Index base = static_cast<Eigen::Index>(r) * N;
    for (int j = 0; j < N; ++j) {
      amps.setZero();
      amps(base + j) = 1.0;
      Windows w = Windows::of(grid, amps);
      for (int k = 0; k < tg.steps_per_period; ++k) {
        stepper.step(amps, w, static_cast<double>(k) * tg.dt);
        if ((k + 1) % tg.stride == 0)
          u_[static_cast<std::size_t>((k + 1) / tg.stride - 1)][r].col(j) = amps.segment(base, N);
      }
    }
  }
}

VectorXc RampPropagator::apply(int o, const VectorXc& psi0) const {
  if (o < 1 || o > n_offsets()) throw std::out_of_range("ramp offset out of range");
  const int N = grid_.size();
  VectorXc out(grid_.dim());
  for (int r = 0; r < 2; ++r) {
    const Eigen::Index base = static_cast<Eigen::Index>(r) * N;
    const auto seg = psi0.segment(base, N);
    if (seg.cwiseAbs2().sum() == 0.0)
      out.segment(base, N).setZero();
    else
      out.segment(base, N).noalias() = u_[static_cast<std::size_t>(o - 1)][r] * seg;
  }
  return out;
}

namespace {

TimeGrid sweep_wait_grid(const SpinMomentumState& psi0, const SweepSchedule& schedule,
                         const DriveParams& params, const IntegratorConfig& config) {
  if (!schedule.is_sweep_wait()) throw std::invalid_argument("schedule is not sweep-wait");
  return make_time_grid(Engine::Trajectory, psi0.grid, params, schedule, config);
}

ObservableRecord observe_state(const SpinMomentumState& psi, double t,
                               const std::array<double, 4>& counts) {
  return detail::observe(psi.grid, psi.amplitudes, Windows::full(psi.grid), t, counts);
}

}  // namespace

SweepWaitEnsemble::SweepWaitEnsemble(const SpinMomentumState& psi0,
                                     const SweepSchedule& schedule, const DriveParams& params,
                                     int n_traj, std::uint64_t base_seed,
                                     const IntegratorConfig& config)
    : grid_(psi0.grid),
      tg_(sweep_wait_grid(psi0, schedule, params, config)),
      prop_(psi0.grid, params, schedule, tg_),
      config_(config) {
  if (n_traj < 1) throw std::invalid_argument("n_traj must be at least 1");
  if (std::abs(psi0.norm2() - 1.0) > tolerance::normalization)
    throw ContractViolation("initial state must be normalized");
  states_.assign(static_cast<std::size_t>(n_traj), psi0);
  counts_.assign(static_cast<std::size_t>(n_traj), {0.0, 0.0, 0.0, 0.0});
  for (int i = 0; i < n_traj; ++i) {
    const std::uint64_t seed = derive_seed(base_seed, static_cast<std::uint64_t>(i));
    seeds_.push_back(seed);
    rngs_.emplace_back(seed);
    // Same draw sequence as a stepped trajectory: the (unused) jump threshold first.
    rngs_.back().uniform();
  }
}

void SweepWaitEnsemble::advance_cycle(std::vector<ObservableRecord>& mean,
                                      std::vector<ObservableRecord>& se) {
  const int n_off = prop_.n_offsets();
  const int n = n_traj();
  const int bs = std::max(1, config_.block_size);
  const int n_blocks = (n + bs - 1) / bs;
  std::vector<std::vector<detail::BinStats>> blocks(
      static_cast<std::size_t>(n_blocks), std::vector<detail::BinStats>(n_off));
  const double t_base = static_cast<double>(cycles_) * tg_.period;
  std::vector<std::string> errors(static_cast<std::size_t>(n));

  auto run_block = [&](int b) {
    auto& bins = blocks[static_cast<std::size_t>(b)];
    for (int i = b * bs; i < std::min(n, (b + 1) * bs); ++i) {
      SpinMomentumState& psi = states_[static_cast<std::size_t>(i)];
      auto& counts = counts_[static_cast<std::size_t>(i)];
      const VectorXc start = psi.amplitudes;
      for (int o = 1; o <= n_off; ++o) {
        psi.amplitudes = prop_.apply(o, start);
        const double t = t_base + static_cast<double>(o * tg_.stride) * tg_.dt;
        const Eigen::VectorXd pop = psi.amplitudes.cwiseAbs2();
        if (edge_population(grid_, pop) / pop.sum() > grid_.edge_tolerance()) {
          errors[static_cast<std::size_t>(i)] =
              "trajectory " + std::to_string(i) + ": population reached the grid edge";
          return;
        }
        if (o == n_off) {
          Rng& rng = rngs_[static_cast<std::size_t>(i)];
          if (const auto c = project_wait(psi, rng)) {
            counts[0] += 1.0;
            counts[1 + *c] += 1.0;
          } else {
            psi.amplitudes /= std::sqrt(psi.norm2());
          }
          rng.uniform();
        }
        bins[static_cast<std::size_t>(o - 1)].add(observe_state(psi, t, counts));
      }
    }
  };

  int nw = config_.workers > 0 ? config_.workers
                               : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  nw = std::max(1, std::min(nw, n_blocks));
  if (nw == 1) {
    for (int b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nw; ++t)
      pool.emplace_back([&, t] {
        for (int b = t; b < n_blocks; b += nw) run_block(b);
      });
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (!e.empty()) throw GridEdgeError(e);

  std::vector<detail::BinStats> total(static_cast<std::size_t>(n_off));
  for (const auto& blk : blocks)
    for (int o = 0; o < n_off; ++o) total[o].merge(blk[o]);
  mean.resize(n_off);
  se.resize(n_off);
  for (int o = 0; o < n_off; ++o) total[o].finish(mean[o], se[o]);
  ++cycles_;
}

void SweepWaitEnsemble::current(ObservableRecord& mean, ObservableRecord& se) const {
  detail::BinStats s;
  const double t = static_cast<double>(cycles_) * tg_.period;
  for (int i = 0; i < n_traj(); ++i)
    s.add(observe_state(states_[static_cast<std::size_t>(i)], t,
                        counts_[static_cast<std::size_t>(i)]));
  s.finish(mean, se);
}

Eigen::VectorXd SweepWaitEnsemble::momentum_distribution(int offset) const {
  if (offset < 0 || offset > prop_.n_offsets()) throw std::out_of_range("ramp offset out of range");
  const int N = grid_.size();
  Eigen::VectorXd dist = Eigen::VectorXd::Zero(N);
  for (const auto& psi : states_) {
    const Eigen::VectorXd pop =
        (offset == 0 ? psi.amplitudes : prop_.apply(offset, psi.amplitudes)).cwiseAbs2();
    dist += (pop.head(N) + pop.tail(N)) / pop.sum();
  }
  return dist / n_traj();
}

EnsembleResult run_sweep_wait_ensemble(const SpinMomentumState& psi0,
                                       const SweepSchedule& schedule, const DriveParams& params,
                                       int n_traj, std::uint64_t base_seed,
                                       const IntegratorConfig& config) {
  SweepWaitEnsemble ens(psi0, schedule, params, n_traj, base_seed, config);
  EnsembleResult res;
  res.n_traj = n_traj;
  res.base_seed = base_seed;
  res.seeds = ens.seeds();
  ObservableRecord m, s;
  ens.current(m, s);
  res.mean.push_back(m);
  res.se.push_back(s);
  std::vector<ObservableRecord> mc, sc;
  for (int c = 0; c < schedule.n_periods(); ++c) {
    ens.advance_cycle(mc, sc);
    res.mean.insert(res.mean.end(), mc.begin(), mc.end());
    res.se.insert(res.se.end(), sc.begin(), sc.end());
  }
  return res;
}

}  // namespace swapcool
