#include "swapcool/integrators.hpp"

#include "ensemble_stats.hpp"
#include "swapcool/sweep_wait.hpp"
#include "trajectory_runner.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>

namespace swapcool {

double default_dt(Engine engine, const MomentumGrid& grid, const DriveParams& params,
                  const SweepSchedule& schedule, const IntegratorConfig& config) {
  if (config.dt_max > 0.0) return config.dt_max;
  const double nmax = grid.max_abs_momentum();
  const double dmax = schedule.max_abs_detuning();
  double rate = 0.0;
  if (engine == Engine::Master)
    rate = std::max({params.omega_s(), dmax, nmax * nmax, params.gamma});
  else
    rate = std::max({params.omega_s(), dmax + 2.0 * nmax + 1.0, params.gamma});
  return config.safety / rate;
}

TimeGrid make_time_grid(Engine engine, const MomentumGrid& grid, const DriveParams& params,
                        const SweepSchedule& schedule, const IntegratorConfig& config) {
  if (config.records_per_period < 1)
    throw std::invalid_argument("records_per_period must be at least 1");
  if (!(config.safety > 0.0)) throw std::invalid_argument("safety factor must be positive");
  TimeGrid tg;
  tg.period = schedule.period();
  const int R = config.records_per_period;
  const double dt = default_dt(engine, grid, params, schedule, config);
  const double per_record = std::ceil(tg.period / (dt * R) - 1e-9);
  tg.steps_per_period = R * static_cast<int>(std::max(1.0, per_record));
  tg.dt = tg.period / tg.steps_per_period;
  tg.stride = tg.steps_per_period / R;
  tg.n_periods = schedule.n_periods();
  return tg;
}

namespace {

long long aligned_step(const TimeGrid& tg, double t, const char* what) {
  if (t < 0.0) throw std::invalid_argument(std::string(what) + " must be non-negative");
  const double x = t / (tg.dt * tg.stride);
  const long long i = std::llround(x);
  if (std::abs(x - static_cast<double>(i)) > 1e-6)
    throw std::invalid_argument(std::string(what) + " is not on the record grid");
  return i * tg.stride;
}

}  // namespace

namespace detail {

ObservableRecord observe(const MomentumGrid& grid, const VectorXc& amps, const Windows& w,
                         double t, const std::array<double, 4>& counts) {
  const int N = grid.size();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, se = 0.0, sa = 0.0;
  for (int r = 0; r < 2; ++r) {
    for (int j = w.lo[r]; j <= w.hi[r]; ++j) {
      const double p = std::norm(amps(static_cast<Eigen::Index>(r) * N + j));
      const double n = grid.n_min() + j;
      s0 += p;
      s1 += p * n;
      s2 += p * n * n;
      sa += p * std::abs(n);
      if ((j & 1) != r) se += p;
    }
  }
  ObservableRecord rec;
  rec.t = t;
  rec.mean_p = s1 / s0;
  rec.mean_p2 = s2 / s0;
  rec.p_rms = std::sqrt(rec.mean_p2);
  rec.P_e = se / s0;
  rec.mean_abs_p = sa / s0;
  rec.xi_cum = counts[0];
  rec.jumps = {counts[1], counts[2], counts[3]};
  return rec;
}

namespace {

void copy_windowed(VectorXc& dst, Windows& dw, const VectorXc& src, const Windows& sw, int N) {
  for (int r = 0; r < 2; ++r) {
    for (int j = dw.lo[r]; j <= dw.hi[r]; ++j) dst(static_cast<Eigen::Index>(r) * N + j) = 0.0;
    for (int j = sw.lo[r]; j <= sw.hi[r]; ++j) {
      const Eigen::Index i = static_cast<Eigen::Index>(r) * N + j;
      dst(i) = src(i);
    }
  }
  dw = sw;
}

}  // namespace

TrajectoryRunner::TrajectoryRunner(const MomentumGrid& grid, const DriveParams& params,
                                   const SweepSchedule& schedule, const TimeGrid& tg,
                                   const IntegratorConfig& config)
    : grid_(grid),
      params_(params),
      schedule_(schedule),
      tg_(tg),
      config_(config),
      stepper_(grid, params, schedule, tg.dt),
      save_(VectorXc::Zero(grid.dim())),
      probe_(VectorXc::Zero(grid.dim())),
      best_(VectorXc::Zero(grid.dim())) {}

void TrajectoryRunner::jump(TrajectoryState& s, int channel, double t,
                            std::vector<JumpEvent>* jumps) {
  s.amps = apply_lowering(grid_, s.amps, kJumpChannels[channel].recoil);
  const double n2 = s.amps.squaredNorm();
  if (!(n2 > 0.0)) throw ContractViolation("jump on a state with no excited population");
  s.amps /= std::sqrt(n2);
  s.w = Windows::of(grid_, s.amps);
  s.counts[0] += 1.0;
  s.counts[1 + channel] += 1.0;
  if (jumps) jumps->push_back({t, channel});
}

void TrajectoryRunner::end_of_ramp(TrajectoryState& s, Rng& rng, double t,
                                   std::vector<JumpEvent>* jumps) {
  const ObservableRecord o = observe(s, t);
  if (o.P_e > 0.0) {
    const double u = rng.uniform();
    if (u < o.P_e) {
      jump(s, rng.channel(), t, jumps);
    } else {
      const int N = grid_.size();
      for (int r = 0; r < 2; ++r)
        for (int j = s.w.lo[r]; j <= s.w.hi[r]; ++j)
          if ((j & 1) != r) s.amps(static_cast<Eigen::Index>(r) * N + j) = 0.0;
      s.amps /= std::sqrt(s.amps.squaredNorm());
      s.w = Windows::of(grid_, s.amps);
    }
  } else {
    s.amps /= std::sqrt(s.amps.squaredNorm());
  }
  s.r = rng.uniform();
}

void TrajectoryRunner::advance(TrajectoryState& s, Rng& rng, long long k,
                               std::vector<JumpEvent>* jumps) {
  const double dt = tg_.dt;
  const double u0 = static_cast<double>(k % tg_.steps_per_period) * dt;
  if (params_.gamma == 0.0) {
    stepper_.step(s.amps, s.w, u0);
    return;
  }
  const int N = grid_.size();
  const double t_start = static_cast<double>(k) * dt;
  const double tol = config_.jump_time_tol * tg_.period;
  double u = u0;
  double rem = dt;
  copy_windowed(save_, save_w_, s.amps, s.w, N);
  stepper_.step(s.amps, s.w, u);
  while (stepper_.norm2(s.amps, s.w) < s.r) {
    // The norm crossed r inside [u, u + rem]: bisect from the saved state.
    double lo = 0.0, hi = rem;
    bool have_best = false;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      copy_windowed(probe_, probe_w_, save_, save_w_, N);
      stepper_.step(probe_, probe_w_, u, mid);
      if (stepper_.norm2(probe_, probe_w_) < s.r) {
        hi = mid;
        std::swap(best_, probe_);
        std::swap(best_w_, probe_w_);
        have_best = true;
      } else {
        lo = mid;
      }
    }
    if (have_best) copy_windowed(s.amps, s.w, best_, best_w_, N);
    // Stale scratch contents must be cleared before reuse.
    probe_.setZero();
    best_.setZero();
    probe_w_ = best_w_ = Windows{};
    jump(s, rng.channel(), t_start + (u + hi - u0), jumps);
    s.r = rng.uniform();
    u += hi;
    rem -= hi;
    if (rem <= 1e-12 * dt) break;
    copy_windowed(save_, save_w_, s.amps, s.w, N);
    stepper_.step(s.amps, s.w, u, rem);
  }
}

void TrajectoryRunner::run(TrajectoryState& s, Rng& rng, long long k_begin, long long k_end,
                           std::vector<ObservableRecord>* records, long long record_base,
                           std::vector<JumpEvent>* jumps, std::vector<double>* norms) {
  const bool sweep_wait = schedule_.is_sweep_wait();
  for (long long k = k_begin; k < k_end; ++k) {
    advance(s, rng, k, jumps);
    if (norms) (*norms)[static_cast<std::size_t>(k + 1 - k_begin)] = stepper_.norm2(s.amps, s.w);
    const long long k1 = k + 1;
    if (sweep_wait && k1 % tg_.steps_per_period == 0)
      end_of_ramp(s, rng, static_cast<double>(k1) * tg_.dt, jumps);
    if (records && k1 % tg_.stride == 0)
      (*records)[static_cast<std::size_t>(k1 / tg_.stride - record_base)] =
          observe(s, static_cast<double>(k1) * tg_.dt);
  }
}

}  // namespace detail

using detail::TrajectoryRunner;
using detail::TrajectoryState;

namespace {

void check_normalized(const SpinMomentumState& psi) {
  if (std::abs(psi.norm2() - 1.0) > tolerance::normalization)
    throw ContractViolation("initial state must be normalized (norm^2 = " +
                            std::to_string(psi.norm2()) + ")");
}

TrajectoryState initial_state(const SpinMomentumState& psi0, Rng& rng) {
  TrajectoryState s;
  s.amps = psi0.amplitudes;
  s.w = Windows::of(psi0.grid, s.amps);
  s.r = rng.uniform();
  return s;
}

}  // namespace

TrajectoryResult evolve_trajectory(const SpinMomentumState& psi0, const SweepSchedule& schedule,
                                   const DriveParams& params, double t0, double t1,
                                   std::uint64_t seed, const IntegratorConfig& config) {
  check_normalized(psi0);
  const TimeGrid tg = make_time_grid(Engine::Trajectory, psi0.grid, params, schedule, config);
  const long long k0 = aligned_step(tg, t0, "t0");
  const long long k1 = aligned_step(tg, t1, "t1");
  if (k1 < k0) throw std::invalid_argument("t1 must not precede t0");
  if (k1 > tg.total_steps()) throw std::invalid_argument("t1 is beyond the end of the schedule");
  TrajectoryRunner runner(psi0.grid, params, schedule, tg, config);
  Rng rng(seed);
  TrajectoryState s = initial_state(psi0, rng);
  TrajectoryResult out{psi0, {}, {}};
  const long long base = k0 / tg.stride;
  out.records.resize(static_cast<std::size_t>(k1 / tg.stride - base + 1));
  out.records[0] = runner.observe(s, static_cast<double>(k0) * tg.dt);
  runner.run(s, rng, k0, k1, &out.records, base, &out.jumps);
  out.psi.amplitudes = s.amps / std::sqrt(s.amps.squaredNorm());
  return out;
}

namespace {

// Deterministic evolution without jumps, shared by all trajectories of an
// ensemble that start from the same pure state. A trajectory whose first
// jump falls in step k restarts from the nearest checkpoint at or before k
// and replays the identical steps, so its result equals evolve_trajectory.
class NoJumpPath {
 public:
  NoJumpPath(TrajectoryRunner& runner, const SpinMomentumState& psi0) {
    const TimeGrid& tg = runner.time_grid();
    const long long total = tg.total_steps();
    interval_ = std::max<long long>(tg.stride, (total / 64 / tg.stride + 1) * tg.stride);
    records_.resize(static_cast<std::size_t>(tg.n_records()));
    prefix_min_.assign(static_cast<std::size_t>(total + 1), 1.0);
    Rng unused(0);
    TrajectoryState s;
    s.amps = psi0.amplitudes;
    s.w = Windows::of(psi0.grid, s.amps);
    s.r = -1.0;
    records_[0] = runner.observe(s, 0.0);
    std::vector<double> norms(static_cast<std::size_t>(interval_ + 1));
    prefix_min_[0] = s.amps.squaredNorm();
    for (long long k = 0; k < total; k += interval_) {
      checkpoints_.push_back(s);
      const long long kend = std::min(total, k + interval_);
      runner.run(s, unused, k, kend, &records_, 0, nullptr, &norms);
      for (long long q = k + 1; q <= kend; ++q)
        prefix_min_[static_cast<std::size_t>(q)] =
            std::min(prefix_min_[static_cast<std::size_t>(q - 1)],
                     norms[static_cast<std::size_t>(q - k)]);
    }
  }

  void run(TrajectoryRunner& runner, std::uint64_t seed, std::vector<ObservableRecord>& out) const {
    const TimeGrid& tg = runner.time_grid();
    const long long total = tg.total_steps();
    Rng rng(seed);
    const double r = rng.uniform();
    // First step whose end norm falls below r.
    const auto it = std::upper_bound(prefix_min_.begin(), prefix_min_.end(), r,
                                     [](double v, double m) { return v > m; });
    if (it == prefix_min_.end()) {
      out = records_;
      return;
    }
    const long long kstar = static_cast<long long>(it - prefix_min_.begin()) - 1;
    const long long c = kstar / interval_;
    TrajectoryState s = checkpoints_[static_cast<std::size_t>(c)];
    Rng unused(0);
    runner.run(s, unused, c * interval_, kstar, nullptr, 0, nullptr);
    s.r = r;
    out.resize(records_.size());
    const long long last_cached = kstar / tg.stride;
    std::copy(records_.begin(), records_.begin() + last_cached + 1, out.begin());
    runner.run(s, rng, kstar, total, &out, 0, nullptr);
  }

 private:
  long long interval_ = 1;
  std::vector<ObservableRecord> records_;
  std::vector<double> prefix_min_;
  std::vector<TrajectoryState> checkpoints_;
};

int worker_count(const IntegratorConfig& config, int n_blocks) {
  int w = config.workers;
  if (w <= 0) w = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return std::max(1, std::min(w, n_blocks));
}

[[noreturn]] void rethrow_with_index(std::exception_ptr e, int index) {
  const std::string prefix = "trajectory " + std::to_string(index) + ": ";
  try {
    std::rethrow_exception(e);
  } catch (const GridEdgeError& x) {
    throw GridEdgeError(prefix + x.what());
  } catch (const ContractViolation& x) {
    throw ContractViolation(prefix + x.what());
  } catch (const std::exception& x) {
    throw std::runtime_error(prefix + x.what());
  }
}

// Runs `traj(worker, i, records)` for every trajectory, reducing per block in
// index order.
template <class MakeWorker, class Traj>
EnsembleResult reduce_ensemble(int n_traj, std::uint64_t base_seed, int n_records,
                               const IntegratorConfig& config, MakeWorker make_worker,
                               Traj traj) {
  if (n_traj < 1) throw std::invalid_argument("n_traj must be at least 1");
  const int bs = std::max(1, config.block_size);
  const int n_blocks = (n_traj + bs - 1) / bs;
  std::vector<std::vector<detail::BinStats>> blocks(
      static_cast<std::size_t>(n_blocks),
      std::vector<detail::BinStats>(static_cast<std::size_t>(n_records)));
  std::atomic<int> next{0};
  std::mutex err_mu;
  int err_index = n_traj;
  std::exception_ptr err;

  auto work = [&]() {
    auto worker = make_worker();
    std::vector<ObservableRecord> recs;
    for (int b = next++; b < n_blocks; b = next++) {
      for (int i = b * bs; i < std::min(n_traj, (b + 1) * bs); ++i) {
        try {
          traj(*worker, i, recs);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (i < err_index) {
            err_index = i;
            err = std::current_exception();
          }
          break;
        }
        auto& bins = blocks[static_cast<std::size_t>(b)];
        for (std::size_t q = 0; q < bins.size(); ++q) bins[q].add(recs[q]);
      }
    }
  };
  const int nw = worker_count(config, n_blocks);
  if (nw == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nw; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (err) rethrow_with_index(err, err_index);

  std::vector<detail::BinStats> total(static_cast<std::size_t>(n_records));
  for (const auto& blk : blocks)
    for (std::size_t q = 0; q < total.size(); ++q) total[q].merge(blk[q]);
  EnsembleResult res;
  res.n_traj = n_traj;
  res.base_seed = base_seed;
  res.mean.resize(total.size());
  res.se.resize(total.size());
  for (std::size_t q = 0; q < total.size(); ++q) total[q].finish(res.mean[q], res.se[q]);
  res.seeds.resize(static_cast<std::size_t>(n_traj));
  for (int i = 0; i < n_traj; ++i)
    res.seeds[static_cast<std::size_t>(i)] = derive_seed(base_seed, static_cast<std::uint64_t>(i));
  return res;
}

}  // namespace

EnsembleResult run_ensemble(const SpinMomentumState& psi0, const SweepSchedule& schedule,
                            const DriveParams& params, int n_traj, std::uint64_t base_seed,
                            const IntegratorConfig& config) {
  check_normalized(psi0);
  if (n_traj < 1) throw std::invalid_argument("n_traj must be at least 1");
  if (schedule.is_sweep_wait() && params.gamma == 0.0)
    return run_sweep_wait_ensemble(psi0, schedule, params, n_traj, base_seed, config);
  const TimeGrid tg = make_time_grid(Engine::Trajectory, psi0.grid, params, schedule, config);
  const long long total = tg.total_steps();

  if (schedule.is_sweep_wait()) {
    struct Worker {
      TrajectoryRunner runner;
    };
    return reduce_ensemble(
        n_traj, base_seed, tg.n_records(), config,
        [&] { return std::make_unique<Worker>(Worker{{psi0.grid, params, schedule, tg, config}}); },
        [&](Worker& w, int i, std::vector<ObservableRecord>& recs) {
          Rng rng(derive_seed(base_seed, static_cast<std::uint64_t>(i)));
          TrajectoryState s = initial_state(psi0, rng);
          recs.resize(static_cast<std::size_t>(tg.n_records()));
          recs[0] = w.runner.observe(s, 0.0);
          w.runner.run(s, rng, 0, total, &recs, 0, nullptr);
        });
  }

  // The no-jump path is computed once and shared read-only; each worker
  // replays from its checkpoints with its own runner.
  TrajectoryRunner builder(psi0.grid, params, schedule, tg, config);
  const NoJumpPath shared = [&] {
    try {
      return NoJumpPath(builder, psi0);
    } catch (const GridEdgeError& e) {
      throw GridEdgeError(std::string("no-jump path: ") + e.what());
    }
  }();
  struct Worker {
    TrajectoryRunner runner;
  };
  return reduce_ensemble(
      n_traj, base_seed, tg.n_records(), config,
      [&] { return std::make_unique<Worker>(Worker{{psi0.grid, params, schedule, tg, config}}); },
      [&](Worker& w, int i, std::vector<ObservableRecord>& recs) {
        shared.run(w.runner, derive_seed(base_seed, static_cast<std::uint64_t>(i)), recs);
      });
}

EnsembleResult run_ensemble(const DensityOperator& rho0, const SweepSchedule& schedule,
                            const DriveParams& params, int n_traj, std::uint64_t base_seed,
                            const IntegratorConfig& config) {
  rho0.validate();
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(rho0.rho);
  const Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0);
  const double wsum = w.sum();
  const TimeGrid tg = make_time_grid(Engine::Trajectory, rho0.grid, params, schedule, config);
  const long long total = tg.total_steps();
  struct Worker {
    TrajectoryRunner runner;
  };
  return reduce_ensemble(
      n_traj, base_seed, tg.n_records(), config,
      [&] { return std::make_unique<Worker>(Worker{{rho0.grid, params, schedule, tg, config}}); },
      [&](Worker& wk, int i, std::vector<ObservableRecord>& recs) {
        const std::uint64_t seed = derive_seed(base_seed, static_cast<std::uint64_t>(i));
        Rng pick(derive_seed(~base_seed, static_cast<std::uint64_t>(i)));
        double u = pick.uniform() * wsum;
        Eigen::Index m = 0;
        while (m + 1 < w.size() && u >= w(m)) u -= w(m++);
        SpinMomentumState psi(rho0.grid);
        psi.amplitudes = es.eigenvectors().col(m);
        Rng rng(seed);
        TrajectoryState s = initial_state(psi, rng);
        recs.resize(static_cast<std::size_t>(tg.n_records()));
        recs[0] = wk.runner.observe(s, 0.0);
        wk.runner.run(s, rng, 0, total, &recs, 0, nullptr);
      });
}

std::optional<int> project_wait(SpinMomentumState& psi, Rng& rng) {
  const Eigen::VectorXd mask = psi.grid.excited_mask();
  const double n2 = psi.norm2();
  const double pe = psi.amplitudes.cwiseAbs2().dot(mask) / n2;
  if (!(pe > 0.0)) return std::nullopt;
  if (rng.uniform() < pe) {
    const int c = rng.channel();
    psi = apply_jump(psi, c);
    return c;
  }
  for (Eigen::Index i = 0; i < psi.grid.dim(); ++i)
    if (mask(i) > 0.0) psi.amplitudes(i) = 0.0;
  psi.amplitudes /= std::sqrt(psi.norm2());
  return std::nullopt;
}

DensityOperator project_wait(const DensityOperator& rho) {
  const MomentumGrid& g = rho.grid;
  DensityOperator out(g);
  const Eigen::VectorXd mask = g.excited_mask();
  for (Eigen::Index b = 0; b < g.dim(); ++b)
    for (Eigen::Index a = 0; a < g.dim(); ++a)
      if (mask(a) == 0.0 && mask(b) == 0.0) out.rho(a, b) = rho.rho(a, b);
  // Decay of the excited block with recoil: gamma = 1 dissipator gain term.
  MatrixXc gain = MatrixXc::Zero(g.dim(), g.dim());
  lindblad_accumulate(g, rho.rho, 1.0, gain);
  for (Eigen::Index b = 0; b < g.dim(); ++b)
    for (Eigen::Index a = 0; a < g.dim(); ++a)
      if (mask(a) == 0.0 && mask(b) == 0.0) out.rho(a, b) += gain(a, b);
  return out;
}

namespace {

struct MasterSystem {
  SparseMatrixXc H0;
  Eigen::VectorXd z;
  Eigen::VectorXd excited;
  double gamma;
  const MomentumGrid* grid;

  void rhs(const MatrixXc& rho, double delta, MatrixXc& out, double& xi_dot) const {
    MatrixXc K = H0 * rho;
    K += (delta * z).asDiagonal() * rho;
    out = Complex(0.0, -1.0) * (K - K.adjoint());
    lindblad_accumulate(*grid, rho, gamma, out);
    xi_dot = gamma * rho.diagonal().real().dot(excited);
  }
};

ObservableRecord observe_rho(const MomentumGrid& g, const MatrixXc& rho, double t, double xi) {
  const Eigen::VectorXd pop = rho.diagonal().real();
  const Eigen::VectorXd p = g.momenta();
  const double tr = pop.sum();
  ObservableRecord r;
  r.t = t;
  r.mean_p = pop.dot(p) / tr;
  r.mean_p2 = pop.dot(p.cwiseProduct(p)) / tr;
  r.p_rms = std::sqrt(r.mean_p2);
  r.P_e = pop.dot(g.excited_mask()) / tr;
  r.mean_abs_p = pop.dot(p.cwiseAbs()) / tr;
  r.xi_cum = xi;
  for (int c = 0; c < 3; ++c) r.jumps[c] = kJumpChannels[c].weight * xi;
  return r;
}

}  // namespace

MasterResult evolve_master(const DensityOperator& rho0, const SweepSchedule& schedule,
                           const DriveParams& params, double t0, double t1,
                           const IntegratorConfig& config) {
  rho0.validate();
  if (!(params.gamma >= 0.0)) throw ContractViolation("linewidth gamma must be non-negative");
  const MomentumGrid& g = rho0.grid;
  const TimeGrid tg = make_time_grid(Engine::Master, g, params, schedule, config);
  const long long k0 = aligned_step(tg, t0, "t0");
  const long long k1 = aligned_step(tg, t1, "t1");
  if (k1 < k0) throw std::invalid_argument("t1 must not precede t0");
  if (k1 > tg.total_steps()) throw std::invalid_argument("t1 is beyond the end of the schedule");

  const MasterSystem sys{hamiltonian(g, params, 0.0), detuning_diagonal(g), g.excited_mask(),
                         params.gamma, &g};
  MatrixXc rho = rho0.rho;
  double xi = 0.0;
  MasterResult out{rho0, {}};
  const long long base = k0 / tg.stride;
  out.records.resize(static_cast<std::size_t>(k1 / tg.stride - base + 1));
  out.records[0] = observe_rho(g, rho, static_cast<double>(k0) * tg.dt, xi);

  const double dt = tg.dt;
  MatrixXc k1m, k2m, k3m, k4m, tmp;
  double x1, x2, x3, x4;
  for (long long k = k0; k < k1; ++k) {
    const double u = static_cast<double>(k % tg.steps_per_period) * dt;
    const double d0 = schedule.ramp_detuning(u);
    const double dh = schedule.ramp_detuning(u + 0.5 * dt);
    const double d1 = schedule.ramp_detuning(u + dt);
    sys.rhs(rho, d0, k1m, x1);
    tmp = rho + (0.5 * dt) * k1m;
    sys.rhs(tmp, dh, k2m, x2);
    tmp = rho + (0.5 * dt) * k2m;
    sys.rhs(tmp, dh, k3m, x3);
    tmp = rho + dt * k3m;
    sys.rhs(tmp, d1, k4m, x4);
    rho += (dt / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
    xi += (dt / 6.0) * (x1 + 2.0 * x2 + 2.0 * x3 + x4);

    const double tr = rho.trace().real();
    if (edge_population(g, rho.diagonal().real()) / tr > g.edge_tolerance())
      throw GridEdgeError("population reached the edge of the momentum grid");
    const long long kk = k + 1;
    if (schedule.is_sweep_wait() && kk % tg.steps_per_period == 0) {
      DensityOperator d(g);
      d.rho = rho;
      xi += rho.diagonal().real().dot(sys.excited) / tr;
      rho = project_wait(d).rho;
    }
    if (kk % tg.stride == 0)
      out.records[static_cast<std::size_t>(kk / tg.stride - base)] =
          observe_rho(g, rho, static_cast<double>(kk) * dt, xi);
  }
  out.rho.rho = rho;
  return out;
}

double two_level_sweep(double omega0, double alpha, double half_range, double dt) {
  if (!(alpha > 0.0)) throw std::invalid_argument("sweep rate must be positive");
  if (!(half_range > 0.0)) throw std::invalid_argument("sweep range must be positive");
  if (dt <= 0.0) dt = 0.5 / std::max({half_range, std::abs(omega0), std::sqrt(alpha)});
  const double T = half_range / alpha;
  const long long n = static_cast<long long>(std::ceil(2.0 * T / dt));
  const double h = 2.0 * T / static_cast<double>(n);
  const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
  const double w0 = -std::cbrt(2.0) / (2.0 - std::cbrt(2.0));
  Complex cg(1.0, 0.0), ce(0.0, 0.0);
  // Ground diagonal +delta/2, excited -delta/2, delta = alpha t.
  auto diag = [&](double t, double tau) {
    const double theta = alpha * (t * tau + 0.5 * tau * tau);
    cg *= std::polar(1.0, -0.5 * theta);
    ce *= std::polar(1.0, 0.5 * theta);
  };
  auto hop = [&](double tau) {
    const double a = 0.5 * omega0 * tau;
    const Complex c(std::cos(a), 0.0), s(0.0, -std::sin(a));
    const Complex g2 = c * cg + s * ce;
    ce = s * cg + c * ce;
    cg = g2;
  };
  for (long long k = 0; k < n; ++k) {
    const double t = -T + static_cast<double>(k) * h;
    const double a = w1 * h, b = w0 * h;
    diag(t, 0.5 * a);
    hop(a);
    diag(t + 0.5 * a, 0.5 * (a + b));
    hop(b);
    diag(t + a + 0.5 * b, 0.5 * (a + b));
    hop(a);
    diag(t + h - 0.5 * a, 0.5 * a);
  }
  return std::norm(ce) / (std::norm(cg) + std::norm(ce));
}

}  // namespace swapcool
