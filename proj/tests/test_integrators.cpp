#include "generators.hpp"

#include "swapcool/integrators.hpp"
#include "swapcool/resonance.hpp"
#include "swapcool/split_stepper.hpp"
#include "swapcool/sweep_wait.hpp"

#include <doctest.h>

#include <cstring>

using namespace swapcool;

namespace {

bool same_bits(const ObservableRecord& a, const ObservableRecord& b) {
  return std::memcmp(&a, &b, sizeof(ObservableRecord)) == 0;
}

bool same_bits(const std::vector<ObservableRecord>& a, const std::vector<ObservableRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_bits(a[i], b[i])) return false;
  return true;
}

// Independent two-level reference: classical RK4 on the diabatic amplitudes
// with H = [[-alpha t/2, W], [W, alpha t/2]], W = Omega_0/2.
double two_level_rk4(double omega0, double alpha, double half_range, int steps) {
  const double T = half_range / alpha;
  const double h = 2 * T / steps;
  const double W = 0.5 * omega0;
  using V = Eigen::Vector2cd;
  auto f = [&](double t, const V& c) {
    const double d = 0.5 * alpha * t;
    V out;
    out(0) = Complex(0, -1) * (-d * c(0) + W * c(1));
    out(1) = Complex(0, -1) * (W * c(0) + d * c(1));
    return out;
  };
  V c(1.0, 0.0);
  double t = -T;
  for (int k = 0; k < steps; ++k) {
    const V k1 = f(t, c);
    const V k2 = f(t + h / 2, c + h / 2 * k1);
    const V k3 = f(t + h / 2, c + h / 2 * k2);
    const V k4 = f(t + h, c + h * k3);
    c += h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return std::norm(c(1));
}

}  // namespace

TEST_SUITE("integrators") {

TEST_CASE("time grid") {
  const auto g = MomentumGrid::for_sweep(10, 120);
  const SweepSchedule s(Sawtooth{120, 1000, 5});
  IntegratorConfig c;
  c.records_per_period = 7;
  const auto tg = make_time_grid(Engine::Trajectory, g, DriveParams{1, 0}, s, c);
  CHECK(tg.steps_per_period % 7 == 0);
  CHECK(tg.stride * 7 == tg.steps_per_period);
  CHECK(tg.dt * tg.steps_per_period == doctest::Approx(1000.0).epsilon(1e-14));
  CHECK(tg.dt <= 0.1 / (60 + 2 * 40 + 1) * (1 + 1e-12));
  CHECK(tg.n_records() == 36);
  const auto tm = make_time_grid(Engine::Master, g, DriveParams{1, 0}, s, c);
  CHECK(tm.dt <= 0.1 / (40.0 * 40.0) * (1 + 1e-12));
  c.dt_max = 1e-3;
  CHECK(make_time_grid(Engine::Trajectory, g, DriveParams{1, 0}, s, c).dt <= 1e-3);
}

TEST_CASE("closed-system trajectory conserves the norm and never jumps") {
  const auto g = MomentumGrid::for_sweep(10, 200);
  const SweepSchedule s(Sawtooth{200, 22, 1});
  const auto r = evolve_trajectory(make_basis_state(InternalLevel::Ground, 10, g), s,
                                   DriveParams{5, 0}, 0, 22, 1);
  CHECK(r.jumps.empty());
  CHECK(std::abs(r.psi.norm2() - 1.0) < 1e-6);
  CHECK(r.records.back().xi_cum == 0.0);
}

TEST_CASE("same seed gives bit-identical records") {
  const auto g = MomentumGrid::for_sweep(5, 60);
  const SweepSchedule s(Sawtooth{60, 2, 3});
  IntegratorConfig c;
  c.records_per_period = 5;
  const auto psi = make_basis_state(InternalLevel::Ground, 5, g);
  const auto a = evolve_trajectory(psi, s, DriveParams{6, 1}, 0, 6, 99, c);
  const auto b = evolve_trajectory(psi, s, DriveParams{6, 1}, 0, 6, 99, c);
  CHECK(same_bits(a.records, b.records));
  CHECK(a.jumps.size() == b.jumps.size());
  const auto d = evolve_trajectory(psi, s, DriveParams{6, 1}, 0, 6, 100, c);
  CHECK_FALSE(same_bits(a.records, d.records));
}

TEST_CASE("waiting times of a bare excited state are exponential with mean 1/gamma") {
  const auto g = MomentumGrid::symmetric(4);
  const SweepSchedule s(ConstantDetuning{0.0, 20.0});
  const auto psi = make_basis_state(InternalLevel::Excited, 0, g);
  const int n = 10000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto r = evolve_trajectory(psi, s, DriveParams{0, 1}, 0, 20, derive_seed(7, i));
    REQUIRE(r.jumps.size() == 1);
    sum += r.jumps[0].t;
    sum2 += r.jumps[0].t * r.jumps[0].t;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean - 1.0) < 3.0 / std::sqrt(n));
  // Exponential: variance equals mean^2.
  CHECK(sum2 / n - mean * mean == doctest::Approx(1.0).epsilon(0.06));
}

TEST_CASE("norm is non-increasing between jumps") {
  const auto g = MomentumGrid::for_sweep(4, 40);
  const SweepSchedule s(Sawtooth{40, 2, 1});
  SplitStepper st(g, DriveParams{8, 1}, s, 1e-3);
  VectorXc a = make_basis_state(InternalLevel::Ground, 4, g).amplitudes;
  Windows w = Windows::of(g, a);
  double prev = 1.0;
  for (int k = 0; k < 2000; ++k) {
    st.step(a, w, k * 1e-3);
    const double n2 = st.norm2(a, w);
    CHECK(n2 <= prev * (1 + 1e-13));
    prev = n2;
  }
  CHECK(prev < 0.999);
}

TEST_CASE("master equation: closed system stays pure and matches the pure state") {
  const auto g = MomentumGrid::symmetric(16);
  const SweepSchedule s(Sawtooth{40, 4, 1});
  const DriveParams p{4, 0};
  const auto psi = make_basis_state(InternalLevel::Ground, 3, g);
  const auto m = evolve_master(DensityOperator::pure(psi), s, p, 0, 4);
  CHECK(m.rho.purity() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_NOTHROW(m.rho.validate());
  const auto t = evolve_trajectory(psi, s, p, 0, 4, 1);
  const auto& a = m.records.back();
  const auto& b = t.records.back();
  CHECK(a.mean_p2 == doctest::Approx(b.mean_p2).epsilon(1e-7));
  CHECK(a.P_e == doctest::Approx(b.P_e).epsilon(1e-7));
}

TEST_CASE("master equation: bare decay") {
  const auto g = MomentumGrid::symmetric(3);
  const SweepSchedule s(ConstantDetuning{0.0, 5.0});
  const auto rho0 = DensityOperator::pure(make_basis_state(InternalLevel::Excited, 0, g));
  const auto m = evolve_master(rho0, s, DriveParams{0, 1}, 0, 5);
  for (const auto& r : m.records) {
    CHECK(std::abs(r.P_e - std::exp(-r.t)) < 1e-6);
    CHECK(std::abs(r.xi_cum - (1 - std::exp(-r.t))) < 1e-6);
  }
  CHECK(m.rho.trace() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("excitation pulse from |g,10> lasts tau_res") {
  const auto g = MomentumGrid::for_sweep(10, 200);
  const SweepSchedule s(Sawtooth{200, 22, 1});
  IntegratorConfig c;
  c.records_per_period = 2200;
  const auto r = evolve_trajectory(make_basis_state(InternalLevel::Ground, 10, g), s,
                                   DriveParams{5, 0}, 0, 22, 1, c);
  double up = -1, down = -1;
  for (std::size_t i = 1; i < r.records.size(); ++i) {
    const double a = r.records[i - 1].P_e - 0.5, b = r.records[i].P_e - 0.5;
    const double t = r.records[i - 1].t + (r.records[i].t - r.records[i - 1].t) * a / (a - b);
    if (a < 0 && b >= 0 && up < 0) up = t;
    if (a >= 0 && b < 0 && up >= 0) down = t;
  }
  REQUIRE(up > 0);
  REQUIRE(down > up);
  const double alpha = 200.0 / 22.0;
  CHECK(down - up == doctest::Approx(tau_res(20.0, alpha)).epsilon(0.05));
  // Midpoint of the pulse sits halfway between the two resonances.
  const auto rg = resonance_times(InternalLevel::Ground, 10, alpha);
  const auto re = resonance_times(InternalLevel::Excited, 9, alpha);
  CHECK(0.5 * (up + down) - 11.0 == doctest::Approx(0.5 * (rg.t_left + re.t_right)).epsilon(0.05));
}

TEST_CASE("step halving and grid doubling leave closed-system observables unchanged") {
  const SweepSchedule s(Sawtooth{120, 200, 1});
  const DriveParams p{2, 0};
  const auto g = MomentumGrid::for_sweep(10, 120);
  const auto g2 = MomentumGrid::symmetric(2 * g.n_max());
  const auto a = evolve_trajectory(make_basis_state(InternalLevel::Ground, 10, g), s, p, 0, 200, 1);
  IntegratorConfig half;
  half.safety = 0.05;
  const auto b =
      evolve_trajectory(make_basis_state(InternalLevel::Ground, 10, g), s, p, 0, 200, 1, half);
  IntegratorConfig fixed;
  fixed.dt_max = a.records.size() > 0 ? make_time_grid(Engine::Trajectory, g, p, s, {}).dt : 0;
  const auto c =
      evolve_trajectory(make_basis_state(InternalLevel::Ground, 10, g2), s, p, 0, 200, 1, fixed);
  const auto& ra = a.records.back();
  for (const auto* o : {&b.records.back(), &c.records.back()}) {
    CHECK(std::abs(o->mean_p - ra.mean_p) < 1e-6);
    CHECK(std::abs(o->mean_p2 - ra.mean_p2) < 1e-6);
    CHECK(std::abs(o->P_e - ra.P_e) < 1e-6);
  }
}

TEST_CASE("mirrored initial momentum gives the same p_rms trace") {
  const auto g = MomentumGrid::for_sweep(10, 120);
  const SweepSchedule s(Sawtooth{120, 100, 2});
  IntegratorConfig c;
  c.records_per_period = 50;
  const DriveParams p{1, 0};
  const auto a = evolve_trajectory(make_basis_state(InternalLevel::Ground, 10, g), s, p, 0, 200, 1, c);
  const auto b = evolve_trajectory(make_basis_state(InternalLevel::Ground, -10, g), s, p, 0, 200, 1, c);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(std::abs(a.records[i].p_rms - b.records[i].p_rms) < 1e-10);
    CHECK(std::abs(a.records[i].mean_p + b.records[i].mean_p) < 1e-10);
  }
}

TEST_CASE("ensemble of one equals the single trajectory") {
  const auto g = MomentumGrid::for_sweep(6, 80);
  const SweepSchedule s(Sawtooth{80, 2, 3});
  const DriveParams p{8, 1};
  IntegratorConfig c;
  c.records_per_period = 4;
  const auto psi = make_basis_state(InternalLevel::Ground, 6, g);
  const auto e = run_ensemble(psi, s, p, 1, 17, c);
  const auto t = evolve_trajectory(psi, s, p, 0, 6, derive_seed(17, 0), c);
  CHECK(same_bits(e.mean, t.records));
  REQUIRE(e.seeds.size() == 1);
  CHECK(e.seeds[0] == derive_seed(17, 0));
  for (const auto& r : e.se) CHECK(r.mean_p2 == 0.0);
}

TEST_CASE("ensemble means are independent of the worker count and block layout") {
  const auto g = MomentumGrid::for_sweep(6, 80);
  const SweepSchedule s(Sawtooth{80, 2, 2});
  const DriveParams p{8, 1};
  const auto psi = make_basis_state(InternalLevel::Ground, 6, g);
  IntegratorConfig c1, c3;
  c3.workers = 3;
  const auto a = run_ensemble(psi, s, p, 70, 5, c1);
  const auto b = run_ensemble(psi, s, p, 70, 5, c3);
  CHECK(same_bits(a.mean, b.mean));
  CHECK(same_bits(a.se, b.se));
  // Each trajectory is reproducible on its own.
  const auto t = evolve_trajectory(psi, s, p, 0, 4, a.seeds[41], c1);
  CHECK(t.records.size() == a.mean.size());
}

TEST_CASE("standard errors scale as 1/sqrt(n)") {
  const auto g = MomentumGrid::for_sweep(6, 80);
  const SweepSchedule s(Sawtooth{80, 2, 2});
  const DriveParams p{8, 1};
  const auto psi = make_basis_state(InternalLevel::Ground, 6, g);
  const auto a = run_ensemble(psi, s, p, 100, 1);
  const auto b = run_ensemble(psi, s, p, 400, 2);
  const double ratio = b.se.back().mean_p2 / a.se.back().mean_p2;
  CHECK(ratio == doctest::Approx(0.5).epsilon(0.25));
  const double rx = b.se.back().xi_cum / a.se.back().xi_cum;
  CHECK(rx == doctest::Approx(0.5).epsilon(0.25));
}

TEST_CASE("ensemble errors say where they happened") {
  const MomentumGrid g(-7, 7);
  const SweepSchedule s(Sawtooth{80, 2, 4});
  const auto psi = make_basis_state(InternalLevel::Ground, 5, g);
  const auto what = [](auto&& f) {
    try {
      f();
    } catch (const GridEdgeError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(what([&] { run_ensemble(psi, s, DriveParams{8, 1}, 4, 1); }).rfind("no-jump path: ", 0) == 0);
  CHECK(what([&] { run_ensemble(DensityOperator::pure(psi), s, DriveParams{8, 1}, 4, 1); })
            .rfind("trajectory ", 0) == 0);
  CHECK_THROWS_AS(run_ensemble(psi, s, DriveParams{8, 1}, 0, 1), std::invalid_argument);
}

TEST_CASE("trajectories and the master equation agree on a small grid") {
  // Both engines see the same truncated basis, so the edge check is off.
  const MomentumGrid g(-4, 4, 1.0);
  const SweepSchedule s(Sawtooth{12, 2, 1});
  const DriveParams p{2, 1};
  const auto psi = make_basis_state(InternalLevel::Ground, 1, g);
  const auto m = evolve_master(DensityOperator::pure(psi), s, p, 0, 2);
  const auto e = run_ensemble(psi, s, p, 400, 3);
  const auto& a = m.records.back();
  const auto& b = e.mean.back();
  const auto& se = e.se.back();
  CHECK(std::abs(a.mean_p - b.mean_p) < 3.5 * se.mean_p);
  CHECK(std::abs(a.mean_p2 - b.mean_p2) < 3.5 * se.mean_p2);
  CHECK(std::abs(a.P_e - b.P_e) < 3.5 * se.P_e);
  CHECK(std::abs(a.xi_cum - b.xi_cum) < 3.5 * se.xi_cum);
}

TEST_CASE("mixed initial state") {
  const auto g = MomentumGrid::symmetric(6);
  DensityOperator rho(g);
  rho.rho(g.index(InternalLevel::Ground, 1), g.index(InternalLevel::Ground, 1)) = 0.5;
  rho.rho(g.index(InternalLevel::Ground, -1), g.index(InternalLevel::Ground, -1)) = 0.5;
  const SweepSchedule s(ConstantDetuning{0.0, 2.0});
  const auto e = run_ensemble(rho, s, DriveParams{0, 0}, 400, 9);
  CHECK(e.mean.back().mean_p2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(e.mean.back().mean_p) < 3 * e.se.back().mean_p + 1e-12);
  DensityOperator bad = rho;
  bad.rho *= 2.0;
  CHECK_THROWS_AS(run_ensemble(bad, s, DriveParams{0, 0}, 4, 9), ContractViolation);
}

TEST_CASE("wait projection") {
  const auto g = MomentumGrid::symmetric(5);
  Rng rng(3);
  auto ground = make_basis_state(InternalLevel::Ground, 2, g);
  const auto before = ground.amplitudes;
  CHECK_FALSE(project_wait(ground, rng).has_value());
  CHECK((ground.amplitudes - before).norm() == 0.0);

  const auto m = project_wait(DensityOperator::pure(make_basis_state(InternalLevel::Excited, 1, g)));
  auto pop = [&](int n) {
    const auto i = g.index(InternalLevel::Ground, n);
    return m.rho(i, i).real();
  };
  CHECK(pop(1) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(pop(2) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(pop(0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(m.trace() == doctest::Approx(1.0).epsilon(1e-15));

  // Half-excited state with |e,+-1> components: the decayed half gains the
  // recoil variance, <p^2> = 1/2 -> 1/2 + (2/5)(1/2).
  SpinMomentumState s(g);
  s(InternalLevel::Ground, 0) = std::sqrt(0.5);
  s(InternalLevel::Excited, 1) = 0.5;
  s(InternalLevel::Excited, -1) = 0.5;
  const auto after = project_wait(DensityOperator::pure(s));
  CHECK(expectations(after).mean_p2 == doctest::Approx(0.5 + 0.4 * 0.5).epsilon(1e-14));
  CHECK(expectations(after).P_e == 0.0);

  // Trajectory flavor reproduces the same mixture on average.
  const int n = 40000;
  double p2 = 0.0, emitted = 0.0;
  for (int i = 0; i < n; ++i) {
    auto x = s;
    if (project_wait(x, rng)) emitted += 1;
    p2 += expectations(x).mean_p2;
  }
  CHECK(std::abs(emitted / n - 0.5) < 3 * std::sqrt(0.25 / n));
  CHECK(p2 / n == doctest::Approx(0.7).epsilon(0.02));
}

TEST_CASE("sweep-wait propagator ensemble matches stepped trajectories") {
  const auto g = MomentumGrid::for_sweep(5, 40);
  const SweepSchedule s(SweepWait{40, 10, 3});
  const DriveParams p{2, 0};
  IntegratorConfig c;
  c.records_per_period = 2;
  const auto psi = make_basis_state(InternalLevel::Ground, 5, g);
  const auto e = run_ensemble(psi, s, p, 6, 21, c);
  std::vector<ObservableRecord> acc(e.mean.size());
  for (int i = 0; i < 6; ++i) {
    const auto t = evolve_trajectory(psi, s, p, 0, 30, derive_seed(21, i), c);
    REQUIRE(t.records.size() == acc.size());
    for (std::size_t k = 0; k < acc.size(); ++k) {
      acc[k].mean_p2 += t.records[k].mean_p2 / 6;
      acc[k].xi_cum += t.records[k].xi_cum / 6;
    }
  }
  for (std::size_t k = 0; k < acc.size(); ++k) {
    CHECK(e.mean[k].mean_p2 == doctest::Approx(acc[k].mean_p2).epsilon(1e-9));
    CHECK(e.mean[k].xi_cum == doctest::Approx(acc[k].xi_cum).epsilon(1e-12));
  }
}

TEST_CASE("sweep-wait master equation projects after every ramp") {
  const MomentumGrid g(-10, 10, 1e-3);
  const SweepSchedule s(SweepWait{20, 4, 2});
  const auto m = evolve_master(DensityOperator::pure(make_basis_state(InternalLevel::Ground, 2, g)),
                               s, DriveParams{3, 0}, 0, 8);
  CHECK(m.records.back().P_e == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.rho.trace() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(m.records.back().xi_cum > 0.0);
}

TEST_CASE("two-level sweep agrees with an independent integrator") {
  for (double kappa : {0.5, 1.0, 2.0}) {
    const double omega0 = std::sqrt(kappa);
    const double a = two_level_sweep(omega0, 1.0, 200.0);
    const double b = two_level_rk4(omega0, 1.0, 200.0, 4000000);
    CHECK(a == doctest::Approx(b).epsilon(1e-5));
  }
}

}  // TEST_SUITE
