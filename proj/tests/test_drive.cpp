#include "generators.hpp"

#include "swapcool/drive.hpp"
#include "swapcool/resonance.hpp"

#include <doctest.h>

using namespace swapcool;

TEST_SUITE("drive") {

TEST_CASE("drive parameters") {
  const DriveParams p{26.8, 0.0};
  CHECK(p.omega_s() == 2 * 26.8);
  CHECK(p.kappa(180.0) == doctest::Approx(26.8 * 26.8 / 180.0));
}

TEST_CASE("sawtooth detuning") {
  const SweepSchedule s(Sawtooth{100.0, 60.0, 3});
  CHECK(s.alpha() == 100.0 / 60.0);
  CHECK(detuning(s, 0.0) == -50.0);
  CHECK(detuning(s, 30.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(detuning(s, 60.0) == -50.0);
  CHECK(detuning(s, 60.0 + 1e-9) == doctest::Approx(-50.0));
  CHECK(detuning(s, 59.999999) == doctest::Approx(50.0));
  CHECK(s.n_periods() == 3);
  CHECK(s.duration() == 180.0);
  CHECK_THROWS_AS(detuning(s, -1.0), std::invalid_argument);
}

TEST_CASE("negative ramp runs blue to red") {
  const SweepSchedule s(Sawtooth{100.0, 60.0, 1, RampSign::Negative});
  CHECK(detuning(s, 0.0) == 50.0);
  CHECK(detuning(s, 45.0) == doctest::Approx(-25.0));
  CHECK(s.ramp_slope() == doctest::Approx(-100.0 / 60.0));
}

TEST_CASE("constant and sweep-wait detuning") {
  const SweepSchedule c(ConstantDetuning{-40.0, 10.0});
  CHECK(detuning(c, 0.0) == -40.0);
  CHECK(detuning(c, 123.4) == -40.0);
  CHECK(c.alpha() == 0.0);
  CHECK(c.n_periods() == 10);
  const SweepSchedule w(SweepWait{100.0, 60.0, 4});
  CHECK(w.is_sweep_wait());
  CHECK(detuning(w, 90.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(SweepSchedule(Sawtooth{100.0, 0.0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(SweepSchedule(Sawtooth{-1.0, 1.0, 1}), std::invalid_argument);
}

TEST_CASE("hamiltonian entries") {
  const auto g = MomentumGrid::symmetric(8);
  const MatrixXc H0 = MatrixXc(hamiltonian(g, DriveParams{2.0, 0.0}, 0.0));
  CHECK(H0(g.index(InternalLevel::Excited, 5), g.index(InternalLevel::Ground, 4)) == Complex(1.0));
  CHECK(H0(g.index(InternalLevel::Excited, 3), g.index(InternalLevel::Ground, 4)) == Complex(1.0));
  CHECK(H0(g.index(InternalLevel::Excited, 4), g.index(InternalLevel::Ground, 4)) == Complex(0.0));
  const MatrixXc H = MatrixXc(hamiltonian(g, DriveParams{2.0, 0.0}, 10.0));
  CHECK(H(g.index(InternalLevel::Ground, 4), g.index(InternalLevel::Ground, 4)) == Complex(21.0));
  CHECK(H(g.index(InternalLevel::Excited, 3), g.index(InternalLevel::Excited, 3)) == Complex(4.0));
  CHECK_THROWS_AS(hamiltonian(g, DriveParams{2.0, 0.0}, std::nan("")), std::invalid_argument);
}

TEST_CASE("single-photon resonances coincide with the resonance times for both ramp signs") {
  // diag(g,n) = diag(e,n+1) at delta = 2n+1 and diag(g,n) = diag(e,n-1) at
  // delta = 1-2n; the excited-start pairs follow with n -> -n.
  const auto g = MomentumGrid::symmetric(15);
  const DriveParams p{0.0, 0.0};
  const double delta_s = 100.0, t_s = 20.0, alpha = delta_s / t_s;
  for (RampSign sign : {RampSign::Positive, RampSign::Negative}) {
    const SweepSchedule s(Sawtooth{delta_s, t_s, 1, sign});
    for (int n = -10; n <= 10; ++n) {
      for (auto lv : {InternalLevel::Ground, InternalLevel::Excited}) {
        const auto rt = resonance_times(lv, n, alpha);
        const InternalLevel other =
            lv == InternalLevel::Ground ? InternalLevel::Excited : InternalLevel::Ground;
        // t_right pairs with the partner at n+1 for ground, n-1 for excited.
        const int right = lv == InternalLevel::Ground ? n + 1 : n - 1;
        const int left = lv == InternalLevel::Ground ? n - 1 : n + 1;
        for (auto [tr, partner] : {std::pair{rt.t_right, right}, std::pair{rt.t_left, left}}) {
          const double delta_res = alpha * tr;
          // Time into the ramp at which this detuning is reached.
          const double u = sign == RampSign::Positive ? (delta_res + 0.5 * delta_s) / alpha
                                                      : (0.5 * delta_s - delta_res) / alpha;
          const double d = detuning(s, u);
          CHECK(d == doctest::Approx(delta_res).epsilon(1e-12));
          const MatrixXc H = MatrixXc(hamiltonian(g, p, d));
          const double a = H(g.index(lv, n), g.index(lv, n)).real();
          const double b = H(g.index(other, partner), g.index(other, partner)).real();
          CHECK(a == doctest::Approx(b).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("property: hamiltonian is exactly Hermitian with 2(N-1) coupled pairs per sector") {
  testgen::Gen gen(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = gen.grid(10);
    const DriveParams p{gen.real(0.1, 50.0), 0.0};
    const double delta = gen.real(-200.0, 200.0);
    const MatrixXc H = MatrixXc(hamiltonian(g, p, delta));
    CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    int pairs = 0;
    for (Eigen::Index i = 0; i < H.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < H.cols(); ++j) {
        if (H(i, j) == Complex(0.0)) continue;
        ++pairs;
        CHECK(g.level_of(i) != g.level_of(j));
        CHECK(std::abs(g.momentum_of(i) - g.momentum_of(j)) == 1);
        CHECK(H(i, j) == Complex(0.5 * p.omega0));
      }
    }
    CHECK(pairs == 2 * (g.size() - 1));
  }
}

TEST_CASE("uncoupled dressed energies equal the bare diagonals") {
  for (double d : {-25.0, -7.0, 0.0, 3.3, 25.0}) {
    const auto ev = dressed_eigenvalues(DriveParams{0.0, 0.0}, d, 4);
    Eigen::Vector4d bare = bare_four_state_energies(d, 4);
    std::sort(bare.data(), bare.data() + 4);
    for (int i = 0; i < 4; ++i) CHECK(ev(i) == doctest::Approx(bare(i)).epsilon(1e-14));
  }
}

TEST_CASE("four-state set must lie on the grid") {
  const MomentumGrid g(-5, 5);
  CHECK_NOTHROW(dressed_eigenvalues(g, DriveParams{2.0, 0.0}, 0.0, 4));
  CHECK_THROWS_AS(dressed_eigenvalues(g, DriveParams{2.0, 0.0}, 0.0, 6), std::out_of_range);
  CHECK_THROWS_AS(dressed_eigenvalues(g, DriveParams{2.0, 0.0}, 0.0, -3), std::out_of_range);
  CHECK(dressed_eigenvalues(g, DriveParams{2.0, 0.0}, 1.0).size() == g.dim());
}

TEST_CASE("avoided crossings at p = 4, Omega_0 = 2") {
  const DriveParams p{2.0, 0.0};
  // |g,4> - |e,3> crossing at delta = -7: upper pair of branches, gap ~ Omega_0.
  const auto single = minimum_gap(p, 4, 2, -9.0, -5.0);
  CHECK(single.delta == doctest::Approx(-7.0).epsilon(0.05));
  CHECK(single.gap == doctest::Approx(2.0).epsilon(0.1));
  // |g,4> - |e,1> first-order Doppleron at alpha t_1 = -3 kv + 9 = -15.
  const auto dop = minimum_gap(p, 4, 1, -18.0, -12.0);
  CHECK(dop.delta == doctest::Approx(doppleron_time(1, 8.0, 1.0)).epsilon(0.02));
  CHECK(dop.gap == doctest::Approx(doppleron_gap(2.0, 8.0)).epsilon(0.2));
}

TEST_CASE("property: sorted dressed energies are 1/2-Lipschitz in the detuning") {
  // |dE/d delta| <= ||dH/d delta|| = 1/2, so sorting never produces jumps.
  const double delta_s = 50.0;
  const double step = delta_s / 1e4;
  testgen::Gen gen(22);
  for (int trial = 0; trial < 5; ++trial) {
    const DriveParams p{gen.real(0.5, 5.0), 0.0};
    const int center = gen.integer(-6, 6);
    Eigen::VectorXd prev = dressed_eigenvalues(p, -0.5 * delta_s, center);
    for (int k = 1; k <= 10000; ++k) {
      const Eigen::VectorXd cur = dressed_eigenvalues(p, -0.5 * delta_s + k * step, center);
      CHECK((cur - prev).cwiseAbs().maxCoeff() <= 0.5 * step * (1 + 1e-9) + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("diabatic following keeps bare character through a crossing") {
  const DriveParams p{0.005, 0.0};
  Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(400, -12.0, -2.0);
  const auto dia = dressed_sweep(p, 4, d, true);
  const auto srt = dressed_sweep(p, 4, d, false);
  // Gap far below the sampling step: the followed branch that starts as |g,4>
  // stays within O(Omega_0) of its bare line through the delta = -7 crossing.
  int branch = 0;
  const Eigen::Vector4d bare0 = bare_four_state_energies(d(0), 4);
  for (int b = 0; b < 4; ++b)
    if (std::abs(dia.eigenvalues(0, b) - bare0(0)) < 0.1) branch = b;
  for (Eigen::Index k = 0; k < d.size(); ++k)
    CHECK(std::abs(dia.eigenvalues(k, branch) - bare_four_state_energies(d(k), 4)(0)) < 0.1);
  // Sorted branches switch character at the crossing instead.
  const Eigen::Index last = d.size() - 1;
  CHECK(std::abs(srt.eigenvalues(last, branch) - bare_four_state_energies(d(last), 4)(0)) > 1.0);
}

}  // TEST_SUITE
