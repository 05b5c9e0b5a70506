#pragma once

// Small seeded generators for property tests.

#include "swapcool/core_state.hpp"

#include <random>

namespace testgen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  bool coin() { return integer(0, 1) == 1; }

  swapcool::MomentumGrid grid(int max_half = 12) {
    return swapcool::MomentumGrid(-integer(1, max_half), integer(1, max_half));
  }

  swapcool::InternalLevel level() {
    return coin() ? swapcool::InternalLevel::Excited : swapcool::InternalLevel::Ground;
  }

  /// Random normalized state.
  swapcool::SpinMomentumState state(const swapcool::MomentumGrid& g) {
    swapcool::SpinMomentumState psi(g);
    for (Eigen::Index i = 0; i < g.dim(); ++i) psi.amplitudes(i) = {real(-1, 1), real(-1, 1)};
    return psi.normalized();
  }

  /// Random density operator: convex mixture of a few random pure states.
  swapcool::DensityOperator density(const swapcool::MomentumGrid& g, int rank = 3) {
    swapcool::DensityOperator rho(g);
    double wsum = 0.0;
    std::vector<double> w;
    for (int k = 0; k < rank; ++k) w.push_back(real(0.1, 1.0)), wsum += w.back();
    for (int k = 0; k < rank; ++k) {
      const auto psi = state(g);
      rho.rho += (w[k] / wsum) * psi.amplitudes * psi.amplitudes.adjoint();
    }
    return rho;
  }

  /// Random Hermitian matrix (not necessarily a valid state).
  swapcool::MatrixXc hermitian(Eigen::Index n) {
    swapcool::MatrixXc a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = {real(-1, 1), real(-1, 1)};
    return 0.5 * (a + a.adjoint());
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace testgen
