#include "swapcool/dissipation.hpp"

#include <cmath>
#include <vector>

namespace swapcool {

namespace {

void check_gamma(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw ContractViolation("linewidth gamma must be finite and non-negative");
}

struct ExcitedMap {
  std::vector<Eigen::Index> excited;              // index of (e, n)
  std::vector<std::array<Eigen::Index, 3>> target;  // index of (g, n + recoil) or -1
};

ExcitedMap excited_map(const MomentumGrid& grid) {
  ExcitedMap m;
  m.excited.reserve(grid.size());
  m.target.reserve(grid.size());
  for (int n = grid.n_min(); n <= grid.n_max(); ++n) {
    m.excited.push_back(grid.index(InternalLevel::Excited, n));
    std::array<Eigen::Index, 3> t{};
    for (int c = 0; c < 3; ++c) {
      const int nn = n + kJumpChannels[c].recoil;
      t[c] = grid.contains(nn) ? grid.index(InternalLevel::Ground, nn) : -1;
    }
    m.target.push_back(t);
  }
  return m;
}

}  // namespace

MatrixXc effective_hamiltonian(const MatrixXc& H, const MomentumGrid& grid, double gamma) {
  check_gamma(gamma);
  MatrixXc out = H;
  const Eigen::VectorXd mask = grid.excited_mask();
  for (Eigen::Index i = 0; i < grid.dim(); ++i) out(i, i) -= Complex(0.0, 0.5 * gamma * mask(i));
  return out;
}

SparseMatrixXc effective_hamiltonian(const SparseMatrixXc& H, const MomentumGrid& grid,
                                     double gamma) {
  check_gamma(gamma);
  SparseMatrixXc out = H;
  if (gamma == 0.0) return out;
  SparseMatrixXc d(grid.dim(), grid.dim());
  std::vector<Eigen::Triplet<Complex>> trips;
  const Eigen::VectorXd mask = grid.excited_mask();
  for (Eigen::Index i = 0; i < grid.dim(); ++i)
    if (mask(i) > 0.0) trips.emplace_back(i, i, Complex(0.0, -0.5 * gamma));
  d.setFromTriplets(trips.begin(), trips.end());
  out += d;
  return out;
}

void lindblad_accumulate(const MomentumGrid& grid, const MatrixXc& rho, double gamma,
                         MatrixXc& out) {
  check_gamma(gamma);
  if (gamma == 0.0) return;
  const ExcitedMap m = excited_map(grid);
  const int N = grid.size();

  // Recoil out of the grid is only tolerated for negligible populations.
  for (int j = 0; j < N; ++j) {
    for (int c = 0; c < 3; ++c) {
      if (m.target[j][c] >= 0) continue;
      const double pop = rho(m.excited[j], m.excited[j]).real();
      if (pop > grid.edge_tolerance())
        throw GridEdgeError("recoil from excited population " + std::to_string(pop) +
                            " at the grid edge leaves the grid");
    }
  }

  const Eigen::VectorXd mask = grid.excited_mask();
  for (Eigen::Index b = 0; b < grid.dim(); ++b)
    for (Eigen::Index a = 0; a < grid.dim(); ++a)
      out(a, b) -= 0.5 * gamma * (mask(a) + mask(b)) * rho(a, b);

  for (int c = 0; c < 3; ++c) {
    const double w = gamma * kJumpChannels[c].weight;
    for (int jb = 0; jb < N; ++jb) {
      const Eigen::Index tb = m.target[jb][c];
      if (tb < 0) continue;
      for (int ja = 0; ja < N; ++ja) {
        const Eigen::Index ta = m.target[ja][c];
        if (ta < 0) continue;
        out(ta, tb) += w * rho(m.excited[ja], m.excited[jb]);
      }
    }
  }
}

MatrixXc lindblad_apply(const DensityOperator& rho, double gamma) {
  MatrixXc out = MatrixXc::Zero(rho.grid.dim(), rho.grid.dim());
  lindblad_accumulate(rho.grid, rho.rho, gamma, out);
  return out;
}

VectorXc apply_lowering(const MomentumGrid& grid, const VectorXc& amps, int recoil) {
  VectorXc out = VectorXc::Zero(grid.dim());
  for (int n = grid.n_min(); n <= grid.n_max(); ++n) {
    const Complex a = amps(grid.index(InternalLevel::Excited, n));
    if (a == Complex(0.0, 0.0)) continue;
    const int nn = n + recoil;
    if (!grid.contains(nn)) {
      if (std::norm(a) > grid.edge_tolerance())
        throw GridEdgeError("emission recoil leaves the momentum grid at n = " +
                            std::to_string(n));
      continue;
    }
    out(grid.index(InternalLevel::Ground, nn)) = a;
  }
  return out;
}

double Rng::uniform() {
  return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
}

int Rng::channel() {
  const double u = uniform();
  if (u < kJumpChannels[0].weight) return 0;
  if (u < kJumpChannels[0].weight + kJumpChannels[1].weight) return 1;
  return 2;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
  std::uint64_t z = base_seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SpinMomentumState apply_jump(const SpinMomentumState& psi, int channel) {
  if (channel < 0 || channel > 2) throw std::out_of_range("jump channel index must be 0, 1 or 2");
  SpinMomentumState out(psi.grid);
  out.amplitudes = apply_lowering(psi.grid, psi.amplitudes, kJumpChannels[channel].recoil);
  const double n2 = out.norm2();
  if (!(n2 > 0.0)) throw ContractViolation("jump requested on a state with no excited population");
  out.amplitudes /= std::sqrt(n2);
  return out;
}

JumpOutcome sample_jump(const SpinMomentumState& psi, Rng& rng) {
  const Eigen::VectorXd mask = psi.grid.excited_mask();
  if (!(psi.amplitudes.cwiseAbs2().dot(mask) > 0.0))
    throw ContractViolation("jump requested on a state with no excited population");
  const int c = rng.channel();
  return {c, apply_jump(psi, c)};
}

}  // namespace swapcool
