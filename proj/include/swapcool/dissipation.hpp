#pragma once

// Spontaneous emission with the discretized recoil pattern: the excited
// state decays at rate gamma and the emitted photon kicks the particle by
// -1, 0 or +1 hbar k with weights 1/5 : 3/5 : 1/5.

#include "swapcool/drive.hpp"

#include <array>
#include <cstdint>
#include <random>

namespace swapcool {

struct JumpChannel {
  int recoil;     ///< momentum shift in hbar k
  double weight;  ///< fraction of gamma
};

inline constexpr std::array<JumpChannel, 3> kJumpChannels{
    JumpChannel{-1, 0.2}, JumpChannel{0, 0.6}, JumpChannel{+1, 0.2}};

/// Channel index (0, 1, 2) for recoil -1, 0, +1.
inline int channel_index(int recoil) { return recoil + 1; }

/// H - i (gamma/2) sigma+ sigma-. ContractViolation for gamma < 0.
MatrixXc effective_hamiltonian(const MatrixXc& H, const MomentumGrid& grid, double gamma);
SparseMatrixXc effective_hamiltonian(const SparseMatrixXc& H, const MomentumGrid& grid,
                                     double gamma);

/// Dissipator L(rho). Recoil terms that would leave the grid raise
/// GridEdgeError when the excited population at the boundary exceeds the
/// grid's edge tolerance; below it they are dropped.
MatrixXc lindblad_apply(const DensityOperator& rho, double gamma);
/// Same on a raw matrix (hot loop of the master-equation integrator).
void lindblad_accumulate(const MomentumGrid& grid, const MatrixXc& rho, double gamma,
                         MatrixXc& out);

/// sigma-, shifted by `recoil`: (e,n) -> (g,n+recoil). Unnormalized.
VectorXc apply_lowering(const MomentumGrid& grid, const VectorXc& amps, int recoil);

/// Random source owned by one trajectory.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  /// Uniform in the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Channel index drawn with the 1/5 : 3/5 : 1/5 weights.
  int channel();

 private:
  std::mt19937_64 eng_;
};

/// splitmix64 finalizer applied to (base, index): per-trajectory seeds that
/// depend only on the trajectory index, never on scheduling.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index);

struct JumpOutcome {
  int channel;  ///< index into kJumpChannels
  SpinMomentumState state;
};

/// Draws a channel and returns the normalized post-jump state.
/// ContractViolation if the state has no excited population.
JumpOutcome sample_jump(const SpinMomentumState& psi, Rng& rng);

/// Post-jump state for a given channel index.
SpinMomentumState apply_jump(const SpinMomentumState& psi, int channel);

}  // namespace swapcool
