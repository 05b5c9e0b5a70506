#pragma once

// Laser drive: detuning waveforms and the laser-frame Hamiltonian
//   H = p^2/2m - (delta/2) sigma_z + (Omega_s/2) cos(kz) sigma_x.

#include "swapcool/core_state.hpp"

#include <Eigen/Sparse>

#include <optional>
#include <variant>

namespace swapcool {

using SparseMatrixXc = Eigen::SparseMatrix<Complex>;

struct DriveParams {
  double omega0 = 0.0;  ///< per-beam Rabi frequency
  double gamma = 0.0;   ///< linewidth

  /// Standing-wave peak Rabi frequency.
  double omega_s() const { return 2.0 * omega0; }
  /// Adiabaticity parameter for sweep rate alpha.
  double kappa(double alpha) const { return omega0 * omega0 / alpha; }
};

/// Red-to-blue (positive) or blue-to-red (negative) frequency ramp.
enum class RampSign : int { Positive = 1, Negative = -1 };

struct Sawtooth {
  double delta_s = 0.0;
  double t_s = 1.0;
  int n_sweeps = 1;
  RampSign sign = RampSign::Positive;
};

/// Single ramps separated by waits much longer than 1/gamma. The wait is not
/// simulated: remaining excited population is projected to the ground state
/// with recoil at the end of every ramp.
struct SweepWait {
  double delta_s = 0.0;
  double t_s = 1.0;
  int n_cycles = 1;
  RampSign sign = RampSign::Positive;
};

struct ConstantDetuning {
  double delta = 0.0;
  double duration = 0.0;
};

class SweepSchedule {
 public:
  using Variant = std::variant<Sawtooth, SweepWait, ConstantDetuning>;

  SweepSchedule(Sawtooth s);
  SweepSchedule(SweepWait s);
  SweepSchedule(ConstantDetuning s);

  const Variant& variant() const { return v_; }

  bool is_ramped() const { return !std::holds_alternative<ConstantDetuning>(v_); }
  bool is_sweep_wait() const { return std::holds_alternative<SweepWait>(v_); }

  /// Sweep range (0 for constant detuning).
  double delta_s() const;
  /// Ramp period; the record period for constant detuning is 1/omega_r.
  double period() const;
  /// alpha = Delta_s / T_s (0 for constant detuning).
  double alpha() const;
  /// +1 or -1.
  double sign() const;
  /// Number of ramp periods (sweeps or cycles); for constant detuning the
  /// duration measured in periods (rounded up).
  int n_periods() const;
  double duration() const;
  /// Largest |delta| reached.
  double max_abs_detuning() const;

  /// Detuning at offset u in [0, period) into a ramp (or the constant value),
  /// and its slope. The ramp is extended linearly outside [0, period).
  double ramp_detuning(double u) const;
  double ramp_slope() const;

 private:
  Variant v_;
};

/// delta(t): sawtooth -Delta_s/2 + alpha (t mod T_s) (negated for negative
/// ramps). Sweep-wait uses the same clock with the waits removed.
double detuning(const SweepSchedule& schedule, double t);

/// Laser-frame Hamiltonian at detuning delta (hbar = omega_r = 1):
/// diag(g,n) = n^2 + delta/2, diag(e,n) = n^2 - delta/2,
/// <e,n+-1|H|g,n> = Omega_0/2.
SparseMatrixXc hamiltonian(const MomentumGrid& grid, const DriveParams& params, double delta);

/// Diagonal detuning generator Z with H(delta) = H(0) + delta * Z.
Eigen::VectorXd detuning_diagonal(const MomentumGrid& grid);

/// Instantaneous eigenvalues (ascending) of H restricted to the four states
/// {|g,p>, |e,p-1>, |g,p-2>, |e,p-3>} that the particle visits in the
/// high-velocity regime.
Eigen::VectorXd dressed_eigenvalues(const DriveParams& params, double delta, int center_n);

/// Four-state eigenvalues, checking that the set lies on `grid`
/// (std::out_of_range otherwise).
Eigen::VectorXd dressed_eigenvalues(const MomentumGrid& grid, const DriveParams& params,
                                    double delta, int center_n);

/// Same on the full grid.
Eigen::VectorXd dressed_eigenvalues(const MomentumGrid& grid, const DriveParams& params,
                                    double delta);

/// Bare (uncoupled) diagonal energies of the four-state set, in set order.
Eigen::Vector4d bare_four_state_energies(double delta, int center_n);

struct DressedSweep {
  Eigen::VectorXd deltas;
  /// rows: detuning samples; columns: eigenvalue branches.
  Eigen::MatrixXd eigenvalues;
};

/// Eigenvalue curves over a detuning scan on the four-state set. With
/// follow_diabatic, branches are reordered by eigenvector overlap between
/// successive samples instead of being sorted.
DressedSweep dressed_sweep(const DriveParams& params, int center_n, const Eigen::VectorXd& deltas,
                           bool follow_diabatic = false);

/// Minimum separation between two adjacent sorted eigenvalue branches over a
/// detuning window, with the detuning where it occurs.
struct GapMinimum {
  double gap = 0.0;
  double delta = 0.0;
};
GapMinimum minimum_gap(const DriveParams& params, int center_n, int lower_branch, double delta_lo,
                       double delta_hi, int samples = 2001);

const char* to_string(RampSign sign);

}  // namespace swapcool
