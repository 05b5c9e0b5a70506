#pragma once

// Discretized Hilbert space for a two-level particle moving in 1D:
// {ground, excited} x integer momentum ladder in units of hbar k.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace swapcool {

using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

/// Natural units used everywhere: hbar = k = omega_r = 1, hence m = 1/2.
/// Frequencies (Omega_0, Delta_s, gamma, delta) are in omega_r, time in
/// 1/omega_r, momentum in hbar k and energies in hbar omega_r.
namespace units {
inline constexpr double hbar = 1.0;
inline constexpr double wavenumber = 1.0;
inline constexpr double omega_r = 1.0;
inline constexpr double mass = hbar * wavenumber * wavenumber / (2.0 * omega_r);

/// Doppler shift kv of a particle with momentum p (in hbar k).
constexpr double doppler_shift(double p) { return p / mass * wavenumber; }
/// Kinetic energy p^2/2m (p in hbar k, result in hbar omega_r).
constexpr double kinetic_energy(double p) { return p * p / (2.0 * mass); }
}  // namespace units

enum class InternalLevel : int { Ground = 0, Excited = 1 };

/// Raised when population reaches the outermost grid sites.
class GridEdgeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a state violates a normalization/Hermiticity contract.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace tolerance {
inline constexpr double normalization = 1e-8;
inline constexpr double hermiticity = 1e-10;
inline constexpr double psd_slack = 1e-8;
inline constexpr double edge = 1e-8;
}  // namespace tolerance

/// Inclusive integer momentum range [n_min, n_max].
///
/// Basis ordering: the Hamiltonian only couples (g,n) <-> (e,n+-1), so the
/// space splits into two chains ("sectors"). Sector r holds (g,n) for
/// n - n_min = r (mod 2) and (e,n) otherwise; every momentum appears exactly
/// once per sector. A basis vector is stored at index r*N + (n - n_min).
class MomentumGrid {
 public:
  MomentumGrid(int n_min, int n_max, double edge_tolerance = tolerance::edge);

  /// [-half_width, half_width].
  static MomentumGrid symmetric(int half_width, double edge_tolerance = tolerance::edge);

  /// Default grid for a run starting at n_initial under a sweep of range
  /// delta_s: n_max = |n| + max(10, ceil(delta_s/4) - |n| + 10), symmetric.
  static MomentumGrid for_sweep(int n_initial, double delta_s,
                                double edge_tolerance = tolerance::edge);

  int n_min() const { return n_min_; }
  int n_max() const { return n_max_; }
  double edge_tolerance() const { return edge_tolerance_; }
  int max_abs_momentum() const { return std::max(-n_min_, n_max_); }

  /// Number of momentum sites N.
  int size() const { return n_max_ - n_min_ + 1; }
  /// Hilbert-space dimension 2N.
  Eigen::Index dim() const { return 2 * static_cast<Eigen::Index>(size()); }

  bool contains(int n) const { return n >= n_min_ && n <= n_max_; }
  bool is_symmetric() const { return n_min_ == -n_max_; }

  int sector(InternalLevel level, int n) const {
    return ((n - n_min_) + static_cast<int>(level)) & 1;
  }
  /// Throws std::out_of_range for n outside the grid.
  Eigen::Index index(InternalLevel level, int n) const;

  int momentum_of(Eigen::Index idx) const { return n_min_ + static_cast<int>(idx % size()); }
  InternalLevel level_of(Eigen::Index idx) const;

  /// Momentum (hbar k) of every basis index.
  Eigen::VectorXd momenta() const;
  /// 1.0 on excited indices, 0.0 on ground ones.
  Eigen::VectorXd excited_mask() const;

  bool operator==(const MomentumGrid& o) const {
    return n_min_ == o.n_min_ && n_max_ == o.n_max_;
  }

 private:
  int n_min_;
  int n_max_;
  double edge_tolerance_;
};

/// Pure state: amplitudes over the grid's basis (see MomentumGrid ordering).
struct SpinMomentumState {
  MomentumGrid grid;
  VectorXc amplitudes;

  explicit SpinMomentumState(const MomentumGrid& g)
      : grid(g), amplitudes(VectorXc::Zero(g.dim())) {}

  Complex& operator()(InternalLevel level, int n) { return amplitudes(grid.index(level, n)); }
  Complex operator()(InternalLevel level, int n) const { return amplitudes(grid.index(level, n)); }

  double norm2() const { return amplitudes.squaredNorm(); }
  SpinMomentumState normalized() const;
};

/// Mixed state over the same basis.
struct DensityOperator {
  MomentumGrid grid;
  MatrixXc rho;

  explicit DensityOperator(const MomentumGrid& g)
      : grid(g), rho(MatrixXc::Zero(g.dim(), g.dim())) {}

  static DensityOperator pure(const SpinMomentumState& psi);

  double trace() const { return rho.trace().real(); }
  double purity() const { return (rho * rho).trace().real(); }
  /// Throws ContractViolation on non-Hermitian, non-unit-trace or
  /// non-PSD input (tolerances in swapcool::tolerance).
  void validate() const;
};

/// One sample of the observables tracked during a run.
struct ObservableRecord {
  double t = 0.0;
  double mean_p = 0.0;
  double mean_p2 = 0.0;
  double p_rms = 0.0;
  double P_e = 0.0;
  double xi_cum = 0.0;
  double mean_abs_p = 0.0;
  /// Cumulative emissions per recoil channel: -hbar k, 0, +hbar k.
  std::array<double, 3> jumps{0.0, 0.0, 0.0};
};

struct Expectations {
  double mean_p = 0.0;
  double mean_p2 = 0.0;
  double p_rms = 0.0;
  double P_e = 0.0;
  double mean_abs_p = 0.0;
};

SpinMomentumState make_basis_state(InternalLevel level, int n, const MomentumGrid& grid);

/// Expectation values of a normalized state (ContractViolation otherwise).
Expectations expectations(const SpinMomentumState& psi);
Expectations expectations(const DensityOperator& rho);
/// Same, normalizing by norm2 internally (used inside the jump engine).
Expectations expectations_unnormalized(const MomentumGrid& grid, const VectorXc& amplitudes);

/// Marginal momentum distribution P(n), indexed n - n_min.
Eigen::VectorXd momentum_distribution(const SpinMomentumState& psi);
Eigen::VectorXd momentum_distribution(const DensityOperator& rho);

/// Population on the two outermost sites of each edge, summed over levels.
double edge_population(const MomentumGrid& grid, const Eigen::VectorXd& populations);

const char* to_string(InternalLevel level);
InternalLevel parse_level(const std::string& s);

}  // namespace swapcool
