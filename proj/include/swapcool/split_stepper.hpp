#pragma once

// Fixed-step propagator for pure states under H_eff(t) = H(delta(t)) - i gamma/2 P_e.
//
// H splits into a diagonal part (kinetic + detuning + decay), whose flow is
// exact, and the hopping part, which acts as a uniform open chain inside each
// sector. The hopping flow is applied exactly through its Bessel-function
// kernel, truncated where |J_d| < 1e-17. Strang steps are composed into a
// 4th-order scheme (Yoshida triple jump). Amplitudes are tracked only on a
// window of sites per sector that grows with the kernel and is trimmed where
// the amplitude underflows.

#include "swapcool/drive.hpp"

#include <array>
#include <vector>

namespace swapcool {

/// Occupied site range [lo, hi] per sector (empty when lo > hi).
struct Windows {
  std::array<int, 2> lo{0, 0};
  std::array<int, 2> hi{-1, -1};

  static Windows of(const MomentumGrid& grid, const VectorXc& amps);
  static Windows full(const MomentumGrid& grid);
};

class SplitStepper {
 public:
  /// h: the regular step length. The ramp offset u passed to step() is the
  /// time since the start of the current period.
  SplitStepper(const MomentumGrid& grid, const DriveParams& params, const SweepSchedule& schedule,
               double h);

  double h() const { return h_; }
  const MomentumGrid& grid() const { return grid_; }

  /// One regular step from ramp offset u.
  void step(VectorXc& amps, Windows& w, double u);
  /// One step of arbitrary length tau (used to locate jump times).
  void step(VectorXc& amps, Windows& w, double u, double tau);

  /// Squared norm over the occupied windows.
  double norm2(const VectorXc& amps, const Windows& w) const;

  /// Edge checks after every step (on by default).
  void set_edge_checks(bool on) { edge_checks_ = on; }

  /// GridEdgeError if the normalized population on the two outermost sites
  /// of either edge exceeds the grid's edge tolerance.
  void check_edges(const VectorXc& amps, const Windows& w) const;

 private:
  struct Kernel {
    double x = 0.0;             // Omega_0 * tau
    std::vector<double> j;      // J_d(x), d = 0..B
    bool dense = false;         // small grids: exact dense propagator
    MatrixXc u_dense;           // per-sector N x N matrix
    int bandwidth() const { return static_cast<int>(j.size()) - 1; }
  };
  struct Diagonal {
    double tau = 0.0;
    VectorXc kinetic;  // exp(-i n^2 tau), indexed by site
  };

  Kernel make_kernel(double tau) const;
  Diagonal make_diagonal(double tau) const;

  void apply_diagonal(VectorXc& amps, const Windows& w, const Diagonal& d, double u) const;
  void apply_hopping(VectorXc& amps, Windows& w, const Kernel& k);
  void trim(VectorXc& amps, Windows& w) const;
  void yoshida(VectorXc& amps, Windows& w, double u, double tau, const Diagonal* d_outer,
               const Diagonal* d_inner, const Kernel* k_outer, const Kernel* k_inner);

  MomentumGrid grid_;
  DriveParams params_;
  SweepSchedule schedule_;
  double h_;
  Diagonal d_outer_, d_inner_;
  Kernel k_outer_, k_inner_;
  VectorXc scratch_;
  bool edge_checks_ = true;
};

}  // namespace swapcool
