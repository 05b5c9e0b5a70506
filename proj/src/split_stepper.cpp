#include "swapcool/split_stepper.hpp"

#include <cmath>
#include <numbers>

namespace swapcool {

namespace {

// Yoshida triple-jump weights.
const double kW1 = 1.0 / (2.0 - std::cbrt(2.0));
const double kW0 = -std::cbrt(2.0) / (2.0 - std::cbrt(2.0));

constexpr double kBesselCut = 1e-17;
constexpr double kUnderflow = 1e-30;

// (-i)^d * t
inline Complex rotate(Complex t, int d) {
  switch (d & 3) {
    case 0: return t;
    case 1: return {t.imag(), -t.real()};
    case 2: return -t;
    default: return {-t.imag(), t.real()};
  }
}

}  // namespace

Windows Windows::of(const MomentumGrid& grid, const VectorXc& amps) {
  Windows w;
  const int N = grid.size();
  for (int r = 0; r < 2; ++r) {
    int lo = N, hi = -1;
    for (int j = 0; j < N; ++j) {
      if (amps(static_cast<Eigen::Index>(r) * N + j) != Complex(0.0, 0.0)) {
        lo = std::min(lo, j);
        hi = j;
      }
    }
    w.lo[r] = lo;
    w.hi[r] = hi;
  }
  return w;
}

Windows Windows::full(const MomentumGrid& grid) {
  Windows w;
  w.lo = {0, 0};
  w.hi = {grid.size() - 1, grid.size() - 1};
  return w;
}

SplitStepper::SplitStepper(const MomentumGrid& grid, const DriveParams& params,
                           const SweepSchedule& schedule, double h)
    : grid_(grid), params_(params), schedule_(schedule), h_(h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("step size must be positive");
  if (!(params.gamma >= 0.0)) throw ContractViolation("linewidth gamma must be non-negative");
  d_outer_ = make_diagonal(0.5 * kW1 * h);
  d_inner_ = make_diagonal(0.5 * (kW1 + kW0) * h);
  k_outer_ = make_kernel(kW1 * h);
  k_inner_ = make_kernel(kW0 * h);
  scratch_.resize(grid.size());
}

SplitStepper::Kernel SplitStepper::make_kernel(double tau) const {
  Kernel k;
  k.x = params_.omega0 * tau;
  const double ax = std::abs(k.x);
  const double sgn = k.x < 0.0 ? -1.0 : 1.0;
  if (ax == 0.0) {
    k.j = {1.0};
    return k;
  }
  for (int d = 0;; ++d) {
    const double v = std::cyl_bessel_j(static_cast<double>(d), ax);
    k.j.push_back((d & 1) ? sgn * v : v);
    if (d > ax + 1.0 && std::abs(v) < kBesselCut) break;
  }
  const int N = grid_.size();
  if (N <= 2 * k.bandwidth() + 2) {
    // Exact diagonalization of the open chain with hopping Omega_0/2.
    k.dense = true;
    const double L = N + 1.0;
    Eigen::MatrixXd S(N, N);
    Eigen::VectorXcd phase(N);
    for (int m = 1; m <= N; ++m) {
      const double theta = std::numbers::pi * m / L;
      phase(m - 1) = std::polar(1.0, -tau * params_.omega0 * std::cos(theta));
      for (int j = 0; j < N; ++j) S(j, m - 1) = std::sqrt(2.0 / L) * std::sin(theta * (j + 1));
    }
    k.u_dense = S.cast<Complex>() * phase.asDiagonal() * S.transpose().cast<Complex>();
  }
  return k;
}

SplitStepper::Diagonal SplitStepper::make_diagonal(double tau) const {
  Diagonal d;
  d.tau = tau;
  const int N = grid_.size();
  d.kinetic.resize(N);
  for (int j = 0; j < N; ++j) {
    const double n = grid_.n_min() + j;
    d.kinetic(j) = std::polar(1.0, -units::kinetic_energy(n) * tau);
  }
  return d;
}

void SplitStepper::apply_diagonal(VectorXc& amps, const Windows& w, const Diagonal& d,
                                  double u) const {
  const double tau = d.tau;
  const double theta = schedule_.ramp_detuning(u) * tau + 0.5 * schedule_.ramp_slope() * tau * tau;
  const Complex pg = std::polar(1.0, -0.5 * theta);
  const Complex pe = std::polar(std::exp(-0.5 * params_.gamma * tau), 0.5 * theta);
  const int N = grid_.size();
  for (int r = 0; r < 2; ++r) {
    Complex* a = amps.data() + static_cast<std::ptrdiff_t>(r) * N;
    for (int j = w.lo[r]; j <= w.hi[r]; ++j) {
      const Complex lev = ((j & 1) == r) ? pg : pe;
      a[j] = (a[j] * d.kinetic(j)) * lev;
    }
  }
}

void SplitStepper::apply_hopping(VectorXc& amps, Windows& w, const Kernel& k) {
  if (k.bandwidth() == 0) return;
  const int N = grid_.size();
  for (int r = 0; r < 2; ++r) {
    if (w.lo[r] > w.hi[r]) continue;
    Complex* a = amps.data() + static_cast<std::ptrdiff_t>(r) * N;
    if (k.dense) {
      Eigen::Map<VectorXc> sec(a, N);
      scratch_ = k.u_dense * sec;
      sec = scratch_;
      w.lo[r] = 0;
      w.hi[r] = N - 1;
      continue;
    }
    const int B = k.bandwidth();
    const int lo = std::max(0, w.lo[r] - B);
    const int hi = std::min(N - 1, w.hi[r] + B);
    const double* J = k.j.data();
    // Interior sites: the kernel fits inside the chain. Terms are grouped by
    // d mod 4 so the (-i)^d phase is applied once per group.
    const int in_lo = std::max(lo, B);
    const int in_hi = std::min(hi, N - 1 - B);
    for (int j = in_lo; j <= in_hi; ++j) {
      Complex s0(0.0, 0.0), s1(0.0, 0.0), s2(0.0, 0.0), s3(0.0, 0.0);
      int d = 1;
      for (; d + 3 <= B; d += 4) {
        s1 += J[d] * (a[j - d] + a[j + d]);
        s2 += J[d + 1] * (a[j - d - 1] + a[j + d + 1]);
        s3 += J[d + 2] * (a[j - d - 2] + a[j + d + 2]);
        s0 += J[d + 3] * (a[j - d - 3] + a[j + d + 3]);
      }
      for (; d <= B; ++d) {
        const Complex t = J[d] * (a[j - d] + a[j + d]);
        switch (d & 3) {
          case 0: s0 += t; break;
          case 1: s1 += t; break;
          case 2: s2 += t; break;
          default: s3 += t; break;
        }
      }
      scratch_(j) = J[0] * a[j] + s0 + rotate(s1, 1) - s2 + rotate(s3, 3);
    }
    auto at = [&](int i) { return (i < 0 || i >= N) ? Complex(0.0, 0.0) : a[i]; };
    auto boundary = [&](int j) {
      Complex acc = J[0] * a[j];
      for (int d = 1; d <= B; ++d) acc += rotate(J[d] * (at(j - d) + at(j + d)), d);
      // Reflections at the open ends of the chain.
      Complex left(0.0, 0.0), right(0.0, 0.0);
      for (int q = 0; j + q + 2 <= B; ++q) left += rotate(J[j + q + 2] * a[q], j + q + 2);
      const int jj = N - 1 - j;
      for (int q = 0; jj + q + 2 <= B; ++q)
        right += rotate(J[jj + q + 2] * a[N - 1 - q], jj + q + 2);
      scratch_(j) = acc - (left + right);
    };
    if (in_lo > in_hi) {
      for (int j = lo; j <= hi; ++j) boundary(j);
    } else {
      for (int j = lo; j < in_lo; ++j) boundary(j);
      for (int j = in_hi + 1; j <= hi; ++j) boundary(j);
    }
    for (int j = lo; j <= hi; ++j) a[j] = scratch_(j);
    w.lo[r] = lo;
    w.hi[r] = hi;
  }
  trim(amps, w);
}

void SplitStepper::trim(VectorXc& amps, Windows& w) const {
  const int N = grid_.size();
  for (int r = 0; r < 2; ++r) {
    Complex* a = amps.data() + static_cast<std::ptrdiff_t>(r) * N;
    while (w.lo[r] <= w.hi[r] && std::norm(a[w.lo[r]]) < kUnderflow) a[w.lo[r]++] = 0.0;
    while (w.hi[r] >= w.lo[r] && std::norm(a[w.hi[r]]) < kUnderflow) a[w.hi[r]--] = 0.0;
  }
}

void SplitStepper::yoshida(VectorXc& amps, Windows& w, double u, double tau,
                           const Diagonal* d_outer, const Diagonal* d_inner,
                           const Kernel* k_outer, const Kernel* k_inner) {
  const double a = kW1 * tau;
  const double b = kW0 * tau;
  apply_diagonal(amps, w, *d_outer, u);
  apply_hopping(amps, w, *k_outer);
  apply_diagonal(amps, w, *d_inner, u + 0.5 * a);
  apply_hopping(amps, w, *k_inner);
  apply_diagonal(amps, w, *d_inner, u + a + 0.5 * b);
  apply_hopping(amps, w, *k_outer);
  apply_diagonal(amps, w, *d_outer, u + tau - 0.5 * a);
  if (edge_checks_) check_edges(amps, w);
}

void SplitStepper::step(VectorXc& amps, Windows& w, double u) {
  yoshida(amps, w, u, h_, &d_outer_, &d_inner_, &k_outer_, &k_inner_);
}

void SplitStepper::step(VectorXc& amps, Windows& w, double u, double tau) {
  if (tau == h_) return step(amps, w, u);
  const Diagonal d_outer = make_diagonal(0.5 * kW1 * tau);
  const Diagonal d_inner = make_diagonal(0.5 * (kW1 + kW0) * tau);
  const Kernel k_outer = make_kernel(kW1 * tau);
  const Kernel k_inner = make_kernel(kW0 * tau);
  yoshida(amps, w, u, tau, &d_outer, &d_inner, &k_outer, &k_inner);
}

double SplitStepper::norm2(const VectorXc& amps, const Windows& w) const {
  const int N = grid_.size();
  double s = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int j = w.lo[r]; j <= w.hi[r]; ++j) s += std::norm(amps(static_cast<Eigen::Index>(r) * N + j));
  return s;
}

void SplitStepper::check_edges(const VectorXc& amps, const Windows& w) const {
  const int N = grid_.size();
  bool near = false;
  for (int r = 0; r < 2; ++r)
    if (w.lo[r] <= w.hi[r] && (w.lo[r] <= 1 || w.hi[r] >= N - 2)) near = true;
  if (!near) return;
  double edge = 0.0;
  for (int r = 0; r < 2; ++r) {
    const Eigen::Index base = static_cast<Eigen::Index>(r) * N;
    edge += std::norm(amps(base)) + std::norm(amps(base + 1)) + std::norm(amps(base + N - 2)) +
            std::norm(amps(base + N - 1));
  }
  const double n2 = norm2(amps, w);
  if (n2 > 0.0 && edge / n2 > grid_.edge_tolerance())
    throw GridEdgeError("population " + std::to_string(edge / n2) +
                        " reached the edge of the momentum grid [" +
                        std::to_string(grid_.n_min()) + ", " + std::to_string(grid_.n_max()) + "]");
}

}  // namespace swapcool
