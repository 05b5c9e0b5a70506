#include "swapcool/drive.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

namespace swapcool {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

void check_ramp(double delta_s, double t_s, int n) {
  if (!(delta_s >= 0.0) || !std::isfinite(delta_s))
    throw std::invalid_argument("sweep range must be finite and non-negative");
  if (!(t_s > 0.0)) throw std::invalid_argument("sweep period must be positive");
  if (n < 0) throw std::invalid_argument("number of sweeps must be non-negative");
}

}  // namespace

SweepSchedule::SweepSchedule(Sawtooth s) : v_(s) { check_ramp(s.delta_s, s.t_s, s.n_sweeps); }
SweepSchedule::SweepSchedule(SweepWait s) : v_(s) { check_ramp(s.delta_s, s.t_s, s.n_cycles); }
SweepSchedule::SweepSchedule(ConstantDetuning s) : v_(s) {
  if (!std::isfinite(s.delta)) throw std::invalid_argument("detuning must be finite");
  if (!(s.duration >= 0.0)) throw std::invalid_argument("duration must be non-negative");
}

double SweepSchedule::delta_s() const {
  return std::visit(Overloaded{[](const Sawtooth& s) { return s.delta_s; },
                               [](const SweepWait& s) { return s.delta_s; },
                               [](const ConstantDetuning&) { return 0.0; }},
                    v_);
}

double SweepSchedule::period() const {
  return std::visit(Overloaded{[](const Sawtooth& s) { return s.t_s; },
                               [](const SweepWait& s) { return s.t_s; },
                               [](const ConstantDetuning&) { return 1.0 / units::omega_r; }},
                    v_);
}

double SweepSchedule::alpha() const { return is_ramped() ? delta_s() / period() : 0.0; }

double SweepSchedule::sign() const {
  return std::visit(
      Overloaded{[](const Sawtooth& s) { return static_cast<double>(static_cast<int>(s.sign)); },
                 [](const SweepWait& s) { return static_cast<double>(static_cast<int>(s.sign)); },
                 [](const ConstantDetuning&) { return 1.0; }},
      v_);
}

int SweepSchedule::n_periods() const {
  return std::visit(Overloaded{[](const Sawtooth& s) { return s.n_sweeps; },
                               [](const SweepWait& s) { return s.n_cycles; },
                               [this](const ConstantDetuning& s) {
                                 return static_cast<int>(std::ceil(s.duration / period() - 1e-12));
                               }},
                    v_);
}

double SweepSchedule::duration() const {
  if (const auto* c = std::get_if<ConstantDetuning>(&v_)) return c->duration;
  return n_periods() * period();
}

double SweepSchedule::max_abs_detuning() const {
  if (const auto* c = std::get_if<ConstantDetuning>(&v_)) return std::abs(c->delta);
  return 0.5 * delta_s();
}

double SweepSchedule::ramp_detuning(double u) const {
  if (const auto* c = std::get_if<ConstantDetuning>(&v_)) return c->delta;
  if (delta_s() == 0.0) return 0.0;
  return sign() * (-0.5 * delta_s() + alpha() * u);
}

double SweepSchedule::ramp_slope() const { return is_ramped() ? sign() * alpha() : 0.0; }

double detuning(const SweepSchedule& schedule, double t) {
  if (t < 0.0) throw std::invalid_argument("detuning requires t >= 0");
  if (!schedule.is_ramped()) return schedule.ramp_detuning(0.0);
  return schedule.ramp_detuning(std::fmod(t, schedule.period()));
}

Eigen::VectorXd detuning_diagonal(const MomentumGrid& grid) {
  Eigen::VectorXd z(grid.dim());
  for (Eigen::Index i = 0; i < grid.dim(); ++i)
    z(i) = grid.level_of(i) == InternalLevel::Ground ? 0.5 : -0.5;
  return z;
}

SparseMatrixXc hamiltonian(const MomentumGrid& grid, const DriveParams& params, double delta) {
  if (!std::isfinite(delta)) throw std::invalid_argument("detuning must be finite");
  const Eigen::Index D = grid.dim();
  const int N = grid.size();
  const Eigen::VectorXd z = detuning_diagonal(grid);
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(D + 4 * N));
  for (Eigen::Index i = 0; i < D; ++i) {
    const double n = grid.momentum_of(i);
    trips.emplace_back(i, i, Complex(units::kinetic_energy(n) + delta * z(i), 0.0));
  }
  // Within each sector, neighbouring momenta alternate g/e and are coupled.
  const Complex c(0.5 * params.omega0, 0.0);
  if (params.omega0 != 0.0) {
    for (int r = 0; r < 2; ++r) {
      for (int j = 0; j + 1 < N; ++j) {
        const Eigen::Index a = static_cast<Eigen::Index>(r) * N + j;
        trips.emplace_back(a, a + 1, c);
        trips.emplace_back(a + 1, a, c);
      }
    }
  }
  SparseMatrixXc H(D, D);
  H.setFromTriplets(trips.begin(), trips.end());
  return H;
}

namespace {

Eigen::Matrix4cd four_state_matrix(const DriveParams& params, double delta, int p) {
  const Eigen::Vector4d bare = bare_four_state_energies(delta, p);
  Eigen::Matrix4cd H = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i) H(i, i) = bare(i);
  for (int i = 0; i < 3; ++i) H(i, i + 1) = H(i + 1, i) = 0.5 * params.omega0;
  return H;
}

}  // namespace

Eigen::Vector4d bare_four_state_energies(double delta, int p) {
  // |g,p>, |e,p-1>, |g,p-2>, |e,p-3>
  Eigen::Vector4d e;
  for (int i = 0; i < 4; ++i) {
    const double n = p - i;
    const double z = (i % 2 == 0) ? 0.5 : -0.5;
    e(i) = units::kinetic_energy(n) + delta * z;
  }
  return e;
}

Eigen::VectorXd dressed_eigenvalues(const DriveParams& params, double delta, int center_n) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(four_state_matrix(params, delta, center_n),
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Eigen::VectorXd dressed_eigenvalues(const MomentumGrid& grid, const DriveParams& params,
                                    double delta, int center_n) {
  grid.index(InternalLevel::Ground, center_n);
  grid.index(InternalLevel::Excited, center_n - 3);
  return dressed_eigenvalues(params, delta, center_n);
}

Eigen::VectorXd dressed_eigenvalues(const MomentumGrid& grid, const DriveParams& params,
                                    double delta) {
  const MatrixXc H = MatrixXc(hamiltonian(grid, params, delta));
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

DressedSweep dressed_sweep(const DriveParams& params, int center_n, const Eigen::VectorXd& deltas,
                           bool follow_diabatic) {
  DressedSweep out;
  out.deltas = deltas;
  out.eigenvalues.resize(deltas.size(), 4);
  Eigen::Matrix4cd prev_vecs;
  for (Eigen::Index k = 0; k < deltas.size(); ++k) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(
        four_state_matrix(params, deltas(k), center_n));
    Eigen::Vector4d vals = es.eigenvalues();
    Eigen::Matrix4cd vecs = es.eigenvectors();
    if (follow_diabatic && k > 0) {
      // Greedy assignment of each previous branch to its best-overlap vector.
      Eigen::Matrix4d overlap = (prev_vecs.adjoint() * vecs).cwiseAbs();
      std::array<int, 4> assign{-1, -1, -1, -1};
      std::array<bool, 4> used{false, false, false, false};
      for (int pass = 0; pass < 4; ++pass) {
        double best = -1.0;
        int bi = 0, bj = 0;
        for (int i = 0; i < 4; ++i) {
          if (assign[i] >= 0) continue;
          for (int j = 0; j < 4; ++j) {
            if (used[j]) continue;
            if (overlap(i, j) > best) {
              best = overlap(i, j);
              bi = i;
              bj = j;
            }
          }
        }
        assign[bi] = bj;
        used[bj] = true;
      }
      Eigen::Vector4d v2;
      Eigen::Matrix4cd m2;
      for (int i = 0; i < 4; ++i) {
        v2(i) = vals(assign[i]);
        m2.col(i) = vecs.col(assign[i]);
      }
      vals = v2;
      vecs = m2;
    }
    out.eigenvalues.row(k) = vals.transpose();
    prev_vecs = vecs;
  }
  return out;
}

GapMinimum minimum_gap(const DriveParams& params, int center_n, int lower_branch, double delta_lo,
                       double delta_hi, int samples) {
  if (lower_branch < 0 || lower_branch > 2) throw std::out_of_range("branch must be in [0, 2]");
  auto gap_at = [&](double d) {
    const Eigen::VectorXd ev = dressed_eigenvalues(params, d, center_n);
    return ev(lower_branch + 1) - ev(lower_branch);
  };
  GapMinimum best{gap_at(delta_lo), delta_lo};
  const double h = (delta_hi - delta_lo) / (samples - 1);
  for (int k = 1; k < samples; ++k) {
    const double d = delta_lo + k * h;
    const double g = gap_at(d);
    if (g < best.gap) best = {g, d};
  }
  // Golden-section refinement around the coarse minimum.
  double a = best.delta - h, b = best.delta + h;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = gap_at(c), fd = gap_at(d);
  for (int it = 0; it < 100 && (b - a) > 1e-12 * (1.0 + std::abs(best.delta)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = gap_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = gap_at(d);
    }
  }
  const double mid = 0.5 * (a + b);
  const double gm = gap_at(mid);
  if (gm < best.gap) best = {gm, mid};
  return best;
}

const char* to_string(RampSign sign) { return sign == RampSign::Positive ? "positive" : "negative"; }

}  // namespace swapcool
