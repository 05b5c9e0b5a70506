#include "swapcool/core_state.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace swapcool {

MomentumGrid::MomentumGrid(int n_min, int n_max, double edge_tolerance)
    : n_min_(n_min), n_max_(n_max), edge_tolerance_(edge_tolerance) {
  if (!(n_min < 0 && 0 < n_max)) {
    std::ostringstream msg;
    msg << "momentum grid must satisfy n_min < 0 < n_max, got [" << n_min << ", " << n_max << "]";
    throw std::invalid_argument(msg.str());
  }
  if (!(edge_tolerance > 0.0)) throw std::invalid_argument("edge tolerance must be positive");
}

MomentumGrid MomentumGrid::symmetric(int half_width, double edge_tolerance) {
  return MomentumGrid(-half_width, half_width, edge_tolerance);
}

MomentumGrid MomentumGrid::for_sweep(int n_initial, double delta_s, double edge_tolerance) {
  const int a = std::abs(n_initial);
  const int reach = static_cast<int>(std::ceil(delta_s / (4.0 * units::omega_r)));
  return symmetric(a + std::max(10, reach - a + 10), edge_tolerance);
}

Eigen::Index MomentumGrid::index(InternalLevel level, int n) const {
  if (!contains(n)) {
    std::ostringstream msg;
    msg << "momentum " << n << " outside grid [" << n_min_ << ", " << n_max_ << "]";
    throw std::out_of_range(msg.str());
  }
  return static_cast<Eigen::Index>(sector(level, n)) * size() + (n - n_min_);
}

InternalLevel MomentumGrid::level_of(Eigen::Index idx) const {
  const int r = static_cast<int>(idx / size());
  const int j = static_cast<int>(idx % size());
  return ((j & 1) == r) ? InternalLevel::Ground : InternalLevel::Excited;
}

Eigen::VectorXd MomentumGrid::momenta() const {
  Eigen::VectorXd p(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) p(i) = momentum_of(i);
  return p;
}

Eigen::VectorXd MomentumGrid::excited_mask() const {
  Eigen::VectorXd m(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) m(i) = level_of(i) == InternalLevel::Excited ? 1.0 : 0.0;
  return m;
}

SpinMomentumState SpinMomentumState::normalized() const {
  const double n2 = norm2();
  if (!(n2 > 0.0)) throw ContractViolation("cannot normalize a zero state");
  SpinMomentumState out(*this);
  out.amplitudes /= std::sqrt(n2);
  return out;
}

DensityOperator DensityOperator::pure(const SpinMomentumState& psi) {
  DensityOperator d(psi.grid);
  d.rho = psi.amplitudes * psi.amplitudes.adjoint();
  return d;
}

void DensityOperator::validate() const {
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tolerance::hermiticity)
    throw ContractViolation("density operator is not Hermitian (max |rho - rho^H| = " +
                            std::to_string(herm) + ")");
  if (std::abs(trace() - 1.0) > tolerance::normalization)
    throw ContractViolation("density operator trace " + std::to_string(trace()) + " != 1");
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tolerance::psd_slack)
    throw ContractViolation("density operator has a negative eigenvalue " +
                            std::to_string(es.eigenvalues().minCoeff()));
}

SpinMomentumState make_basis_state(InternalLevel level, int n, const MomentumGrid& grid) {
  SpinMomentumState psi(grid);
  psi(level, n) = 1.0;
  return psi;
}

namespace {

Expectations from_populations(const MomentumGrid& grid, const Eigen::VectorXd& pop, double norm) {
  const Eigen::VectorXd p = grid.momenta();
  Expectations e;
  e.mean_p = pop.dot(p) / norm;
  e.mean_p2 = pop.dot(p.cwiseProduct(p)) / norm;
  e.p_rms = std::sqrt(e.mean_p2);
  e.P_e = pop.dot(grid.excited_mask()) / norm;
  e.mean_abs_p = pop.dot(p.cwiseAbs()) / norm;
  return e;
}

}  // namespace

Expectations expectations(const SpinMomentumState& psi) {
  const double n2 = psi.norm2();
  if (std::abs(n2 - 1.0) > tolerance::normalization)
    throw ContractViolation("expectations require a normalized state (norm^2 = " +
                            std::to_string(n2) + ")");
  return from_populations(psi.grid, psi.amplitudes.cwiseAbs2(), 1.0);
}

Expectations expectations(const DensityOperator& rho) {
  if (std::abs(rho.trace() - 1.0) > tolerance::normalization)
    throw ContractViolation("expectations require unit trace");
  return from_populations(rho.grid, rho.rho.diagonal().real(), 1.0);
}

Expectations expectations_unnormalized(const MomentumGrid& grid, const VectorXc& amplitudes) {
  const Eigen::VectorXd pop = amplitudes.cwiseAbs2();
  return from_populations(grid, pop, pop.sum());
}

namespace {

Eigen::VectorXd marginal(const MomentumGrid& grid, const Eigen::VectorXd& pop) {
  const int N = grid.size();
  return pop.head(N) + pop.tail(N);
}

}  // namespace

Eigen::VectorXd momentum_distribution(const SpinMomentumState& psi) {
  if (std::abs(psi.norm2() - 1.0) > tolerance::normalization)
    throw ContractViolation("momentum distribution requires a normalized state");
  return marginal(psi.grid, psi.amplitudes.cwiseAbs2());
}

Eigen::VectorXd momentum_distribution(const DensityOperator& rho) {
  if (std::abs(rho.trace() - 1.0) > tolerance::normalization)
    throw ContractViolation("momentum distribution requires unit trace");
  return marginal(rho.grid, rho.rho.diagonal().real());
}

double edge_population(const MomentumGrid& grid, const Eigen::VectorXd& pop) {
  const int N = grid.size();
  double s = 0.0;
  for (int r = 0; r < 2; ++r) {
    const Eigen::Index base = static_cast<Eigen::Index>(r) * N;
    s += pop(base) + pop(base + 1) + pop(base + N - 2) + pop(base + N - 1);
  }
  return s;
}

const char* to_string(InternalLevel level) {
  return level == InternalLevel::Ground ? "g" : "e";
}

InternalLevel parse_level(const std::string& s) {
  if (s == "g" || s == "ground" || s == "Ground") return InternalLevel::Ground;
  if (s == "e" || s == "excited" || s == "Excited") return InternalLevel::Excited;
  throw std::invalid_argument("unknown internal level '" + s + "'");
}

}  // namespace swapcool
