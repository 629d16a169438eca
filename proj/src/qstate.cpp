#include "gwi/qstate.hpp"

#include <cmath>
#include <string>

#include "gwi/error.hpp"
#include "gwi/tolerance.hpp"

namespace gwi {
namespace {

constexpr int kMaxParties = 10;

std::size_t dim_of(int n) { return std::size_t{1} << n; }

void check_parties(int n, int min_n, const char* what) {
  if (n < min_n || n > kMaxParties) {
    throw ArityError(std::string(what) + ": party count " + std::to_string(n) +
                     " outside [" + std::to_string(min_n) + ", " +
                     std::to_string(kMaxParties) + "]");
  }
}

void check_arity(std::size_t got, int n, const char* what) {
  if (got != static_cast<std::size_t>(n)) {
    throw ArityError(std::string(what) + ": expected " + std::to_string(n) +
                     " per-party entries, got " + std::to_string(got));
  }
}

Eigen::Matrix2cd pauli_x() { return (Eigen::Matrix2cd() << 0, 1, 1, 0).finished(); }
Eigen::Matrix2cd pauli_y() {
  return (Eigen::Matrix2cd() << 0, Complex(0, -1), Complex(0, 1), 0).finished();
}
Eigen::Matrix2cd pauli_z() { return (Eigen::Matrix2cd() << 1, 0, 0, -1).finished(); }

}  // namespace

Observable::Observable(const Eigen::Vector3d& bloch) : bloch_(bloch) {
  if (!bloch.allFinite() || std::abs(bloch.norm() - 1.0) > tol::kStructural) {
    throw DomainError("Observable: Bloch vector must be unit-norm and finite");
  }
}

Eigen::Matrix2cd Observable::matrix() const {
  return bloch_.x() * pauli_x() + bloch_.y() * pauli_y() + bloch_.z() * pauli_z();
}

Eigen::Matrix2cd Observable::projector(Outcome o) const {
  return 0.5 * (Eigen::Matrix2cd::Identity() + static_cast<double>(sign_of(o)) * matrix());
}

Eigen::Vector2cd Observable::eigenvector(Outcome o) const {
  // The projector has rank one; its larger column is a well-conditioned
  // multiple of the eigenvector.
  const Eigen::Matrix2cd p = projector(o);
  const int col = p.col(0).squaredNorm() >= p.col(1).squaredNorm() ? 0 : 1;
  return p.col(col).normalized();
}

PureState::PureState(int n_parties, Eigen::VectorXcd amplitudes)
    : n_(n_parties), amps_(std::move(amplitudes)) {
  check_parties(n_, 1, "PureState");
  if (static_cast<std::size_t>(amps_.size()) != dim_of(n_)) {
    throw ArityError("PureState: amplitude vector length " + std::to_string(amps_.size()) +
                     " is not 2^" + std::to_string(n_));
  }
  if (std::abs(amps_.squaredNorm() - 1.0) > tol::kStructural) {
    throw DomainError("PureState: amplitudes are not normalized");
  }
}

MixedState MixedState::from_matrix(int n_parties, Eigen::MatrixXcd rho) {
  check_parties(n_parties, 1, "MixedState");
  const auto d = static_cast<Eigen::Index>(dim_of(n_parties));
  if (rho.rows() != d || rho.cols() != d) {
    throw ArityError("MixedState: matrix is not 2^n x 2^n");
  }
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol::kStructural) {
    throw DomainError("MixedState: matrix is not Hermitian");
  }
  if (std::abs(rho.trace() - Complex(1.0)) > tol::kStructural) {
    throw DomainError("MixedState: trace differs from 1");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol::kPositivity) {
    throw DomainError("MixedState: matrix has a negative eigenvalue");
  }
  return MixedState(n_parties, std::move(rho));
}

MixedState MixedState::unchecked(int n_parties, Eigen::MatrixXcd rho) {
  return MixedState(n_parties, std::move(rho));
}

PureState make_ghz(int n) {
  check_parties(n, 2, "make_ghz");
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim_of(n)));
  a(0) = a(a.size() - 1) = M_SQRT1_2;
  return PureState(n, std::move(a));
}

PureState make_cluster4() {
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(16);
  a(0b0000) = 0.5;
  a(0b0011) = 0.5;
  a(0b1100) = 0.5;
  a(0b1111) = -0.5;
  return PureState(4, std::move(a));
}

PureState make_w(int n) {
  check_parties(n, 2, "make_w");
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim_of(n)));
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) a(static_cast<Eigen::Index>(std::size_t{1} << k)) = amp;
  return PureState(n, std::move(a));
}

PureState make_singlet() {
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(4);
  a(0b01) = M_SQRT1_2;
  a(0b10) = -M_SQRT1_2;
  return PureState(2, std::move(a));
}

PureState make_basis_state(int n, std::size_t index) {
  check_parties(n, 1, "make_basis_state");
  if (index >= dim_of(n)) throw DomainError("make_basis_state: index out of range");
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim_of(n)));
  a(static_cast<Eigen::Index>(index)) = 1.0;
  return PureState(n, std::move(a));
}

MixedState to_density(const PureState& psi) {
  return MixedState::unchecked(psi.n_parties(), psi.amplitudes() * psi.amplitudes().adjoint());
}

MixedState maximally_mixed(int n) {
  check_parties(n, 1, "maximally_mixed");
  const auto d = static_cast<Eigen::Index>(dim_of(n));
  return MixedState::unchecked(n, Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d));
}

MixedState add_white_noise(const PureState& psi, double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError("add_white_noise: visibility must lie in [0, 1]");
  const auto d = static_cast<Eigen::Index>(psi.dimension());
  Eigen::MatrixXcd rho = v * (psi.amplitudes() * psi.amplitudes().adjoint());
  rho.diagonal().array() += (1.0 - v) / static_cast<double>(d);
  return MixedState::unchecked(psi.n_parties(), std::move(rho));
}

void apply_local(Eigen::Ref<Eigen::MatrixXcd> m, int n_parties, int party,
                 const Eigen::Matrix2cd& op) {
  const std::size_t bit = basis_bit(n_parties, party);
  const std::size_t d = dim_of(n_parties);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (std::size_t i = 0; i < d; ++i) {
      if (i & bit) continue;
      const auto i0 = static_cast<Eigen::Index>(i);
      const auto i1 = static_cast<Eigen::Index>(i | bit);
      const Complex x0 = m(i0, c);
      const Complex x1 = m(i1, c);
      m(i0, c) = op(0, 0) * x0 + op(0, 1) * x1;
      m(i1, c) = op(1, 0) * x0 + op(1, 1) * x1;
    }
  }
}

double expectation(const PureState& psi, std::span<const Selector> selectors) {
  check_arity(selectors.size(), psi.n_parties(), "expectation");
  Eigen::VectorXcd phi = psi.amplitudes();
  for (int k = 0; k < psi.n_parties(); ++k) {
    if (selectors[static_cast<std::size_t>(k)]) {
      apply_local(phi, psi.n_parties(), k, selectors[static_cast<std::size_t>(k)]->matrix());
    }
  }
  return psi.amplitudes().dot(phi).real();
}

double expectation(const MixedState& rho, std::span<const Selector> selectors) {
  check_arity(selectors.size(), rho.n_parties(), "expectation");
  Eigen::MatrixXcd m = rho.matrix();
  for (int k = 0; k < rho.n_parties(); ++k) {
    if (selectors[static_cast<std::size_t>(k)]) {
      apply_local(m, rho.n_parties(), k, selectors[static_cast<std::size_t>(k)]->matrix());
    }
  }
  return m.trace().real();
}

double joint_probability(const PureState& psi, std::span<const Observable> settings,
                         std::span<const Outcome> outcomes) {
  const int n = psi.n_parties();
  check_arity(settings.size(), n, "joint_probability(settings)");
  check_arity(outcomes.size(), n, "joint_probability(outcomes)");
  // Contract <e_1 ... e_n | psi>, least significant party first.
  Eigen::VectorXcd cur = psi.amplitudes();
  for (int k = n - 1; k >= 0; --k) {
    const Eigen::Vector2cd e =
        settings[static_cast<std::size_t>(k)].eigenvector(outcomes[static_cast<std::size_t>(k)]);
    const Eigen::Index half = cur.size() / 2;
    Eigen::VectorXcd next(half);
    for (Eigen::Index j = 0; j < half; ++j) {
      next(j) = std::conj(e(0)) * cur(2 * j) + std::conj(e(1)) * cur(2 * j + 1);
    }
    cur = std::move(next);
  }
  return std::norm(cur(0));
}

double joint_probability(const MixedState& rho, std::span<const Observable> settings,
                         std::span<const Outcome> outcomes) {
  const int n = rho.n_parties();
  check_arity(settings.size(), n, "joint_probability(settings)");
  check_arity(outcomes.size(), n, "joint_probability(outcomes)");
  Eigen::MatrixXcd m = rho.matrix();
  for (int k = 0; k < n; ++k) {
    apply_local(m, n, k,
                settings[static_cast<std::size_t>(k)].projector(outcomes[static_cast<std::size_t>(k)]));
  }
  return m.trace().real();
}

}  // namespace gwi
