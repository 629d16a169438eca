#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gwi {

using Complex = std::complex<double>;

// Party 1 is the most significant bit of a computational-basis index, and
// |0> / |1> are the +1 / -1 eigenstates of sigma_z.
inline std::size_t basis_bit(int n_parties, int party) {
  return std::size_t{1} << (n_parties - 1 - party);
}

enum class Outcome : std::int8_t { Plus = 1, Minus = -1 };

inline int sign_of(Outcome o) { return static_cast<int>(o); }
inline Outcome flip(Outcome o) { return o == Outcome::Plus ? Outcome::Minus : Outcome::Plus; }

// Dichotomic qubit observable n . sigma with a unit Bloch vector n.
class Observable {
 public:
  explicit Observable(const Eigen::Vector3d& bloch);

  static Observable sigma_x() { return Observable(Eigen::Vector3d::UnitX()); }
  static Observable sigma_y() { return Observable(Eigen::Vector3d::UnitY()); }
  static Observable sigma_z() { return Observable(Eigen::Vector3d::UnitZ()); }

  const Eigen::Vector3d& bloch() const { return bloch_; }

  Eigen::Matrix2cd matrix() const;
  // (I + o n.sigma) / 2
  Eigen::Matrix2cd projector(Outcome o) const;
  // Unit eigenvector with eigenvalue o, arbitrary global phase.
  Eigen::Vector2cd eigenvector(Outcome o) const;

 private:
  Eigen::Vector3d bloch_;
};

// Per-party slot of a correlator: an observable, or std::nullopt for identity.
using Selector = std::optional<Observable>;

class PureState {
 public:
  // Throws ArityError when the length is not 2^n, DomainError when the norm
  // differs from 1 by more than the structural tolerance.
  PureState(int n_parties, Eigen::VectorXcd amplitudes);

  int n_parties() const { return n_; }
  std::size_t dimension() const { return static_cast<std::size_t>(amps_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  Complex amplitude(std::size_t index) const { return amps_(static_cast<Eigen::Index>(index)); }

 private:
  int n_;
  Eigen::VectorXcd amps_;
};

class MixedState {
 public:
  // Validates Hermiticity, unit trace and positivity. Use for user input.
  static MixedState from_matrix(int n_parties, Eigen::MatrixXcd rho);
  // Skips the positivity check; for matrices that are density matrices by
  // construction.
  static MixedState unchecked(int n_parties, Eigen::MatrixXcd rho);

  int n_parties() const { return n_; }
  std::size_t dimension() const { return static_cast<std::size_t>(rho_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return rho_; }

 private:
  MixedState(int n, Eigen::MatrixXcd rho) : n_(n), rho_(std::move(rho)) {}

  int n_;
  Eigen::MatrixXcd rho_;
};

PureState make_ghz(int n);
PureState make_cluster4();
PureState make_w(int n);
PureState make_singlet();
PureState make_basis_state(int n, std::size_t index);

MixedState to_density(const PureState& psi);
MixedState maximally_mixed(int n);
// v |psi><psi| + (1 - v) I / 2^n
MixedState add_white_noise(const PureState& psi, double v);

// Tr[rho (x)_i O_i] with O_i the selected observable or the identity.
double expectation(const PureState& psi, std::span<const Selector> selectors);
double expectation(const MixedState& rho, std::span<const Selector> selectors);

// Tr[rho (x)_i (I + o_i a_i) / 2]
double joint_probability(const PureState& psi, std::span<const Observable> settings,
                         std::span<const Outcome> outcomes);
double joint_probability(const MixedState& rho, std::span<const Observable> settings,
                         std::span<const Outcome> outcomes);

// Applies a single-qubit operator to `party` on every column of `m`
// (2^n rows). Used by the expectation routines; exposed for tests.
void apply_local(Eigen::Ref<Eigen::MatrixXcd> m, int n_parties, int party,
                 const Eigen::Matrix2cd& op);

}  // namespace gwi
