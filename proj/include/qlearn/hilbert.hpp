#pragma once

// Dense complex linear algebra over a truncated energy eigenbasis.
//
// Units: hbar = m = 1 throughout. Entropies are in nats.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qlearn/errors.hpp"

namespace qlearn {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Eigenvalues at or below this magnitude are exact zeros for entropies and logarithms.
inline constexpr double kSupportCutoff = 1e-12;
inline constexpr double kHermitianTol = 1e-12;

enum class Parity { Even, Odd };
enum class BasisKind { HoFock, PtBound };

std::string_view to_string(Parity p);
std::string_view to_string(BasisKind k);

/// Truncated energy eigenbasis: sorted energies and a parity label per level.
class Basis {
 public:
  Basis(BasisKind kind, std::vector<double> energies, std::vector<Parity> parity);

  [[nodiscard]] BasisKind kind() const { return kind_; }
  [[nodiscard]] std::size_t dimension() const { return energies_.size(); }
  [[nodiscard]] std::span<const double> energies() const { return energies_; }
  [[nodiscard]] std::span<const Parity> parity() const { return parity_; }
  [[nodiscard]] double energy(std::size_t n) const { return energies_.at(n); }

  /// max |E_m - E_n|, the fastest Bohr frequency of the basis.
  [[nodiscard]] double bohr_spread() const { return energies_.back() - energies_.front(); }

 private:
  BasisKind kind_;
  std::vector<double> energies_;
  std::vector<Parity> parity_;
};

/// Complex amplitude vector. Normalized to 1e-10 unless constructed as unnormalized.
class StateVector {
 public:
  struct Unnormalized {};

  explicit StateVector(CVector amplitudes);
  StateVector(CVector amplitudes, Unnormalized);

  /// Basis state |n> in a space of the given dimension.
  static StateVector basis_state(std::size_t dimension, std::size_t n);

  [[nodiscard]] const CVector& amplitudes() const { return amps_; }
  [[nodiscard]] std::size_t dimension() const { return static_cast<std::size_t>(amps_.size()); }
  [[nodiscard]] bool normalized() const { return normalized_; }
  [[nodiscard]] double squared_norm() const { return amps_.squaredNorm(); }

 private:
  CVector amps_;
  bool normalized_ = true;
};

/// Square complex matrix with an optional (checked) Hermitian flag.
class Operator {
 public:
  explicit Operator(CMatrix entries, bool hermitian = false);

  [[nodiscard]] const CMatrix& matrix() const { return m_; }
  [[nodiscard]] bool hermitian() const { return hermitian_; }
  [[nodiscard]] std::size_t dimension() const { return static_cast<std::size_t>(m_.rows()); }

 private:
  CMatrix m_;
  bool hermitian_;
};

/// Hermitian, positive semidefinite (to -1e-10), unit trace within `trace_tolerance`.
class DensityOperator {
 public:
  explicit DensityOperator(CMatrix entries, double trace_tolerance = 1e-12);

  static DensityOperator pure(const StateVector& psi);

  [[nodiscard]] const CMatrix& matrix() const { return m_; }
  [[nodiscard]] std::size_t dimension() const { return static_cast<std::size_t>(m_.rows()); }
  [[nodiscard]] double trace() const { return m_.trace().real(); }
  [[nodiscard]] double purity() const;

 private:
  CMatrix m_;
};

/// Orthogonal projector: Hermitian and idempotent to 1e-12.
class Projector {
 public:
  explicit Projector(CMatrix entries);

  /// Diagonal projector onto the listed basis levels.
  static Projector diagonal(std::size_t dimension, std::span<const std::size_t> levels);

  [[nodiscard]] const CMatrix& matrix() const { return m_; }
  [[nodiscard]] std::size_t dimension() const { return static_cast<std::size_t>(m_.rows()); }

 private:
  CMatrix m_;
};

enum class SchattenP { One, Two, Inf };

std::string_view to_string(SchattenP p);

// ---- operations -----------------------------------------------------------

/// max_ij |A - A^dagger|_ij
double hermiticity_defect(const CMatrix& a);

/// (A + A^dagger) / 2
CMatrix hermitian_part(const CMatrix& a);

/// |psi><psi|
CMatrix outer(const CVector& psi);

/// -sum lambda ln lambda over eigenvalues above the cutoff. Accepts unnormalized input.
/// Throws InvariantError for non-Hermitian input, NegativityError for eigenvalues below
/// -support_cutoff.
double von_neumann_entropy(const CMatrix& a, double support_cutoff = kSupportCutoff);

/// (tr |A|^p)^(1/p) for p in {1, 2, inf}.
double schatten_norm(const CMatrix& a, SchattenP p);

/// Pi rho Pi, no renormalization.
Operator project(const DensityOperator& rho, const Projector& pi);

/// Hermitian eigendecomposition.
struct HermitianEigen {
  RVector values;   // ascending
  CMatrix vectors;  // columns
};
HermitianEigen hermitian_eigen(const CMatrix& a);

/// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 of two trace-normalized states.
double uhlmann_fidelity(const CMatrix& rho, const CMatrix& sigma);

}  // namespace qlearn
