#include "qlearn/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qlearn {

std::string_view to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

std::string_view to_string(BasisKind k) {
  return k == BasisKind::HoFock ? "ho-fock" : "pt-bound";
}

std::string_view to_string(SchattenP p) {
  switch (p) {
    case SchattenP::One:
      return "1";
    case SchattenP::Two:
      return "2";
    case SchattenP::Inf:
      return "inf";
  }
  return "?";
}

namespace {

double max_abs(const CMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

// Absolute tolerance for "Hermitian", scaled for operators with large entries (energies).
double hermitian_tolerance(const CMatrix& a) { return kHermitianTol * std::max(1.0, max_abs(a)); }

void require_square(const CMatrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    std::ostringstream os;
    os << what << ": matrix is " << a.rows() << "x" << a.cols() << ", expected square";
    throw InvariantError(os.str());
  }
}

}  // namespace

// ---- Basis ----------------------------------------------------------------

Basis::Basis(BasisKind kind, std::vector<double> energies, std::vector<Parity> parity)
    : kind_(kind), energies_(std::move(energies)), parity_(std::move(parity)) {
  if (energies_.size() < 2) throw InvariantError("Basis: dimension must be at least 2");
  if (parity_.size() != energies_.size())
    throw InvariantError("Basis: parity labels and energies differ in length");
  if (!std::is_sorted(energies_.begin(), energies_.end()))
    throw InvariantError("Basis: energies must be sorted ascending");
  for (std::size_t n = 1; n < parity_.size(); ++n) {
    if (parity_[n] == parity_[n - 1])
      throw InvariantError("Basis: parity labels must alternate");
  }
}

// ---- StateVector ----------------------------------------------------------

StateVector::StateVector(CVector amplitudes) : amps_(std::move(amplitudes)) {
  const double n2 = amps_.squaredNorm();
  if (std::abs(n2 - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "StateVector: squared norm " << n2 << " differs from 1";
    throw InvariantError(os.str());
  }
}

StateVector::StateVector(CVector amplitudes, Unnormalized)
    : amps_(std::move(amplitudes)), normalized_(false) {}

StateVector StateVector::basis_state(std::size_t dimension, std::size_t n) {
  if (n >= dimension) throw ConfigError("basis_state: level outside the basis");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dimension));
  v(static_cast<Eigen::Index>(n)) = 1.0;
  return StateVector(std::move(v));
}

// ---- Operator -------------------------------------------------------------

Operator::Operator(CMatrix entries, bool hermitian) : m_(std::move(entries)), hermitian_(hermitian) {
  require_square(m_, "Operator");
  if (hermitian_ && hermiticity_defect(m_) > hermitian_tolerance(m_))
    throw InvariantError("Operator: flagged Hermitian but A != A^dagger");
}

// ---- DensityOperator ------------------------------------------------------

DensityOperator::DensityOperator(CMatrix entries, double trace_tolerance) : m_(std::move(entries)) {
  require_square(m_, "DensityOperator");
  if (hermiticity_defect(m_) > kHermitianTol)
    throw InvariantError("DensityOperator: not Hermitian");
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > trace_tolerance) {
    std::ostringstream os;
    os << "DensityOperator: trace " << tr << " outside tolerance " << trace_tolerance;
    throw InvariantError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().size() > 0 && es.eigenvalues()(0) < -1e-10)
    throw NegativityError("DensityOperator: negative eigenvalue");
}

DensityOperator DensityOperator::pure(const StateVector& psi) {
  return DensityOperator(outer(psi.amplitudes()), 1e-10);
}

double DensityOperator::purity() const { return (m_ * m_).trace().real(); }

// ---- Projector ------------------------------------------------------------

Projector::Projector(CMatrix entries) : m_(std::move(entries)) {
  require_square(m_, "Projector");
  if (hermiticity_defect(m_) > kHermitianTol) throw InvariantError("Projector: not Hermitian");
  if ((m_ * m_ - m_).norm() > 1e-12) throw InvariantError("Projector: not idempotent");
}

Projector Projector::diagonal(std::size_t dimension, std::span<const std::size_t> levels) {
  CMatrix p = CMatrix::Zero(static_cast<Eigen::Index>(dimension), static_cast<Eigen::Index>(dimension));
  for (std::size_t n : levels) {
    if (n >= dimension) throw InvariantError("Projector: level outside the basis");
    p(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = 1.0;
  }
  return Projector(std::move(p));
}

// ---- free functions -------------------------------------------------------

double hermiticity_defect(const CMatrix& a) { return max_abs(a - a.adjoint()); }

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

CMatrix outer(const CVector& psi) { return psi * psi.adjoint(); }

HermitianEigen hermitian_eigen(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
  if (es.info() != Eigen::Success) throw InvariantError("hermitian_eigen: solver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

double von_neumann_entropy(const CMatrix& a, double support_cutoff) {
  require_square(a, "von_neumann_entropy");
  if (hermiticity_defect(a) > hermitian_tolerance(a))
    throw InvariantError("von_neumann_entropy: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam < -support_cutoff) {
      std::ostringstream os;
      os << "von_neumann_entropy: eigenvalue " << lam << " below -" << support_cutoff;
      throw NegativityError(os.str());
    }
    if (lam > support_cutoff) s -= lam * std::log(lam);
  }
  return s;
}

double schatten_norm(const CMatrix& a, SchattenP p) {
  require_square(a, "schatten_norm");
  switch (p) {
    case SchattenP::Two:
      return a.norm();
    case SchattenP::One:
    case SchattenP::Inf: {
      Eigen::JacobiSVD<CMatrix> svd(a);
      const RVector& sv = svd.singularValues();
      if (sv.size() == 0) return 0.0;
      return p == SchattenP::One ? sv.sum() : sv.maxCoeff();
    }
  }
  return 0.0;
}

Operator project(const DensityOperator& rho, const Projector& pi) {
  if (rho.dimension() != pi.dimension()) throw InvariantError("project: dimension mismatch");
  CMatrix out = pi.matrix() * rho.matrix() * pi.matrix();
  return Operator(hermitian_part(out), true);
}

double uhlmann_fidelity(const CMatrix& rho, const CMatrix& sigma) {
  const CMatrix r = rho / rho.trace().real();
  const CMatrix s = sigma / sigma.trace().real();
  const HermitianEigen er = hermitian_eigen(r);
  const RVector sqrt_vals = er.values.cwiseMax(0.0).cwiseSqrt();
  const CMatrix sqrt_r = er.vectors * sqrt_vals.asDiagonal() * er.vectors.adjoint();
  const CMatrix inner = hermitian_part(sqrt_r * s * sqrt_r);
  Eigen::SelfAdjointEigenSolver<CMatrix> ei(inner, Eigen::EigenvaluesOnly);
  const double tr = ei.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return tr * tr;
}

}  // namespace qlearn
