#include "qlearn/information.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qlearn {

std::string_view to_string(EntropyConvention c) {
  return c == EntropyConvention::Unnormalized ? "unnormalized" : "normalized";
}

EntropyConvention entropy_convention_from_string(std::string_view s) {
  if (s == "unnormalized") return EntropyConvention::Unnormalized;
  if (s == "normalized") return EntropyConvention::Normalized;
  throw ConfigError("unknown entropy convention '" + std::string(s) + "'");
}

std::string_view to_string(RateStatus s) {
  switch (s) {
    case RateStatus::Ok:
      return "ok";
    case RateStatus::Undefined:
      return "undefined";
    case RateStatus::Divergent:
      return "divergent";
  }
  return "?";
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Exact:
      return "exact";
    case Method::Linear:
      return "lin";
    case Method::Oracle:
      return "oracle";
  }
  return "?";
}

Method method_from_string(std::string_view s) {
  if (s == "exact") return Method::Exact;
  if (s == "lin" || s == "linear") return Method::Linear;
  if (s == "oracle") return Method::Oracle;
  throw ConfigError("unknown method '" + std::string(s) + "'");
}

// ---- MeasurementSetup -----------------------------------------------------

MeasurementSetup::MeasurementSetup(std::vector<Projector> projectors, std::vector<std::string> labels,
                                   EntropyConvention convention)
    : projectors_(std::move(projectors)), labels_(std::move(labels)), convention_(convention) {
  if (projectors_.empty()) throw InvariantError("MeasurementSetup: no projectors");
  if (labels_.size() != projectors_.size()) throw InvariantError("MeasurementSetup: one label per projector");
  const std::size_t dim = projectors_.front().dimension();
  CMatrix sum = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t a = 0; a < projectors_.size(); ++a) {
    if (projectors_[a].dimension() != dim) throw InvariantError("MeasurementSetup: dimension mismatch");
    sum += projectors_[a].matrix();
    for (std::size_t b = a + 1; b < projectors_.size(); ++b) {
      const double overlap = (projectors_[a].matrix() * projectors_[b].matrix()).cwiseAbs().maxCoeff();
      if (overlap > 1e-12) throw InvariantError("MeasurementSetup: projectors are not orthogonal");
    }
  }
  const double defect =
      (sum - CMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))).cwiseAbs().maxCoeff();
  if (defect > 1e-12) throw InvariantError("MeasurementSetup: projectors do not sum to the identity");
}

MeasurementSetup MeasurementSetup::with_convention(EntropyConvention c) const {
  MeasurementSetup copy = *this;
  copy.convention_ = c;
  return copy;
}

MeasurementSetup parity_projectors(const Basis& basis, EntropyConvention convention) {
  std::vector<std::size_t> even, odd;
  for (std::size_t n = 0; n < basis.dimension(); ++n)
    (basis.parity()[n] == Parity::Even ? even : odd).push_back(n);
  std::vector<Projector> ps;
  ps.push_back(Projector::diagonal(basis.dimension(), even));
  ps.push_back(Projector::diagonal(basis.dimension(), odd));
  return MeasurementSetup(std::move(ps), {"e", "o"}, convention);
}

// ---- entropies ------------------------------------------------------------

std::vector<OutcomeEntropy> outcome_entropies(const CMatrix& rho, const MeasurementSetup& setup,
                                              double support_cutoff) {
  std::vector<OutcomeEntropy> out;
  out.reserve(setup.size());
  for (const Projector& pi : setup.projectors()) {
    const CMatrix block = hermitian_part(pi.matrix() * rho * pi.matrix());
    OutcomeEntropy oe;
    oe.probability = (pi.matrix() * rho).trace().real();
    if (oe.probability > support_cutoff) {
      if (setup.convention() == EntropyConvention::Unnormalized)
        oe.entropy = von_neumann_entropy(block, support_cutoff);
      else
        oe.entropy = von_neumann_entropy(block / oe.probability, support_cutoff);
    }
    out.push_back(oe);
  }
  return out;
}

double accessible_entropy_term(const CMatrix& rho, const MeasurementSetup& setup, double support_cutoff) {
  double acc = 0.0;
  for (const OutcomeEntropy& oe : outcome_entropies(rho, setup, support_cutoff)) acc += oe.probability * oe.entropy;
  return acc;
}

double holevo_chi(const DensityOperator& rho, const MeasurementSetup& setup) {
  if (rho.dimension() != setup.dimension()) throw InvariantError("holevo_chi: dimension mismatch");
  return von_neumann_entropy(rho.matrix()) - accessible_entropy_term(rho.matrix(), setup);
}

double delta_chi(const DensityOperator& rho0, const DensityOperator& rho_tau, const MeasurementSetup& setup) {
  if (rho0.dimension() != setup.dimension() || rho_tau.dimension() != setup.dimension())
    throw InvariantError("delta_chi: dimension mismatch");
  return -accessible_entropy_term(rho_tau.matrix(), setup) + accessible_entropy_term(rho0.matrix(), setup);
}

// ---- speed limit ----------------------------------------------------------

double overlap_fidelity(const StateVector& psi0, const CMatrix& sigma) {
  const CVector& v = psi0.amplitudes();
  return v.dot(sigma * v).real();
}

double qsl_time_from_fidelity(double fidelity, double e_tau) {
  if (!(e_tau > 0.0)) {
    std::ostringstream os;
    os << "qsl_time: E_tau = " << e_tau << " is not positive";
    throw DegenerateDynamicsError(os.str());
  }
  return (1.0 - fidelity) / (2.0 * e_tau);
}

double qsl_time(const StateVector& psi0, const DensityOperator& rho_tau, double e_tau) {
  return qsl_time_from_fidelity(overlap_fidelity(psi0, rho_tau.matrix()), e_tau);
}

double e_tau(const std::function<CMatrix(double)>& rho_at, const std::function<CMatrix(double)>& h_at,
             double tau, SchattenP p, const GaussLegendre& rule) {
  if (!(tau > 0.0)) throw DomainError("e_tau: tau must be positive");
  std::vector<double> t, w;
  rule.map_to(0.0, tau, t, w);
  double acc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) acc += w[i] * schatten_norm(rho_at(t[i]) * h_at(t[i]), p);
  return acc / tau;
}

Rate omega(double delta_chi, double tau_qsl) {
  const bool tiny_chi = std::abs(delta_chi) < kRateFloor;
  const bool tiny_qsl = std::abs(tau_qsl) < kRateFloor;
  if (tiny_qsl && tiny_chi) return {0.0, RateStatus::Undefined};
  if (tiny_qsl) return {0.0, RateStatus::Divergent};
  return {delta_chi / tau_qsl, RateStatus::Ok};
}

void check_record(const LearningRecord& r) {
  if (!r.omega.defined()) return;
  const double back = r.omega.value * r.tau_qsl;
  if (std::abs(back - r.delta_chi) > 1e-9 * std::max(1.0, std::abs(r.delta_chi)))
    throw InvariantError("LearningRecord: omega * tau_qsl does not reproduce delta_chi");
}

double bremermann_bekenstein_rate(double energy) {
  if (!(energy >= 0.0)) throw DomainError("bremermann_bekenstein_rate: energy must be non-negative");
  return std::numbers::pi * energy / std::numbers::ln2;
}

// ---- thermal special case -------------------------------------------------

CMatrix thermal_block(double beta, const CMatrix& h, const Projector& pi) {
  const CMatrix& p = pi.matrix();
  const HermitianEigen eig = hermitian_eigen(hermitian_part(p * h * p));
  const RVector boltz = (-beta * eig.values).array().exp();
  const CMatrix full = eig.vectors * boltz.asDiagonal() * eig.vectors.adjoint();
  return hermitian_part(p * full * p);
}

ThermalBound thermal_bound_check(double beta, const CMatrix& h_initial, const CMatrix& h_final,
                                 const MeasurementSetup& setup, const CMatrix& rho0, const CMatrix& rho_tau,
                                 double e_tau_value) {
  const auto verify = [&](const CMatrix& rho, const CMatrix& h, const char* which) {
    for (std::size_t a = 0; a < setup.size(); ++a) {
      const Projector& pi = setup.projectors()[a];
      const CMatrix block = pi.matrix() * rho * pi.matrix();
      const double mismatch = (block - thermal_block(beta, h, pi)).cwiseAbs().maxCoeff();
      if (mismatch > 1e-8) {
        std::ostringstream os;
        os << "thermal_bound_check: " << which << " block for outcome '" << setup.labels()[a]
           << "' differs from exp(-beta H_alpha) by " << mismatch;
        throw PreconditionError(os.str());
      }
    }
  };
  verify(rho0, h_initial, "initial");
  verify(rho_tau, h_final, "final");

  const MeasurementSetup literal = setup.with_convention(EntropyConvention::Unnormalized);
  const double dchi = -accessible_entropy_term(rho_tau, literal) + accessible_entropy_term(rho0, literal);

  const auto weighted_energy = [&](const CMatrix& rho, const CMatrix& h) {
    double acc = 0.0;
    for (const Projector& pi : setup.projectors()) {
      const CMatrix& p = pi.matrix();
      const CMatrix block = p * rho * p;
      const double prob = (p * rho).trace().real();
      acc += prob * (block * (p * h * p)).trace().real();
    }
    return acc;
  };
  ThermalBound out;
  out.delta_chi_magnitude = std::abs(dchi);
  out.beta_delta_e = beta * (weighted_energy(rho_tau, h_final) - weighted_energy(rho0, h_initial));
  out.tau_qsl = qsl_time_from_fidelity(uhlmann_fidelity(rho0, rho_tau), e_tau_value);
  out.bound = omega(std::abs(out.beta_delta_e), out.tau_qsl);
  return out;
}

}  // namespace qlearn
