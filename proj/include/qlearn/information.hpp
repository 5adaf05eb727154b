#pragma once

// Accessible information, speed-limit time and the learning rate Omega = dchi / tau_qsl.

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "qlearn/hilbert.hpp"
#include "qlearn/quadrature.hpp"

namespace qlearn {

/// How post-measurement blocks enter S(rho_alpha).
///   Unnormalized: rho_alpha = Pi rho Pi (the default).
///   Normalized:   rho_alpha = Pi rho Pi / p_alpha.
/// In both, the outcome weight is p_alpha = tr(Pi rho).
enum class EntropyConvention { Unnormalized, Normalized };

std::string_view to_string(EntropyConvention c);
EntropyConvention entropy_convention_from_string(std::string_view s);

/// Complete set of orthogonal projectors with outcome labels.
class MeasurementSetup {
 public:
  MeasurementSetup(std::vector<Projector> projectors, std::vector<std::string> labels,
                   EntropyConvention convention = EntropyConvention::Unnormalized);

  [[nodiscard]] const std::vector<Projector>& projectors() const { return projectors_; }
  [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }
  [[nodiscard]] EntropyConvention convention() const { return convention_; }
  [[nodiscard]] std::size_t size() const { return projectors_.size(); }
  [[nodiscard]] std::size_t dimension() const { return projectors_.front().dimension(); }
  [[nodiscard]] MeasurementSetup with_convention(EntropyConvention c) const;

 private:
  std::vector<Projector> projectors_;
  std::vector<std::string> labels_;
  EntropyConvention convention_;
};

/// Pi_e onto even levels, Pi_o onto odd levels.
MeasurementSetup parity_projectors(const Basis& basis,
                                   EntropyConvention convention = EntropyConvention::Unnormalized);

/// p_alpha and S(rho_alpha) for one outcome.
struct OutcomeEntropy {
  double probability = 0.0;
  double entropy = 0.0;
};

std::vector<OutcomeEntropy> outcome_entropies(const CMatrix& rho, const MeasurementSetup& setup,
                                              double support_cutoff = kSupportCutoff);

/// sum_alpha p_alpha S(rho_alpha) under the setup's convention.
double accessible_entropy_term(const CMatrix& rho, const MeasurementSetup& setup,
                               double support_cutoff = kSupportCutoff);

/// chi = S(rho) - sum p_alpha S(rho_alpha).
double holevo_chi(const DensityOperator& rho, const MeasurementSetup& setup);

/// dchi = -sum p(tau) S(rho_alpha(tau)) + p(0) S(rho_alpha(0)).
double delta_chi(const DensityOperator& rho0, const DensityOperator& rho_tau, const MeasurementSetup& setup);

/// <psi0| sigma |psi0>, i.e. cos^2 of the Bures angle for a pure initial state.
double overlap_fidelity(const StateVector& psi0, const CMatrix& sigma);

/// tau_qsl = (1 - <psi0|sigma|psi0>) / (2 e_tau). Throws DegenerateDynamicsError for e_tau <= 0.
double qsl_time(const StateVector& psi0, const DensityOperator& rho_tau, double e_tau);
double qsl_time_from_fidelity(double fidelity, double e_tau);

/// (1/tau) int_0^tau ||rho(t) H(t)||_p dt by Gauss-Legendre.
double e_tau(const std::function<CMatrix(double)>& rho_at, const std::function<CMatrix(double)>& h_at,
             double tau, SchattenP p, const GaussLegendre& rule);

/// Status of a learning-rate value.
///   Undefined: both |dchi| and tau_qsl below 1e-14 (nothing happened).
///   Divergent: tau_qsl below 1e-14 with a finite dchi.
enum class RateStatus { Ok, Undefined, Divergent };

std::string_view to_string(RateStatus s);

struct Rate {
  double value = 0.0;  // meaningful only when status == Ok
  RateStatus status = RateStatus::Ok;

  [[nodiscard]] bool defined() const { return status == RateStatus::Ok; }
};

inline constexpr double kRateFloor = 1e-14;

/// Omega = dchi / tau_qsl with the sign of dchi preserved.
Rate omega(double delta_chi, double tau_qsl);

enum class Method { Exact, Linear, Oracle };

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

/// One row of a sweep.
struct LearningRecord {
  double tau = 0.0;
  double delta_chi = 0.0;
  double tau_qsl = 0.0;
  Rate omega;
  Method method = Method::Exact;
  std::vector<std::string> warnings;
};

/// Checks omega * tau_qsl == delta_chi within 1e-9 when omega is defined.
void check_record(const LearningRecord& record);

/// pi E / ln 2 bits per unit time (hbar = 1). Throws DomainError for E < 0.
double bremermann_bekenstein_rate(double energy);

/// Both sides of the thermal identity for blocks rho_alpha = exp(-beta H_alpha),
/// H_alpha = Pi H Pi, plus the thermal rate bound.
struct ThermalBound {
  double delta_chi_magnitude = 0.0;  // |dchi| from entropies
  double beta_delta_e = 0.0;         // beta sum_alpha [p(tau) <H_alpha(tau)> - p(0) <H_alpha(0)>]
  double tau_qsl = 0.0;
  Rate bound;                        // |beta dE| / tau_qsl
};

/// Verifies each block of rho0 (rho_tau) equals exp(-beta H_alpha) built from h_initial
/// (h_final) within 1e-8, then evaluates both sides independently. tau_qsl uses the Uhlmann
/// fidelity of the trace-normalized states and the supplied e_tau.
ThermalBound thermal_bound_check(double beta, const CMatrix& h_initial, const CMatrix& h_final,
                                 const MeasurementSetup& setup, const CMatrix& rho0, const CMatrix& rho_tau,
                                 double e_tau);

/// Pi exp(-beta Pi H Pi) Pi: the thermal block on the support of Pi.
CMatrix thermal_block(double beta, const CMatrix& h, const Projector& pi);

}  // namespace qlearn
