#pragma once

// First-order Dyson engine for H(t) = H0 + lambda(t) V_op over any finite eigenbasis of H0.
//
//   I(t)     = int_0^t e^{i H0 s} shape(s) V_op e^{-i H0 s} ds
//   N(t)     = 1 + i dl <I^dag - I>_phi + dl^2 <I^dag I>_phi,   phi = e^{-i H0 t} psi0
//   rho_in   = phi phi^dag / N
//   drho     = i dl (rho_in I^dag - I rho_in)
//
// dl is the drive amplitude delta_lambda; I is built from the unit shape lambda / dl.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "qlearn/hilbert.hpp"
#include "qlearn/information.hpp"
#include "qlearn/systems.hpp"

namespace qlearn {

enum class KernelKind { ClosedForm, Quadrature };

/// How Lambda_mn(t) = int_0^t shape(s) e^{i w_mn s} ds is evaluated. Tabulated drives always
/// use quadrature.
struct KernelSpec {
  KernelKind kind = KernelKind::ClosedForm;
  std::size_t order = 16;  // Gauss-Legendre points per panel
};

/// I(t) with I_mn = (V_op)_mn Lambda_mn(t). Entries where V_op vanishes are skipped.
CMatrix compute_I(const RVector& energies, const CMatrix& v_op, const DriveProtocol& protocol, double t,
                  const KernelSpec& kernel = {});

/// Throws PerturbationRangeError when N <= 0.
double compute_N(const CMatrix& I, const CVector& phi, double delta_lambda);

struct DysonState {
  double t = 0.0;
  CVector phi;  // e^{-i H0 t} psi0
  CMatrix I;
  double N = 1.0;
  CMatrix rho_in;
  CMatrix delta_rho;
};

/// e^{-i H0 t} psi for a diagonal H0.
CVector free_evolve(const RVector& energies, const CVector& psi, double t);

/// (rho_in, drho) for a pure rho0. Throws UnsupportedInputError for mixed rho0.
std::pair<CMatrix, CMatrix> compute_rho_lin(const DensityOperator& rho0, const RVector& energies, const CMatrix& I,
                                            double N, double delta_lambda, double t);

DysonState dyson_state(const SystemMatrices& sys, const DriveProtocol& protocol, const StateVector& psi0, double t,
                       const KernelSpec& kernel = {});

/// (1 - i dl I) phi / sqrt(N): the renormalized first-order state.
CVector assembled_state(const DysonState& s, double delta_lambda);

struct OutcomeLin {
  double p_in = 0.0;
  double tr_delta = 0.0;
  double s_in = 0.0;          // S(Pi rho_in Pi)
  double tr_delta_log = 0.0;  // tr(drho_alpha ln rho_in_alpha) on the support of rho_in_alpha
  bool degenerate = false;    // p_in below the cutoff while tr drho_alpha is not zero

  [[nodiscard]] double probability() const { return p_in + tr_delta; }
  [[nodiscard]] double entropy() const { return s_in - tr_delta - tr_delta_log; }
};

/// Per-outcome linearized probabilities and entropies. Requires the unnormalized convention.
std::vector<OutcomeLin> probs_and_entropy_lin(const CMatrix& rho_in, const CMatrix& delta_rho,
                                              const MeasurementSetup& setup,
                                              double support_cutoff = kSupportCutoff);

/// sum_alpha dchi_in + tr drho [p_in - S_in] + p_in tr(drho ln rho_in).
/// `initial_terms` holds p_alpha(0) S(rho_alpha(0)) per outcome.
double delta_chi_lin(const std::vector<OutcomeLin>& outcomes, const std::vector<double>& initial_terms);

/// Which correction enters the E_tau integrand at node t.
///   Running: drho(t), consistent with rho(t) = rho_in(t) + drho(t).
///   Final:   drho(tau) at every node.
enum class DeltaRhoTime { Running, Final };

std::string_view to_string(DeltaRhoTime d);
DeltaRhoTime delta_rho_time_from_string(std::string_view s);

struct LinearOptions {
  KernelSpec kernel;
  std::size_t time_nodes = 96;
  SchattenP p = SchattenP::Two;
  DeltaRhoTime delta_rho_time = DeltaRhoTime::Running;
  bool low_rank = true;  // rank-2 Frobenius evaluation of the integrand; dense otherwise
};

/// (1/tau) int_0^tau || H0 rho_in + lambda V_op rho_in + H0 drho ||_p dt.
double e_tau_lin(const SystemMatrices& sys, const DriveProtocol& protocol, const StateVector& psi0,
                 const LinearOptions& options = {});

/// bracket / (2 E). Throws DegenerateDynamicsError for E <= 0.
double qsl_lin(double bracket, double e_tau);

/// 2 E numerator / bracket, flagged when both vanish.
Rate omega_lin(double delta_chi, double bracket, double e_tau);

struct LinearObservables {
  double delta_chi = 0.0;
  double bracket = 0.0;   // 1 - <rho_in(tau)> - <drho(tau)>
  double e_tau = 0.0;
  double tau_qsl = 0.0;
  Rate omega;
  double N = 1.0;
  double trace_defect = 0.0;  // |tr(rho_in + drho) - 1|
  std::vector<double> probabilities;
  std::vector<std::string> warnings;
};

LinearObservables linear_observables(const SystemMatrices& sys, const DriveProtocol& protocol,
                                     const StateVector& psi0, const MeasurementSetup& setup,
                                     const LinearOptions& options = {});

}  // namespace qlearn
