#include "qlearn/perturbation.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "qlearn/quadrature.hpp"

namespace qlearn {

namespace {

constexpr Complex kI{0.0, 1.0};

RVector energies_of(const Basis& basis) {
  const auto e = basis.energies();
  return Eigen::Map<const RVector>(e.data(), static_cast<Eigen::Index>(e.size()));
}

Complex shape_kernel(const DriveProtocol& protocol, double omega, double t, const KernelSpec& kernel,
                     const GaussLegendre& rule) {
  if (kernel.kind == KernelKind::ClosedForm) {
    if (const auto closed = protocol.shape_fourier_integral(omega, t)) return *closed;
  }
  if (t <= 0.0) return 0.0;
  const auto f = [&](double s) { return protocol.shape_at(s) * std::exp(kI * (omega * s)); };
  return rule.integrate(f, 0.0, t, oscillation_panels(omega, t));
}

// || sum_i |a_i><b_i| ||_2 from the Gram matrices of the factors.
double low_rank_frobenius(const std::vector<CVector>& a, const std::vector<CVector>& b) {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) acc += a[i].dot(a[j]) * b[j].dot(b[i]);
  return std::sqrt(std::max(0.0, acc.real()));
}

}  // namespace

CMatrix compute_I(const RVector& energies, const CMatrix& v_op, const DriveProtocol& protocol, double t,
                  const KernelSpec& kernel) {
  const Eigen::Index dim = v_op.rows();
  if (energies.size() != dim || v_op.cols() != dim) throw InvariantError("compute_I: dimension mismatch");
  const GaussLegendre rule(kernel.order);
  CMatrix out = CMatrix::Zero(dim, dim);
  for (Eigen::Index m = 0; m < dim; ++m)
    for (Eigen::Index n = 0; n < dim; ++n) {
      if (v_op(m, n) == Complex(0.0)) continue;
      out(m, n) = v_op(m, n) * shape_kernel(protocol, energies(m) - energies(n), t, kernel, rule);
    }
  return out;
}

double compute_N(const CMatrix& I, const CVector& phi, double delta_lambda) {
  const CVector chi = I * phi;
  const double n = 1.0 + 2.0 * delta_lambda * phi.dot(chi).imag() + delta_lambda * delta_lambda * chi.squaredNorm();
  if (!(n > 0.0)) {
    std::ostringstream os;
    os << "compute_N: N = " << n << " is not positive; delta_lambda " << delta_lambda << " is outside the linear regime";
    throw PerturbationRangeError(os.str());
  }
  return n;
}

CVector free_evolve(const RVector& energies, const CVector& psi, double t) {
  CVector out(psi.size());
  for (Eigen::Index k = 0; k < psi.size(); ++k) out(k) = std::exp(-kI * (energies(k) * t)) * psi(k);
  return out;
}

std::pair<CMatrix, CMatrix> compute_rho_lin(const DensityOperator& rho0, const RVector& energies, const CMatrix& I,
                                            double N, double delta_lambda, double t) {
  if (std::abs(rho0.purity() - 1.0) > 1e-10)
    throw UnsupportedInputError("compute_rho_lin: the initial state must be pure");
  CVector phases(energies.size());
  for (Eigen::Index k = 0; k < energies.size(); ++k) phases(k) = std::exp(-kI * (energies(k) * t));
  const CMatrix evolved = phases.asDiagonal() * rho0.matrix() * phases.conjugate().asDiagonal();
  CMatrix rho_in = hermitian_part(evolved / N);
  CMatrix delta = hermitian_part(kI * delta_lambda * (rho_in * I.adjoint() - I * rho_in));
  return {std::move(rho_in), std::move(delta)};
}

DysonState dyson_state(const SystemMatrices& sys, const DriveProtocol& protocol, const StateVector& psi0, double t,
                       const KernelSpec& kernel) {
  const RVector energies = energies_of(sys.basis);
  DysonState s;
  s.t = t;
  s.phi = free_evolve(energies, psi0.amplitudes(), t);
  s.I = compute_I(energies, sys.v_op, protocol, t, kernel);
  s.N = compute_N(s.I, s.phi, protocol.delta_lambda());
  auto [rho_in, delta] = compute_rho_lin(DensityOperator::pure(psi0), energies, s.I, s.N, protocol.delta_lambda(), t);
  s.rho_in = std::move(rho_in);
  s.delta_rho = std::move(delta);
  return s;
}

CVector assembled_state(const DysonState& s, double delta_lambda) {
  return (s.phi - kI * delta_lambda * (s.I * s.phi)) / std::sqrt(s.N);
}

std::vector<OutcomeLin> probs_and_entropy_lin(const CMatrix& rho_in, const CMatrix& delta_rho,
                                              const MeasurementSetup& setup, double support_cutoff) {
  if (setup.convention() != EntropyConvention::Unnormalized)
    throw ConfigError("probs_and_entropy_lin: the linear expansion is defined for the unnormalized convention only");
  std::vector<OutcomeLin> out;
  out.reserve(setup.size());
  for (const Projector& pi : setup.projectors()) {
    const CMatrix& p = pi.matrix();
    const CMatrix block_in = hermitian_part(p * rho_in * p);
    const CMatrix block_delta = hermitian_part(p * delta_rho * p);
    OutcomeLin o;
    o.p_in = block_in.trace().real();
    o.tr_delta = block_delta.trace().real();
    if (o.p_in > support_cutoff) {
      o.s_in = von_neumann_entropy(block_in, support_cutoff);
      const HermitianEigen eig = hermitian_eigen(block_in);
      for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
        if (eig.values(k) <= support_cutoff) continue;
        const CVector v = eig.vectors.col(k);
        o.tr_delta_log += std::log(eig.values(k)) * v.dot(block_delta * v).real();
      }
    } else if (std::abs(o.tr_delta) > 1e-14) {
      o.degenerate = true;
    }
    out.push_back(o);
  }
  return out;
}

double delta_chi_lin(const std::vector<OutcomeLin>& outcomes, const std::vector<double>& initial_terms) {
  if (outcomes.size() != initial_terms.size()) throw InvariantError("delta_chi_lin: outcome count mismatch");
  double acc = 0.0;
  for (std::size_t a = 0; a < outcomes.size(); ++a) {
    const OutcomeLin& o = outcomes[a];
    acc += -o.p_in * o.s_in + initial_terms[a];
    acc += o.tr_delta * (o.p_in - o.s_in);
    acc += o.p_in * o.tr_delta_log;
  }
  return acc;
}

std::string_view to_string(DeltaRhoTime d) { return d == DeltaRhoTime::Running ? "running" : "final"; }

DeltaRhoTime delta_rho_time_from_string(std::string_view s) {
  if (s == "running") return DeltaRhoTime::Running;
  if (s == "final") return DeltaRhoTime::Final;
  throw ConfigError("unknown delta_rho_time '" + std::string(s) + "'");
}

double e_tau_lin(const SystemMatrices& sys, const DriveProtocol& protocol, const StateVector& psi0,
                 const LinearOptions& options) {
  const double tau = protocol.tau();
  const double dl = protocol.delta_lambda();
  const RVector energies = energies_of(sys.basis);
  const GaussLegendre rule(options.time_nodes);
  std::vector<double> ts, ws;
  rule.map_to(0.0, tau, ts, ws);

  std::optional<DysonState> final_state;
  if (options.delta_rho_time == DeltaRhoTime::Final) final_state = dyson_state(sys, protocol, psi0, tau, options.kernel);

  const bool low_rank = options.low_rank && options.p == SchattenP::Two;
  double acc = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double t = ts[i];
    const double lam = protocol.lambda_at(t);
    double norm = 0.0;
    if (low_rank) {
      const CVector phi = free_evolve(energies, psi0.amplitudes(), t);
      const CMatrix I = compute_I(energies, sys.v_op, protocol, t, options.kernel);
      const double n = compute_N(I, phi, dl);
      const CVector h_phi = energies.cast<Complex>().cwiseProduct(phi);
      const CVector drive_phi = h_phi + lam * (sys.v_op * phi);
      std::vector<CVector> a, b;
      if (options.delta_rho_time == DeltaRhoTime::Running) {
        // H0 drho = (i dl / N) (H0 phi chi^dag - H0 chi phi^dag), chi = I phi
        const CVector chi = I * phi;
        a = {(drive_phi - kI * dl * energies.cast<Complex>().cwiseProduct(chi)) / n, kI * dl * h_phi / n};
        b = {phi, chi};
      } else {
        const CVector& phi_f = final_state->phi;
        const CVector chi_f = final_state->I * phi_f;
        const double n_f = final_state->N;
        a = {drive_phi / n, kI * dl * energies.cast<Complex>().cwiseProduct(phi_f) / n_f, -kI * dl * energies.cast<Complex>().cwiseProduct(chi_f) / n_f};
        b = {phi, chi_f, phi_f};
      }
      norm = low_rank_frobenius(a, b);
    } else {
      const DysonState s = dyson_state(sys, protocol, psi0, t, options.kernel);
      const CMatrix& drho = options.delta_rho_time == DeltaRhoTime::Running ? s.delta_rho : final_state->delta_rho;
      const CMatrix m = sys.h0 * s.rho_in + lam * (sys.v_op * s.rho_in) + sys.h0 * drho;
      norm = schatten_norm(m, options.p);
    }
    acc += ws[i] * norm;
  }
  return acc / tau;
}

double qsl_lin(double bracket, double e_tau) { return qsl_time_from_fidelity(1.0 - bracket, e_tau); }

Rate omega_lin(double delta_chi, double bracket, double e_tau) {
  return omega(delta_chi, qsl_lin(bracket, e_tau));
}

LinearObservables linear_observables(const SystemMatrices& sys, const DriveProtocol& protocol,
                                     const StateVector& psi0, const MeasurementSetup& setup,
                                     const LinearOptions& options) {
  if (psi0.dimension() != sys.basis.dimension()) throw InvariantError("linear_observables: dimension mismatch");
  const double tau = protocol.tau();
  const double dl = protocol.delta_lambda();
  const DysonState s = dyson_state(sys, protocol, psi0, tau, options.kernel);

  LinearObservables out;
  out.N = s.N;
  out.trace_defect = std::abs((s.rho_in + s.delta_rho).trace().real() - 1.0);
  if (out.trace_defect > 10.0 * dl * dl) out.warnings.emplace_back("trace_defect");

  const std::vector<OutcomeLin> outcomes = probs_and_entropy_lin(s.rho_in, s.delta_rho, setup);
  std::vector<double> initial_terms;
  for (const OutcomeEntropy& oe : outcome_entropies(outer(psi0.amplitudes()), setup))
    initial_terms.push_back(oe.probability * oe.entropy);
  for (const OutcomeLin& o : outcomes) {
    out.probabilities.push_back(o.probability());
    if (o.degenerate) out.warnings.emplace_back("degenerate_outcome");
  }
  out.delta_chi = delta_chi_lin(outcomes, initial_terms);

  const CVector& v = psi0.amplitudes();
  out.bracket = 1.0 - v.dot(s.rho_in * v).real() - v.dot(s.delta_rho * v).real();
  out.e_tau = e_tau_lin(sys, protocol, psi0, options);
  out.tau_qsl = qsl_lin(out.bracket, out.e_tau);
  out.omega = omega(out.delta_chi, out.tau_qsl);
  return out;
}

}  // namespace qlearn
