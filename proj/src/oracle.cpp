#include "qlearn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qlearn/quadrature.hpp"

namespace qlearn {

StepPlan::StepPlan(double dt, double t_end, std::size_t steps) : dt_(dt), t_end_(t_end), steps_(steps) {}

StepPlan::StepPlan(double dt, double t_end) : dt_(dt), t_end_(t_end), steps_(0) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw ConfigError("StepPlan: dt must be positive and t_end non-negative");
  const double ratio = t_end / dt;
  const double whole = std::round(ratio);
  if (std::abs(ratio - whole) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "StepPlan: t_end / dt = " << ratio << " is not an integer; use StepPlan::covering";
    throw ConfigError(os.str());
  }
  steps_ = static_cast<std::size_t>(whole);
}

StepPlan StepPlan::covering(double t_end, double max_dt) {
  if (!(max_dt > 0.0) || !(t_end >= 0.0)) throw ConfigError("StepPlan: dt must be positive and t_end non-negative");
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t_end / max_dt - 1e-9)));
  return StepPlan(t_end / static_cast<double>(n), t_end, n);
}

namespace {

constexpr Complex kI{0.0, 1.0};

// exp(-i H dt) psi for the Hermitian H = h0 + lam v_op, real-symmetric when both parts are real.
class FrozenStepper {
 public:
  FrozenStepper(const SystemMatrices& sys)
      : h0_(sys.h0), v_(sys.v_op), real_(sys.h0.imag().isZero(0.0) && sys.v_op.imag().isZero(0.0)) {
    if (real_) {
      h0r_ = sys.h0.real();
      vr_ = sys.v_op.real();
    }
  }

  CVector apply(double lam, double dt, const CVector& psi) {
    if (real_) {
      real_solver_.compute(h0r_ + lam * vr_);
      const RMatrix& q = real_solver_.eigenvectors();
      const RVector& e = real_solver_.eigenvalues();
      RVector re = q.transpose() * psi.real();
      RVector im = q.transpose() * psi.imag();
      for (Eigen::Index k = 0; k < re.size(); ++k) {
        const Complex c = std::exp(-kI * (e(k) * dt)) * Complex(re(k), im(k));
        re(k) = c.real();
        im(k) = c.imag();
      }
      CVector out(psi.size());
      out.real() = q * re;
      out.imag() = q * im;
      return out;
    }
    complex_solver_.compute(h0_ + lam * v_);
    const CMatrix& q = complex_solver_.eigenvectors();
    const RVector& e = complex_solver_.eigenvalues();
    CVector c = q.adjoint() * psi;
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(-kI * (e(k) * dt));
    return q * c;
  }

 private:
  CMatrix h0_, v_;
  bool real_;
  RMatrix h0r_, vr_;
  Eigen::SelfAdjointEigenSolver<RMatrix> real_solver_;
  Eigen::SelfAdjointEigenSolver<CMatrix> complex_solver_;
};

}  // namespace

std::vector<StateVector> propagate(const SystemMatrices& sys, const DriveProtocol& protocol, const StepPlan& plan,
                                   const StateVector& psi0, const std::vector<double>& sample_times) {
  if (psi0.dimension() != sys.basis.dimension()) throw InvariantError("propagate: dimension mismatch");
  const double resolution = plan.dt() * sys.basis.bohr_spread();
  if (resolution > kOracleResolution) {
    std::ostringstream os;
    os << "propagate: dt * max|w_mn| = " << resolution << " exceeds " << kOracleResolution << "; reduce dt";
    throw PreconditionError(os.str());
  }
  std::vector<std::size_t> order(sample_times.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sample_times[a] < sample_times[b]; });
  for (double s : sample_times)
    if (s < 0.0 || s > plan.t_end() * (1.0 + 1e-12)) throw DomainError("propagate: sample time outside the plan");

  FrozenStepper stepper(sys);
  std::vector<CVector> out(sample_times.size());
  CVector psi = psi0.amplitudes();
  std::size_t next = 0;
  const double dt = plan.dt();
  for (std::size_t k = 0; k <= plan.steps() && next < order.size(); ++k) {
    const double t0 = dt * static_cast<double>(k);
    const double t1 = k == plan.steps() ? t0 : dt * static_cast<double>(k + 1);
    // Samples inside [t0, t1): partial step from the current state.
    while (next < order.size() && (sample_times[order[next]] < t1 || k == plan.steps())) {
      const double s = std::min(sample_times[order[next]], plan.t_end());
      const double h = s - t0;
      out[order[next]] = h > 0.0 ? stepper.apply(protocol.lambda_at(std::min(t0 + 0.5 * h, protocol.tau())), h, psi)
                                 : psi;
      ++next;
    }
    if (k < plan.steps()) psi = stepper.apply(protocol.lambda_at(std::min(t0 + 0.5 * dt, protocol.tau())), dt, psi);
  }
  std::vector<StateVector> states;
  states.reserve(out.size());
  for (CVector& v : out) {
    const double norm = v.norm();
    if (std::abs(norm - 1.0) > 1e-9) throw InvariantError("propagate: norm drifted beyond 1e-9");
    states.emplace_back(v / norm);
  }
  return states;
}

StateVector propagate(const SystemMatrices& sys, const DriveProtocol& protocol, const StepPlan& plan,
                      const StateVector& psi0) {
  return propagate(sys, protocol, plan, psi0, {plan.t_end()}).front();
}

ExactObservables oracle_observables(const SystemMatrices& sys, const DriveProtocol& protocol,
                                    const StateVector& psi0, const MeasurementSetup& setup,
                                    const OracleOptions& options) {
  const double tau = protocol.tau();
  const StepPlan plan = StepPlan::covering(tau, options.dt);
  const GaussLegendre rule(options.time_nodes);
  std::vector<double> ts, ws;
  rule.map_to(0.0, tau, ts, ws);
  std::vector<double> samples = ts;
  samples.push_back(tau);
  const std::vector<StateVector> states = propagate(sys, protocol, plan, psi0, samples);

  ExactObservables out;
  const StateVector& final_state = states.back();
  const DensityOperator rho_tau = DensityOperator::pure(final_state);
  out.delta_chi = delta_chi(DensityOperator::pure(psi0), rho_tau, setup);
  for (const Projector& pi : setup.projectors())
    out.probabilities.push_back((pi.matrix() * rho_tau.matrix()).trace().real());
  out.fidelity = std::norm(psi0.amplitudes().dot(final_state.amplitudes()));
  double acc = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const CMatrix h = sys.h0 + protocol.lambda_at(ts[i]) * sys.v_op;
    const CVector& psi = states[i].amplitudes();
    acc += ws[i] * (options.p == SchattenP::Two ? (h * psi).norm() : schatten_norm(outer(psi) * h, options.p));
  }
  out.e_tau = acc / tau;
  out.tau_qsl = qsl_time_from_fidelity(out.fidelity, out.e_tau);
  out.omega = omega(out.delta_chi, out.tau_qsl);
  return out;
}

}  // namespace qlearn
