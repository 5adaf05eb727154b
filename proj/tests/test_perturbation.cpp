#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qlearn/exact_ho.hpp"
#include "qlearn/perturbation.hpp"

using namespace qlearn;

namespace {

constexpr Complex kI{0.0, 1.0};

RVector energies_of(const SystemMatrices& s) { return s.h0.diagonal().real(); }

struct Ho {
  HarmonicSystem spec{1.0, 30, 0.0, 1e-10};
  SystemMatrices sys = build_ho(spec);
  MeasurementSetup setup = parity_projectors(sys.basis);
  StateVector ground = StateVector::basis_state(31, 0);
};

}  // namespace

TEST_CASE("I vanishes at t = 0") {
  const Ho ho;
  const CMatrix i = compute_I(energies_of(ho.sys), ho.sys.v_op, DriveProtocol::exponential(0.1, 2.0), 0.0);
  CHECK(i.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("diagonal kernel of the ramp is t^2 / (2 tau)") {
  RVector e(3);
  e << 0.0, 1.0, 2.0;
  CMatrix v = CMatrix::Identity(3, 3);
  v(0, 1) = v(1, 0) = 0.4;
  const double dl = 0.05, tau = 2.0, t = 1.5;
  const CMatrix i = compute_I(e, v, DriveProtocol::linear(dl, tau), t);
  for (Eigen::Index n = 0; n < 3; ++n) {
    CHECK(std::abs(i(n, n) - t * t / (2.0 * tau)) < 1e-14);
    CHECK(std::abs(dl * i(n, n) - dl * t * t / (2.0 * tau)) < 1e-15);
  }
  CHECK(std::abs(i(0, 2)) == 0.0);
}

TEST_CASE("off-diagonal kernel of the ramp matches its antiderivative") {
  RVector e(2);
  e << 0.0, 1.0;
  CMatrix v = CMatrix::Zero(2, 2);
  v(0, 1) = v(1, 0) = 1.0;
  const DriveProtocol p = DriveProtocol::linear(0.05, 1.0);
  const double t = 1.0;
  // (1/tau) [t e^{it}/i - (e^{it} - 1)/i^2] for omega_10 = +1
  const Complex lambda10 = (t * std::exp(kI * t) / kI - (std::exp(kI * t) - 1.0) / (kI * kI)) / 1.0;
  const CMatrix closed = compute_I(e, v, p, t);
  const CMatrix quad = compute_I(e, v, p, t, {KernelKind::Quadrature, 16});
  CHECK(std::abs(closed(1, 0) - lambda10) < 1e-10);
  CHECK(std::abs(quad(1, 0) - lambda10) < 1e-10);
  CHECK(std::abs(closed(0, 1) - std::conj(lambda10)) < 1e-10);
}

TEST_CASE("closed-form and quadrature kernels agree") {
  const Ho ho;
  for (ProtocolKind k : {ProtocolKind::Exponential, ProtocolKind::Linear}) {
    const DriveProtocol p = DriveProtocol::make(k, 0.1, 12.0);
    const CMatrix a = compute_I(energies_of(ho.sys), ho.sys.v_op, p, 9.0);
    const CMatrix b = compute_I(energies_of(ho.sys), ho.sys.v_op, p, 9.0, {KernelKind::Quadrature, 16});
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("normalization function") {
  CMatrix i(2, 2);
  i << 0.3, Complex(0.1, -0.2), Complex(0.1, 0.2), -0.7;
  CVector phi(2);
  phi << Complex(0.6, 0.0), Complex(0.0, 0.8);
  CHECK(compute_N(i, phi, 0.0) == 1.0);
  // Hermitian I: the first-order term drops out.
  const double dl = 0.2;
  CHECK(compute_N(i, phi, dl) == doctest::Approx(1.0 + dl * dl * (i * phi).squaredNorm()).epsilon(1e-14));
  // General I: N is the squared norm of (1 - i dl I) phi.
  CMatrix g(2, 2);
  g << Complex(0.2, 0.5), 1.1, Complex(0.0, -0.4), Complex(-0.3, 0.1);
  CHECK(compute_N(g, phi, dl) == doctest::Approx((phi - kI * dl * (g * phi)).squaredNorm()).epsilon(1e-14));

  const CMatrix killer = -kI / 0.5 * CMatrix::Identity(2, 2);
  CHECK_THROWS_AS(compute_N(killer, phi, 0.5), PerturbationRangeError);
}

TEST_CASE("renormalized first-order state has unit norm") {
  const Ho ho;
  for (double dl : {1e-3, 5e-2, 0.3})
    for (double tau : {1.0, 4.0}) {
      const DriveProtocol p = DriveProtocol::exponential(dl, tau);
      const DysonState s = dyson_state(ho.sys, p, ho.ground, tau);
      CHECK(std::abs(assembled_state(s, dl).norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("eigenstate stays stationary up to normalization") {
  const Ho ho;
  const DriveProtocol p = DriveProtocol::exponential(5e-2, 2.0);
  const DysonState s = dyson_state(ho.sys, p, ho.ground, 2.0);
  CMatrix expected = CMatrix::Zero(31, 31);
  expected(0, 0) = 1.0 / s.N;
  CHECK((s.rho_in - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(hermiticity_defect(s.delta_rho) < 1e-15);
}

TEST_CASE("no drive means no correction") {
  const Ho ho;
  const DriveProtocol p = DriveProtocol::linear(0.0, 2.0);
  const DysonState s = dyson_state(ho.sys, p, ho.ground, 2.0);
  CHECK(s.N == 1.0);
  CHECK(s.delta_rho.cwiseAbs().maxCoeff() == 0.0);
  const LinearObservables o = linear_observables(ho.sys, p, ho.ground, ho.setup);
  CHECK(o.delta_chi == 0.0);
  CHECK(o.bracket == doctest::Approx(0.0));
  CHECK(o.tau_qsl == doctest::Approx(0.0));
  CHECK(o.omega.status == RateStatus::Undefined);
  CHECK(o.e_tau == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("trace defect of rho_in + drho is second order") {
  const Ho ho;
  std::vector<double> defect;
  for (double dl : {1e-3, 1e-2, 1e-1}) {
    const DysonState s = dyson_state(ho.sys, DriveProtocol::exponential(dl, 3.0), ho.ground, 3.0);
    defect.push_back(std::abs((s.rho_in + s.delta_rho).trace().real() - 1.0));
    CHECK(defect.back() <= 10.0 * dl * dl);
  }
  CHECK(std::log10(defect[1] / defect[0]) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::log10(defect[2] / defect[1]) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("mixed initial states are rejected") {
  const Ho ho;
  CMatrix mixed = CMatrix::Zero(31, 31);
  mixed(0, 0) = mixed(1, 1) = 0.5;
  const CMatrix i = compute_I(energies_of(ho.sys), ho.sys.v_op, DriveProtocol::linear(0.1, 1.0), 1.0);
  CHECK_THROWS_AS(compute_rho_lin(DensityOperator(mixed), energies_of(ho.sys), i, 1.0, 0.1, 1.0),
                  UnsupportedInputError);
}

TEST_CASE("linearized outcomes") {
  const Ho ho;
  const DysonState s = dyson_state(ho.sys, DriveProtocol::exponential(5e-2, 2.0), ho.ground, 2.0);

  const auto zero = probs_and_entropy_lin(s.rho_in, CMatrix::Zero(31, 31), ho.setup);
  const auto exact_blocks = outcome_entropies(s.rho_in, ho.setup);
  for (std::size_t a = 0; a < 2; ++a) {
    CHECK(zero[a].probability() == doctest::Approx(zero[a].p_in));
    CHECK(zero[a].entropy() == doctest::Approx(exact_blocks[a].entropy).epsilon(1e-13));
  }

  const auto out = probs_and_entropy_lin(s.rho_in, s.delta_rho, ho.setup);
  CHECK(out[0].probability() + out[1].probability() ==
        doctest::Approx((s.rho_in + s.delta_rho).trace().real()).epsilon(1e-14));

  CHECK_THROWS_AS(probs_and_entropy_lin(s.rho_in, s.delta_rho, ho.setup.with_convention(EntropyConvention::Normalized)),
                  ConfigError);
}

TEST_CASE("probabilities track the exact path to second order") {
  const Ho ho;
  const double dl = 5e-2;
  const DriveProtocol p = DriveProtocol::exponential(dl, 2.0);
  const LinearObservables lin = linear_observables(ho.sys, p, ho.ground, ho.setup);
  const ExactObservables ex = exact_observables(ho.spec, p, ho.ground, ho.setup);
  for (std::size_t a = 0; a < 2; ++a) CHECK(std::abs(lin.probabilities[a] - ex.probabilities[a]) <= 10.0 * dl * dl);
}

TEST_CASE("sudden limit keeps the initial outcome distribution") {
  const Ho ho;
  const LinearObservables o = linear_observables(ho.sys, DriveProtocol::exponential(5e-2, 1e-6), ho.ground, ho.setup);
  CHECK(std::abs(o.probabilities[0] - 1.0) <= 1e-6);
  CHECK(std::abs(o.probabilities[1]) <= 1e-6);
}

TEST_CASE("low-rank and dense E_tau agree") {
  const Ho ho;
  CVector v = CVector::Zero(31);
  v(0) = 0.8;
  v(3) = Complex(0.0, 0.6);
  const StateVector psi0(v);
  for (DeltaRhoTime when : {DeltaRhoTime::Running, DeltaRhoTime::Final}) {
    LinearOptions fast, dense;
    fast.delta_rho_time = dense.delta_rho_time = when;
    dense.low_rank = false;
    const DriveProtocol p = DriveProtocol::linear(0.1, 3.0);
    CHECK(e_tau_lin(ho.sys, p, psi0, fast) == doctest::Approx(e_tau_lin(ho.sys, p, psi0, dense)).epsilon(1e-11));
  }
}

TEST_CASE("final-time correction changes E_tau only with a drive") {
  const Ho ho;
  LinearOptions running, final;
  final.delta_rho_time = DeltaRhoTime::Final;
  const DriveProtocol driven = DriveProtocol::exponential(0.1, 4.0);
  CHECK(std::abs(e_tau_lin(ho.sys, driven, ho.ground, running) - e_tau_lin(ho.sys, driven, ho.ground, final)) > 1e-6);
  const DriveProtocol idle = DriveProtocol::exponential(0.0, 4.0);
  CHECK(e_tau_lin(ho.sys, idle, ho.ground, running) == e_tau_lin(ho.sys, idle, ho.ground, final));
  CHECK(to_string(DeltaRhoTime::Final) == "final");
  CHECK(delta_rho_time_from_string("running") == DeltaRhoTime::Running);
}

TEST_CASE("speed limit and rate helpers") {
  CHECK(qsl_lin(0.3, 1.5) == doctest::Approx(0.1));
  CHECK_THROWS_AS(qsl_lin(0.3, 0.0), DegenerateDynamicsError);
  const Rate r = omega_lin(-0.01, 0.2, 1.5);
  CHECK(r.value == doctest::Approx(-0.01 / qsl_lin(0.2, 1.5)));
  CHECK(omega_lin(0.0, 0.0, 1.0).status == RateStatus::Undefined);
}

TEST_CASE("linear delta chi stays nonpositive and the ramp drive learns faster") {
  const Ho ho;
  double worst = -1.0, min_exp = 0.0, min_lin = 0.0;
  for (int i = 0; i < 120; ++i) {
    const double tau = 0.5 + 19.5 * i / 119.0;
    const LinearObservables e = linear_observables(ho.sys, DriveProtocol::exponential(5e-2, tau), ho.ground, ho.setup);
    const LinearObservables l = linear_observables(ho.sys, DriveProtocol::linear(5e-2, tau), ho.ground, ho.setup);
    worst = std::max({worst, e.delta_chi, l.delta_chi});
    min_exp = std::min(min_exp, e.omega.value);
    min_lin = std::min(min_lin, l.omega.value);
  }
  CHECK(worst <= 1e-12);
  CHECK(std::abs(min_lin) >= std::abs(min_exp));
}

TEST_CASE("Poschl-Teller rate is finite in the sudden regime") {
  const SystemMatrices pt = build_pt({}, 11);
  const MeasurementSetup setup = parity_projectors(pt.basis);
  const StateVector psi0 = StateVector::basis_state(pt.basis.dimension(), 10);
  const LinearObservables o = linear_observables(pt, DriveProtocol::exponential(0.1, 0.01), psi0, setup);
  CHECK(o.omega.defined());
  CHECK(std::isfinite(o.omega.value));
  CHECK(o.delta_chi <= 1e-12);
}
