#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qlearn/exact_ho.hpp"
#include "qlearn/oracle.hpp"
#include "qlearn/perturbation.hpp"

using namespace qlearn;

namespace {

double max_dev(const StateVector& a, const StateVector& b) {
  return (a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("step plans must tile the interval") {
  CHECK(StepPlan(0.25, 1.0).steps() == 4);
  CHECK(StepPlan(1e-4, 3.0).steps() == 30000);
  CHECK_THROWS_AS(StepPlan(0.3, 1.0), ConfigError);
  CHECK_THROWS_AS(StepPlan(0.0, 1.0), ConfigError);
  const StepPlan c = StepPlan::covering(std::numbers::pi, 1e-3);
  CHECK(c.dt() <= 1e-3);
  CHECK(c.steps() == 3142);
  CHECK(c.dt() * static_cast<double>(c.steps()) == doctest::Approx(std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("free evolution is reproduced exactly") {
  const SystemMatrices ho = build_ho({1.0, 12, 0.0, 1e-10});
  CVector v = CVector::Zero(13);
  v(0) = 0.6;
  v(5) = Complex(0.0, 0.8);
  const StateVector psi0(v);
  const StateVector out = propagate(ho, DriveProtocol::linear(0.0, 2.0), StepPlan(1e-3, 2.0), psi0);
  CHECK(std::abs(out.amplitudes()(0) - 0.6 * std::exp(Complex(0.0, -0.5 * 2.0))) < 1e-12);
  CHECK(std::abs(out.amplitudes()(5) - Complex(0.0, 0.8) * std::exp(Complex(0.0, -5.5 * 2.0))) < 1e-12);
  CHECK(out.squared_norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coarse steps raise a precondition error") {
  const SystemMatrices ho = build_ho({1.0, 20, 0.0, 1e-10});
  const StateVector g = StateVector::basis_state(21, 0);
  const DriveProtocol p = DriveProtocol::exponential(5e-2, 1.0);
  CHECK_THROWS_AS(propagate(ho, p, StepPlan(0.01, 1.0), g), PreconditionError);
  CHECK_NOTHROW(propagate(ho, p, StepPlan(2.5e-3, 1.0), g));
}

TEST_CASE("midpoint stepping converges at second order") {
  const HarmonicSystem hs{1.0, 20, 0.0, 1e-10};
  const SystemMatrices ho = build_ho(hs);
  const StateVector g = StateVector::basis_state(21, 0);
  const DriveProtocol p = DriveProtocol::exponential(0.3, 2.0);
  const StateVector exact = exact_propagate(hs, p, 2.0, g);
  const double e1 = max_dev(propagate(ho, p, StepPlan(2e-3, 2.0), g), exact);
  const double e2 = max_dev(propagate(ho, p, StepPlan(1e-3, 2.0), g), exact);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("sample times may arrive in any order") {
  const SystemMatrices ho = build_ho({1.0, 16, 0.0, 1e-10});
  const StateVector g = StateVector::basis_state(17, 0);
  const DriveProtocol p = DriveProtocol::linear(0.2, 1.0);
  const StepPlan plan(1e-3, 1.0);
  const std::vector<StateVector> samples = propagate(ho, p, plan, g, {0.7, 0.25, 1.0});
  REQUIRE(samples.size() == 3);
  CHECK(max_dev(samples[2], propagate(ho, p, plan, g)) < 1e-14);
  const DriveProtocol shorter = DriveProtocol::linear(0.2 * 0.25, 0.25);
  CHECK(max_dev(samples[1], propagate(ho, shorter, StepPlan(1e-3, 0.25), g)) < 1e-12);
  for (const StateVector& s : samples) CHECK(s.squared_norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exact and brute-force amplitudes agree at dt = 1e-4") {
  const HarmonicSystem hs{1.0, 30, 0.0, 1e-10};
  const SystemMatrices ho = build_ho(hs);
  const StateVector g = StateVector::basis_state(31, 0);
  const DriveProtocol p = DriveProtocol::exponential(5e-2, 3.0);
  CHECK(max_dev(propagate(ho, p, StepPlan(1e-4, 3.0), g), exact_propagate(hs, p, 3.0, g)) <= 1e-5);
}

TEST_CASE("linearized probabilities deviate from the brute-force path at second order") {
  const SystemMatrices ho = build_ho({1.0, 30, 0.0, 1e-10});
  const MeasurementSetup setup = parity_projectors(ho.basis);
  const StateVector g = StateVector::basis_state(31, 0);
  OracleOptions opt;
  opt.dt = 1e-3;
  std::vector<double> dev;
  for (double dl : {1e-2, 1e-1}) {
    const DriveProtocol p = DriveProtocol::exponential(dl, 3.0);
    const ExactObservables brute = oracle_observables(ho, p, g, setup, opt);
    const LinearObservables lin = linear_observables(ho, p, g, setup);
    dev.push_back(std::abs(brute.probabilities[1] - lin.probabilities[1]));
  }
  CHECK(std::log10(dev[1] / dev[0]) >= 1.8);
}
