#include "qlearn/validate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/QR>

#include "qlearn/exact_ho.hpp"
#include "qlearn/information.hpp"
#include "qlearn/oracle.hpp"
#include "qlearn/perturbation.hpp"
#include "qlearn/sweep.hpp"
#include "qlearn/systems.hpp"

namespace qlearn {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  CVector state(Eigen::Index n) {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(normal_(gen_), normal_(gen_));
    return v / v.norm();
  }

  CMatrix unitary(Eigen::Index n) {
    CMatrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) g(i, j) = Complex(normal_(gen_), normal_(gen_));
    return Eigen::HouseholderQR<CMatrix>(g).householderQ() * CMatrix::Identity(n, n);
  }

  CMatrix density(Eigen::Index n, int rank) {
    CMatrix rho = CMatrix::Zero(n, n);
    for (int k = 0; k < rank; ++k) rho += outer(state(n));
    return rho / rho.trace().real();
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_;
};

double max_abs(const CMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

void add(std::vector<InvariantCheck>& out, std::string name, double measured, double tol, bool at_least = false) {
  out.push_back({std::move(name), measured, tol, at_least});
}

void hilbert_checks(std::vector<InvariantCheck>& out) {
  Rng rng(20240611);
  const SystemMatrices ho = build_ho({1.0, 12, 0.0, 1e-10});
  const MeasurementSetup setup = parity_projectors(ho.basis);
  const CMatrix& pe = setup.projectors()[0].matrix();
  const CMatrix& po = setup.projectors()[1].matrix();
  add(out, "projectors: Pi_e Pi_o = 0", max_abs(pe * po), 1e-12);
  add(out, "projectors: Pi_e + Pi_o = 1", max_abs(pe + po - CMatrix::Identity(pe.rows(), pe.cols())), 1e-12);

  double entropy_dev = 0.0, schatten_dev = 0.0, project_herm = 0.0, project_neg = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix rho = rng.density(6, 1 + trial % 4);
    const CMatrix u = rng.unitary(6);
    entropy_dev = std::max(entropy_dev, std::abs(von_neumann_entropy(rho) -
                                                 von_neumann_entropy(hermitian_part(u * rho * u.adjoint()))));
    const CMatrix a = u * rho + rho;
    const Eigen::JacobiSVD<CMatrix> svd(a);
    schatten_dev =
        std::max(schatten_dev, std::abs(std::pow(schatten_norm(a, SchattenP::Two), 2) - svd.singularValues().squaredNorm()));
    const DensityOperator d(rho, 1e-10);
    const Projector pi = Projector::diagonal(6, std::vector<std::size_t>{0, 2, 5});
    const Operator block = project(d, pi);
    project_herm = std::max(project_herm, hermiticity_defect(block.matrix()));
    project_neg = std::max(project_neg, -hermitian_eigen(block.matrix()).values.minCoeff());
  }
  add(out, "entropy: unitary invariance", entropy_dev, 1e-9);
  add(out, "schatten: ||A||_2^2 = sum sigma^2", schatten_dev, 1e-10);
  add(out, "project: Hermitian", project_herm, 1e-12);
  add(out, "project: positive semidefinite", project_neg, 1e-10);

  double rho_h = 0.0;
  const CMatrix h = ho.h0 + 0.3 * ho.v_op;
  for (int trial = 0; trial < 100; ++trial) {
    const CVector psi = rng.state(h.rows());
    rho_h = std::max(rho_h, std::abs(schatten_norm(outer(psi) * h, SchattenP::Two) -
                                     std::sqrt(psi.dot(h * h * psi).real())));
  }
  add(out, "schatten: ||rho H||_2 = sqrt<H^2> (100 states)", rho_h, 1e-10);

  double chi_min = 0.0;
  const MeasurementSetup normalized = parity_projectors(ho.basis, EntropyConvention::Normalized);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityOperator rho(rng.density(13, 1 + trial % 5), 1e-10);
    chi_min = std::min(chi_min, holevo_chi(rho, normalized));
  }
  add(out, "information: normalized chi >= 0", -chi_min, 1e-12);
}

void systems_checks(std::vector<InvariantCheck>& out) {
  const SystemMatrices ho = build_ho({1.0, 20, 0.0, 1e-10});
  const SystemMatrices pt = build_pt({6, 1.0, 10.0, 800});
  for (const auto* sys : {&ho, &pt}) {
    const std::string tag = sys == &ho ? "ho" : "pt";
    double parity_leak = 0.0;
    const auto parity = sys->basis.parity();
    for (Eigen::Index m = 0; m < sys->x.rows(); ++m)
      for (Eigen::Index n = 0; n < sys->x.cols(); ++n)
        if (parity[static_cast<std::size_t>(m)] == parity[static_cast<std::size_t>(n)])
          parity_leak = std::max(parity_leak, std::abs(sys->x(m, n)));
    add(out, "systems: " + tag + " X couples opposite parity only", parity_leak, 1e-10);
    add(out, "systems: " + tag + " X real symmetric", max_abs(sys->x - sys->x.transpose()) + max_abs(sys->x.imag()),
        1e-12);
  }
  double decrease = 0.0;
  for (ProtocolKind k : {ProtocolKind::Exponential, ProtocolKind::Linear}) {
    const DriveProtocol p = DriveProtocol::make(k, 0.2, 3.0);
    double prev = p.lambda_at(0.0);
    for (int i = 1; i <= 300; ++i) {
      const double v = p.lambda_at(3.0 * i / 300.0);
      decrease = std::max(decrease, prev - v);
      prev = v;
    }
  }
  add(out, "systems: protocols monotone", decrease, 0.0);
}

void exact_checks(std::vector<InvariantCheck>& out) {
  const HarmonicSystem ho{1.0, 30, 0.0, 1e-10};
  double unitarity = 0.0, w_dev = 0.0, path_dev = 0.0;
  for (ProtocolKind k : {ProtocolKind::Exponential, ProtocolKind::Linear})
    for (double t : {0.7, 2.0, 4.5}) {
      const DriveProtocol p = DriveProtocol::make(k, 0.2, 4.5);
      const HusimiCoefficients c = husimi_coefficients(ho, p, t);
      w_dev = std::max(w_dev, std::abs(c.w - std::norm(c.alpha)));
      const StateVector psi = exact_propagate(ho, p, t, StateVector::basis_state(31, 0));
      unitarity = std::max(unitarity, std::abs(psi.squared_norm() - 1.0));
      const CMatrix u = husimi_propagator(ho, c, t);
      path_dev = std::max(path_dev, (psi.amplitudes().cwiseAbs() - u.col(0).cwiseAbs()).cwiseAbs().maxCoeff());
    }
  add(out, "exact: unitarity", unitarity, 1e-12);
  add(out, "exact: W = |alpha|^2", w_dev, 1e-9);
  add(out, "exact: displacement vs generating-function path", path_dev, 1e-9);

  const DriveProtocol tiny = DriveProtocol::exponential(1e-15, 3.0);
  const StateVector driven = exact_propagate(ho, tiny, 3.0, StateVector::basis_state(31, 0));
  double free_dev = std::abs(driven.amplitudes()(0) - std::exp(Complex(0.0, -0.5 * 3.0)));
  free_dev = std::max(free_dev, driven.amplitudes().tail(30).cwiseAbs().maxCoeff());
  add(out, "exact: delta_lambda -> 0 recovers free evolution", free_dev, 1e-12);
}

void linear_checks(std::vector<InvariantCheck>& out) {
  const SystemMatrices ho = build_ho({1.0, 30, 0.0, 1e-10});
  const MeasurementSetup setup = parity_projectors(ho.basis);
  const StateVector ground = StateVector::basis_state(31, 0);
  double norm_dev = 0.0, dchi_max = -1.0;
  for (double dl : {1e-3, 5e-2, 0.3})
    for (double tau : {0.5, 3.0, 9.0}) {
      const DriveProtocol p = DriveProtocol::exponential(dl, tau);
      const DysonState s = dyson_state(ho, p, ground, tau);
      norm_dev = std::max(norm_dev, std::abs(assembled_state(s, dl).norm() - 1.0));
      dchi_max = std::max(dchi_max, linear_observables(ho, p, ground, setup).delta_chi);
    }
  add(out, "perturbation: renormalized state norm = 1", norm_dev, 1e-12);
  add(out, "perturbation: delta chi lin <= 0", dchi_max, 1e-12);

  const DriveProtocol sudden = DriveProtocol::exponential(5e-2, 1e-6);
  const LinearObservables o = linear_observables(ho, sudden, ground, setup);
  add(out, "perturbation: sudden limit p_e(tau) -> 1", std::abs(o.probabilities[0] - 1.0), 1e-6);

  // Linearization order against the exact path at tau = 3.
  std::vector<double> xs, ys;
  for (double dl : {1e-3, 1e-2, 1e-1}) {
    const DriveProtocol p = DriveProtocol::exponential(dl, 3.0);
    const double lin = linear_observables(ho, p, ground, setup).delta_chi;
    const double ex = exact_observables({1.0, 30, 0.0, 1e-10}, p, ground, setup).delta_chi;
    xs.push_back(std::log(dl));
    ys.push_back(std::log(std::abs(lin - ex)));
  }
  add(out, "perturbation: |dchi_lin - dchi_exact| slope", (ys[2] - ys[0]) / (xs[2] - xs[0]), 1.8, true);
}

void information_checks(std::vector<InvariantCheck>& out) {
  double round_trip = 0.0;
  for (double dchi : {-0.3, -1e-5, -2.5e-9})
    for (double qsl : {0.01, 0.4, 7.0}) {
      LearningRecord r{1.0, dchi, qsl, omega(dchi, qsl), Method::Linear, {}};
      round_trip = std::max(round_trip, std::abs(r.omega.value * r.tau_qsl - r.delta_chi));
    }
  add(out, "information: omega * tau_qsl = delta chi", round_trip, 1e-9);
}

void oracle_checks(std::vector<InvariantCheck>& out) {
  const HarmonicSystem hs{1.0, 20, 0.0, 1e-10};
  const SystemMatrices ho = build_ho(hs);
  const StateVector ground = StateVector::basis_state(21, 0);
  const DriveProtocol p = DriveProtocol::exponential(5e-2, 1.0);
  const StateVector a = propagate(ho, p, StepPlan(1e-3, 1.0), ground);
  const StateVector e = exact_propagate(hs, p, 1.0, ground);
  add(out, "oracle: unitarity", std::abs(a.squared_norm() - 1.0), 1e-12);
  add(out, "oracle vs exact (dt = 1e-3)", (a.amplitudes() - e.amplitudes()).cwiseAbs().maxCoeff(), 1e-5);

  double surfaced = 0.0;
  try {
    (void)propagate(ho, p, StepPlan(0.01, 1.0), ground);
  } catch (const PreconditionError&) {
    surfaced = 1.0;
  }
  add(out, "oracle: coarse dt raises a precondition error", surfaced, 1.0, true);
}

void sweep_checks(std::vector<InvariantCheck>& out) {
  double worst = -1.0;
  for (const char* id : {"fig2", "fig4"}) {
    nlohmann::json preset = figure_preset(id);
    preset["tau_grid"]["count"] = 25;
    const SweepResult r = sweep_parallel(parse_run_config(preset), 0);
    for (const SweepRow& row : r.rows) worst = std::max(worst, row.delta_chi);
  }
  add(out, "sweep: delta chi <= 0 over fig2/fig4 presets", worst, 1e-12);
}

}  // namespace

std::vector<InvariantCheck> run_validation() {
  std::vector<InvariantCheck> out;
  hilbert_checks(out);
  systems_checks(out);
  exact_checks(out);
  linear_checks(out);
  information_checks(out);
  oracle_checks(out);
  sweep_checks(out);
  return out;
}

}  // namespace qlearn
