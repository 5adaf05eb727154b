// Acceptance criteria, one PASS/FAIL line each. Exit status 1 when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qlearn/config.hpp"
#include "qlearn/exact_ho.hpp"
#include "qlearn/information.hpp"
#include "qlearn/oracle.hpp"
#include "qlearn/perturbation.hpp"
#include "qlearn/sweep.hpp"
#include "qlearn/systems.hpp"

using namespace qlearn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const char* name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s  %-28s %s  [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RunConfig ho_config(double delta_lambda, std::vector<std::string> protocols, double tmin, double tmax,
                    std::size_t count) {
  nlohmann::json j = figure_preset("fig2");
  j["cases"][0]["delta_lambda"] = delta_lambda;
  j["cases"][0]["protocols"] = protocols;
  j["tau_grid"] = {{"min", tmin}, {"max", tmax}, {"count", count}, {"spacing", "linear"}};
  return parse_run_config(j);
}

std::vector<double> omegas(const std::vector<SweepRow>& rows) {
  std::vector<double> out;
  for (const SweepRow& r : rows) out.push_back(r.omega.value);
  return out;
}

Outcome oracle_equivalence() {
  const HarmonicSystem hs{1.0, 60, 0.0, 1e-10};
  const SystemMatrices sys = build_ho(hs);
  const StateVector ground = StateVector::basis_state(61, 0);
  double worst = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (double tau : {1.0, 3.0, 2.0 * std::numbers::pi, 10.0}) {
    const DriveProtocol p = DriveProtocol::exponential(5e-2, tau);
    const StateVector exact = exact_propagate(hs, p, tau, ground);
    const StateVector brute = propagate(sys, p, StepPlan::covering(tau, 1e-4), ground);
    worst = std::max(worst, (exact.amplitudes() - brute.amplitudes()).cwiseAbs().maxCoeff());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= 1e-5 && secs < 120.0,
          fmt("max amplitude deviation %.2e (<= 1e-5), runtime %.1f s (< 120 s)", worst, secs)};
}

Outcome fig2_agreement() {
  const SweepResult r = sweep(ho_config(5e-2, {"exp", "lin"}, 0.5, 20.0, 200));
  double worst_rel = 0.0, worst_chi = -1.0;
  std::size_t points = 0;
  for (ProtocolKind k : {ProtocolKind::Exponential, ProtocolKind::Linear}) {
    const auto ex = select(r, Method::Exact, k, "ho");
    const auto li = select(r, Method::Linear, k, "ho");
    double scale = 0.0, dev = 0.0;
    for (std::size_t i = 0; i < ex.size(); ++i) {
      scale = std::max(scale, std::abs(ex[i].omega.value));
      dev = std::max(dev, std::abs(li[i].omega.value - ex[i].omega.value));
      worst_chi = std::max({worst_chi, ex[i].delta_chi, li[i].delta_chi});
      if (!ex[i].omega.defined() || !li[i].omega.defined()) worst_rel = 1e300;
    }
    points = ex.size();
    worst_rel = std::max(worst_rel, dev / scale);
  }
  return {worst_rel <= 0.05 && worst_chi <= 1e-12 && points == 200,
          fmt("max rel |dOmega| %.3f%% (<= 5%%), max dchi %.2e (<= 1e-12), %zu tau points", 100.0 * worst_rel,
              worst_chi, points)};
}

Outcome perturbative_order() {
  const HarmonicSystem hs{1.0, 60, 0.0, 1e-10};
  const SystemMatrices sys = build_ho(hs);
  const MeasurementSetup setup = parity_projectors(sys.basis);
  const StateVector ground = StateVector::basis_state(61, 0);
  std::vector<double> xs, ys;
  for (double dl : {1e-3, 3e-3, 1e-2, 3e-2, 1e-1}) {
    const DriveProtocol p = DriveProtocol::exponential(dl, 3.0);
    const double lin = linear_observables(sys, p, ground, setup).delta_chi;
    const double ex = exact_observables(hs, p, ground, setup).delta_chi;
    xs.push_back(std::log(dl));
    ys.push_back(std::log(std::abs(lin - ex)));
  }
  const double s = slope(xs, ys);
  return {s >= 1.8, fmt("log-log slope %.3f (>= 1.8)", s)};
}

Outcome fig3_underestimate() {
  std::string detail;
  bool pass = true;
  for (const char* id : {"fig3a", "fig3b"}) {
    const SweepResult r = sweep(parse_run_config(figure_preset(id)));
    const auto ex = select(r, Method::Exact, ProtocolKind::Exponential, "ho");
    const auto li = select(r, Method::Linear, ProtocolKind::Exponential, "ho");
    std::size_t at = 0;
    for (std::size_t i = 0; i < ex.size(); ++i)
      if (std::abs(ex[i].omega.value) > std::abs(ex[at].omega.value)) at = i;
    double lin_peak = 0.0;
    for (const SweepRow& row : li) lin_peak = std::max(lin_peak, std::abs(row.omega.value));
    const double ratio_at = std::abs(li[at].omega.value) / std::abs(ex[at].omega.value);
    const double ratio_peak = lin_peak / std::abs(ex[at].omega.value);
    pass = pass && ratio_at <= 1.0 && ratio_peak <= 1.0 && li[at].omega.defined() && ex[at].omega.defined();
    detail += fmt("%s: |lin|/|exact| %.3f at tau %.2f, peak ratio %.3f; ", id, ratio_at, ex[at].tau, ratio_peak);
  }
  return {pass, detail + "(<= 1)"};
}

Outcome oscillation_period() {
  const SweepResult r = sweep(ho_config(5e-2, {"exp"}, 0.5, 30.0, 600));
  const auto ex = select(r, Method::Exact, ProtocolKind::Exponential, "ho");
  const std::vector<double> om = omegas(ex);
  std::vector<double> minima;
  for (std::size_t i = 1; i + 1 < om.size(); ++i) {
    if (!(om[i] < om[i - 1] && om[i] <= om[i + 1])) continue;
    // Parabolic refinement through the three samples.
    const double h = ex[i + 1].tau - ex[i].tau;
    const double denom = om[i - 1] - 2.0 * om[i] + om[i + 1];
    minima.push_back(ex[i].tau + (denom > 0.0 ? 0.5 * h * (om[i - 1] - om[i + 1]) / denom : 0.0));
  }
  if (minima.size() < 3) return {false, fmt("only %zu minima found", minima.size())};
  double worst = 0.0;
  std::string spacings;
  for (std::size_t i = 1; i < minima.size(); ++i) {
    const double gap = minima[i] - minima[i - 1];
    worst = std::max(worst, std::abs(gap - 2.0 * std::numbers::pi));
    spacings += fmt("%.3f ", gap);
  }
  return {worst <= 0.2, fmt("%zu minima, spacings %s| max |gap - 2pi| %.3f (<= 0.2)", minima.size(),
                            spacings.c_str(), worst)};
}

Outcome sudden_and_plateau() {
  const HarmonicSystem hs{1.0, 60, 0.0, 1e-10};
  const SystemMatrices sys = build_ho(hs);
  const MeasurementSetup setup = parity_projectors(sys.basis);
  const StateVector ground = StateVector::basis_state(61, 0);
  double sudden = 0.0;
  for (ProtocolKind k : {ProtocolKind::Exponential, ProtocolKind::Linear}) {
    const DriveProtocol p = DriveProtocol::make(k, 5e-2, 1e-6);
    const auto ex = exact_observables(hs, p, ground, setup).probabilities;
    const auto li = linear_observables(sys, p, ground, setup).probabilities;
    sudden = std::max({sudden, std::abs(ex[0] - 1.0), std::abs(ex[1]), std::abs(li[0] - 1.0), std::abs(li[1])});
  }
  const SweepResult r = sweep(parse_run_config(figure_preset("fig2")));
  double plateau = 0.0;
  for (ProtocolKind k : {ProtocolKind::Exponential, ProtocolKind::Linear}) {
    const auto li = select(r, Method::Linear, k, "ho");
    const SweepRow* at18 = nullptr;
    for (const SweepRow& row : li)
      if (row.tau >= 18.0 && at18 == nullptr) at18 = &row;
    const SweepRow& at20 = li.back();
    plateau = std::max(plateau, std::abs(at20.omega.value - at18->omega.value) / std::abs(at18->omega.value));
  }
  return {sudden <= 1e-6 && plateau < 0.02,
          fmt("|p(1e-6) - p(0)| %.2e (<= 1e-6), Omega_lin change 18 -> 20: %.3f%% (< 2%%)", sudden, 100.0 * plateau)};
}

Outcome pt_spectrum() {
  const PtSpectrum s = pt_bound_spectrum({20, 1.0, 15.0, 3000});
  double worst = 0.0;
  for (int n = 0; n <= 10; ++n) {
    const double analytic = -0.5 * (20.0 - n) * (20.0 - n);
    worst = std::max(worst, std::abs(s.energies[static_cast<std::size_t>(n)] - analytic) / std::abs(analytic));
  }
  return {s.energies.size() == 20 && worst <= 1e-2,
          fmt("%zu bound states (== 20), max relative error n <= 10: %.2e (<= 1e-2)", s.energies.size(), worst)};
}

Outcome fig6_sync() {
  const SweepResult r = sweep(parse_run_config(figure_preset("fig6")));
  const auto pt = select(r, Method::Linear, ProtocolKind::Exponential, "pt");
  const auto ho = select(r, Method::Linear, ProtocolKind::Exponential, "ho");
  double outer = 0.0, inner = 0.0;
  for (std::size_t i = 0; i < pt.size(); ++i) {
    const double t = pt[i].tau;
    const double rel = std::abs(pt[i].omega.value - ho[i].omega.value) / std::abs(ho[i].omega.value);
    if ((t >= 0.1 && t <= 1.0) || (t >= 15.0 && t <= 20.0)) outer = std::max(outer, rel);
    if (t >= 2.0 && t <= 10.0) inner = std::max(inner, rel);
  }
  return {outer <= 0.10 && inner >= 0.20,
          fmt("max rel discrepancy on [0.1,1]u[15,20] %.3f (<= 0.10), max on [2,10] %.3f (>= 0.20)", outer, inner)};
}

Outcome identity_suite() {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> normal;
  const HarmonicSystem hs{1.0, 60, 0.0, 1e-10};
  const SystemMatrices sys = build_ho(hs);
  const CMatrix h = sys.h0 + 0.05 * sys.v_op;
  double rho_h = 0.0;
  for (int k = 0; k < 100; ++k) {
    CVector psi(61);
    for (Eigen::Index i = 0; i < 61; ++i) psi(i) = Complex(normal(gen), normal(gen));
    psi /= psi.norm();
    rho_h = std::max(rho_h, std::abs(schatten_norm(outer(psi) * h, SchattenP::Two) - std::sqrt(psi.dot(h * h * psi).real())));
  }

  const StateVector ground = StateVector::basis_state(61, 0);
  double norm_dev = 0.0, w_dev = 0.0;
  for (double dl : {1e-3, 5e-2, 0.3})
    for (double tau : {0.5, 3.0, 12.0})
      for (ProtocolKind k : {ProtocolKind::Exponential, ProtocolKind::Linear}) {
        const DriveProtocol p = DriveProtocol::make(k, dl, tau);
        norm_dev = std::max(norm_dev, std::abs(assembled_state(dyson_state(sys, p, ground, tau), dl).norm() - 1.0));
        const HusimiCoefficients c = husimi_coefficients(hs, p, tau);
        w_dev = std::max(w_dev, std::abs(c.w - std::norm(c.alpha)));
      }

  // Thermal blocks on a 4x4 example with two parity outcomes.
  const double beta = 0.7;
  CMatrix h0 = CMatrix::Zero(4, 4), h1 = CMatrix::Zero(4, 4);
  h0.diagonal() << 0.2, 1.1, 0.9, 2.3;
  h0(0, 2) = h0(2, 0) = 0.3;
  h1.diagonal() << 0.5, 0.8, 1.4, 1.9;
  h1(1, 3) = h1(3, 1) = Complex(0.2, 0.0);
  const Basis basis(BasisKind::HoFock, {0.5, 1.5, 2.5, 3.5}, {Parity::Even, Parity::Odd, Parity::Even, Parity::Odd});
  const MeasurementSetup setup = parity_projectors(basis);
  CMatrix rho0 = CMatrix::Zero(4, 4), rho1 = CMatrix::Zero(4, 4);
  for (const Projector& pi : setup.projectors()) {
    rho0 += thermal_block(beta, h0, pi);
    rho1 += thermal_block(beta, h1, pi);
  }
  const ThermalBound tb = thermal_bound_check(beta, h0, h1, setup, rho0, rho1, 1.0);
  const double thermal = std::abs(tb.delta_chi_magnitude - std::abs(tb.beta_delta_e));

  double round_trip = 0.0;
  for (double dchi : {-0.4, -3e-3, -7e-8})
    for (double qsl : {1e-3, 0.2, 9.0}) {
      const Rate w = omega(dchi, qsl);
      round_trip = std::max(round_trip, std::abs(w.value * qsl - dchi));
    }
  const bool pass = rho_h <= 1e-10 && norm_dev <= 1e-12 && thermal <= 1e-8 && round_trip <= 1e-9 && w_dev <= 1e-9;
  return {pass, fmt("||rho H|| %.1e, norm %.1e, thermal %.1e, round-trip %.1e, W %.1e", rho_h, norm_dev, thermal,
                    round_trip, w_dev)};
}

std::string run_cli(const std::string& config, const std::string& out, int workers) {
  const std::string cmd = fmt("QLEARN_WORKERS=%d '%s' sweep --config '%s' --out '%s'", workers, QLEARN_CLI_PATH,
                              config.c_str(), out.c_str());
  if (std::system(cmd.c_str()) != 0) throw std::runtime_error("cli failed: " + cmd);
  std::ifstream in(out, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

Outcome determinism() {
  nlohmann::json j = figure_preset("fig2");
  j["tau_grid"]["count"] = 40;
  const std::string dir = QLEARN_WORK_DIR;
  const std::string config = dir + "/determinism_config.json";
  std::ofstream(config) << j.dump(2);
  const std::string a = run_cli(config, dir + "/determinism_a.csv", 1);
  const std::string b = run_cli(config, dir + "/determinism_b.csv", 1);
  const std::string c = run_cli(config, dir + "/determinism_c.csv", 4);
  const bool pass = !a.empty() && a == b && a == c;
  return {pass, fmt("%zu bytes, repeat identical: %s, 1 vs 4 workers identical: %s", a.size(), a == b ? "yes" : "no",
                    a == c ? "yes" : "no")};
}

}  // namespace

int main() {
  report("oracle equivalence", oracle_equivalence);
  report("fig2 agreement", fig2_agreement);
  report("perturbative order", perturbative_order);
  report("fig3 underestimate", fig3_underestimate);
  report("oscillation period", oscillation_period);
  report("sudden limit and plateau", sudden_and_plateau);
  report("pt spectrum", pt_spectrum);
  report("fig6 out of sync", fig6_sync);
  report("identity suite", identity_suite);
  report("determinism", determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
