#include "qlearn/exact_ho.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qlearn/quadrature.hpp"

namespace qlearn {

std::string_view to_string(DisplacementOrdering o) {
  return o == DisplacementOrdering::Interaction ? "interaction" : "displacement-left";
}

DisplacementOrdering ordering_from_string(std::string_view s) {
  if (s == "interaction") return DisplacementOrdering::Interaction;
  if (s == "displacement-left") return DisplacementOrdering::DisplacementLeft;
  throw ConfigError("unknown operator ordering '" + std::string(s) + "'");
}

namespace {

constexpr Complex kI{0.0, 1.0};

Complex ipow(Complex z, std::size_t k) {
  Complex r = 1.0;
  for (std::size_t i = 0; i < k; ++i) r *= z;
  return r;
}

double ground_energy(const HarmonicSystem& s) { return s.energy_shift + 0.5 * s.omega0; }

// int_0^t shape(s) e^{i w s} ds by composite Gauss-Legendre.
Complex shape_fourier_quad(const DriveProtocol& protocol, double omega, double t, const GaussLegendre& rule) {
  if (t <= 0.0) return 0.0;
  const auto f = [&](double s) { return protocol.shape_at(s) * std::exp(kI * (omega * s)); };
  return rule.integrate(f, 0.0, t, oscillation_panels(omega, t));
}

// int_0^t dt2 int_0^t2 dt1 shape(t1) shape(t2) sin(w (t2 - t1)), iterated quadrature.
double triangle_sine_integral(const DriveProtocol& protocol, double omega, double t, const GaussLegendre& rule) {
  if (t <= 0.0) return 0.0;
  const auto outer = [&](double t2) {
    const auto inner = [&](double t1) { return protocol.shape_at(t1) * std::sin(omega * (t2 - t1)); };
    return protocol.shape_at(t2) * rule.integrate(inner, 0.0, t2, oscillation_panels(omega, t2));
  };
  return rule.integrate(outer, 0.0, t, oscillation_panels(omega, t));
}

// int_0^t int_0^t shape(t1) shape(t2) cos(w (t1 - t2)) over the full square.
double square_cosine_integral(const DriveProtocol& protocol, double omega, double t, const GaussLegendre& rule) {
  if (t <= 0.0) return 0.0;
  std::vector<double> x, w;
  const std::size_t panels = oscillation_panels(omega, t);
  std::vector<double> nodes, weights;
  const double width = t / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    rule.map_to(width * static_cast<double>(p), width * static_cast<double>(p + 1), x, w);
    nodes.insert(nodes.end(), x.begin(), x.end());
    weights.insert(weights.end(), w.begin(), w.end());
  }
  std::vector<double> shape(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) shape[i] = protocol.shape_at(nodes[i]);
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j)
      row += weights[j] * shape[j] * std::cos(omega * (nodes[i] - nodes[j]));
    acc += weights[i] * shape[i] * row;
  }
  return acc;
}

// Coefficients that only need alpha: W = |alpha|^2, sigma left at 0 (global phase only).
HusimiCoefficients coefficients_from_alpha(Complex alpha, double omega, double t) {
  HusimiCoefficients c;
  c.alpha = alpha;
  c.w = std::norm(alpha);
  // int e^{iwu} f(u) du = -sqrt(2) alpha
  const Complex fourier_f = -std::sqrt(2.0) * alpha;
  c.eta_pair = -kI * fourier_f;
  c.xi_pair = -kI * std::exp(-kI * (omega * t)) * fourier_f;
  return c;
}

// Occupation amplitudes of D(i alpha)|0>, truncated at n_max, with the tail check.
CVector coherent_amplitudes(const HarmonicSystem& system, Complex alpha) {
  const std::size_t dim = system.n_max + 1;
  const double w = std::norm(alpha);
  if (w > 0.0) {
    const double n = static_cast<double>(system.n_max);
    const double log_top = -w + n * std::log(w) - std::lgamma(n + 1.0);
    if (log_top > std::log(system.truncation_tol)) {
      std::ostringstream os;
      os << "exact_propagate: level " << system.n_max << " holds " << std::exp(log_top) << " > "
         << system.truncation_tol << "; raise n_max";
      throw TruncationError(os.str());
    }
  }
  CVector c(static_cast<Eigen::Index>(dim));
  const Complex z = kI * alpha;
  Complex term = std::exp(-0.5 * w);
  for (std::size_t k = 0; k < dim; ++k) {
    c(static_cast<Eigen::Index>(k)) = term;
    term *= z / std::sqrt(static_cast<double>(k + 1));
  }
  return c;
}

bool is_ground_state(const StateVector& s) { return std::abs(std::abs(s.amplitudes()(0)) - 1.0) < 1e-15; }

}  // namespace

Complex husimi_alpha(const HarmonicSystem& system, const DriveProtocol& protocol, double t, std::size_t order) {
  const GaussLegendre rule(order);
  const double w0 = system.omega0;
  return std::sqrt(w0 * w0 * w0 / 2.0) * protocol.delta_lambda() * shape_fourier_quad(protocol, w0, t, rule);
}

HusimiCoefficients husimi_coefficients(const HarmonicSystem& system, const DriveProtocol& protocol, double t,
                                       const ExactOptions& options) {
  const GaussLegendre one_d(options.coeff_order);
  const GaussLegendre two_d(options.beta_order);
  const double w0 = system.omega0;
  const double dl = protocol.delta_lambda();
  const double w3 = w0 * w0 * w0;

  HusimiCoefficients c;
  const Complex fourier_shape = shape_fourier_quad(protocol, w0, t, one_d);
  c.alpha = std::sqrt(w3 / 2.0) * dl * fourier_shape;

  const auto sq = [&](double s) {
    const double v = protocol.shape_at(s);
    return v * v;
  };
  c.gamma = 0.5 * w0 * w0 * dl * dl * (t > 0.0 ? one_d.integrate(sq, 0.0, t) : 0.0);

  // beta carries sin(w (t1 - t2)) with t1 < t2, i.e. minus the triangle integral.
  const double tri = triangle_sine_integral(protocol, w0, t, two_d);
  c.beta = 0.5 * w3 * dl * dl * tri;

  // f(t) = -w0^{3/2} lambda(t): sigma and W are independent double integrals of f f.
  c.sigma = w3 * dl * dl * tri;
  c.w = 0.5 * w3 * dl * dl * square_cosine_integral(protocol, w0, t, two_d);

  const Complex fourier_f = -std::pow(w0, 1.5) * dl * fourier_shape;
  c.eta_pair = -kI * fourier_f;
  c.xi_pair = -kI * std::exp(-kI * (w0 * t)) * fourier_f;
  return c;
}

Complex husimi_matrix_element(const HarmonicSystem& system, const HusimiCoefficients& c, double t, std::size_t m,
                              std::size_t n) {
  if (m > system.n_max || n > system.n_max) throw DomainError("husimi_matrix_elements: level outside the basis");
  const double w0 = system.omega0;
  const Complex phase = std::exp(kI * (-ground_energy(system) * t + 0.5 * c.sigma));
  const Complex a = c.xi_pair / std::sqrt(2.0);
  // Column factor: the conjugate pairing makes the matrix unitary.
  const Complex b = -std::conj(c.eta_pair / std::sqrt(2.0));
  const std::size_t lmax = std::min(m, n);
  const double lg_mn = 0.5 * (std::lgamma(m + 1.0) + std::lgamma(n + 1.0));
  const auto coeff = [&](std::size_t l) {
    return std::exp(lg_mn - std::lgamma(l + 1.0) - std::lgamma(m - l + 1.0) - std::lgamma(n - l + 1.0));
  };

  const double w = c.w;
  const bool generating_form_safe =
      w >= 1e-300 && (lmax == 0 || static_cast<double>(lmax) * std::abs(std::log10(w)) < 250.0);
  Complex sum = 0.0;
  if (generating_form_safe) {
    // C(m,n|W) = sum_l m! n! / (l! (m-l)! (n-l)!) (-W)^{-l}
    const Complex ab = ipow(a, m) * ipow(b, n);
    for (std::size_t l = 0; l <= lmax; ++l) sum += coeff(l) * std::pow(-w, -static_cast<double>(l)) * ab;
  } else {
    // a b = -e^{-i w0 t} W, so a^m b^n (-W)^{-l} = a^{m-l} b^{n-l} e^{-i w0 t l}.
    for (std::size_t l = 0; l <= lmax; ++l)
      sum += coeff(l) * ipow(a, m - l) * ipow(b, n - l) * std::exp(-kI * (w0 * t * static_cast<double>(l)));
  }
  return phase * std::exp(-0.5 * w) * sum;
}

Complex husimi_matrix_elements(const HarmonicSystem& system, const DriveProtocol& protocol, double t,
                               std::size_t m, std::size_t n, const ExactOptions& options) {
  return husimi_matrix_element(system, husimi_coefficients(system, protocol, t, options), t, m, n);
}

CMatrix husimi_propagator(const HarmonicSystem& system, const HusimiCoefficients& c, double t) {
  const auto dim = static_cast<Eigen::Index>(system.n_max + 1);
  CMatrix u(dim, dim);
  for (Eigen::Index m = 0; m < dim; ++m)
    for (Eigen::Index n = 0; n < dim; ++n)
      u(m, n) = husimi_matrix_element(system, c, t, static_cast<std::size_t>(m), static_cast<std::size_t>(n));
  return u;
}

namespace {

// Energies as a vector for the free phases.
RVector level_energies(const HarmonicSystem& system) {
  RVector e(static_cast<Eigen::Index>(system.n_max + 1));
  for (Eigen::Index k = 0; k < e.size(); ++k)
    e(k) = system.energy_shift + system.omega0 * (static_cast<double>(k) + 0.5);
  return e;
}

CVector free_phases(const RVector& energies, double t) {
  CVector p(energies.size());
  for (Eigen::Index k = 0; k < energies.size(); ++k) p(k) = std::exp(-kI * (energies(k) * t));
  return p;
}

CVector propagate_with(const HarmonicSystem& system, const HusimiCoefficients& c, double t,
                       const CVector& initial, DisplacementOrdering ordering, bool ground, bool with_phase) {
  const RVector energies = level_energies(system);
  const CVector phases = free_phases(energies, t);
  const Complex global = with_phase ? std::exp(kI * c.beta) : Complex(1.0);
  const Complex left_phase = with_phase ? std::exp(-kI * c.gamma) : Complex(1.0);
  CVector out;
  if (ground) {
    const CVector coh = coherent_amplitudes(system, c.alpha) * initial(0);
    if (ordering == DisplacementOrdering::Interaction)
      out = global * phases.cwiseProduct(coh);
    else
      out = global * left_phase * phases(0) * coh;
  } else {
    HusimiCoefficients cc = c;
    if (!with_phase) cc.sigma = 0.0;
    const CMatrix u = husimi_propagator(system, cc, t);
    if (ordering == DisplacementOrdering::Interaction) {
      out = u * initial;
    } else {
      // e^{i beta - i gamma} D e^{-iH0 t} = e^{-i gamma} e^{iH0 t} U_int e^{-iH0 t}
      const CVector rotated = phases.cwiseProduct(initial);
      out = left_phase * phases.conjugate().cwiseProduct(u * rotated);
    }
    const double deficit = 1.0 - out.squaredNorm();
    if (deficit > system.truncation_tol) {
      std::ostringstream os;
      os << "exact_propagate: truncated basis loses " << deficit << " of the norm; raise n_max";
      throw TruncationError(os.str());
    }
  }
  out /= out.norm();
  return out;
}

}  // namespace

StateVector exact_propagate(const HarmonicSystem& system, const DriveProtocol& protocol, double t,
                            const StateVector& initial, const ExactOptions& options) {
  if (initial.dimension() != system.n_max + 1) throw InvariantError("exact_propagate: dimension mismatch");
  const HusimiCoefficients c = husimi_coefficients(system, protocol, t, options);
  return StateVector(
      propagate_with(system, c, t, initial.amplitudes(), options.ordering, is_ground_state(initial), true));
}

ExactObservables exact_observables(const HarmonicSystem& system, const DriveProtocol& protocol,
                                   const StateVector& initial, const MeasurementSetup& setup,
                                   const ExactOptions& options) {
  const SystemMatrices sys = build_ho(system);
  const double tau = protocol.tau();
  const bool ground = is_ground_state(initial);

  const StateVector final_state = exact_propagate(system, protocol, tau, initial, options);
  const DensityOperator rho0 = DensityOperator::pure(initial);
  const DensityOperator rho_tau = DensityOperator::pure(final_state);

  ExactObservables out;
  out.delta_chi = delta_chi(rho0, rho_tau, setup);
  for (const Projector& pi : setup.projectors())
    out.probabilities.push_back((pi.matrix() * rho_tau.matrix()).trace().real());
  out.fidelity = std::norm(initial.amplitudes().dot(final_state.amplitudes()));

  // Only |alpha(t)| and the ordering enter ||rho H||; the global phase drops out of rho.
  const GaussLegendre time_rule(options.time_nodes);
  std::vector<double> ts, ws;
  time_rule.map_to(0.0, tau, ts, ws);
  double acc = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const Complex alpha = husimi_alpha(system, protocol, ts[i], options.coeff_order);
    const CVector psi = propagate_with(system, coefficients_from_alpha(alpha, system.omega0, ts[i]), ts[i],
                                       initial.amplitudes(), options.ordering, ground, false);
    const CMatrix h = sys.h0 + protocol.lambda_at(ts[i]) * sys.v_op;
    const double norm = options.p == SchattenP::Two ? (h * psi).norm() : schatten_norm(outer(psi) * h, options.p);
    acc += ws[i] * norm;
  }
  out.e_tau = acc / tau;
  out.tau_qsl = qsl_time_from_fidelity(out.fidelity, out.e_tau);
  out.omega = omega(out.delta_chi, out.tau_qsl);
  return out;
}

}  // namespace qlearn
