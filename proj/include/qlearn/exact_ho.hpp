#pragma once

// Exact propagator of the linearly driven oscillator.
//
// With f(t) = -w0^2 lambda(t) x_0 and x_0 = 1/sqrt(w0) the oscillator length, the interaction
// picture Hamiltonian is linear in a, a^dagger, the Magnus series stops at second order and
//
//   U(t) = e^{-i H0 t} e^{i beta} D(i alpha),   D(z) = exp(z a^dagger - z^* a).
//
// The displacement-left ordering e^{i beta} e^{-i gamma} D(i alpha) e^{-i H0 t} is also
// available; it yields the same occupations but different relative phases.

#include <cstddef>
#include <string_view>
#include <vector>

#include "qlearn/hilbert.hpp"
#include "qlearn/information.hpp"
#include "qlearn/systems.hpp"

namespace qlearn {

enum class DisplacementOrdering {
  Interaction,  // e^{-iH0 t} e^{i beta} D(i alpha); agrees with the brute-force propagator
  DisplacementLeft,  // e^{i beta} e^{-i gamma} D(i alpha) e^{-iH0 t}
};

std::string_view to_string(DisplacementOrdering o);
DisplacementOrdering ordering_from_string(std::string_view s);

struct HusimiCoefficients {
  Complex alpha;   // sqrt(w0^3/2) int e^{i w0 s} lambda(s) ds
  double beta = 0.0;
  double gamma = 0.0;
  double sigma = 0.0;  // = 2 beta
  double w = 0.0;      // = |alpha|^2, computed as an independent double integral
  Complex xi_pair;     // xi + i xi_dot
  Complex eta_pair;    // eta - i eta'
};

struct ExactOptions {
  std::size_t coeff_order = 64;  // alpha, gamma
  std::size_t beta_order = 48;   // beta, sigma, W
  std::size_t time_nodes = 96;   // E_tau
  DisplacementOrdering ordering = DisplacementOrdering::Interaction;
  SchattenP p = SchattenP::Two;
};

/// Coefficients at time t of the drive. Throws ConfigError for quadrature orders < 2.
HusimiCoefficients husimi_coefficients(const HarmonicSystem& system, const DriveProtocol& protocol, double t,
                                       const ExactOptions& options = {});

/// alpha alone (cheap; what the state occupations depend on).
Complex husimi_alpha(const HarmonicSystem& system, const DriveProtocol& protocol, double t,
                     std::size_t order = 64);

/// <m|U(t)|n> from the generating-function form. Unitary over the full Fock space.
Complex husimi_matrix_element(const HarmonicSystem& system, const HusimiCoefficients& c, double t, std::size_t m,
                              std::size_t n);
Complex husimi_matrix_elements(const HarmonicSystem& system, const DriveProtocol& protocol, double t,
                               std::size_t m, std::size_t n, const ExactOptions& options = {});

/// Truncated propagator matrix (n_max + 1 square) from the generating-function form.
CMatrix husimi_propagator(const HarmonicSystem& system, const HusimiCoefficients& c, double t);

/// Exact state at time t. |0> uses the coherent-state closed form; other initial states go
/// through husimi_propagator. Throws TruncationError when the top level would hold more than
/// truncation_tol.
StateVector exact_propagate(const HarmonicSystem& system, const DriveProtocol& protocol, double t,
                            const StateVector& initial, const ExactOptions& options = {});

struct ExactObservables {
  double delta_chi = 0.0;
  double tau_qsl = 0.0;
  Rate omega;
  double fidelity = 1.0;  // <psi0|rho(tau)|psi0>
  double e_tau = 0.0;
  std::vector<double> probabilities;  // p_alpha(tau)
};

ExactObservables exact_observables(const HarmonicSystem& system, const DriveProtocol& protocol,
                                   const StateVector& initial, const MeasurementSetup& setup,
                                   const ExactOptions& options = {});

}  // namespace qlearn
