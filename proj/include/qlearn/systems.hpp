#pragma once

// Case-study Hamiltonians and drive schedules.
//
//   harmonic oscillator:  H(t) = p^2/2 + w0^2 x^2/2 - w0^2 lambda(t) x
//   Poschl-Teller well:   H(t) = p^2/2 - nu(nu+1)/2 sech^2(x) - eta lambda(t) x
//
// Both are written as H0 + lambda(t) V_op with lambda(t) = delta_lambda * shape(t/tau).

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "qlearn/hilbert.hpp"

namespace qlearn {

enum class ProtocolKind { Exponential, Linear, Tabulated };

std::string_view to_string(ProtocolKind k);
ProtocolKind protocol_kind_from_string(std::string_view s);

/// lambda(t) on [0, tau] with lambda(0) = 0 and lambda(tau) = delta_lambda.
///   exponential: delta_lambda (1 - e^{t/tau}) / (1 - e)
///   linear:      delta_lambda t / tau
///   tabulated:   piecewise-linear through uniform samples of the unit shape
class DriveProtocol {
 public:
  static DriveProtocol exponential(double delta_lambda, double tau);
  static DriveProtocol linear(double delta_lambda, double tau);
  /// `shape` holds samples of lambda/delta_lambda on a uniform grid over [0, tau];
  /// first sample 0, last sample 1.
  static DriveProtocol tabulated(double delta_lambda, double tau, std::vector<double> shape);
  static DriveProtocol make(ProtocolKind kind, double delta_lambda, double tau);

  [[nodiscard]] ProtocolKind kind() const { return kind_; }
  [[nodiscard]] double delta_lambda() const { return delta_lambda_; }
  [[nodiscard]] double tau() const { return tau_; }

  /// Throws DomainError for t outside [0, tau].
  [[nodiscard]] double lambda_at(double t) const;
  /// lambda(t) / delta_lambda; same domain.
  [[nodiscard]] double shape_at(double t) const;

  /// Closed form of int_0^t shape(s) e^{i omega s} ds; nullopt for tabulated drives.
  [[nodiscard]] std::optional<Complex> shape_fourier_integral(double omega, double t) const;
  /// Closed form of int_0^t shape(s)^2 ds; nullopt for tabulated drives.
  [[nodiscard]] std::optional<double> shape_squared_integral(double t) const;

 private:
  DriveProtocol(ProtocolKind kind, double delta_lambda, double tau, std::vector<double> table);
  void check_time(double t) const;

  ProtocolKind kind_;
  double delta_lambda_;
  double tau_;
  std::vector<double> table_;
};

/// int_0^t e^{z s} ds, stable for small |z t|.
Complex exp_integral(Complex z, double t);
/// int_0^t s e^{z s} ds, stable for small |z t|.
Complex exp_moment_integral(Complex z, double t);

/// H0, position operator and drive operator over a truncated eigenbasis.
struct SystemMatrices {
  Basis basis;
  CMatrix h0;
  CMatrix x;
  CMatrix v_op;  // H(t) = h0 + lambda(t) * v_op
};

struct HarmonicSystem {
  double omega0 = 1.0;
  /// Highest retained Fock level; the basis holds levels 0..n_max.
  std::size_t n_max = 60;
  /// Constant added to every level (harmonic approximation of the PT well).
  double energy_shift = 0.0;
  /// Largest permitted occupation of level n_max in any produced state.
  double truncation_tol = 1e-10;
};

/// Fock basis: E_n = shift + w0 (n + 1/2), X_{n,n+1} = sqrt((n+1)/(2 w0)), V_op = -w0^2 X.
SystemMatrices build_ho(const HarmonicSystem& system);

/// Harmonic approximation of the nu = 20 well used for the PT/HO comparison.
inline constexpr double kPtHarmonicOmega = 18.65;
inline constexpr double kPtHarmonicShift = -209.325;

struct PoschlTellerSystem {
  int nu = 20;
  double eta = 1.0;
  double half_width = 15.0;
  std::size_t grid_points = 3000;
};

double poschl_teller_potential(int nu, double x);

/// Bound states of the grid Hamiltonian (second-order finite differences, Dirichlet walls).
struct PtSpectrum {
  std::vector<double> grid;    // interior points, symmetric about 0
  double spacing = 0.0;
  std::vector<double> energies;  // negative eigenvalues, ascending
  RMatrix vectors;               // unit-norm grid eigenvectors, one column per bound state
  std::vector<Parity> parity;
};

PtSpectrum pt_bound_spectrum(const PoschlTellerSystem& system);

/// Bound-state basis of the PT well with X by trapezoidal quadrature and V_op = -eta X.
/// Throws ConfigError when fewer than max(2, min_levels) bound states exist.
SystemMatrices build_pt(const PoschlTellerSystem& system, std::size_t min_levels = 2);

}  // namespace qlearn
