#include "qlearn/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <lapacke.h>

namespace qlearn {

std::string_view to_string(ProtocolKind k) {
  switch (k) {
    case ProtocolKind::Exponential:
      return "exp";
    case ProtocolKind::Linear:
      return "lin";
    case ProtocolKind::Tabulated:
      return "tab";
  }
  return "?";
}

ProtocolKind protocol_kind_from_string(std::string_view s) {
  if (s == "exp" || s == "exponential") return ProtocolKind::Exponential;
  if (s == "lin" || s == "linear") return ProtocolKind::Linear;
  if (s == "tab" || s == "tabulated") return ProtocolKind::Tabulated;
  throw ConfigError("unknown protocol '" + std::string(s) + "'");
}

// ---- DriveProtocol --------------------------------------------------------

DriveProtocol::DriveProtocol(ProtocolKind kind, double delta_lambda, double tau, std::vector<double> table)
    : kind_(kind), delta_lambda_(delta_lambda), tau_(tau), table_(std::move(table)) {
  if (!(tau_ > 0.0) || !std::isfinite(tau_)) throw InvariantError("DriveProtocol: tau must be positive");
  if (!(delta_lambda_ >= 0.0) || !std::isfinite(delta_lambda_))
    throw InvariantError("DriveProtocol: delta_lambda must be non-negative");
  if (kind_ == ProtocolKind::Tabulated) {
    if (table_.size() < 2) throw InvariantError("DriveProtocol: table needs at least two samples");
    if (table_.front() != 0.0 || table_.back() != 1.0)
      throw InvariantError("DriveProtocol: tabulated shape must run from 0 to 1");
  }
}

DriveProtocol DriveProtocol::exponential(double delta_lambda, double tau) {
  return {ProtocolKind::Exponential, delta_lambda, tau, {}};
}

DriveProtocol DriveProtocol::linear(double delta_lambda, double tau) {
  return {ProtocolKind::Linear, delta_lambda, tau, {}};
}

DriveProtocol DriveProtocol::tabulated(double delta_lambda, double tau, std::vector<double> shape) {
  return {ProtocolKind::Tabulated, delta_lambda, tau, std::move(shape)};
}

DriveProtocol DriveProtocol::make(ProtocolKind kind, double delta_lambda, double tau) {
  if (kind == ProtocolKind::Tabulated)
    throw ConfigError("DriveProtocol::make: tabulated drives need samples");
  return {kind, delta_lambda, tau, {}};
}

void DriveProtocol::check_time(double t) const {
  const double slack = 1e-12 * tau_;
  if (!(t >= -slack && t <= tau_ + slack)) {
    std::ostringstream os;
    os << "lambda(t): t = " << t << " outside [0, " << tau_ << "]";
    throw DomainError(os.str());
  }
}

double DriveProtocol::shape_at(double t) const {
  check_time(t);
  const double u = std::clamp(t / tau_, 0.0, 1.0);
  switch (kind_) {
    case ProtocolKind::Exponential:
      return std::expm1(u) / (std::numbers::e - 1.0);
    case ProtocolKind::Linear:
      return u;
    case ProtocolKind::Tabulated: {
      const double pos = u * static_cast<double>(table_.size() - 1);
      const auto i = std::min(static_cast<std::size_t>(pos), table_.size() - 2);
      const double f = pos - static_cast<double>(i);
      return table_[i] + f * (table_[i + 1] - table_[i]);
    }
  }
  return 0.0;
}

double DriveProtocol::lambda_at(double t) const { return delta_lambda_ * shape_at(t); }

Complex exp_integral(Complex z, double t) {
  const Complex zt = z * t;
  if (std::abs(zt) < 0.5) {
    // t * sum_k (zt)^k / (k+1)!
    Complex term = 1.0;
    Complex sum = 0.0;
    for (int k = 0; k < 30; ++k) {
      sum += term;
      term *= zt / static_cast<double>(k + 2);
    }
    return t * sum;
  }
  return (std::exp(zt) - 1.0) / z;
}

Complex exp_moment_integral(Complex z, double t) {
  const Complex zt = z * t;
  if (std::abs(zt) < 0.5) {
    // t^2 * sum_k (zt)^k / (k! (k+2))
    Complex pow_over_fact = 1.0;
    Complex sum = 0.0;
    for (int k = 0; k < 30; ++k) {
      sum += pow_over_fact / static_cast<double>(k + 2);
      pow_over_fact *= zt / static_cast<double>(k + 1);
    }
    return t * t * sum;
  }
  const Complex e = std::exp(zt);
  return t * e / z - (e - 1.0) / (z * z);
}

std::optional<Complex> DriveProtocol::shape_fourier_integral(double omega, double t) const {
  check_time(t);
  const Complex iw(0.0, omega);
  switch (kind_) {
    case ProtocolKind::Exponential:
      return (exp_integral(iw + 1.0 / tau_, t) - exp_integral(iw, t)) / (std::numbers::e - 1.0);
    case ProtocolKind::Linear:
      return exp_moment_integral(iw, t) / tau_;
    case ProtocolKind::Tabulated:
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<double> DriveProtocol::shape_squared_integral(double t) const {
  check_time(t);
  switch (kind_) {
    case ProtocolKind::Exponential: {
      const double u = t / tau_;
      const double e1 = std::expm1(u);
      // (e^{u}-1)^2 integrated: tau * [(e^{2u}-1)/2 - 2(e^u - 1) + u]
      const double v = tau_ * (0.5 * std::expm1(2.0 * u) - 2.0 * e1 + u);
      const double d = std::numbers::e - 1.0;
      return v / (d * d);
    }
    case ProtocolKind::Linear:
      return t * t * t / (3.0 * tau_ * tau_);
    case ProtocolKind::Tabulated:
      return std::nullopt;
  }
  return std::nullopt;
}

// ---- harmonic oscillator --------------------------------------------------

SystemMatrices build_ho(const HarmonicSystem& system) {
  if (system.n_max < 2) throw ConfigError("build_ho: n_max must be at least 2");
  if (!(system.omega0 > 0.0)) throw ConfigError("build_ho: omega0 must be positive");
  const std::size_t dim = system.n_max + 1;
  std::vector<double> energies(dim);
  std::vector<Parity> parity(dim);
  for (std::size_t n = 0; n < dim; ++n) {
    energies[n] = system.energy_shift + system.omega0 * (static_cast<double>(n) + 0.5);
    parity[n] = (n % 2 == 0) ? Parity::Even : Parity::Odd;
  }
  const auto d = static_cast<Eigen::Index>(dim);
  CMatrix h0 = CMatrix::Zero(d, d);
  CMatrix x = CMatrix::Zero(d, d);
  for (Eigen::Index n = 0; n < d; ++n) {
    h0(n, n) = energies[static_cast<std::size_t>(n)];
    if (n + 1 < d) {
      const double xe = std::sqrt(static_cast<double>(n + 1) / (2.0 * system.omega0));
      x(n, n + 1) = xe;
      x(n + 1, n) = xe;
    }
  }
  CMatrix v = -(system.omega0 * system.omega0) * x;
  return {Basis(BasisKind::HoFock, std::move(energies), std::move(parity)), std::move(h0), std::move(x),
          std::move(v)};
}

// ---- Poschl-Teller --------------------------------------------------------

double poschl_teller_potential(int nu, double x) {
  const double s = 1.0 / std::cosh(x);
  return -0.5 * nu * (nu + 1.0) * s * s;
}

PtSpectrum pt_bound_spectrum(const PoschlTellerSystem& system) {
  if (system.nu < 1) throw ConfigError("build_pt: nu must be a positive integer");
  if (!(system.half_width > 0.0)) throw ConfigError("build_pt: half_width must be positive");
  if (system.grid_points < 16) throw ConfigError("build_pt: grid too coarse");

  const std::size_t n = system.grid_points;
  const double h = 2.0 * system.half_width / static_cast<double>(n + 1);
  PtSpectrum out;
  out.spacing = h;
  out.grid.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.grid[i] = -system.half_width + h * static_cast<double>(i + 1);

  // -1/2 psi'' + V psi with Dirichlet walls at +-L: tridiagonal.
  const double kin = 1.0 / (h * h);
  std::vector<double> diag(n), off(n - 1, -0.5 * kin);
  for (std::size_t i = 0; i < n; ++i) diag[i] = kin + poschl_teller_potential(system.nu, out.grid[i]);

  const double vl = -0.5 * system.nu * (system.nu + 1.0) - 1.0;
  const double vu = 0.0;
  const auto ni = static_cast<lapack_int>(n);

  // Count the bound states first, then fetch exactly that many vectors.
  lapack_int count = 0;
  {
    std::vector<double> d = diag, e = off;
    e.push_back(0.0);
    std::vector<double> w(n);
    std::vector<lapack_int> isuppz(2 * n);
    double dummy = 0.0;
    const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'N', 'V', ni, d.data(), e.data(), vl, vu, 0, 0,
                                           0.0, &count, w.data(), &dummy, 1, isuppz.data());
    if (info != 0) throw ConfigError("build_pt: tridiagonal eigensolver failed");
  }
  if (count == 0) return out;

  std::vector<double> d = diag, e = off;
  e.push_back(0.0);
  std::vector<double> w(n);
  std::vector<double> z(n * static_cast<std::size_t>(count));
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(count));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', ni, d.data(), e.data(), 0.0, 0.0, 1,
                                         count, 0.0, &found, w.data(), z.data(), ni, isuppz.data());
  if (info != 0 || found != count) throw ConfigError("build_pt: tridiagonal eigensolver failed");

  out.energies.assign(w.begin(), w.begin() + found);
  out.vectors = Eigen::Map<RMatrix>(z.data(), ni, found);
  out.parity.resize(static_cast<std::size_t>(found));
  for (lapack_int k = 0; k < found; ++k) {
    auto v = out.vectors.col(k);
    // Deterministic sign: the largest component on the x > 0 half is positive.
    Eigen::Index best = static_cast<Eigen::Index>(n / 2);
    for (Eigen::Index i = static_cast<Eigen::Index>(n / 2); i < ni; ++i)
      if (std::abs(v(i)) > std::abs(v(best))) best = i;
    if (v(best) < 0.0) v = -v;
    double mirror = 0.0;
    for (Eigen::Index i = 0; i < ni; ++i) mirror += v(i) * v(ni - 1 - i);
    out.parity[static_cast<std::size_t>(k)] = mirror > 0.0 ? Parity::Even : Parity::Odd;
  }
  return out;
}

SystemMatrices build_pt(const PoschlTellerSystem& system, std::size_t min_levels) {
  PtSpectrum spec = pt_bound_spectrum(system);
  const std::size_t nb = spec.energies.size();
  if (nb < std::max<std::size_t>(2, min_levels)) {
    std::ostringstream os;
    os << "build_pt: only " << nb << " bound states for nu = " << system.nu << ", need "
       << std::max<std::size_t>(2, min_levels);
    throw ConfigError(os.str());
  }
  const auto d = static_cast<Eigen::Index>(nb);
  CMatrix h0 = CMatrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) h0(k, k) = spec.energies[static_cast<std::size_t>(k)];

  // Trapezoid with zero walls: psi = v / sqrt(h), so x_mn = sum_i x_i v_m(i) v_n(i).
  const Eigen::Map<const RVector> xg(spec.grid.data(), static_cast<Eigen::Index>(spec.grid.size()));
  const RMatrix weighted = xg.asDiagonal() * spec.vectors;
  RMatrix xr = spec.vectors.transpose() * weighted;
  xr = 0.5 * (xr + xr.transpose()).eval();
  CMatrix x = xr.cast<Complex>();
  CMatrix v = -system.eta * x;
  return {Basis(BasisKind::PtBound, std::move(spec.energies), std::move(spec.parity)), std::move(h0),
          std::move(x), std::move(v)};
}

}  // namespace qlearn
