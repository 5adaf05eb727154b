#pragma once

// tau sweeps over the cases and methods of a RunConfig, and the figure datasets.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qlearn/config.hpp"

namespace qlearn {

struct SweepRow {
  double tau = 0.0;
  double delta_chi = 0.0;
  double tau_qsl = 0.0;
  Rate omega;
  Method method = Method::Exact;
  ProtocolKind protocol = ProtocolKind::Exponential;
  std::string system;  // case label
  std::string status;  // "ok", "undefined", "divergent", or an error tag, plus ';'-joined warnings
  std::vector<double> probabilities;
};

struct SweepResult {
  std::string config_hash;
  std::vector<SweepRow> rows;  // sorted by tau, method, protocol, system
};

/// OpenMP-parallel sweep with `workers` threads (0: OpenMP default).
SweepResult sweep_parallel(const RunConfig& config, std::size_t workers);

/// Single-threaded reference with identical output.
SweepResult sweep_serial(const RunConfig& config);

/// Sweep using effective_workers(config).
SweepResult sweep(const RunConfig& config);

/// Header comment with the config hash, then tau,delta_chi,tau_qsl,omega,method,status,protocol,system.
void write_csv(std::ostream& out, const SweepResult& result);

/// Rows for a single (case, protocol, method) series, in tau order.
std::vector<SweepRow> select(const SweepResult& result, Method method, ProtocolKind protocol,
                             std::string_view system);

/// fig1 data: t, lambda_exp, lambda_lin.
void write_protocol_curves(std::ostream& out, const ProtocolCurveConfig& config);

/// fig5 data: kind, index, x, value. Kinds: pt_potential, ho_potential (x = position,
/// value = energy) and pt_level, ho_level (x unused, value = energy).
void write_potentials(std::ostream& out, const PotentialConfig& config);

/// Writes the dataset for a figure id. Throws ConfigError for unknown ids.
void write_figure(std::ostream& out, std::string_view id, std::size_t workers);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_number(double v);

}  // namespace qlearn
