#pragma once

// JSON run configuration for sweeps and figure datasets.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qlearn/exact_ho.hpp"
#include "qlearn/information.hpp"
#include "qlearn/perturbation.hpp"
#include "qlearn/systems.hpp"

namespace qlearn {

enum class SystemKind { Ho, Pt };

std::string_view to_string(SystemKind k);

enum class TauSpacing { Linear, Log };

struct TauGrid {
  double min = 0.1;
  double max = 20.0;
  std::size_t count = 200;
  TauSpacing spacing = TauSpacing::Linear;

  [[nodiscard]] std::vector<double> values() const;
};

struct SystemSpec {
  SystemKind kind = SystemKind::Ho;
  HarmonicSystem ho;
  PoschlTellerSystem pt;
};

/// One system driven with a given amplitude from a given eigenstate.
struct CaseSpec {
  std::string label;
  SystemSpec system;
  std::vector<ProtocolKind> protocols{ProtocolKind::Exponential};
  double delta_lambda = 0.05;
  std::size_t initial_level = 0;
};

struct QuadratureSpec {
  std::size_t coeff_order = 64;
  std::size_t beta_order = 48;
  std::size_t time_nodes = 96;
  KernelKind kernel = KernelKind::ClosedForm;
  std::size_t kernel_order = 16;
};

struct RunConfig {
  std::string name = "sweep";
  std::vector<CaseSpec> cases;
  TauGrid tau_grid;
  std::vector<Method> methods{Method::Exact, Method::Linear};
  QuadratureSpec quadrature;
  EntropyConvention convention = EntropyConvention::Unnormalized;
  DisplacementOrdering ordering = DisplacementOrdering::Interaction;
  DeltaRhoTime delta_rho_time = DeltaRhoTime::Running;
  SchattenP p = SchattenP::Two;
  double oracle_dt = 1e-4;
  std::size_t workers = 0;  // 0: OpenMP default
  std::string output;
};

/// Parses and validates. Throws ConfigError with the offending key.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);
nlohmann::json to_json(const RunConfig& config);

/// Checks cross-field constraints: exact only for ho, log grids need tau_min > 0, the oracle
/// step resolves the fastest Bohr frequency, initial levels exist.
void validate_config(const RunConfig& config);

/// FNV-1a 64 of the canonical JSON, ignoring workers and output.
std::string config_hash(const RunConfig& config);

/// 64-bit FNV-1a of `text` as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

/// Worker count after the QLEARN_WORKERS override; 0 means the OpenMP default.
std::size_t effective_workers(const RunConfig& config);

/// Drive-curve dataset (fig1).
struct ProtocolCurveConfig {
  double tau = 1.0;
  double delta_lambda = 1.0;
  std::size_t samples = 201;
};

/// Potential and level dataset (fig5).
struct PotentialConfig {
  PoschlTellerSystem pt;
  double omega0 = kPtHarmonicOmega;
  double energy_shift = kPtHarmonicShift;
  double x_min = -3.0;
  double x_max = 3.0;
  std::size_t samples = 601;
  std::size_t levels = 5;
};

ProtocolCurveConfig parse_protocol_curve_config(const nlohmann::json& j);
PotentialConfig parse_potential_config(const nlohmann::json& j);

/// Figure ids in presentation order.
const std::vector<std::string>& figure_ids();

/// Embedded preset JSON for a figure id; throws ConfigError for unknown ids.
nlohmann::json figure_preset(std::string_view id);

}  // namespace qlearn
