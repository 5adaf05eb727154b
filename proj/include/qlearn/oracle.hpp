#pragma once

// Brute-force propagator: piecewise-constant H frozen at each step midpoint and exponentiated
// exactly through its eigendecomposition.

#include <cstddef>
#include <vector>

#include "qlearn/exact_ho.hpp"
#include "qlearn/hilbert.hpp"
#include "qlearn/information.hpp"
#include "qlearn/systems.hpp"

namespace qlearn {

inline constexpr double kOracleResolution = 0.05;

class StepPlan {
 public:
  /// Requires t_end / dt to be an integer within 1e-9. Throws ConfigError otherwise.
  StepPlan(double dt, double t_end);

  /// Smallest uniform plan over [0, t_end] with step <= max_dt.
  static StepPlan covering(double t_end, double max_dt);

  [[nodiscard]] double dt() const { return dt_; }
  [[nodiscard]] double t_end() const { return t_end_; }
  [[nodiscard]] std::size_t steps() const { return steps_; }

 private:
  StepPlan(double dt, double t_end, std::size_t steps);

  double dt_;
  double t_end_;
  std::size_t steps_;
};

/// States at the requested times (any order, within [0, t_end]). Throws PreconditionError when
/// dt * bohr_spread > kOracleResolution.
std::vector<StateVector> propagate(const SystemMatrices& sys, const DriveProtocol& protocol, const StepPlan& plan,
                                   const StateVector& psi0, const std::vector<double>& sample_times);

/// State at t_end.
StateVector propagate(const SystemMatrices& sys, const DriveProtocol& protocol, const StepPlan& plan,
                      const StateVector& psi0);

struct OracleOptions {
  double dt = 1e-4;
  std::size_t time_nodes = 96;
  SchattenP p = SchattenP::Two;
};

/// Same observables as the exact path, from the brute-force trajectory.
ExactObservables oracle_observables(const SystemMatrices& sys, const DriveProtocol& protocol,
                                    const StateVector& psi0, const MeasurementSetup& setup,
                                    const OracleOptions& options = {});

}  // namespace qlearn
