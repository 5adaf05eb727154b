#include "qlearn/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>
#include <tuple>

#include <omp.h>

#include "qlearn/oracle.hpp"

namespace qlearn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct PreparedCase {
  const CaseSpec* spec;
  SystemMatrices sys;
  MeasurementSetup setup;
  StateVector psi0;
};

PreparedCase prepare(const CaseSpec& cs, EntropyConvention convention) {
  SystemMatrices sys = cs.system.kind == SystemKind::Ho ? build_ho(cs.system.ho)
                                                        : build_pt(cs.system.pt, cs.initial_level + 1);
  MeasurementSetup setup = parity_projectors(sys.basis, convention);
  StateVector psi0 = StateVector::basis_state(sys.basis.dimension(), cs.initial_level);
  return {&cs, std::move(sys), std::move(setup), std::move(psi0)};
}

struct Task {
  double tau;
  std::size_t case_index;
  ProtocolKind protocol;
  Method method;
};

std::vector<Task> make_tasks(const RunConfig& config) {
  std::vector<Task> tasks;
  for (double tau : config.tau_grid.values())
    for (std::size_t c = 0; c < config.cases.size(); ++c)
      for (ProtocolKind p : config.cases[c].protocols)
        for (Method m : config.methods) tasks.push_back({tau, c, p, m});
  return tasks;
}

SweepRow evaluate(const RunConfig& config, const PreparedCase& pc, const Task& task) {
  SweepRow row;
  row.tau = task.tau;
  row.method = task.method;
  row.protocol = task.protocol;
  row.system = pc.spec->label;
  const DriveProtocol protocol = DriveProtocol::make(task.protocol, pc.spec->delta_lambda, task.tau);
  std::vector<std::string> warnings;
  try {
    switch (task.method) {
      case Method::Exact: {
        ExactOptions opts;
        opts.coeff_order = config.quadrature.coeff_order;
        opts.beta_order = config.quadrature.beta_order;
        opts.time_nodes = config.quadrature.time_nodes;
        opts.ordering = config.ordering;
        opts.p = config.p;
        const ExactObservables o = exact_observables(pc.spec->system.ho, protocol, pc.psi0, pc.setup, opts);
        row.delta_chi = o.delta_chi;
        row.tau_qsl = o.tau_qsl;
        row.omega = o.omega;
        row.probabilities = o.probabilities;
        break;
      }
      case Method::Linear: {
        LinearOptions opts;
        opts.kernel = {config.quadrature.kernel, config.quadrature.kernel_order};
        opts.time_nodes = config.quadrature.time_nodes;
        opts.p = config.p;
        opts.delta_rho_time = config.delta_rho_time;
        const LinearObservables o = linear_observables(pc.sys, protocol, pc.psi0, pc.setup, opts);
        row.delta_chi = o.delta_chi;
        row.tau_qsl = o.tau_qsl;
        row.omega = o.omega;
        row.probabilities = o.probabilities;
        warnings = o.warnings;
        break;
      }
      case Method::Oracle: {
        OracleOptions opts;
        opts.dt = config.oracle_dt;
        opts.time_nodes = config.quadrature.time_nodes;
        opts.p = config.p;
        const ExactObservables o = oracle_observables(pc.sys, protocol, pc.psi0, pc.setup, opts);
        row.delta_chi = o.delta_chi;
        row.tau_qsl = o.tau_qsl;
        row.omega = o.omega;
        row.probabilities = o.probabilities;
        break;
      }
    }
    row.status = std::string(to_string(row.omega.status));
  } catch (const PerturbationRangeError&) {
    row.delta_chi = row.tau_qsl = kNaN;
    row.omega = {kNaN, RateStatus::Undefined};
    row.status = "perturbation_range";
  } catch (const DegenerateDynamicsError&) {
    row.delta_chi = row.tau_qsl = kNaN;
    row.omega = {kNaN, RateStatus::Undefined};
    row.status = "degenerate_dynamics";
  }
  std::sort(warnings.begin(), warnings.end());
  warnings.erase(std::unique(warnings.begin(), warnings.end()), warnings.end());
  for (const std::string& w : warnings) row.status += ";" + w;
  return row;
}

void sort_rows(std::vector<SweepRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::make_tuple(a.tau, to_string(a.method), to_string(a.protocol), std::string_view(a.system)) <
           std::make_tuple(b.tau, to_string(b.method), to_string(b.protocol), std::string_view(b.system));
  });
}

SweepResult run(const RunConfig& config, bool parallel, std::size_t workers) {
  validate_config(config);
  std::vector<PreparedCase> cases;
  cases.reserve(config.cases.size());
  for (const CaseSpec& cs : config.cases) cases.push_back(prepare(cs, config.convention));
  const std::vector<Task> tasks = make_tasks(config);

  std::vector<SweepRow> rows(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  const auto body = [&](std::size_t i) {
    try {
      rows[i] = evaluate(config, cases[tasks[i].case_index], tasks[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (parallel) {
    const int threads = workers > 0 ? static_cast<int>(workers) : omp_get_max_threads();
    const auto n = static_cast<long long>(tasks.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long long i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < tasks.size(); ++i) body(i);
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);

  sort_rows(rows);
  return {config_hash(config), std::move(rows)};
}

}  // namespace

SweepResult sweep_parallel(const RunConfig& config, std::size_t workers) { return run(config, true, workers); }

SweepResult sweep_serial(const RunConfig& config) { return run(config, false, 1); }

SweepResult sweep(const RunConfig& config) { return sweep_parallel(config, effective_workers(config)); }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const SweepResult& result) {
  out << "# config_hash=" << result.config_hash << "\n";
  out << "tau,delta_chi,tau_qsl,omega,method,status,protocol,system\n";
  for (const SweepRow& r : result.rows) {
    out << format_number(r.tau) << ',' << format_number(r.delta_chi) << ',' << format_number(r.tau_qsl) << ','
        << (r.omega.defined() ? format_number(r.omega.value) : "nan") << ',' << to_string(r.method) << ','
        << r.status << ',' << to_string(r.protocol) << ',' << r.system << '\n';
  }
}

std::vector<SweepRow> select(const SweepResult& result, Method method, ProtocolKind protocol,
                             std::string_view system) {
  std::vector<SweepRow> out;
  for (const SweepRow& r : result.rows)
    if (r.method == method && r.protocol == protocol && r.system == system) out.push_back(r);
  return out;
}

void write_protocol_curves(std::ostream& out, const ProtocolCurveConfig& c) {
  const DriveProtocol exp = DriveProtocol::exponential(c.delta_lambda, c.tau);
  const DriveProtocol lin = DriveProtocol::linear(c.delta_lambda, c.tau);
  out << "t,lambda_exp,lambda_lin\n";
  for (std::size_t i = 0; i < c.samples; ++i) {
    const double t = i + 1 == c.samples ? c.tau : c.tau * static_cast<double>(i) / static_cast<double>(c.samples - 1);
    out << format_number(t) << ',' << format_number(exp.lambda_at(t)) << ',' << format_number(lin.lambda_at(t))
        << '\n';
  }
}

void write_potentials(std::ostream& out, const PotentialConfig& c) {
  out << "kind,index,x,value\n";
  for (std::size_t i = 0; i < c.samples; ++i) {
    const double x = c.x_min + (c.x_max - c.x_min) * static_cast<double>(i) / static_cast<double>(c.samples - 1);
    out << "pt_potential," << i << ',' << format_number(x) << ',' << format_number(poschl_teller_potential(c.pt.nu, x))
        << '\n';
  }
  for (std::size_t i = 0; i < c.samples; ++i) {
    const double x = c.x_min + (c.x_max - c.x_min) * static_cast<double>(i) / static_cast<double>(c.samples - 1);
    out << "ho_potential," << i << ',' << format_number(x) << ','
        << format_number(c.energy_shift + 0.5 * c.omega0 * c.omega0 * x * x) << '\n';
  }
  const PtSpectrum spectrum = pt_bound_spectrum(c.pt);
  for (std::size_t n = 0; n < std::min(c.levels, spectrum.energies.size()); ++n)
    out << "pt_level," << n << ",0," << format_number(spectrum.energies[n]) << '\n';
  for (std::size_t n = 0; n < c.levels; ++n)
    out << "ho_level," << n << ",0," << format_number(c.energy_shift + c.omega0 * (static_cast<double>(n) + 0.5))
        << '\n';
}

void write_figure(std::ostream& out, std::string_view id, std::size_t workers) {
  const nlohmann::json preset = figure_preset(id);
  const std::string kind = preset.at("kind").get<std::string>();
  if (kind == "sweep") {
    write_csv(out, sweep_parallel(parse_run_config(preset), workers));
    return;
  }
  out << "# config_hash=" << fnv1a_hex(preset.dump()) << "\n";
  if (kind == "protocols")
    write_protocol_curves(out, parse_protocol_curve_config(preset));
  else
    write_potentials(out, parse_potential_config(preset));
}

}  // namespace qlearn
