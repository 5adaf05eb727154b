#include "qlearn/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "qlearn/oracle.hpp"

namespace qlearn {

using nlohmann::json;

std::string_view to_string(SystemKind k) { return k == SystemKind::Ho ? "ho" : "pt"; }

std::vector<double> TauGrid::values() const {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = min;
    return out;
  }
  const double n = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / n;
    out[i] = spacing == TauSpacing::Linear ? min + (max - min) * f : min * std::pow(max / min, f);
  }
  out.back() = max;
  return out;
}

namespace {

void reject_unknown(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, std::string_view where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(where) + "." + key + ": wrong type");
  }
}

double get_number(const json& j, const char* key, double fallback, std::string_view where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(std::string(where) + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

std::size_t get_count(const json& j, const char* key, std::size_t fallback, std::string_view where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer() || j.at(key).get<long long>() < 0)
    throw ConfigError(std::string(where) + "." + key + ": expected a non-negative integer");
  return j.at(key).get<std::size_t>();
}

SchattenP schatten_from_string(std::string_view s) {
  if (s == "1") return SchattenP::One;
  if (s == "2") return SchattenP::Two;
  if (s == "inf") return SchattenP::Inf;
  throw ConfigError("unknown Schatten index '" + std::string(s) + "'");
}

SystemSpec parse_system(const json& j) {
  SystemSpec s;
  const std::string kind = get_or<std::string>(j, "kind", "ho", "system");
  if (kind == "ho") {
    reject_unknown(j, "system", {"kind", "omega0", "n_max", "energy_shift", "truncation_tol"});
    s.kind = SystemKind::Ho;
    s.ho.omega0 = get_number(j, "omega0", s.ho.omega0, "system");
    s.ho.n_max = get_count(j, "n_max", s.ho.n_max, "system");
    s.ho.energy_shift = get_number(j, "energy_shift", s.ho.energy_shift, "system");
    s.ho.truncation_tol = get_number(j, "truncation_tol", s.ho.truncation_tol, "system");
    if (!(s.ho.omega0 > 0.0)) throw ConfigError("system.omega0 must be positive");
    if (s.ho.n_max < 2) throw ConfigError("system.n_max must be at least 2");
  } else if (kind == "pt") {
    reject_unknown(j, "system", {"kind", "nu", "eta", "half_width", "grid_points"});
    s.kind = SystemKind::Pt;
    s.pt.nu = get_or<int>(j, "nu", s.pt.nu, "system");
    s.pt.eta = get_number(j, "eta", s.pt.eta, "system");
    s.pt.half_width = get_number(j, "half_width", s.pt.half_width, "system");
    s.pt.grid_points = get_count(j, "grid_points", s.pt.grid_points, "system");
    if (s.pt.nu < 1) throw ConfigError("system.nu must be a positive integer");
    if (!(s.pt.half_width > 0.0) || s.pt.grid_points < 10) throw ConfigError("system: grid too small");
  } else {
    throw ConfigError("system.kind must be 'ho' or 'pt', got '" + kind + "'");
  }
  return s;
}

json system_to_json(const SystemSpec& s) {
  if (s.kind == SystemKind::Ho)
    return {{"kind", "ho"},
            {"omega0", s.ho.omega0},
            {"n_max", s.ho.n_max},
            {"energy_shift", s.ho.energy_shift},
            {"truncation_tol", s.ho.truncation_tol}};
  return {{"kind", "pt"},
          {"nu", s.pt.nu},
          {"eta", s.pt.eta},
          {"half_width", s.pt.half_width},
          {"grid_points", s.pt.grid_points}};
}

CaseSpec parse_case(const json& j, std::string_view where) {
  reject_unknown(j, where, {"label", "system", "protocols", "delta_lambda", "initial_level"});
  CaseSpec c;
  c.system = parse_system(j.value("system", json::object()));
  c.label = get_or<std::string>(j, "label", std::string(to_string(c.system.kind)), where);
  if (j.contains("protocols")) {
    c.protocols.clear();
    for (const auto& p : j.at("protocols")) {
      if (!p.is_string()) throw ConfigError(std::string(where) + ".protocols: expected strings");
      const ProtocolKind k = protocol_kind_from_string(p.get<std::string>());
      if (k == ProtocolKind::Tabulated) throw ConfigError("tabulated drives are library-only");
      c.protocols.push_back(k);
    }
  }
  c.delta_lambda = get_number(j, "delta_lambda", c.delta_lambda, where);
  c.initial_level = get_count(j, "initial_level", c.initial_level, where);
  if (c.protocols.empty()) throw ConfigError(std::string(where) + ".protocols is empty");
  if (!(c.delta_lambda >= 0.0)) throw ConfigError(std::string(where) + ".delta_lambda must be non-negative");
  return c;
}

json case_to_json(const CaseSpec& c) {
  json protocols = json::array();
  for (ProtocolKind k : c.protocols) protocols.push_back(std::string(to_string(k)));
  return {{"label", c.label},
          {"system", system_to_json(c.system)},
          {"protocols", protocols},
          {"delta_lambda", c.delta_lambda},
          {"initial_level", c.initial_level}};
}

}  // namespace

RunConfig parse_run_config(const json& j) {
  reject_unknown(j, "config",
                 {"kind", "name", "cases", "system", "protocols", "delta_lambda", "initial_level", "label", "tau_grid",
                  "methods", "quadrature", "convention", "ordering", "delta_rho_time", "schatten_p", "oracle_dt",
                  "workers", "output"});
  if (j.contains("kind") && j.at("kind") != "sweep") throw ConfigError("config.kind must be 'sweep' for a sweep");
  RunConfig c;
  c.name = get_or<std::string>(j, "name", c.name, "config");

  const bool flat = j.contains("system");
  if (flat && j.contains("cases")) throw ConfigError("config: give either 'cases' or a top-level 'system', not both");
  if (flat) {
    json single = json::object();
    for (const char* key : {"label", "system", "protocols", "delta_lambda", "initial_level"})
      if (j.contains(key)) single[key] = j.at(key);
    c.cases.push_back(parse_case(single, "config"));
  } else {
    if (j.contains("label") || j.contains("protocols") || j.contains("delta_lambda") || j.contains("initial_level"))
      throw ConfigError("config: case keys belong inside 'cases'");
    if (!j.contains("cases") || !j.at("cases").is_array() || j.at("cases").empty())
      throw ConfigError("config: 'cases' must be a non-empty array");
    for (std::size_t i = 0; i < j.at("cases").size(); ++i)
      c.cases.push_back(parse_case(j.at("cases")[i], "cases[" + std::to_string(i) + "]"));
  }

  if (j.contains("tau_grid")) {
    const json& g = j.at("tau_grid");
    reject_unknown(g, "tau_grid", {"min", "max", "count", "spacing"});
    c.tau_grid.min = get_number(g, "min", c.tau_grid.min, "tau_grid");
    c.tau_grid.max = get_number(g, "max", c.tau_grid.max, "tau_grid");
    c.tau_grid.count = get_count(g, "count", c.tau_grid.count, "tau_grid");
    const std::string spacing = get_or<std::string>(g, "spacing", "linear", "tau_grid");
    if (spacing == "linear")
      c.tau_grid.spacing = TauSpacing::Linear;
    else if (spacing == "log")
      c.tau_grid.spacing = TauSpacing::Log;
    else
      throw ConfigError("tau_grid.spacing must be 'linear' or 'log'");
  }
  if (j.contains("methods")) {
    c.methods.clear();
    for (const auto& m : j.at("methods")) {
      if (!m.is_string()) throw ConfigError("methods: expected strings");
      c.methods.push_back(method_from_string(m.get<std::string>()));
    }
  }
  if (j.contains("quadrature")) {
    const json& q = j.at("quadrature");
    reject_unknown(q, "quadrature", {"coeff_order", "beta_order", "time_nodes", "kernel", "kernel_order"});
    c.quadrature.coeff_order = get_count(q, "coeff_order", c.quadrature.coeff_order, "quadrature");
    c.quadrature.beta_order = get_count(q, "beta_order", c.quadrature.beta_order, "quadrature");
    c.quadrature.time_nodes = get_count(q, "time_nodes", c.quadrature.time_nodes, "quadrature");
    c.quadrature.kernel_order = get_count(q, "kernel_order", c.quadrature.kernel_order, "quadrature");
    const std::string kernel = get_or<std::string>(q, "kernel", "closed-form", "quadrature");
    if (kernel == "closed-form")
      c.quadrature.kernel = KernelKind::ClosedForm;
    else if (kernel == "quadrature")
      c.quadrature.kernel = KernelKind::Quadrature;
    else
      throw ConfigError("quadrature.kernel must be 'closed-form' or 'quadrature'");
  }
  c.convention = entropy_convention_from_string(
      get_or<std::string>(j, "convention", std::string(to_string(c.convention)), "config"));
  c.ordering = ordering_from_string(get_or<std::string>(j, "ordering", std::string(to_string(c.ordering)), "config"));
  c.delta_rho_time = delta_rho_time_from_string(
      get_or<std::string>(j, "delta_rho_time", std::string(to_string(c.delta_rho_time)), "config"));
  c.p = schatten_from_string(get_or<std::string>(j, "schatten_p", std::string(to_string(c.p)), "config"));
  c.oracle_dt = get_number(j, "oracle_dt", c.oracle_dt, "config");
  c.workers = get_count(j, "workers", c.workers, "config");
  c.output = get_or<std::string>(j, "output", "", "config");
  validate_config(c);
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(j);
}

json to_json(const RunConfig& c) {
  json cases = json::array();
  for (const CaseSpec& cs : c.cases) cases.push_back(case_to_json(cs));
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(std::string(to_string(m)));
  return {{"kind", "sweep"},
          {"name", c.name},
          {"cases", cases},
          {"tau_grid",
           {{"min", c.tau_grid.min},
            {"max", c.tau_grid.max},
            {"count", c.tau_grid.count},
            {"spacing", c.tau_grid.spacing == TauSpacing::Linear ? "linear" : "log"}}},
          {"methods", methods},
          {"quadrature",
           {{"coeff_order", c.quadrature.coeff_order},
            {"beta_order", c.quadrature.beta_order},
            {"time_nodes", c.quadrature.time_nodes},
            {"kernel", c.quadrature.kernel == KernelKind::ClosedForm ? "closed-form" : "quadrature"},
            {"kernel_order", c.quadrature.kernel_order}}},
          {"convention", std::string(to_string(c.convention))},
          {"ordering", std::string(to_string(c.ordering))},
          {"delta_rho_time", std::string(to_string(c.delta_rho_time))},
          {"schatten_p", std::string(to_string(c.p))},
          {"oracle_dt", c.oracle_dt},
          {"workers", c.workers},
          {"output", c.output}};
}

void validate_config(const RunConfig& c) {
  if (c.cases.empty()) throw ConfigError("config: no cases");
  if (c.methods.empty()) throw ConfigError("config: no methods");
  const TauGrid& g = c.tau_grid;
  if (g.count == 0) throw ConfigError("tau_grid.count must be positive");
  if (!(g.min > 0.0)) throw ConfigError("tau_grid.min must be positive");
  if (!(g.max >= g.min)) throw ConfigError("tau_grid.max must not be below tau_grid.min");
  if (c.quadrature.coeff_order < 2 || c.quadrature.beta_order < 2 || c.quadrature.time_nodes < 2 ||
      c.quadrature.kernel_order < 2)
    throw ConfigError("quadrature orders must be at least 2");
  const bool wants_oracle = std::find(c.methods.begin(), c.methods.end(), Method::Oracle) != c.methods.end();
  const bool wants_exact = std::find(c.methods.begin(), c.methods.end(), Method::Exact) != c.methods.end();
  const bool wants_lin = std::find(c.methods.begin(), c.methods.end(), Method::Linear) != c.methods.end();
  if (wants_lin && c.convention != EntropyConvention::Unnormalized)
    throw ConfigError("method 'lin' requires the unnormalized convention");
  if (wants_oracle && !(c.oracle_dt > 0.0)) throw ConfigError("oracle_dt must be positive");

  std::set<std::string> labels;
  for (const CaseSpec& cs : c.cases) {
    if (!labels.insert(cs.label).second) throw ConfigError("duplicate case label '" + cs.label + "'");
    if (wants_exact && cs.system.kind != SystemKind::Ho)
      throw ConfigError("method 'exact' is only available for the harmonic oscillator (case '" + cs.label + "')");
    double spread = 0.0;
    std::size_t levels = 0;
    if (cs.system.kind == SystemKind::Ho) {
      levels = cs.system.ho.n_max + 1;
      spread = cs.system.ho.omega0 * static_cast<double>(cs.system.ho.n_max);
    } else {
      const int nu = cs.system.pt.nu;
      levels = static_cast<std::size_t>(nu);
      spread = 0.5 * (static_cast<double>(nu) * nu - 1.0);
    }
    if (cs.initial_level >= levels)
      throw ConfigError("initial_level " + std::to_string(cs.initial_level) + " does not exist in case '" + cs.label +
                        "'");
    if (wants_oracle && c.oracle_dt * spread > kOracleResolution) {
      std::ostringstream os;
      os << "oracle_dt " << c.oracle_dt << " does not resolve the Bohr frequency " << spread << " of case '"
         << cs.label << "' (need dt * spread <= " << kOracleResolution << ")";
      throw ConfigError(os.str());
    }
  }
}

std::string config_hash(const RunConfig& c) {
  json j = to_json(c);
  j.erase("workers");
  j.erase("output");
  return fnv1a_hex(j.dump());
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::size_t effective_workers(const RunConfig& c) {
  if (const char* env = std::getenv("QLEARN_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0) throw ConfigError("QLEARN_WORKERS must be a non-negative integer");
    return static_cast<std::size_t>(v);
  }
  return c.workers;
}

ProtocolCurveConfig parse_protocol_curve_config(const json& j) {
  reject_unknown(j, "config", {"kind", "name", "tau", "delta_lambda", "samples"});
  ProtocolCurveConfig c;
  c.tau = get_number(j, "tau", c.tau, "config");
  c.delta_lambda = get_number(j, "delta_lambda", c.delta_lambda, "config");
  c.samples = get_count(j, "samples", c.samples, "config");
  if (!(c.tau > 0.0) || c.samples < 2) throw ConfigError("protocol curves need tau > 0 and at least 2 samples");
  return c;
}

PotentialConfig parse_potential_config(const json& j) {
  reject_unknown(j, "config",
                 {"kind", "name", "system", "omega0", "energy_shift", "x_min", "x_max", "samples", "levels"});
  PotentialConfig c;
  if (j.contains("system")) {
    const SystemSpec s = parse_system(j.at("system"));
    if (s.kind != SystemKind::Pt) throw ConfigError("potential datasets need a 'pt' system");
    c.pt = s.pt;
  }
  c.omega0 = get_number(j, "omega0", c.omega0, "config");
  c.energy_shift = get_number(j, "energy_shift", c.energy_shift, "config");
  c.x_min = get_number(j, "x_min", c.x_min, "config");
  c.x_max = get_number(j, "x_max", c.x_max, "config");
  c.samples = get_count(j, "samples", c.samples, "config");
  c.levels = get_count(j, "levels", c.levels, "config");
  if (!(c.x_max > c.x_min) || c.samples < 2) throw ConfigError("potential grid is empty");
  return c;
}

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig1", "fig2", "fig3a", "fig3b", "fig4", "fig5", "fig6"};
  return ids;
}

namespace {

json ho_case(const char* label, double delta_lambda, std::vector<std::string> protocols) {
  return {{"label", label},
          {"system", {{"kind", "ho"}, {"omega0", 1.0}, {"n_max", 60}, {"energy_shift", 0.0}}},
          {"protocols", protocols},
          {"delta_lambda", delta_lambda},
          {"initial_level", 0}};
}

json default_grid(double min) { return {{"min", min}, {"max", 20.0}, {"count", 200}, {"spacing", "linear"}}; }

}  // namespace

json figure_preset(std::string_view id) {
  if (id == "fig1") return {{"kind", "protocols"}, {"name", "fig1"}, {"tau", 1.0}, {"delta_lambda", 1.0}, {"samples", 201}};
  if (id == "fig2")
    return {{"kind", "sweep"},
            {"name", "fig2"},
            {"cases", {ho_case("ho", 0.05, {"exp", "lin"})}},
            {"tau_grid", default_grid(0.5)},
            {"methods", {"exact", "lin"}}};
  if (id == "fig3a" || id == "fig3b")
    return {{"kind", "sweep"},
            {"name", std::string(id)},
            {"cases", {ho_case("ho", id == "fig3a" ? 0.3 : 0.5, {"exp"})}},
            {"tau_grid", default_grid(0.1)},
            {"methods", {"exact", "lin"}}};
  if (id == "fig4")
    return {{"kind", "sweep"},
            {"name", "fig4"},
            {"cases",
             {{{"label", "pt"},
               {"system", {{"kind", "pt"}, {"nu", 20}, {"eta", 1.0}, {"half_width", 15.0}, {"grid_points", 3000}}},
               {"protocols", {"exp", "lin"}},
               {"delta_lambda", 0.1},
               {"initial_level", 10}}}},
            {"tau_grid", default_grid(0.1)},
            {"methods", {"lin"}}};
  if (id == "fig5")
    return {{"kind", "potentials"},
            {"name", "fig5"},
            {"system", {{"kind", "pt"}, {"nu", 20}, {"eta", 1.0}, {"half_width", 15.0}, {"grid_points", 3000}}},
            {"omega0", kPtHarmonicOmega},
            {"energy_shift", kPtHarmonicShift},
            {"x_min", -3.0},
            {"x_max", 3.0},
            {"samples", 601},
            {"levels", 5}};
  if (id == "fig6")
    return {{"kind", "sweep"},
            {"name", "fig6"},
            {"cases",
             {{{"label", "pt"},
               {"system", {{"kind", "pt"}, {"nu", 20}, {"eta", 1.0}, {"half_width", 15.0}, {"grid_points", 3000}}},
               {"protocols", {"exp"}},
               {"delta_lambda", 0.1},
               {"initial_level", 10}},
              {{"label", "ho"},
               {"system",
                {{"kind", "ho"}, {"omega0", kPtHarmonicOmega}, {"n_max", 60}, {"energy_shift", kPtHarmonicShift}}},
               {"protocols", {"exp"}},
               {"delta_lambda", 2.87e-4},
               {"initial_level", 0}}}},
            {"tau_grid", default_grid(0.1)},
            {"methods", {"lin"}}};
  throw ConfigError("unknown figure '" + std::string(id) + "'");
}

}  // namespace qlearn
