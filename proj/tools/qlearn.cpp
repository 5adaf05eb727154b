#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qlearn/config.hpp"
#include "qlearn/errors.hpp"
#include "qlearn/sweep.hpp"
#include "qlearn/validate.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kInvariantFailure = 2;

void write_to(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qlearn::ConfigError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximal rate of quantum learning: sweeps, figure datasets and validation"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a tau sweep from a JSON config");
  sweep_cmd->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", out_path, "CSV output path (default: config 'output', else stdout)");

  std::string figure_id, figure_out;
  auto* figure_cmd = app.add_subcommand("figure", "Write the dataset behind a figure preset");
  figure_cmd->add_option("id", figure_id, "fig1 | fig2 | fig3a | fig3b | fig4 | fig5 | fig6")->required();
  figure_cmd->add_option("--out", figure_out, "CSV output path (default: stdout)");

  std::string preset_id;
  auto* preset_cmd = app.add_subcommand("preset", "Print the JSON configuration behind a figure preset");
  preset_cmd->add_option("id", preset_id, "figure id")->required();

  auto* validate_cmd = app.add_subcommand("validate", "Run the invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*sweep_cmd) {
      const qlearn::RunConfig config = qlearn::load_run_config(config_path);
      std::ostringstream csv;
      qlearn::write_csv(csv, qlearn::sweep(config));
      write_to(out_path.empty() ? config.output : out_path, csv.str());
      return kOk;
    }
    if (*figure_cmd) {
      qlearn::RunConfig defaults;
      std::ostringstream csv;
      qlearn::write_figure(csv, figure_id, qlearn::effective_workers(defaults));
      write_to(figure_out, csv.str());
      return kOk;
    }
    if (*preset_cmd) {
      std::cout << qlearn::figure_preset(preset_id).dump(2) << '\n';
      return kOk;
    }
    if (*validate_cmd) {
      bool ok = true;
      for (const qlearn::InvariantCheck& c : qlearn::run_validation()) {
        ok = ok && c.passed();
        std::printf("%s  %-52s measured %.3e  %s %.3e  margin %.3e\n", c.passed() ? "PASS" : "FAIL", c.name.c_str(),
                    c.measured, c.at_least ? ">=" : "<=", c.tolerance, c.margin());
      }
      return ok ? kOk : kInvariantFailure;
    }
  } catch (const qlearn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const qlearn::TruncationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const qlearn::PreconditionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const qlearn::Error& e) {
    std::cerr << "invariant failure: " << e.what() << '\n';
    return kInvariantFailure;
  }
  return kOk;
}
