#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "modrabi/errors.hpp"
#include "scenario.hpp"

namespace {

using namespace modrabi;
using namespace modrabi::cli;

double parse_lambda(const std::string& text) {
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size()) throw ValidationError("--lambda: expected a number or 'inf', got '" + text + "'");
  return value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-tone modulation synthesis of anisotropic Rabi models"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";

  auto* simulate = app.add_subcommand("simulate", "Run a scenario and write a manifest plus CSV time series");
  simulate->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  simulate->add_option("-o,--output", out_dir, "Output directory")->required();

  auto* validate = app.add_subcommand("validate", "Check a scenario and print the resolved parameters");
  validate->add_option("scenario", scenario_path, "Scenario JSON file")->required();

  std::string lambda_text;
  std::optional<double> gratio, delta1_hz, delta2_hz, anchor;
  std::string tuned = "blue";
  std::string emit;
  auto* design = app.add_subcommand("design", "Solve for drive parameters that realize a target model");
  design->add_option("--lambda", lambda_text, "Anisotropy g_cr/g_r (number or 'inf')")->required();
  design->add_option("--gratio", gratio, "Dominant coupling ratio |g/omega_eff|");
  design->add_option("--delta1-hz", delta1_hz, "Red-sideband detuning in Hz (default 0)");
  design->add_option("--delta2-hz", delta2_hz, "Blue-sideband detuning in Hz (instead of --gratio)");
  design->add_option("--tuned", tuned, "Which amplitude is solved for")->check(CLI::IsMember({"blue", "red"}));
  design->add_option("--anchor", anchor, "Amplitude held fixed (default 0.7173)");
  design->add_option("--emit-scenario", emit, "Also write a runnable scenario JSON to this path");

  SweepOptions sweep_opts;
  std::string param;
  std::optional<double> from, to;
  std::optional<int> points;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario over one swept parameter");
  sweep->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  sweep->add_option("--param", param, "Parameter path, e.g. drive.eta2");
  sweep->add_option("--from", from, "First value");
  sweep->add_option("--to", to, "Last value");
  sweep->add_option("--points", points, "Number of points (>= 2)");
  sweep->add_option("-o,--output", out_dir, "Output directory")->required();

  auto* applications = app.add_subcommand("applications", "Cat-state and two-qubit gate generators");
  applications->require_subcommand(1);
  CatOptions cat_opts;
  auto* cat = applications->add_subcommand("cat", "Cat states from the one-qubit propagator");
  cat->add_option("--gratio", cat_opts.coupling_ratio, "Coupling ratio g/omega_eff")->capture_default_str();
  cat->add_option("--omega-hz", cat_opts.omega_hz, "Effective resonator frequency in Hz")->capture_default_str();
  cat->add_option("--fraction", cat_opts.fraction, "Evolution time as a fraction of the period")
      ->capture_default_str();
  cat->add_option("--cutoff", cat_opts.cutoff, "Fock cutoff")->capture_default_str();
  cat->add_option("--samples", cat_opts.samples, "Points on the displacement path")->capture_default_str();
  cat->add_option("-o,--output", out_dir, "Output directory")->required();
  GateOptions gate_opts;
  auto* gate = applications->add_subcommand("gate", "Two-qubit gate at one effective period");
  gate->add_option("--gratio", gate_opts.coupling_ratio, "Coupling ratio g/omega_eff")->capture_default_str();
  gate->add_option("--omega-hz", gate_opts.omega_hz, "Effective resonator frequency in Hz")->capture_default_str();
  gate->add_option("--cutoff", gate_opts.cutoff, "Fock cutoff of the full-space check")->capture_default_str();
  gate->add_option("-o,--output", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*simulate) return cmd_simulate(scenario_path, out_dir, std::cout);
    if (*validate) return cmd_validate(scenario_path, std::cout);
    if (*design) {
      DesignOptions opts;
      opts.request.lambda = parse_lambda(lambda_text);
      opts.request.gratio = gratio;
      if (delta2_hz) opts.request.delta2 = modulation::angular(*delta2_hz);
      if (delta1_hz) opts.request.delta1 = modulation::angular(*delta1_hz);
      if (!gratio && !delta2_hz) throw ValidationError("design: give --gratio or --delta2-hz");
      opts.request.tuned = tuned == "red" ? modulation::TunedSideband::Red : modulation::TunedSideband::Blue;
      if (anchor) opts.request.anchor = *anchor;
      if (!emit.empty()) opts.emit_scenario = emit;
      return cmd_design(opts, std::cout);
    }
    if (*sweep) {
      sweep_opts.scenario = scenario_path;
      sweep_opts.out_dir = out_dir;
      if (!param.empty()) sweep_opts.param = param;
      sweep_opts.from = from;
      sweep_opts.to = to;
      sweep_opts.points = points;
      sweep_opts.threads = worker_threads();
      return cmd_sweep(sweep_opts, std::cout);
    }
    if (*cat) {
      cat_opts.out_dir = out_dir;
      return cmd_cat(cat_opts, std::cout);
    }
    if (*gate) {
      gate_opts.out_dir = out_dir;
      return cmd_gate(gate_opts, std::cout);
    }
  } catch (...) {
    return report_exception(std::cerr);
  }
  return kExitFailure;
}
