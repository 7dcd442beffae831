#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "io.hpp"
#include "modrabi/dynamics.hpp"
#include "modrabi/modulation.hpp"
#include "scenario.hpp"

namespace modrabi::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitValidation = 2,
  kExitNumerical = 3,
  kExitUnreachable = 4,
};

/// Maps the in-flight exception to an exit code and prints it to `err`.
int report_exception(std::ostream& err);

/// MODRABI_THREADS when set to a positive integer, else the hardware
/// concurrency (at least 1).
int worker_threads();

/// Non-finite doubles become the strings "inf", "-inf" and "nan".
nlohmann::json json_number(double value);

nlohmann::json effective_json(const modulation::EffectiveParams& eff);
nlohmann::json validity_json(const modulation::ValidityReport& report);
nlohmann::json diagnostics_json(const dynamics::Diagnostics& d);

struct SimulationResult {
  Scenario scenario;
  modulation::EffectiveParams effective;
  modulation::ValidityReport validity;
  double t_end = 0.0;
  std::optional<dynamics::Trajectory> rotated;
  std::optional<dynamics::Trajectory> ideal;  ///< effective model, always unitary
  std::vector<double> fidelity;

  /// The rotated-exact run when present, else the effective one.
  const dynamics::Trajectory& primary() const;
  bool cutoff_adequate() const;
};

/// Runs the scenario's models. The rotated-exact run follows the master
/// equation when dissipation is on; the effective run is the ideal
/// Schrödinger evolution the fidelity is measured against.
SimulationResult run_simulation(const Scenario& scenario);

CsvTable timeseries_table(const SimulationResult& result);
CsvTable effective_table(const SimulationResult& result);
nlohmann::json simulation_manifest(const SimulationResult& result, const std::vector<std::string>& files);

int cmd_simulate(const std::filesystem::path& scenario_path, const std::filesystem::path& out_dir,
                 std::ostream& out);

int cmd_validate(const std::filesystem::path& scenario_path, std::ostream& out);

struct DesignOptions {
  DesignRequest request;
  std::optional<std::filesystem::path> emit_scenario;
};

nlohmann::json design_json(const modulation::SystemParams& sys, const DesignResult& result,
                           const DesignRequest& request);
/// A runnable scenario (both models, three effective periods) for a design.
nlohmann::json design_scenario(const modulation::SystemParams& sys, const DesignResult& result);

int cmd_design(const DesignOptions& options, std::ostream& out);

struct SweepOptions {
  std::filesystem::path scenario;
  std::filesystem::path out_dir;
  std::optional<std::string> param;
  std::optional<double> from;
  std::optional<double> to;
  std::optional<int> points;
  int threads = 1;
};

struct SweepPoint {
  double value = 0.0;
  bool ok = false;
  std::string error;
  int exit_code = kExitOk;
  std::optional<SimulationResult> result;
};

/// Evenly spaced sweep values, both ends included.
std::vector<double> sweep_values(const SweepSpec& spec);

/// Each point runs the rotated-exact model only (or the effective model for
/// effective-only scenarios). Points are computed on `threads` workers and
/// returned in sweep order.
std::vector<SweepPoint> run_sweep(const Scenario& base, const SweepSpec& spec, int threads);

int cmd_sweep(const SweepOptions& options, std::ostream& out);

struct CatOptions {
  double coupling_ratio = 1.2;
  double omega_hz = 1e7;
  double fraction = 0.5;  ///< of the period 2π/ω̃
  int cutoff = 40;
  int samples = 101;
  std::filesystem::path out_dir;
};

int cmd_cat(const CatOptions& options, std::ostream& out);

struct GateOptions {
  double coupling_ratio = 0.25;
  double omega_hz = 1e7;
  int cutoff = 40;
  std::filesystem::path out_dir;
};

int cmd_gate(const GateOptions& options, std::ostream& out);

}  // namespace modrabi::cli
