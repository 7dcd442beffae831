#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "modrabi/dynamics.hpp"
#include "modrabi/hamiltonians.hpp"
#include "modrabi/modulation.hpp"

namespace modrabi::cli {

inline constexpr int kSchemaVersion = 1;

enum class ModelChoice { RotatedExact, Effective, Both };

const char* to_string(ModelChoice choice) noexcept;

/// Inverse-design request: anisotropy λ, dominant coupling ratio |g/ω̃| and
/// the red-sideband detuning.
struct DesignRequest {
  double lambda = 1.0;
  std::optional<double> gratio;
  std::optional<double> delta2;  ///< used instead of gratio when set
  double delta1 = 0.0;
  modulation::TunedSideband tuned = modulation::TunedSideband::Blue;
  double anchor = modulation::kBalancedEta;
};

struct TimeValue {
  double value = 0.0;
  std::string unit = "s";  ///< s, ms, us, ns or effective_periods
};

struct SweepSpec {
  std::string param;
  double from = 0.0;
  double to = 0.0;
  int points = 0;
  std::optional<double> mark;
};

struct Scenario {
  std::string name;
  std::string description;
  modulation::SystemParams system;
  modulation::DriveParams drive;
  std::optional<DesignRequest> design;
  ModelChoice model = ModelChoice::Both;
  hamiltonians::ModelKind effective_kind = hamiltonians::ModelKind::Effective;
  bool dissipation = false;
  quantum::QubitLevel initial_state = quantum::QubitLevel::Ground;
  int fock_cutoff = 30;
  TimeValue t_end;
  int samples = 0;
  dynamics::IntegratorConfig integrator;
  dynamics::IntegratorConfig effective_integrator;
  std::vector<std::string> outputs;
  modulation::ValidityThresholds thresholds;
  std::optional<SweepSpec> sweep;
};

/// Output columns of timeseries.csv in their fixed order.
const std::vector<std::string>& timeseries_columns();

/// Throws ValidationError naming the offending field path.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

/// Round-trippable JSON form (frequencies in Hz, amplitudes as η).
nlohmann::json to_json(const Scenario& scenario);

/// Parses "<value>" with unit "GHz|MHz|kHz|Hz" into rad/s.
double frequency_from_unit(double value, const std::string& unit, const std::string& path);

/// Resolved t_end in seconds.
double resolve_t_end(const Scenario& scenario, const modulation::EffectiveParams& eff);

/// Sets a sweepable scalar: drive.eta1, drive.eta2, drive.phi1, drive.phi2,
/// drive.omega1, drive.omega2, system.g (frequencies in Hz), fock_cutoff.
void apply_parameter(Scenario& scenario, const std::string& param, double value);
bool is_sweepable(const std::string& param);

struct DesignResult {
  modulation::DriveParams drive;
  modulation::EffectiveParams effective;
  modulation::AmplitudeSolution amplitudes;
  double coupling_ratio = 0.0;
};

/// |g_dom / ω̃| where the dominant coupling is g_r for |λ| ≤ 1 and g_cr otherwise.
double coupling_ratio(const modulation::EffectiveParams& eff);

/// Throws UnreachableTarget when the request cannot be met with positive
/// drive frequencies.
DesignResult design_drive(const modulation::SystemParams& sys, const DesignRequest& request);

}  // namespace modrabi::cli
