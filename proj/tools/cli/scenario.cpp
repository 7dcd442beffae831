#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "io.hpp"
#include "modrabi/errors.hpp"

namespace modrabi::cli {

using nlohmann::json;
using namespace modrabi::modulation;

const char* to_string(ModelChoice choice) noexcept {
  switch (choice) {
    case ModelChoice::RotatedExact: return "rotated_exact";
    case ModelChoice::Effective: return "effective";
    case ModelChoice::Both: return "both";
  }
  return "both";
}

const std::vector<std::string>& timeseries_columns() {
  static const std::vector<std::string> columns = {"time_s", "sigma_pop", "photon_number", "fidelity",
                                                   "trace",  "purity",    "top_fock_pop"};
  return columns;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ValidationError(path + ": " + message);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!keys.count(key)) fail(join(path, key), "unknown field");
  }
}

const json* member(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& required(const json& obj, const std::string& path, const char* key) {
  const json* v = member(obj, key);
  if (v == nullptr) fail(join(path, key), "missing required field");
  return *v;
}

double number(const json& v, const std::string& path) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  }
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

double frequency(const json& v, const std::string& path) {
  check_keys(v, path, {"value", "unit"});
  const double value = number(required(v, path, "value"), join(path, "value"));
  return frequency_from_unit(value, text(required(v, path, "unit"), join(path, "unit")), join(path, "unit"));
}

double seconds_from_unit(double value, const std::string& unit, const std::string& path) {
  if (unit == "s") return value;
  if (unit == "ms") return value * 1e-3;
  if (unit == "us") return value * 1e-6;
  if (unit == "ns") return value * 1e-9;
  if (unit == "ps") return value * 1e-12;
  fail(path, "unknown time unit '" + unit + "' (expected s, ms, us, ns or ps)");
}

TimeValue time_value(const json& v, const std::string& path, bool allow_periods) {
  check_keys(v, path, {"value", "unit"});
  TimeValue t;
  t.value = number(required(v, path, "value"), join(path, "value"));
  t.unit = text(required(v, path, "unit"), join(path, "unit"));
  if (t.unit == "effective_periods") {
    if (!allow_periods) fail(join(path, "unit"), "effective_periods not allowed here");
  } else {
    t.value = seconds_from_unit(t.value, t.unit, join(path, "unit"));
    t.unit = "s";
  }
  if (!(t.value > 0.0)) fail(join(path, "value"), "must be > 0");
  return t;
}

SystemParams parse_system(const json& v, const std::string& path) {
  if (v.is_string()) {
    if (v.get<std::string>() == "circuit_qed_reference") return SystemParams::circuit_qed_reference();
    fail(path, "unknown preset '" + v.get<std::string>() + "'");
  }
  check_keys(v, path, {"epsilon", "omega", "g", "kappa", "gamma"});
  SystemParams s;
  s.epsilon = frequency(required(v, path, "epsilon"), join(path, "epsilon"));
  s.omega = frequency(required(v, path, "omega"), join(path, "omega"));
  s.g = frequency(required(v, path, "g"), join(path, "g"));
  s.kappa = member(v, "kappa") ? frequency(v["kappa"], join(path, "kappa")) : 0.0;
  s.gamma = member(v, "gamma") ? frequency(v["gamma"], join(path, "gamma")) : 0.0;
  try {
    s.validate();
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
  return s;
}

double amplitude(const json& v, const std::string& path, int which, double omega) {
  const std::string eta_key = "eta" + std::to_string(which);
  const std::string amp_key = "amplitude" + std::to_string(which);
  const json* eta = member(v, eta_key.c_str());
  const json* amp = member(v, amp_key.c_str());
  if (eta && amp) fail(join(path, eta_key), "give either " + eta_key + " or " + amp_key + ", not both");
  if (eta) return number(*eta, join(path, eta_key));
  if (amp) return frequency(*amp, join(path, amp_key)) / omega;
  fail(join(path, eta_key), "missing " + eta_key + " (or " + amp_key + ")");
}

DriveParams parse_drive(const json& v, const std::string& path) {
  check_keys(v, path, {"omega1", "omega2", "eta1", "eta2", "amplitude1", "amplitude2", "phi1", "phi2"});
  DriveParams d;
  d.omega1 = frequency(required(v, path, "omega1"), join(path, "omega1"));
  d.omega2 = frequency(required(v, path, "omega2"), join(path, "omega2"));
  if (!(d.omega1 > 0.0)) fail(join(path, "omega1"), "must be > 0");
  if (!(d.omega2 > 0.0)) fail(join(path, "omega2"), "must be > 0");
  d.eta1 = amplitude(v, path, 1, d.omega1);
  d.eta2 = amplitude(v, path, 2, d.omega2);
  d.phi1 = member(v, "phi1") ? number(v["phi1"], join(path, "phi1")) : 0.0;
  d.phi2 = member(v, "phi2") ? number(v["phi2"], join(path, "phi2")) : 0.0;
  try {
    d.validate();
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
  return d;
}

DesignRequest parse_design(const json& v, const std::string& path) {
  check_keys(v, path, {"lambda", "gratio", "delta1", "delta2", "tuned", "anchor"});
  DesignRequest r;
  r.lambda = number(required(v, path, "lambda"), join(path, "lambda"));
  if (member(v, "gratio")) r.gratio = number(v["gratio"], join(path, "gratio"));
  if (member(v, "delta2")) r.delta2 = frequency(v["delta2"], join(path, "delta2"));
  if (!r.gratio && !r.delta2) fail(join(path, "gratio"), "give gratio or delta2");
  if (member(v, "delta1")) r.delta1 = frequency(v["delta1"], join(path, "delta1"));
  if (member(v, "tuned")) {
    const auto s = text(v["tuned"], join(path, "tuned"));
    if (s == "blue") r.tuned = TunedSideband::Blue;
    else if (s == "red") r.tuned = TunedSideband::Red;
    else fail(join(path, "tuned"), "expected 'blue' or 'red'");
  }
  if (member(v, "anchor")) r.anchor = number(v["anchor"], join(path, "anchor"));
  return r;
}

dynamics::IntegratorConfig parse_integrator(const json& v, const std::string& path,
                                            dynamics::IntegratorConfig cfg) {
  check_keys(v, path, {"method", "dt", "points_per_period", "rtol", "atol", "max_step", "store_every"});
  if (member(v, "method")) {
    const auto s = text(v["method"], join(path, "method"));
    if (s == "fixed_rk4") cfg.method = dynamics::Method::FixedRK4;
    else if (s == "adaptive_rk45") cfg.method = dynamics::Method::AdaptiveRK45;
    else fail(join(path, "method"), "expected 'fixed_rk4' or 'adaptive_rk45'");
  }
  if (member(v, "dt")) cfg.dt = time_value(v["dt"], join(path, "dt"), false).value;
  if (member(v, "points_per_period")) {
    cfg.points_per_period = integer(v["points_per_period"], join(path, "points_per_period"));
  }
  if (member(v, "rtol")) cfg.rtol = number(v["rtol"], join(path, "rtol"));
  if (member(v, "atol")) cfg.atol = number(v["atol"], join(path, "atol"));
  if (member(v, "max_step")) cfg.max_step = time_value(v["max_step"], join(path, "max_step"), false).value;
  if (member(v, "store_every")) cfg.store_every = integer(v["store_every"], join(path, "store_every"));
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
  return cfg;
}

hamiltonians::ModelKind parse_effective_kind(const std::string& s, const std::string& path) {
  using hamiltonians::ModelKind;
  if (s == "generic") return ModelKind::Effective;
  if (s == "qrm") return ModelKind::QRM;
  if (s == "jc") return ModelKind::JC;
  if (s == "ajc") return ModelKind::AJC;
  if (s == "degenerate_aqrm") return ModelKind::DegenerateAQRM;
  fail(path, "expected generic, qrm, jc, ajc or degenerate_aqrm");
}

const char* effective_kind_name(hamiltonians::ModelKind kind) {
  return kind == hamiltonians::ModelKind::Effective ? "generic" : hamiltonians::to_string(kind);
}

SweepSpec parse_sweep(const json& v, const std::string& path) {
  check_keys(v, path, {"param", "from", "to", "points", "mark"});
  SweepSpec s;
  s.param = text(required(v, path, "param"), join(path, "param"));
  if (!is_sweepable(s.param)) fail(join(path, "param"), "parameter '" + s.param + "' cannot be swept");
  s.from = number(required(v, path, "from"), join(path, "from"));
  s.to = number(required(v, path, "to"), join(path, "to"));
  s.points = integer(required(v, path, "points"), join(path, "points"));
  if (s.points < 2) fail(join(path, "points"), "a sweep needs at least 2 points");
  if (member(v, "mark")) s.mark = number(v["mark"], join(path, "mark"));
  return s;
}

json frequency_json(double angular_value) { return {{"value", angular_value / kTwoPi}, {"unit", "Hz"}}; }

json integrator_json(const dynamics::IntegratorConfig& cfg) {
  json j = {{"method", dynamics::to_string(cfg.method)},
            {"points_per_period", cfg.points_per_period},
            {"rtol", cfg.rtol},
            {"atol", cfg.atol},
            {"store_every", cfg.store_every}};
  if (cfg.dt > 0.0) j["dt"] = {{"value", cfg.dt}, {"unit", "s"}};
  if (cfg.max_step > 0.0) j["max_step"] = {{"value", cfg.max_step}, {"unit", "s"}};
  return j;
}

}  // namespace

double frequency_from_unit(double value, const std::string& unit, const std::string& path) {
  if (unit == "GHz") return ghz(value);
  if (unit == "MHz") return mhz(value);
  if (unit == "kHz") return khz(value);
  if (unit == "Hz") return angular(value);
  if (unit == "rad/s") return value;
  fail(path, "unknown frequency unit '" + unit + "' (expected GHz, MHz, kHz, Hz or rad/s)");
}

Scenario parse_scenario(const json& doc) {
  check_keys(doc, "", {"schema_version", "name", "description", "system", "drive", "design", "model",
                       "effective_model", "dissipation", "initial_state", "fock_cutoff", "grid", "integrator",
                       "effective_integrator", "outputs", "validity", "sweep"});
  Scenario s;
  if (member(doc, "schema_version")) {
    const int version = integer(doc["schema_version"], "schema_version");
    if (version != kSchemaVersion) fail("schema_version", "unsupported version " + std::to_string(version));
  }
  s.name = member(doc, "name") ? text(doc["name"], "name") : "scenario";
  if (member(doc, "description")) s.description = text(doc["description"], "description");
  s.system = parse_system(required(doc, "", "system"), "system");

  const bool has_drive = member(doc, "drive") != nullptr;
  const bool has_design = member(doc, "design") != nullptr;
  if (has_drive == has_design) fail("drive", "give exactly one of 'drive' or 'design'");
  if (has_drive) {
    s.drive = parse_drive(doc["drive"], "drive");
  } else {
    s.design = parse_design(doc["design"], "design");
    s.drive = design_drive(s.system, *s.design).drive;
  }

  if (member(doc, "model")) {
    const auto m = text(doc["model"], "model");
    if (m == "rotated_exact") s.model = ModelChoice::RotatedExact;
    else if (m == "effective") s.model = ModelChoice::Effective;
    else if (m == "both") s.model = ModelChoice::Both;
    else fail("model", "expected rotated_exact, effective or both");
  }
  if (member(doc, "effective_model")) {
    s.effective_kind = parse_effective_kind(text(doc["effective_model"], "effective_model"), "effective_model");
  }
  if (member(doc, "dissipation")) {
    if (!doc["dissipation"].is_boolean()) fail("dissipation", "expected true or false");
    s.dissipation = doc["dissipation"].get<bool>();
  }
  if (member(doc, "initial_state")) {
    const auto st = text(doc["initial_state"], "initial_state");
    if (st == "vac_g") s.initial_state = quantum::QubitLevel::Ground;
    else if (st == "vac_e") s.initial_state = quantum::QubitLevel::Excited;
    else fail("initial_state", "expected vac_g or vac_e");
  }
  if (member(doc, "fock_cutoff")) {
    s.fock_cutoff = integer(doc["fock_cutoff"], "fock_cutoff");
    if (s.fock_cutoff < 2 || s.fock_cutoff > 1000) fail("fock_cutoff", "must lie in [2, 1000]");
  }

  const json& grid = required(doc, "", "grid");
  check_keys(grid, "grid", {"t_end", "samples"});
  s.t_end = time_value(required(grid, "grid", "t_end"), "grid.t_end", true);
  s.samples = integer(required(grid, "grid", "samples"), "grid.samples");
  if (s.samples < 2) fail("grid.samples", "must be >= 2");

  s.integrator = member(doc, "integrator") ? parse_integrator(doc["integrator"], "integrator", {})
                                           : dynamics::IntegratorConfig{};
  dynamics::IntegratorConfig eff_default;
  eff_default.method = dynamics::Method::AdaptiveRK45;
  eff_default.rtol = 1e-10;
  eff_default.atol = 1e-12;
  s.effective_integrator = member(doc, "effective_integrator")
                               ? parse_integrator(doc["effective_integrator"], "effective_integrator", eff_default)
                               : eff_default;

  if (member(doc, "outputs")) {
    const json& outs = doc["outputs"];
    if (!outs.is_array() || outs.empty()) fail("outputs", "expected a non-empty array of column names");
    const auto& columns = timeseries_columns();
    for (std::size_t i = 0; i < outs.size(); ++i) {
      const auto name = text(outs[i], "outputs[" + std::to_string(i) + "]");
      if (name == "time_s") continue;
      if (std::find(columns.begin(), columns.end(), name) == columns.end()) {
        fail("outputs[" + std::to_string(i) + "]", "unknown observable '" + name + "'");
      }
      if (name == "fidelity" && s.model != ModelChoice::Both) {
        fail("outputs[" + std::to_string(i) + "]", "fidelity requires model 'both'");
      }
      s.outputs.push_back(name);
    }
  } else {
    for (const auto& c : timeseries_columns()) {
      if (c == "time_s" || (c == "fidelity" && s.model != ModelChoice::Both)) continue;
      s.outputs.push_back(c);
    }
  }

  if (member(doc, "validity")) {
    const json& v = doc["validity"];
    check_keys(v, "validity", {"dispersive_ratio", "detuning_ratio", "rwa_margin", "window"});
    if (member(v, "dispersive_ratio")) s.thresholds.dispersive_ratio = number(v["dispersive_ratio"], "validity.dispersive_ratio");
    if (member(v, "detuning_ratio")) s.thresholds.detuning_ratio = number(v["detuning_ratio"], "validity.detuning_ratio");
    if (member(v, "rwa_margin")) s.thresholds.rwa_margin = number(v["rwa_margin"], "validity.rwa_margin");
    if (member(v, "window")) s.thresholds.window = integer(v["window"], "validity.window");
    if (!(s.thresholds.rwa_margin > 1.0)) fail("validity.rwa_margin", "must be > 1");
    if (!(s.thresholds.dispersive_ratio > 0.0)) fail("validity.dispersive_ratio", "must be > 0");
    if (!(s.thresholds.detuning_ratio > 0.0)) fail("validity.detuning_ratio", "must be > 0");
    if (s.thresholds.window < 1 || s.thresholds.window > 30) fail("validity.window", "must lie in [1, 30]");
  }
  if (member(doc, "sweep")) s.sweep = parse_sweep(doc["sweep"], "sweep");
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario(read_json(path)); }

json to_json(const Scenario& s) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = s.name;
  if (!s.description.empty()) j["description"] = s.description;
  j["system"] = {{"epsilon", frequency_json(s.system.epsilon)},
                 {"omega", frequency_json(s.system.omega)},
                 {"g", frequency_json(s.system.g)},
                 {"kappa", frequency_json(s.system.kappa)},
                 {"gamma", frequency_json(s.system.gamma)}};
  j["drive"] = {{"omega1", frequency_json(s.drive.omega1)},
                {"omega2", frequency_json(s.drive.omega2)},
                {"eta1", s.drive.eta1},
                {"eta2", s.drive.eta2},
                {"phi1", s.drive.phi1},
                {"phi2", s.drive.phi2}};
  j["model"] = to_string(s.model);
  j["effective_model"] = effective_kind_name(s.effective_kind);
  j["dissipation"] = s.dissipation;
  j["initial_state"] = s.initial_state == quantum::QubitLevel::Ground ? "vac_g" : "vac_e";
  j["fock_cutoff"] = s.fock_cutoff;
  j["grid"] = {{"t_end", {{"value", s.t_end.value}, {"unit", s.t_end.unit}}}, {"samples", s.samples}};
  j["integrator"] = integrator_json(s.integrator);
  j["effective_integrator"] = integrator_json(s.effective_integrator);
  j["outputs"] = s.outputs;
  j["validity"] = {{"dispersive_ratio", s.thresholds.dispersive_ratio},
                   {"detuning_ratio", s.thresholds.detuning_ratio},
                   {"rwa_margin", s.thresholds.rwa_margin},
                   {"window", s.thresholds.window}};
  if (s.sweep) {
    j["sweep"] = {{"param", s.sweep->param}, {"from", s.sweep->from}, {"to", s.sweep->to},
                  {"points", s.sweep->points}};
    if (s.sweep->mark) j["sweep"]["mark"] = *s.sweep->mark;
  }
  return j;
}

double resolve_t_end(const Scenario& s, const EffectiveParams& eff) {
  if (s.t_end.unit != "effective_periods") return s.t_end.value;
  if (eff.omega_eff == 0.0) fail("grid.t_end.unit", "effective_periods undefined when omega_eff = 0");
  return s.t_end.value * kTwoPi / std::abs(eff.omega_eff);
}

bool is_sweepable(const std::string& p) {
  static const std::set<std::string> params = {"drive.eta1",   "drive.eta2", "drive.phi1", "drive.phi2",
                                               "drive.omega1", "drive.omega2", "system.g", "fock_cutoff"};
  return params.count(p) > 0;
}

void apply_parameter(Scenario& s, const std::string& p, double value) {
  if (!std::isfinite(value)) fail(p, "sweep value must be finite");
  if (p == "drive.eta1") s.drive.eta1 = value;
  else if (p == "drive.eta2") s.drive.eta2 = value;
  else if (p == "drive.phi1") s.drive.phi1 = value;
  else if (p == "drive.phi2") s.drive.phi2 = value;
  else if (p == "drive.omega1") s.drive.omega1 = angular(value);
  else if (p == "drive.omega2") s.drive.omega2 = angular(value);
  else if (p == "system.g") s.system.g = angular(value);
  else if (p == "fock_cutoff") {
    const double rounded = std::round(value);
    if (rounded < 2 || rounded > 1000) fail(p, "must lie in [2, 1000]");
    s.fock_cutoff = static_cast<int>(rounded);
  } else {
    fail(p, "parameter cannot be swept");
  }
  try {
    s.system.validate();
    s.drive.validate();
  } catch (const ValidationError& e) {
    fail(p, e.what());
  }
}

double coupling_ratio(const EffectiveParams& eff) {
  const double g = std::max(std::abs(eff.g_r), std::abs(eff.g_cr));
  return eff.omega_eff == 0.0 ? std::numeric_limits<double>::infinity() : g / std::abs(eff.omega_eff);
}

DesignResult design_drive(const SystemParams& sys, const DesignRequest& r) {
  sys.validate();
  DesignResult out;
  out.amplitudes = solve_amplitudes(r.lambda, r.tuned, r.anchor);
  const Detunings base = detunings(sys, DriveParams{1.0, 1.0, 0.0, 0.0, 0.0, 0.0});
  out.drive.eta1 = out.amplitudes.eta1;
  out.drive.eta2 = out.amplitudes.eta2;
  out.drive.omega1 = base.delta_minus + r.delta1;
  if (!(out.drive.omega1 > 0.0)) throw UnreachableTarget("design: red-sideband drive frequency would be <= 0");

  double delta2;
  if (r.delta2) {
    delta2 = *r.delta2;
  } else {
    if (!(*r.gratio > 0.0) || !std::isfinite(*r.gratio)) throw ValidationError("design: gratio must be > 0");
    EffectiveParams probe = effective_params(sys, DriveParams{1.0, 1.0, out.drive.eta1, out.drive.eta2, 0.0, 0.0});
    const double g_dom = std::max(std::abs(probe.g_r), std::abs(probe.g_cr));
    // ω̃ = (δ₁ + δ₂)/2 = g_dom / gratio
    delta2 = 2.0 * g_dom / *r.gratio - r.delta1;
  }
  out.drive.omega2 = base.delta_plus - delta2;
  if (!(out.drive.omega2 > 0.0)) {
    throw UnreachableTarget("design: blue-sideband detuning " + format_double(delta2 / kTwoPi) +
                            " Hz exceeds the sum frequency");
  }
  out.drive.validate();
  out.effective = effective_params(sys, out.drive);
  out.coupling_ratio = coupling_ratio(out.effective);
  return out;
}

}  // namespace modrabi::cli
