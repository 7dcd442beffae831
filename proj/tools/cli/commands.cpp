#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "modrabi/applications.hpp"
#include "modrabi/errors.hpp"
#include "modrabi/hamiltonians.hpp"

namespace modrabi::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace modrabi::modulation;
using dynamics::Trajectory;
using quantum::HilbertSpace;
using quantum::QubitLevel;

int report_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const UnreachableTarget& e) {
    err << "unreachable target: " << e.what() << "\n";
    return kExitUnreachable;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int worker_threads() {
  if (const char* env = std::getenv("MODRABI_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(std::min(n, 1024L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

json json_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

namespace {

double hz(double angular_value) { return angular_value / kTwoPi; }

}  // namespace

json effective_json(const EffectiveParams& eff) {
  return {{"g_r_hz", hz(eff.g_r)},
          {"g_cr_hz", hz(eff.g_cr)},
          {"omega_eff_hz", hz(eff.omega_eff)},
          {"epsilon_eff_hz", hz(eff.epsilon_eff)},
          {"delta1_hz", hz(eff.delta1())},
          {"delta2_hz", hz(eff.delta2())},
          {"phi1", eff.phi1},
          {"phi2", eff.phi2},
          {"theta", eff.theta},
          {"lambda", json_number(eff.lambda)},
          {"rt_ratio", json_number(eff.rt_ratio())},
          {"crt_ratio", json_number(eff.crt_ratio())},
          {"coupling_ratio", json_number(coupling_ratio(eff))}};
}

json validity_json(const ValidityReport& r) {
  return {{"dispersive_ratio", r.dispersive_ratio},
          {"detuning_ratio", json_number(r.detuning_ratio)},
          {"rwa_margin", json_number(r.rwa_margin)},
          {"worst_term", {{"family", std::string(1, r.worst_family)}, {"n1", r.worst_n1}, {"n2", r.worst_n2}}},
          {"dispersive_pass", r.dispersive_pass},
          {"detuning_pass", r.detuning_pass},
          {"rwa_pass", r.rwa_pass},
          {"pass", r.pass()},
          {"thresholds",
           {{"dispersive_ratio", r.thresholds.dispersive_ratio},
            {"detuning_ratio", r.thresholds.detuning_ratio},
            {"rwa_margin", r.thresholds.rwa_margin},
            {"window", r.thresholds.window}}}};
}

json diagnostics_json(const dynamics::Diagnostics& d) {
  return {{"steps", d.steps},
          {"rejected_steps", d.rejected_steps},
          {"dt_s", d.dt},
          {"max_norm_drift", d.max_norm_drift},
          {"max_trace_drift", d.max_trace_drift},
          {"min_eigenvalue", d.min_eigenvalue},
          {"max_top_fock_population", d.max_top_fock_population},
          {"cutoff_adequate", d.cutoff_adequate}};
}

const Trajectory& SimulationResult::primary() const { return rotated ? *rotated : *ideal; }

bool SimulationResult::cutoff_adequate() const {
  return (!rotated || rotated->diagnostics.cutoff_adequate) && (!ideal || ideal->diagnostics.cutoff_adequate);
}

namespace {

struct Prepared {
  EffectiveParams eff;
  ValidityReport validity;
  double t_end = 0.0;
  HilbertSpace space{1, 2};
  std::optional<hamiltonians::TimeDependentHamiltonian> rotated;
  std::optional<hamiltonians::TimeDependentHamiltonian> ideal;
};

// Everything that can fail validation happens here, before any integration.
Prepared prepare(const Scenario& s) {
  s.system.validate();
  s.drive.validate();
  if (s.samples < 2) throw ValidationError("grid.samples: must be >= 2");
  Prepared p;
  p.eff = effective_params(s.system, s.drive);
  p.validity = validity_report(s.system, s.drive, s.thresholds);
  p.t_end = resolve_t_end(s, p.eff);
  dynamics::TimeGrid{0.0, p.t_end, s.samples}.validate();
  p.space = HilbertSpace(1, s.fock_cutoff);
  if (s.model != ModelChoice::Effective) p.rotated = hamiltonians::rotated_hamiltonian(s.system, s.drive, p.space);
  if (s.model != ModelChoice::RotatedExact) {
    try {
      p.ideal = s.effective_kind == hamiltonians::ModelKind::Effective
                    ? hamiltonians::effective_hamiltonian(p.eff, p.space)
                    : hamiltonians::model(s.effective_kind, p.eff, p.space);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("effective_model: ") + e.what());
    }
  }
  return p;
}

}  // namespace

SimulationResult run_simulation(const Scenario& scenario) {
  Prepared p = prepare(scenario);
  SimulationResult r;
  r.scenario = scenario;
  r.effective = p.eff;
  r.validity = p.validity;
  r.t_end = p.t_end;

  const dynamics::TimeGrid grid{0.0, p.t_end, scenario.samples};
  const QubitLevel levels[] = {scenario.initial_state};
  const auto psi0 = quantum::PureState::product(p.space, levels, 0);
  const bool both = scenario.model == ModelChoice::Both;

  if (p.ideal) {
    auto cfg = scenario.effective_integrator;
    cfg.store_every = scenario.integrator.store_every;
    cfg.store_states = both;
    r.ideal = dynamics::evolve_schrodinger(*p.ideal, psi0, grid, cfg);
  }
  if (p.rotated) {
    auto cfg = scenario.integrator;
    cfg.store_states = both;
    if (scenario.dissipation) {
      const auto dissipators = dynamics::standard_dissipators(p.space, scenario.system.kappa, scenario.system.gamma);
      r.rotated = dynamics::evolve_master(*p.rotated, dissipators, quantum::DensityMatrix::pure(psi0), grid, cfg);
    } else {
      r.rotated = dynamics::evolve_schrodinger(*p.rotated, psi0, grid, cfg);
    }
  }
  if (both) {
    r.fidelity = dynamics::fidelity_series(*r.ideal, *r.rotated);
    r.ideal->states.clear();
    r.rotated->states.clear();
  }
  return r;
}

namespace {

std::vector<double> column(const SimulationResult& r, const Trajectory& t, const std::string& name) {
  if (name == "fidelity") return r.fidelity;
  if (!t.mixed && (name == "trace" || name == "purity")) {
    std::vector<double> out;
    for (double norm : t.observable("norm")) {
      const double tr = norm * norm;
      out.push_back(name == "trace" ? tr : tr * tr);
    }
    return out;
  }
  return t.observable(name);
}

CsvTable table_for(const SimulationResult& r, const Trajectory& t, const std::vector<std::string>& names) {
  std::vector<std::string> header = {"time_s"};
  std::vector<std::vector<double>> cols;
  for (const auto& c : timeseries_columns()) {
    if (std::find(names.begin(), names.end(), c) == names.end()) continue;
    header.push_back(c);
    cols.push_back(column(r, t, c));
  }
  CsvTable table(header);
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    std::vector<double> row = {t.times[i]};
    for (const auto& c : cols) row.push_back(c.at(i));
    table.add_row(row);
  }
  return table;
}

}  // namespace

CsvTable timeseries_table(const SimulationResult& r) { return table_for(r, r.primary(), r.scenario.outputs); }

CsvTable effective_table(const SimulationResult& r) {
  if (!r.ideal) throw std::logic_error("effective_table: no effective run");
  return table_for(r, *r.ideal, {"sigma_pop", "photon_number", "trace", "top_fock_pop"});
}

json simulation_manifest(const SimulationResult& r, const std::vector<std::string>& files) {
  json m;
  m["schema_version"] = kSchemaVersion;
  m["command"] = "simulate";
  m["scenario"] = to_json(r.scenario);
  m["resolved"] = {{"t_end_s", r.t_end},
                   {"samples", r.scenario.samples},
                   {"hilbert_dim", 2 * r.scenario.fock_cutoff}};
  json cols = json::array({"time_s"});
  for (const auto& c : timeseries_columns()) {
    if (std::find(r.scenario.outputs.begin(), r.scenario.outputs.end(), c) != r.scenario.outputs.end()) {
      cols.push_back(c);
    }
  }
  m["resolved"]["csv_columns"] = cols;
  m["effective"] = effective_json(r.effective);
  m["validity"] = validity_json(r.validity);
  json diag;
  if (r.rotated) {
    diag["rotated_exact"] = diagnostics_json(r.rotated->diagnostics);
    diag["rotated_exact"]["evolution"] = r.rotated->mixed ? "master" : "schrodinger";
  }
  if (r.ideal) {
    diag["effective"] = diagnostics_json(r.ideal->diagnostics);
    diag["effective"]["model"] = hamiltonians::to_string(r.scenario.effective_kind);
  }
  m["diagnostics"] = diag;
  if (!r.fidelity.empty()) {
    m["fidelity"] = {{"min", *std::min_element(r.fidelity.begin(), r.fidelity.end())},
                     {"final", r.fidelity.back()}};
  }
  m["cutoff_adequate"] = r.cutoff_adequate();
  m["status"] = r.cutoff_adequate() ? "ok" : "cutoff_inadequate";
  m["files"] = files;
  return m;
}

int cmd_simulate(const fs::path& scenario_path, const fs::path& out_dir, std::ostream& out) {
  const Scenario scenario = load_scenario(scenario_path);
  const SimulationResult r = run_simulation(scenario);
  std::vector<std::string> files = {"timeseries.csv"};
  write_atomic(out_dir / "timeseries.csv", timeseries_table(r).str());
  if (r.scenario.model == ModelChoice::Both) {
    write_atomic(out_dir / "effective.csv", effective_table(r).str());
    files.push_back("effective.csv");
  }
  files.push_back("manifest.json");
  write_json(out_dir / "manifest.json", simulation_manifest(r, files));
  out << "wrote " << (out_dir / "manifest.json").string() << "\n";
  if (!r.cutoff_adequate()) {
    throw NumericalError("top Fock population exceeds " + format_double(dynamics::kCutoffTolerance) +
                         "; raise fock_cutoff (results were written)");
  }
  return kExitOk;
}

int cmd_validate(const fs::path& scenario_path, std::ostream& out) {
  const Scenario s = load_scenario(scenario_path);
  const Prepared p = prepare(s);
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "validate";
  j["valid"] = true;
  j["scenario"] = to_json(s);
  j["effective"] = effective_json(p.eff);
  j["validity"] = validity_json(p.validity);
  j["t_end_s"] = p.t_end;
  if (p.rotated) {
    j["rotated_exact_nominal_dt_s"] = dynamics::nominal_step(*p.rotated, s.integrator);
  }
  out << j.dump(2) << "\n";
  return kExitOk;
}

json design_json(const SystemParams& sys, const DesignResult& d, const DesignRequest& req) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "design";
  j["request"] = {{"lambda", json_number(req.lambda)},
                  {"tuned", req.tuned == TunedSideband::Blue ? "blue" : "red"},
                  {"anchor", req.anchor},
                  {"delta1_hz", hz(req.delta1)}};
  if (req.gratio) j["request"]["gratio"] = *req.gratio;
  if (req.delta2) j["request"]["delta2_hz"] = hz(*req.delta2);
  j["drive"] = {{"omega1_hz", hz(d.drive.omega1)},
                {"omega2_hz", hz(d.drive.omega2)},
                {"eta1", d.drive.eta1},
                {"eta2", d.drive.eta2},
                {"amplitude1_hz", hz(d.drive.eta1 * d.drive.omega1)},
                {"amplitude2_hz", hz(d.drive.eta2 * d.drive.omega2)},
                {"phi1", d.drive.phi1},
                {"phi2", d.drive.phi2}};
  j["amplitude_residual"] = d.amplitudes.residual;
  j["effective"] = effective_json(d.effective);
  j["validity"] = validity_json(validity_report(sys, d.drive));
  return j;
}

json design_scenario(const SystemParams& sys, const DesignResult& d) {
  Scenario s;
  s.name = "design";
  s.description = "generated by modrabi design";
  s.system = sys;
  s.drive = d.drive;
  s.t_end = {3.0, "effective_periods"};
  s.samples = 301;
  s.effective_integrator.method = dynamics::Method::AdaptiveRK45;
  s.effective_integrator.rtol = 1e-10;
  s.effective_integrator.atol = 1e-12;
  for (const auto& c : timeseries_columns()) {
    if (c != "time_s") s.outputs.push_back(c);
  }
  json j = to_json(s);
  // The integrator blocks are regenerated from defaults on load.
  j.erase("integrator");
  return j;
}

int cmd_design(const DesignOptions& options, std::ostream& out) {
  const SystemParams sys = SystemParams::circuit_qed_reference();
  const DesignResult d = design_drive(sys, options.request);
  if (options.emit_scenario) {
    write_json(*options.emit_scenario, design_scenario(sys, d));
  }
  out << design_json(sys, d, options.request).dump(2) << "\n";
  return kExitOk;
}

std::vector<double> sweep_values(const SweepSpec& spec) {
  if (spec.points < 2) throw ValidationError("sweep.points: a sweep needs at least 2 points");
  std::vector<double> v(static_cast<std::size_t>(spec.points));
  for (int i = 0; i < spec.points; ++i) {
    v[static_cast<std::size_t>(i)] =
        i == spec.points - 1 ? spec.to : spec.from + (spec.to - spec.from) * i / (spec.points - 1);
  }
  return v;
}

std::vector<SweepPoint> run_sweep(const Scenario& base, const SweepSpec& spec, int threads) {
  const auto values = sweep_values(spec);
  std::vector<Scenario> scenarios;
  for (double v : values) {
    Scenario s = base;
    if (s.model == ModelChoice::Both) s.model = ModelChoice::RotatedExact;
    s.outputs.erase(std::remove(s.outputs.begin(), s.outputs.end(), "fidelity"), s.outputs.end());
    apply_parameter(s, spec.param, v);
    prepare(s);
    scenarios.push_back(std::move(s));
  }

  std::vector<SweepPoint> points(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < points.size();) {
      SweepPoint& pt = points[i];
      pt.value = values[i];
      try {
        pt.result = run_simulation(scenarios[i]);
        pt.ok = true;
      } catch (const std::exception& e) {
        std::ostringstream msg;
        pt.exit_code = report_exception(msg);
        pt.error = msg.str();
        if (!pt.error.empty() && pt.error.back() == '\n') pt.error.pop_back();
      }
    }
  };
  const int n = std::clamp(threads, 1, static_cast<int>(points.size()));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }
  return points;
}

int cmd_sweep(const SweepOptions& o, std::ostream& out) {
  Scenario base = load_scenario(o.scenario);
  SweepSpec spec = base.sweep.value_or(SweepSpec{});
  if (o.param) {
    if (!is_sweepable(*o.param)) throw ValidationError("--param: parameter '" + *o.param + "' cannot be swept");
    if (spec.param != *o.param) spec.mark.reset();
    spec.param = *o.param;
  }
  if (o.from) spec.from = *o.from;
  if (o.to) spec.to = *o.to;
  if (o.points) spec.points = *o.points;
  if (spec.param.empty()) throw ValidationError("--param: no sweep parameter given and the scenario has no sweep block");
  if (spec.points < 2) throw ValidationError("--points: a sweep needs at least 2 points");

  const auto points = run_sweep(base, spec, o.threads);

  CsvTable grid({"sweep_value", "time_s", "sigma_pop", "photon_number"});
  CsvTable summary({"sweep_value", "status", "peak_sigma_pop", "peak_photon_number", "g_r_hz", "g_cr_hz",
                    "omega_eff_hz", "cutoff_adequate"});
  json failures = json::array();
  std::optional<std::size_t> best;
  double best_peak = -1.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    if (!pt.ok) {
      summary.add_row(std::vector<std::string>{format_double(pt.value), "failed", "", "", "", "", "", ""});
      failures.push_back({{"index", i}, {"sweep_value", pt.value}, {"exit_code", pt.exit_code}, {"error", pt.error}});
      continue;
    }
    const auto& traj = pt.result->primary();
    const auto& sigma = traj.observable("sigma_pop");
    const auto& photons = traj.observable("photon_number");
    for (std::size_t k = 0; k < traj.times.size(); ++k) grid.add_row({pt.value, traj.times[k], sigma[k], photons[k]});
    const double peak_sigma = *std::max_element(sigma.begin(), sigma.end());
    const double peak_photons = *std::max_element(photons.begin(), photons.end());
    if (peak_photons > best_peak) {
      best_peak = peak_photons;
      best = i;
    }
    const auto& eff = pt.result->effective;
    summary.add_row(std::vector<std::string>{
        format_double(pt.value), pt.result->cutoff_adequate() ? "ok" : "cutoff_inadequate",
        format_double(peak_sigma), format_double(peak_photons), format_double(hz(eff.g_r)),
        format_double(hz(eff.g_cr)), format_double(hz(eff.omega_eff)),
        pt.result->cutoff_adequate() ? "true" : "false"});
  }

  write_atomic(o.out_dir / "sweep.csv", grid.str());
  write_atomic(o.out_dir / "sweep_summary.csv", summary.str());

  json m;
  m["schema_version"] = kSchemaVersion;
  m["command"] = "sweep";
  m["scenario"] = to_json(base);
  m["sweep"] = {{"param", spec.param}, {"from", spec.from}, {"to", spec.to}, {"points", spec.points}};
  m["threads"] = std::clamp(o.threads, 1, spec.points);
  m["values"] = sweep_values(spec);
  if (spec.mark) {
    const auto values = sweep_values(spec);
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (std::abs(values[i] - *spec.mark) < std::abs(values[nearest] - *spec.mark)) nearest = i;
    }
    m["mark"] = {{"value", *spec.mark}, {"nearest_index", nearest}, {"nearest_value", values[nearest]}};
  }
  if (best) m["peak_photon_number"] = {{"index", *best}, {"sweep_value", points[*best].value}, {"value", best_peak}};
  m["failures"] = failures;
  m["status"] = failures.empty() ? "ok" : "partial";
  m["files"] = {"sweep.csv", "sweep_summary.csv", "manifest.json"};
  write_json(o.out_dir / "manifest.json", m);
  out << "wrote " << (o.out_dir / "manifest.json").string() << " (" << points.size() - failures.size() << "/"
      << points.size() << " points)\n";
  if (!failures.empty()) {
    int code = kExitOk;
    for (const auto& pt : points) code = std::max(code, pt.ok ? 0 : pt.exit_code);
    return code;
  }
  return kExitOk;
}

namespace {

void check_ratio(double ratio, double omega_hz, int cutoff) {
  if (!std::isfinite(ratio) || ratio < 0.0) throw ValidationError("--gratio: must be finite and >= 0");
  if (!std::isfinite(omega_hz) || omega_hz <= 0.0) throw ValidationError("--omega-hz: must be > 0");
  if (cutoff < 2) throw ValidationError("--cutoff: must be >= 2");
}

std::vector<double> fock_populations(const quantum::PureState& psi) {
  std::vector<double> p;
  for (Index n = 0; n < psi.amplitudes().size(); ++n) p.push_back(std::norm(psi.amplitudes()(n)));
  return p;
}

double cross_parity(const std::vector<double>& pops, applications::Parity parity) {
  const std::size_t wrong = parity == applications::Parity::Even ? 1 : 0;
  double sum = 0.0;
  for (std::size_t n = wrong; n < pops.size(); n += 2) sum += pops[n];
  return sum;
}

}  // namespace

int cmd_cat(const CatOptions& o, std::ostream& out) {
  check_ratio(o.coupling_ratio, o.omega_hz, o.cutoff);
  if (!(o.fraction > 0.0) || !std::isfinite(o.fraction)) throw ValidationError("--fraction: must be > 0");
  if (o.samples < 2) throw ValidationError("--samples: must be >= 2");
  const double omega = angular(o.omega_hz);
  const double g = o.coupling_ratio * omega;
  const double t = o.fraction * kTwoPi / omega;

  CsvTable path({"time_s", "xi_re", "xi_im", "xi_abs", "phase"});
  for (int i = 0; i < o.samples; ++i) {
    const double ti = t * i / (o.samples - 1);
    const auto mp = applications::magnus_phase(g, omega, ti);
    path.add_row({ti, mp.xi.real(), mp.xi.imag(), std::abs(mp.xi), mp.phi});
  }

  const HilbertSpace space(1, o.cutoff);
  const auto mp = applications::magnus_phase(g, omega, t);
  const auto state = applications::cat_evolution(g, omega, t, space);
  const auto even = applications::conditional_cat(state.value, QubitLevel::Ground, mp.xi);
  const auto odd = applications::conditional_cat(state.value, QubitLevel::Excited, mp.xi);
  const auto even_pops = fock_populations(even.cat.state);
  const auto odd_pops = fock_populations(odd.cat.state);
  CsvTable fock({"n", "even_population", "odd_population"});
  for (std::size_t n = 0; n < even_pops.size(); ++n) {
    fock.add_row({static_cast<double>(n), even_pops[n], odd_pops[n]});
  }
  const double overlap = std::exp(-2.0 * std::norm(mp.xi));

  json m;
  m["schema_version"] = kSchemaVersion;
  m["command"] = "applications cat";
  m["parameters"] = {{"coupling_ratio", o.coupling_ratio}, {"omega_eff_hz", o.omega_hz}, {"time_s", t},
                     {"fraction", o.fraction}, {"fock_cutoff", o.cutoff}};
  m["xi"] = {{"re", mp.xi.real()}, {"im", mp.xi.imag()}, {"abs", std::abs(mp.xi)},
             {"max_abs", 2.0 * o.coupling_ratio}};
  m["phase"] = mp.phi;
  m["probabilities"] = {{"ground_even", even.probability},
                        {"excited_odd", odd.probability},
                        {"expected_even", 0.5 * (1.0 + overlap)},
                        {"expected_odd", 0.5 * (1.0 - overlap)}};
  m["cross_parity_population"] = {{"even", cross_parity(even_pops, applications::Parity::Even)},
                                  {"odd", cross_parity(odd_pops, applications::Parity::Odd)}};
  m["tail_mass"] = state.tail_mass;
  m["cutoff_adequate"] = state.adequate();
  m["files"] = {"cat_path.csv", "cat_fock.csv", "cat.json"};
  write_atomic(o.out_dir / "cat_path.csv", path.str());
  write_atomic(o.out_dir / "cat_fock.csv", fock.str());
  write_json(o.out_dir / "cat.json", m);
  out << m.dump(2) << "\n";
  if (!state.adequate()) throw NumericalError("coherent tail mass exceeds tolerance; raise --cutoff");
  return kExitOk;
}

int cmd_gate(const GateOptions& o, std::ostream& out) {
  check_ratio(o.coupling_ratio, o.omega_hz, o.cutoff);
  const double omega = angular(o.omega_hz);
  const double g = o.coupling_ratio * omega;
  const double period = kTwoPi / omega;
  const double theta = applications::gate_angle(o.coupling_ratio);
  const auto gate = applications::gate_at_period(g, omega);
  const auto check = applications::cnot_equivalence_check(gate.matrix());

  // The resonator returns to vacuum at the period, so the qubit block of the
  // full propagator must reproduce the gate.
  const HilbertSpace space(2, o.cutoff);
  const auto full = applications::magnus_propagator(g, omega, period, space);
  Matrix block(4, 4);
  std::vector<Index> idx;
  for (int q1 = 0; q1 < 2; ++q1) {
    for (int q2 = 0; q2 < 2; ++q2) {
      const QubitLevel lv[] = {static_cast<QubitLevel>(q1), static_cast<QubitLevel>(q2)};
      idx.push_back(space.index(lv, 0));
    }
  }
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) block(r, c) = full.value.matrix()(idx[r], idx[c]);
  }
  const double full_residual = applications::phase_insensitive_residual(block, gate.matrix());

  CsvTable matrix({"row", "col", "re", "im"});
  json rows = json::array();
  for (int r = 0; r < 4; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c) {
      const Complex z = gate.matrix()(r, c);
      matrix.add_row({static_cast<double>(r), static_cast<double>(c), z.real(), z.imag()});
      row.push_back({z.real(), z.imag()});
    }
    rows.push_back(row);
  }

  json m;
  m["schema_version"] = kSchemaVersion;
  m["command"] = "applications gate";
  m["parameters"] = {{"coupling_ratio", o.coupling_ratio}, {"omega_eff_hz", o.omega_hz}, {"period_s", period},
                     {"fock_cutoff", o.cutoff}};
  m["theta"] = theta;
  m["entangling_power"] = applications::entangling_power(theta);
  m["gate"] = rows;
  m["cnot"] = {{"residual_control_first", check.residual_control_first},
               {"residual_control_second", check.residual_control_second},
               {"equivalent", check.equivalent},
               {"matched", check.matched},
               {"tolerance", applications::kCnotTolerance}};
  m["full_space"] = {{"qubit_block_residual", full_residual}, {"tail_mass", full.tail_mass}};
  m["files"] = {"gate_matrix.csv", "gate.json"};
  write_atomic(o.out_dir / "gate_matrix.csv", matrix.str());
  write_json(o.out_dir / "gate.json", m);
  out << m.dump(2) << "\n";
  return kExitOk;
}

}  // namespace modrabi::cli
